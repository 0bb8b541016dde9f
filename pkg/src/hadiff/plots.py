"""Static SVG charts: Betti tables and Hilbert functions."""
from __future__ import annotations

from pathlib import Path

from .exactalg import num_monomials
from .freecomplex import FreeComplex


def betti_grid(F: FreeComplex):
    """Macaulay-style table: rows are (degree - homological index), columns the index."""
    table = F.betti_table()
    cols = sorted(table)
    rows = sorted({d - i for i, row in table.items() for d in row})
    body = [[table[i].get(rw + i, 0) for i in cols] for rw in rows]
    return rows, cols, body


def hilbert_values(F: FreeComplex, lo: int, hi: int) -> list[int]:
    """Alternating sum of the free-module dimensions over the resolution terms
    (internal degree); for image-type complexes this is the resolved module."""
    n = F.nvars
    out = []
    for d in range(lo, hi + 1):
        total = 0
        for i in F.resolution_terms():
            sgn = -1 if F.hom_index(i) % 2 else 1
            total += sgn * sum(num_monomials(n, d - g) for g in F.degrees[i])
        out.append(total)
    return out


def _complexes(obj):
    if "records" in obj:
        raise ValueError("grid reports carry summaries only; plot a resolve or jet output")
    if "resolution" in obj:
        yield "jet", FreeComplex.from_json(obj["resolution"])
    elif "degrees" in obj:
        yield "res", FreeComplex.from_json(obj)
    else:
        raise ValueError("no resolution found in file")


def plot_file(obj: dict, out_dir: Path, degree_bound: int = 12) -> list[Path]:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "hadiff"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for tag, F in _complexes(obj):
        rows, cols, body = betti_grid(F)
        fig, ax = plt.subplots(figsize=(1 + 0.7 * len(cols), 0.8 + 0.35 * len(rows)))
        ax.axis("off")
        cells = [[str(v) if v else "." for v in row] for row in body]
        tab = ax.table(cellText=cells, rowLabels=[str(r) for r in rows],
                       colLabels=[str(c) for c in cols], loc="center", cellLoc="center")
        tab.scale(1, 1.3)
        ax.set_title("Betti table")
        p = out_dir / f"{tag}_betti.svg"
        fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(p)

        lo = min(min(ds) for ds in F.degrees if ds)
        ys = hilbert_values(F, lo, degree_bound)
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.plot(range(lo, degree_bound + 1), ys, marker="o", lw=1)
        ax.set_xlabel("internal degree")
        ax.set_ylabel("dimension")
        ax.set_title("Hilbert function")
        p = out_dir / f"{tag}_hilbert.svg"
        fig.tight_layout()
        fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(p)
    return written
