"""Sweeps over (n, r, m) triples with a deterministic JSON record per point."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor

from .arrangement import Arrangement, check_generic, random_generic
from .freebasis import Case, classify, expected_exponents, free_basis
from .resolution import (
    build_F_resolution,
    minimal_generators_Xi,
    nonfree_inequality,
    num_generators_Xi,
    operators_rank,
    verify_resolution,
)
from .saito import exp_identities_hold, exp_multiset, saito_holm_check

DEFAULT_GRID = {
    "points": [{"n": n, "r": r, "m": m}
               for n in (2, 3, 4) for r in range(n, 9) for m in range(1, 5)],
    "seed": 0,
}


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("HADIFF_THREADS", "1")))
    except ValueError:
        return 1


def _summary(rep: dict) -> dict:
    keep = ("dd_zero", "homogeneous", "generic_ranks", "minimal")
    out = {k: rep[k]["ok"] for k in keep}
    out["truncated_exact"] = rep["truncated_exact"]["ok"]
    out["failures"] = rep["truncated_exact"]["failures"]
    for k in ("ok", "ranks", "regularity", "projective_dimension", "degree_bound",
              "expected_regularity", "expected_projective_dimension", "shifts_match",
              "shifts_match_stated", "regularity_flags", "xi_regularities", "depth"):
        if k in rep:
            out[k] = rep[k]
    return out


def run_point(point: dict, defaults: dict | None = None) -> dict:
    defaults = defaults or {}
    n, r, m = point["n"], point["r"], point["m"]
    seed = point.get("seed", defaults.get("seed", 0))
    rec = {"n": n, "r": r, "m": m, "seed": seed, "ok": True}
    if "forms" in point:
        arr = Arrangement(n, point["forms"])
    else:
        arr = random_generic(n, r, seed)
    rec["forms"] = [list(f) for f in arr.forms]
    gen = check_generic(arr)
    rec["generic"] = gen is True
    if gen is not True:
        rec["ok"] = False
        rec["witness"] = list(gen)
        return rec
    case = classify(n, arr.r, m)
    rec["case"] = case.value
    if case is not Case.NON_FREE:
        _, ops, ext = free_basis(arr, m, seed)
        sh = saito_holm_check(ops, arr)
        exps = exp_multiset(ops)
        want = expected_exponents(n, arr.r, m)
        rec["basis_count"] = len(ops)
        rec["saito_holm"] = {"basis": sh["basis"], "c": str(sh["c"]), "det_degree": sh["det_degree"]}
        rec["exp"] = {str(k): v for k, v in exps.items()}
        rec["exp_match"] = exps == want
        rec["exp_identities"] = exp_identities_hold(exps, n, arr.r, m)
        rec["extension_forms"] = ext
        rec["ok"] = sh["basis"] and rec["exp_match"] and rec["exp_identities"]
        return rec
    bound = point.get("degree_bound", defaults.get("degree_bound"))
    _, gens = minimal_generators_Xi(arr, m)
    rec["generator_count"] = len(gens)
    rec["generator_rank"] = operators_rank(gens)
    rec["generator_count_expected"] = num_generators_Xi(n, arr.r, m)
    rec["nonfree_inequality"] = nonfree_inequality(n, arr.r, m)
    F = build_F_resolution(arr, m)
    rep = verify_resolution(F, arr, m, bound)
    rec["resolution"] = _summary(rep)
    rec["betti"] = {str(k): {str(d): c for d, c in v.items()} for k, v in F.betti_table().items()}
    rec["ok"] = (rec["generator_rank"] == rec["generator_count"] == rec["generator_count_expected"]
                 and rec["nonfree_inequality"] and rep["ok"])
    if point.get("jet", defaults.get("jet", True)):
        from .jet import build_Jm_resolution, coker_presentation, jet_presentation, \
            verify_Jm_resolution
        J = build_Jm_resolution(arr, m, seed)
        jrep = verify_Jm_resolution(J, arr, m, bound)
        rec["jet"] = _summary(jrep)
        rec["jet"]["transpose_equal"] = jet_presentation(arr, m) == coker_presentation(arr, m).transpose()
        rec["ok"] = rec["ok"] and jrep["ok"] and rec["jet"]["transpose_equal"]
    return rec


def _run(args):
    point, defaults = args
    try:
        return run_point(point, defaults)
    except Exception as exc:  # recorded, not raised: one bad point must not sink the sweep
        return {**{k: point.get(k) for k in ("n", "r", "m")}, "ok": False,
                "error": f"{type(exc).__name__}: {exc}"}


def run_grid(config: dict, workers: int | None = None) -> dict:
    points = config.get("points", [])
    defaults = {k: v for k, v in config.items() if k != "points"}
    workers = workers or thread_cap()
    jobs = [(p, defaults) for p in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run, jobs))
    else:
        records = [_run(j) for j in jobs]
    return {"records": records, "all_ok": all(r["ok"] for r in records),
            "count": len(records)}


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def table(report: dict) -> str:
    head = f"{'n':>2} {'r':>2} {'m':>2}  {'case':<8} {'count':>5}  {'reg':>4} {'pd':>3}  status"
    lines = [head, "-" * len(head)]
    for rec in report["records"]:
        if "error" in rec:
            lines.append(f"{rec['n']!s:>2} {rec['r']!s:>2} {rec['m']!s:>2}  ERROR    {rec['error']}")
            continue
        count = rec.get("basis_count", rec.get("generator_count", "-"))
        res = rec.get("resolution", {})
        lines.append(f"{rec['n']:>2} {rec['r']:>2} {rec['m']:>2}  {rec.get('case', '-'):<8} "
                     f"{count!s:>5}  {res.get('regularity', '-')!s:>4} "
                     f"{res.get('projective_dimension', '-')!s:>3}  "
                     f"{'pass' if rec['ok'] else 'FAIL'}")
    return "\n".join(lines) + "\n"
