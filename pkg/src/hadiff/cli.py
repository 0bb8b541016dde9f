"""hadiff command line.

Exit codes: 0 all checks pass, 2 a mathematical check failed, 3 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arrangement import Arrangement, check_generic, random_generic
from .weyl import DiffOp

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 2, 3


class InputError(Exception):
    pass


def _load(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_arr(path) -> Arrangement:
    obj = _load(path)
    try:
        return Arrangement.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not an arrangement ({exc})") from exc


def _emit(obj, out):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _require_generic(arr):
    w = check_generic(arr)
    if w is not True:
        raise InputError(f"arrangement is not generic; witness subset {list(w)}")


# ---------------------------------------------------------------------------


def cmd_gen(a):
    if not a.r >= a.n >= 2:
        raise InputError("need r >= n >= 2")
    _emit(random_generic(a.n, a.r, a.seed).to_json(), a.out)
    return EXIT_OK


def cmd_check_generic(a):
    arr = _load_arr(a.file)
    w = check_generic(arr)
    _emit({"generic": True} if w is True else {"generic": False, "witness": list(w)}, a.out)
    return EXIT_OK if w is True else EXIT_MATH


def cmd_basis(a):
    from .freebasis import Case, classify, free_basis
    from .saito import exp_multiset

    arr = _load_arr(a.file)
    _require_generic(arr)
    if classify(arr.n, arr.r, a.m) is Case.NON_FREE:
        raise InputError(f"D^({a.m})(A) is not free for n={arr.n}, r={arr.r}; use `resolve`")
    case, ops, ext = free_basis(arr, a.m, a.seed)
    _emit({"case": case.value, "m": a.m, "seed": a.seed,
           "exp": {str(k): v for k, v in exp_multiset(ops).items()},
           "extension_forms": ext, "operators": [op.to_json() for op in ops]}, a.out)
    return EXIT_OK


def cmd_saito_check(a):
    from .saito import NotInModule, saito_holm_check

    arr = _load_arr(a.arr)
    obj = _load(a.ops)
    items = obj["operators"] if isinstance(obj, dict) else obj
    try:
        ops = [DiffOp.from_json({"nvars": arr.n, **o}) for o in items]
        rep = saito_holm_check(ops, arr)
    except NotInModule as exc:
        raise InputError(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad operator list: {exc}") from exc
    _emit({"basis": rep["basis"], "c": None if rep["c"] is None else str(rep["c"]),
           "det_degree": rep["det_degree"]}, a.out)
    return EXIT_OK if rep["basis"] else EXIT_MATH


def _jsonable(rep):
    return json.loads(json.dumps(rep, default=str))


def cmd_resolve(a):
    from .resolution import build_F_resolution, verify_resolution

    arr = _load_arr(a.file)
    _require_generic(arr)
    try:
        F = build_F_resolution(arr, a.m)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = F.to_json()
    code = EXIT_OK
    if a.verify:
        rep = verify_resolution(F, arr, a.m, a.degree_bound)
        out["report"] = _jsonable(rep)
        code = EXIT_OK if rep["ok"] else EXIT_MATH
    _emit(out, a.out)
    return code


def cmd_jet(a):
    from .jet import build_Jm_resolution, coker_presentation, jet_presentation, verify_Jm_resolution

    arr = _load_arr(a.file)
    _require_generic(arr)
    try:
        J = build_Jm_resolution(arr, a.m, a.seed, euler_repair=a.euler_repair)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    cp = coker_presentation(arr, a.m)
    jp = jet_presentation(arr, a.m)
    out = {"coker_presentation": cp.to_json(), "jet_presentation": jp.to_json(),
           "transpose_equal": jp == cp.transpose(), "resolution": J.to_json()}
    code = EXIT_OK if out["transpose_equal"] else EXIT_MATH
    if a.verify:
        rep = verify_Jm_resolution(J, arr, a.m, a.degree_bound)
        out["report"] = _jsonable(rep)
        if not rep["ok"]:
            code = EXIT_MATH
    _emit(out, a.out)
    return code


def cmd_grid(a):
    from .grid import DEFAULT_GRID, dumps, run_grid, table

    config = _load(a.config) if a.config else DEFAULT_GRID
    if not isinstance(config, dict) or not isinstance(config.get("points", []), list):
        raise InputError("grid config must be an object with a `points` list")
    report = run_grid(config)
    text = dumps(report)
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    summary = table(report)
    if a.table:
        Path(a.table).write_text(summary)
    else:
        sys.stderr.write(summary)
    return EXIT_OK if report["all_ok"] else EXIT_MATH


def cmd_report(a):
    from .plots import plot_file

    try:
        written = plot_file(_load(a.file), Path(a.out_dir), a.degree_bound)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    for p in written:
        print(p)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hadiff", description=(
        "Differential operators on generic hyperplane arrangements: free bases, "
        "Saito-Holm checks, minimal free resolutions, jet presentations."))
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("gen", help="random generic arrangement")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("check-generic", help="genericity certificate or witness")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_check_generic)

    s = sub.add_parser("basis", help="free basis of D^(m)(A)")
    s.add_argument("file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_basis)

    s = sub.add_parser("saito-check", help="Saito-Holm determinant test")
    s.add_argument("arr")
    s.add_argument("ops")
    s.add_argument("--out")
    s.set_defaults(func=cmd_saito_check)

    s = sub.add_parser("resolve", help="minimal free resolution of Xi^(m)(A)")
    s.add_argument("file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--degree-bound", type=int)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("jet", help="J_m(A) resolution and jet presentation")
    s.add_argument("file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--degree-bound", type=int)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--euler-repair", action="store_true",
                   help="add the degree-0 Euler relations needed for m >= 2")
    s.add_argument("--out")
    s.set_defaults(func=cmd_jet)

    s = sub.add_parser("grid", help="sweep (n, r, m) triples")
    s.add_argument("config", nargs="?")
    s.add_argument("--out")
    s.add_argument("--table")
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("report", help="SVG Betti table and Hilbert function plots")
    s.add_argument("file")
    s.add_argument("--out-dir", default=".")
    s.add_argument("--degree-bound", type=int, default=12)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return a.func(a)
    except InputError as exc:
        print(f"hadiff: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
