"""Explicit bases of D^(m)(A) in the free cases."""
from __future__ import annotations

from enum import Enum
from itertools import combinations
from math import comb

from .arrangement import Arrangement, complement_product, delta_H, generic_extension
from .exactalg import monomials_of_degree, nullspace
from .saito import sm_tm
from .weyl import DiffOp, constant_power, delta_power_op, euler


class Case(str, Enum):
    FREE_N2 = "Free_n2"
    FREE_EQ = "Free_eq"
    FREE_GT = "Free_gt"
    NON_FREE = "NonFree"


def classify(n: int, r: int, m: int) -> Case:
    if not (r >= n >= 2 and m >= 1):
        raise ValueError("need r >= n >= 2 and m >= 1")
    if n == 2:
        return Case.FREE_N2
    if m == r - n + 1:
        return Case.FREE_EQ
    if m > r - n + 1:
        return Case.FREE_GT
    return Case.NON_FREE


def basis_n2(arr: Arrangement, m: int) -> list[DiffOp]:
    if arr.n != 2:
        raise ValueError("basis_n2 needs n = 2")
    r = arr.r
    deltas = [delta_H(arr, (i,)) for i in range(r)]
    ops = [delta_power_op(deltas[i], m, complement_product(arr, (i,))) for i in range(r)]
    if m <= r - 2:
        return [euler(m, 2)] + ops[:m]
    if m == r - 1:
        return ops
    # complete {delta_i^m} by the orthogonal complement of their span; over Q
    # the standard pairing is definite, so the union is a basis
    alphas = monomials_of_degree(2, m)
    vecs = [[constant_power(d, m).get(a, 0) for a in alphas] for d in deltas]
    extra = [DiffOp.constant(2, m, dict(zip(alphas, eta))).left_mul(arr.Q)
             for eta in nullspace(vecs, len(alphas))]
    return ops + extra


def basis_eq(arr: Arrangement, m: int) -> list[DiffOp]:
    if m != arr.r - arr.n + 1:
        raise ValueError("basis_eq needs m = r - n + 1")
    return [delta_power_op(delta_H(arr, H), m, complement_product(arr, H))
            for H in combinations(range(arr.r), arr.n - 1)]


def basis_gt(arr: Arrangement, m: int, seed=0):
    """Basis P'_H delta_H^m over (n-1)-subsets of a generic extension to n+m-1 forms.

    Returns (operators, extended arrangement).
    """
    if m < arr.r - arr.n + 1:
        raise ValueError("basis_gt needs m >= r - n + 1")
    ext = generic_extension(arr, arr.n + m - 1, seed)
    own = range(arr.r)
    ops = [delta_power_op(delta_H(ext, H), m, complement_product(arr, H, own))
           for H in combinations(range(ext.r), ext.n - 1)]
    return ops, ext


def free_basis(arr: Arrangement, m: int, seed=0):
    """Dispatch on the case; returns (case, operators, extension forms or None)."""
    case = classify(arr.n, arr.r, m)
    if case is Case.FREE_N2:
        return case, basis_n2(arr, m), None
    if case is Case.FREE_EQ:
        return case, basis_eq(arr, m), None
    if case is Case.FREE_GT:
        ops, ext = basis_gt(arr, m, seed)
        return case, ops, [list(f) for f in ext.forms[arr.r:]]
    raise ValueError(f"D^({m})(A) is not free for n={arr.n}, r={arr.r}")


def expected_exponents(n: int, r: int, m: int) -> dict[int, int]:
    case = classify(n, r, m)
    if case is Case.NON_FREE:
        raise ValueError("no exponents in the non-free case")
    if n == 2:
        if m <= r - 2:
            return {m: 1, r - 1: m}
        if m == r - 1:
            return {r - 1: m + 1}
        return {r - 1: r, r: m - r + 1}
    if case is Case.FREE_EQ:
        return {m: comb(r, m)}
    out = {}
    for j in range(r - n + 1, min(r, m) + 1):
        k = comb(r, j) * comb(m + n - r - 1, m - j)
        if k:
            out[j] = k
    return out


def expected_count(n, m):
    return sm_tm(n, m)[0]
