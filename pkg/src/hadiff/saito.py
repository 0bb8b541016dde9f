"""Saito-Holm freeness test for s_m operators of order m."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import comb

from .exactalg import (
    NotDivisible,
    PolyMatrix,
    Polynomial,
    divide_by_linear,
    mono_factorial,
    monomials_of_degree,
    polymat_det_factored,
)
from .weyl import DiffOp, apply, in_DmA, pdeg


class NotInModule(ValueError):
    """An operator handed to the criterion is not in D^(m)(A)."""


def sm_tm(n: int, m: int) -> tuple[int, int]:
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    return comb(n + m - 1, m), comb(n + m - 2, m - 1)


def coefficient_matrix(thetas: list[DiffOp]) -> PolyMatrix:
    """Entry (i, j) = theta_j * x^alpha_i / alpha_i!, rows in grevlex order."""
    if not thetas:
        raise ValueError("no operators")
    n, m = thetas[0].nvars, thetas[0].order
    s, _ = sm_tm(n, m)
    if len(thetas) != s:
        raise ValueError(f"expected {s} operators, got {len(thetas)}")
    if any(t.order != m or t.nvars != n for t in thetas):
        raise ValueError("all operators must have the same order and ring")
    rows = []
    for a in monomials_of_degree(n, m):
        f = Polynomial.monomial(a, Fraction(1, mono_factorial(a)))
        rows.append([apply(t, f) for t in thetas])
    return PolyMatrix(n, rows, s, s)


def _strip_forms(f: Polynomial, forms, counts: Counter):
    """Divide out hyperplane forms as often as possible; return the cofactor."""
    for i, p in enumerate(forms):
        while f.degree() > 0:
            try:
                f = divide_by_linear(f, p)
            except NotDivisible:
                break
            counts[i] += 1
    return f


def saito_holm_check(thetas: list[DiffOp], arr) -> dict:
    for j, t in enumerate(thetas):
        if not in_DmA(t, arr):
            raise NotInModule(f"operator {j} is not in D^({t.order})(A)")
    _, t_m = sm_tm(arr.n, thetas[0].order)
    factors = polymat_det_factored(coefficient_matrix(thetas))
    det_degree = sum(f.degree() for f in factors)
    if any(f.is_zero() for f in factors):
        return {"basis": False, "c": Fraction(0), "det_degree": -1}
    counts: Counter = Counter()
    c = Fraction(1)
    clean = True
    for f in factors:
        rest = _strip_forms(f, arr.linear_forms, counts)
        if rest.is_constant():
            c *= rest.constant_term()
        else:
            clean = False
    basis = clean and all(counts[i] == t_m for i in range(arr.r))
    return {"basis": basis, "c": c if basis else None, "det_degree": det_degree,
            "multiplicities": [counts[i] for i in range(arr.r)]}


def degree_sum_check(thetas: list[DiffOp], arr) -> bool:
    _, t_m = sm_tm(arr.n, thetas[0].order)
    return sum(pdeg(t) for t in thetas) == arr.r * t_m


def exp_multiset(thetas: list[DiffOp]) -> dict[int, int]:
    return dict(sorted(Counter(pdeg(t) for t in thetas).items()))


def exp_identities_hold(exps: dict[int, int], n: int, r: int, m: int) -> bool:
    s, t = sm_tm(n, m)
    return sum(exps.values()) == s and sum(k * e for k, e in exps.items()) == r * t
