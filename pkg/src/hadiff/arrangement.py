"""Generic central hyperplane arrangements.

Hyperplanes are indexed 0..r-1 in the order given; a subset of hyperplanes
is a sorted tuple of indices.  Defining forms are stored as primitive integer
vectors (denominators cleared, gcd divided out, sign kept).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .exactalg import (
    Polynomial,
    as_fraction,
    primitive_vector,
    product,
    qmat_det,
    qmat_rank_nullspace,
)


class GenericityError(ValueError):
    pass


def _clear(form) -> tuple[int, ...]:
    fr = [as_fraction(c) for c in form]
    v = primitive_vector(fr)
    # primitive_vector normalizes the sign; restore the given orientation
    first = next((c for c in fr if c), 0)
    if first < 0:
        v = [-a for a in v]
    return tuple(v)


@dataclass(frozen=True)
class Arrangement:
    n: int
    forms: tuple[tuple[int, ...], ...]

    def __init__(self, n: int, forms: Iterable[Sequence]):
        forms = tuple(_clear(f) for f in forms)
        if any(len(f) != n for f in forms):
            raise ValueError("every form needs exactly n coefficients")
        if any(not any(f) for f in forms):
            raise ValueError("zero linear form")
        if n < 2:
            raise ValueError("need n >= 2")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "forms", forms)

    @property
    def r(self) -> int:
        return len(self.forms)

    def p(self, i: int) -> Polynomial:
        return Polynomial.linear(self.forms[i])

    @cached_property
    def linear_forms(self) -> list[Polynomial]:
        return [self.p(i) for i in range(self.r)]

    @cached_property
    def Q(self) -> Polynomial:
        return defining_poly(self)

    def subsets(self, k: int) -> list[tuple[int, ...]]:
        return list(combinations(range(self.r), k))

    def to_json(self):
        return {"n": self.n, "forms": [list(f) for f in self.forms]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["n"], obj["forms"])

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def check_generic(arr: Arrangement):
    """True if every n forms are independent, else the first violating n-subset."""
    if arr.r < arr.n:
        raise ValueError("generic arrangements need r >= n")
    for sub in combinations(range(arr.r), arr.n):
        if qmat_det([arr.forms[i] for i in sub]) == 0:
            return sub
    return True


def is_generic(arr: Arrangement) -> bool:
    return check_generic(arr) is True


def defining_poly(arr: Arrangement) -> Polynomial:
    return product(arr.linear_forms, arr.n)


def delta_H(arr: Arrangement, H: Sequence[int]) -> tuple[int, ...]:
    """Constant derivation killing p_h for every h in H (|H| = n-1)."""
    H = tuple(H)
    if len(H) != arr.n - 1:
        raise ValueError("delta_H needs n-1 hyperplanes")
    _, basis = qmat_rank_nullspace([arr.forms[i] for i in H], arr.n)
    if len(basis) != 1:
        raise GenericityError(f"kernel of {H} has dimension {len(basis)}")
    return tuple(basis[0])


def pair(delta: Sequence[int], form: Sequence[int]):
    """delta * p for a constant derivation delta and a linear form p."""
    return sum(a * b for a, b in zip(delta, form))


def pH_product(arr: Arrangement, Hs: Sequence[Sequence[int]]) -> Polynomial:
    """Product of the p_h with h outside the common intersection of the Hs."""
    common = set(range(arr.r))
    for H in Hs:
        if len(H) != arr.n - 1:
            raise ValueError("each subset must have n-1 elements")
        common &= set(H)
    return product((arr.linear_forms[i] for i in range(arr.r) if i not in common), arr.n)


def complement_product(arr: Arrangement, H: Sequence[int], within: Iterable[int] | None = None):
    """Product of p_h over h in `within` (default: all) and not in H."""
    H = set(H)
    idx = range(arr.r) if within is None else within
    return product((arr.linear_forms[i] for i in idx if i not in H), arr.n)


def _keeps_generic(forms, cand, n) -> bool:
    for sub in combinations(range(len(forms)), n - 1):
        if qmat_det([forms[i] for i in sub] + [cand]) == 0:
            return False
    return True


def generic_extension(arr: Arrangement, target_r: int, seed, max_rounds: int = 20) -> Arrangement:
    """Append random integer forms until there are target_r, keeping genericity."""
    if target_r < arr.r:
        raise ValueError("target_r must be at least r")
    if not is_generic(arr):
        raise GenericityError("cannot extend a non-generic arrangement")
    rng = random.Random(seed)
    forms = [list(f) for f in arr.forms]
    bound = 10
    while len(forms) < target_r:
        for _attempt in range(max_rounds):
            cand = [rng.randint(-bound, bound) for _ in range(arr.n)]
            if any(cand) and _keeps_generic(forms, cand, arr.n):
                forms.append(cand)
                break
        else:
            bound *= 2
            if bound > 10 * 2 ** 16:
                raise RuntimeError("generic extension exhausted its retries")
    return Arrangement(arr.n, forms)


def random_generic(n: int, r: int, seed) -> Arrangement:
    """Coordinate hyperplanes followed by random forms (r >= n)."""
    base = Arrangement(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])
    return generic_extension(base, r, seed)


def count_subsets(r: int, k: int) -> int:
    return comb(r, k)
