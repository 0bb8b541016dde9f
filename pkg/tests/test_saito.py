import random

import pytest

from hadiff.arrangement import Arrangement, random_generic
from hadiff.exactalg import PolyMatrix, Polynomial, polymat_det
from hadiff.freebasis import basis_eq
from hadiff.saito import (
    NotInModule,
    coefficient_matrix,
    degree_sum_check,
    exp_identities_hold,
    exp_multiset,
    saito_holm_check,
    sm_tm,
)
from hadiff.weyl import DiffOp, euler

X, Y = Polynomial.var(2, 0), Polynomial.var(2, 1)
XY = Arrangement(2, [[1, 0], [0, 1]])


def op(order, terms):
    return DiffOp(2, order, terms)


def test_sm_tm():
    for m in range(1, 6):
        assert sm_tm(2, m) == (m + 1, m)
    assert sm_tm(3, 2) == (6, 3)
    assert sm_tm(3, 1) == (3, 1)
    with pytest.raises(ValueError):
        sm_tm(1, 1)


def test_coefficient_matrix():
    M = coefficient_matrix([op(1, {(1, 0): X}), op(1, {(0, 1): Y})])
    assert M == PolyMatrix(2, [[X, Polynomial.zero(2)], [Polynomial.zero(2), Y]])
    E = coefficient_matrix([euler(1, 2), DiffOp.zero(2, 1)])
    assert [E[0, 0], E[1, 0]] == [X, Y]
    assert E[0, 1].is_zero() and E[1, 1].is_zero()
    with pytest.raises(ValueError):
        coefficient_matrix([euler(1, 2)])


def test_saito_holm_examples():
    rep = saito_holm_check([op(1, {(1, 0): X}), op(1, {(0, 1): Y})], XY)
    assert rep["basis"] and rep["c"] == 1 and rep["det_degree"] == 2
    # x*d2 is not in D(A) for A = {xy}, so the precheck rejects it; its determinant x^2
    # would also fail the test
    swapped = [op(1, {(1, 0): X}), op(1, {(0, 1): X})]
    with pytest.raises(NotInModule):
        saito_holm_check(swapped, XY)
    assert polymat_det(coefficient_matrix(swapped)) == X ** 2
    rep = saito_holm_check([op(1, {(1, 0): X}), op(1, {(0, 1): X * Y})], XY)
    assert not rep["basis"] and rep["det_degree"] == 3
    t = op(1, {(1, 0): X})
    assert not saito_holm_check([t, t], XY)["basis"]


def test_membership_precheck():
    with pytest.raises(NotInModule):
        saito_holm_check([DiffOp.partial((1, 0)), op(1, {(0, 1): Y})], XY)


def test_degree_sum():
    arr = random_generic(3, 5, 0)
    ops = basis_eq(arr, 3)
    assert degree_sum_check(ops, arr)
    assert not degree_sum_check(ops[:-1] + [ops[-1].left_mul(Polynomial.var(3, 0))], arr)


def test_Q_power_divides_det_of_random_members():
    # random S-combinations of basis elements stay in D^(m)(A)
    arr = random_generic(3, 4, 1)
    basis = basis_eq(arr, 2)
    rng = random.Random(0)
    xs = [Polynomial.var(3, i) for i in range(3)]
    ops = []
    for _ in basis:
        acc = DiffOp.zero(3, 2)
        for b in basis:
            c = rng.randint(-2, 2)
            if c:
                acc = acc + b.scale(c)
        ops.append(acc.left_mul(rng.choice(xs)) if rng.random() < 0.3 else acc)
    det = polymat_det(coefficient_matrix(ops))
    Qt = arr.Q ** sm_tm(3, 2)[1]
    from hadiff.exactalg import exact_divide
    if not det.is_zero():
        exact_divide(det, Qt)


def test_exp_helpers():
    arr = random_generic(3, 5, 0)
    ops = basis_eq(arr, 3)
    e = exp_multiset(ops)
    assert e == {3: 10}
    assert exp_identities_hold(e, 3, 5, 3)
    assert not exp_identities_hold({3: 9, 4: 1}, 3, 5, 3)
