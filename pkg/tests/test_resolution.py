import copy
import random
from math import comb

import pytest

from hadiff.arrangement import random_generic
from hadiff.exactalg import Polynomial, exact_divide, num_monomials
from hadiff.freebasis import free_basis
from hadiff.freecomplex import FreeComplex, check_dd_zero
from hadiff.resolution import (
    E_bracket,
    E_sigma_complex,
    build_C_complex,
    build_F_resolution,
    d1_operators,
    delta_space,
    delta_space_full_rank,
    graded_dims,
    hilbert_from_exponents,
    hilbert_from_resolution,
    holm_generators,
    minimal_generators_Xi,
    nonfree_inequality,
    num_generators_Xi,
    operators_rank,
    project_to_Xi,
    random_sigmas,
    span_dim,
    verify_resolution,
    w_betti,
)
from hadiff.saito import exp_multiset
from hadiff.weyl import DiffOp, apply, euler, in_DmA

A351 = random_generic(3, 5, 0)


def test_counts():
    assert num_generators_Xi(3, 5, 1) == 4
    assert w_betti(3, 6, 2, 1) == 9 and w_betti(3, 6, 2, 2) == 4
    assert w_betti(3, 5, 1, 1) == 4 and w_betti(3, 5, 1, 2) == 2
    for n, r, m in [(3, 5, 1), (3, 6, 1), (3, 6, 2), (4, 6, 1), (4, 7, 2), (3, 8, 4)]:
        assert nonfree_inequality(n, r, m)


def test_delta_space_dims():
    assert delta_space(A351, 1, (0, 1)).dim == 1
    assert delta_space(A351, 1, ()).dim == 3
    arr = random_generic(3, 5, 1)
    for H in arr.subsets(1):
        sp = delta_space(arr, 2, H)
        assert sp.dim == 3 == comb(2 + 2 - 1, 1)
        # the chosen basis spans everything delta^m_{H u H'} spans
        assert delta_space_full_rank(arr, 2, H) == sp.dim


def test_E_bracket_dims():
    assert E_bracket(A351, 1, (0, 1)).dim == 1
    assert E_bracket(A351, 1, (2,)).dim == 2
    arr = random_generic(3, 6, 0)
    for m in (1, 2):
        for j in (1, 2, 3):
            for H in arr.subsets(3 - j):
                assert E_bracket(arr, m, H).dim == comb(6 - m - 3 + j - 1, j - 1)


def test_C_complex_exact():
    for arr, m in [(A351, 1), (random_generic(3, 6, 0), 2), (random_generic(2, 4, 0), 2)]:
        assert build_C_complex(arr, m).exactness()["ok"]


def test_C_complex_n2_shape():
    arr = random_generic(2, 4, 0)
    C = build_C_complex(arr, 2)
    assert C.spaces[1].dim == 4 and C.spaces[0].dim == 3


def test_E_complexes_exact():
    arr = random_generic(3, 6, 0)
    m = 2
    assert E_sigma_complex(arr, m).exactness()["ok"]
    for sigma in random_sigmas(arr.r, arr.n + m - 1, 10, 0):
        rep = E_sigma_complex(arr, m, sigma).exactness()
        assert rep["ok"], sigma
    empty = E_sigma_complex(arr, m, ())
    assert all(sp.dim == 0 for sp in empty.spaces)
    assert E_sigma_complex(arr, m, (0, 1)).spaces[3].dim == 0


def test_E_complex_negative_control():
    # dropping one basis vector from a middle space must break exactness
    arr = random_generic(3, 6, 0)
    E = E_sigma_complex(arr, 1, (0,))
    E.spaces[1].basis = E.spaces[1].basis[1:]
    assert not E.exactness()["ok"]


def test_minimal_generators():
    Hs, ops = minimal_generators_Xi(A351, 1)
    assert len(ops) == 4 == operators_rank(ops)
    p1 = A351.linear_forms[0]
    assert all(apply(t, p1).is_zero() for t in ops)
    assert all(in_DmA(t, A351) for t in ops)


def test_split_D_equals_Xi_plus_euler():
    arr = random_generic(3, 6, 0)
    m = 2
    gens = holm_generators(arr, m)
    prod = arr.linear_forms[0] * arr.linear_forms[1]
    rng = random.Random(3)
    xs = [Polynomial.var(3, i) for i in range(3)]
    for _ in range(5):
        pick = rng.sample(gens[:-1], 3)
        theta = DiffOp.zero(3, m)
        for g in pick:
            theta = theta + g.scale(rng.randint(1, 3))
        theta = theta.left_mul(rng.choice(xs))
        xi = project_to_Xi(theta, arr)
        assert apply(xi, prod).is_zero() and in_DmA(xi, arr)
        rest = theta - xi
        # the difference is a polynomial multiple of eps_m
        h = exact_divide(rest.coeff((m, 0, 0)), xs[0] ** m)
        assert rest == euler(m, 3).left_mul(h)


def test_build_and_verify_351():
    F = build_F_resolution(A351, 1)
    assert F.ranks == [3, 4, 2]
    rep = verify_resolution(F, A351, 1)
    assert rep["ok"]
    assert rep["regularity"] == 2 == rep["expected_regularity"]
    assert rep["projective_dimension"] == 1
    # the augmentation columns are exactly the minimal generators
    _, gens = minimal_generators_Xi(A351, 1)
    assert d1_operators(F) == gens


def test_tampered_sign_breaks_dd_zero():
    F = build_F_resolution(A351, 1)
    G = FreeComplex.from_json(copy.deepcopy(F.to_json()))
    M = G.maps[1]
    i, j = next((a, b) for a in range(M.rows) for b in range(M.cols) if M[a, b].terms)
    M.entries[i][j] = -M.entries[i][j]
    rep = check_dd_zero(G)
    assert not rep["ok"] and rep["witness"]["maps"] == [0, 1]
    assert not verify_resolution(G, A351, 1)["ok"]


def test_rejects_free_case():
    with pytest.raises(ValueError):
        build_F_resolution(A351, 3)


def test_hilbert_nonfree_matches_oracles():
    arr = random_generic(3, 6, 0)
    m = 2
    F = build_F_resolution(arr, m)
    bound = 7
    hf = hilbert_from_resolution(F, bound)
    gens = holm_generators(arr, m)
    for p in range(bound + 1):
        assert hf[p] == graded_dims(arr, m, p)[0]
    for p in range(5):
        assert hf[p] == span_dim(gens, p)
    assert hf[:m] == [0] * m
    assert hf[m] == 1  # only eps_m below the generator degree r-n+1 = 4


def test_hilbert_free_matches_span():
    arr = random_generic(3, 5, 0)
    _, ops, _ = free_basis(arr, 3)
    hf = hilbert_from_resolution(exp_multiset(ops), 6, n=3)
    assert hf == hilbert_from_exponents(exp_multiset(ops), 3, 6)
    for p in range(7):
        assert hf[p] == span_dim(ops, p) == graded_dims(arr, 3, p)[0]


def test_xi_dims_from_resolution():
    arr = random_generic(3, 6, 0)
    F = build_F_resolution(arr, 1)
    for p in range(9):
        d = p - 1
        alt = sum((-1) ** (i - 1) * sum(num_monomials(3, d - g) for g in F.degrees[i])
                  for i in F.resolution_terms())
        assert alt == graded_dims(arr, 1, p)[1]
