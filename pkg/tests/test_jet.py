from math import comb

import pytest

from hadiff.arrangement import Arrangement, random_generic
from hadiff.exactalg import Polynomial, exact_divide
from hadiff.jet import (
    alpha_indices,
    beta_indices,
    bullet,
    build_Jm_resolution,
    check_kernel_generators,
    check_Q_e0,
    coker_presentation,
    euler_relations,
    expected_Jm_shifts,
    jet_presentation,
    jm_count,
    jm_generators,
    scaled_partial,
    verify_Jm_resolution,
)
from hadiff.weyl import DiffOp, apply, euler

x, y, z = (Polynomial.var(3, i) for i in range(3))
XYZ = Arrangement(3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
A351 = random_generic(3, 5, 0)
A362 = random_generic(3, 6, 0)


def test_bullet_m1_is_jacobian():
    gens = jm_generators(XYZ, 1)
    assert [g[(0, 0, 0)] for g in gens] == [y * z, x * z, x * y]
    assert len(gens) == jm_count(3, 1) == 3


def test_bullet_beta0_is_action():
    t = euler(2, 3).left_mul(x)
    v = bullet(t, A351.Q, 2)
    assert v[(0, 0, 0)] == apply(t, A351.Q)
    with pytest.raises(ValueError):
        bullet(t, A351.Q, 1)


def test_generator_counts():
    for n, m in [(3, 1), (3, 2), (4, 2), (3, 3)]:
        assert len(alpha_indices(n, m)) == jm_count(n, m) == comb(n + m, m) - 1
        assert len(beta_indices(n, m)) == comb(n + m - 1, m - 1)


def test_bullet_matches_taylor_formula():
    # (1/alpha!) d^alpha . Q has beta part (1/(alpha-beta)!) d^{alpha-beta} * Q
    Q = A351.Q
    for a in alpha_indices(3, 2):
        v = bullet(scaled_partial(a), Q, 2)
        for b in beta_indices(3, 2):
            if all(bi <= ai for ai, bi in zip(a, b)):
                diff = tuple(ai - bi for ai, bi in zip(a, b))
                want = apply(scaled_partial(diff), Q) if any(diff) else Q
            else:
                want = Polynomial.zero(3)
            assert v[b] == want


def test_presentations():
    cp = coker_presentation(XYZ, 1)
    assert cp.matrix.cols == 1 and [cp.matrix[i, 0] for i in range(3)] == [y * z, x * z, x * y]
    jp = jet_presentation(XYZ, 1)
    assert [jp.matrix[0, i] for i in range(3)] == [y * z, x * z, x * y]
    for arr, m in [(A351, 1), (A351, 2), (A362, 2), (random_generic(4, 6, 0), 2)]:
        c = coker_presentation(arr, m)
        j = jet_presentation(arr, m)
        assert j == c.transpose()
        for gi, g in enumerate(c.row_labels):
            for bi, b in enumerate(c.col_labels):
                f = c.matrix[gi, bi]
                if not all(bb <= gg for gg, bb in zip(g, b)) or g == b:
                    assert f.is_zero()
                elif sum(g) - sum(b) == 1:
                    assert f.degree() == arr.r - 1


def test_transpose_detects_tampering():
    c = coker_presentation(A351, 2)
    j = jet_presentation(A351, 2)
    j.matrix.entries[0][0] = j.matrix.entries[0][0] + Polynomial.var(3, 0) ** 4
    assert j != c.transpose()


def test_Q_e0_and_kernel_generators():
    for arr, m in [(A351, 1), (A362, 2)]:
        assert check_Q_e0(arr, m)["ok"]
        rep = check_kernel_generators(arr, m)
        assert rep["ok"] and rep["checked"] > 0


@pytest.mark.parametrize("arr,m", [(A351, 1), (A362, 1)])
def test_Jm_resolution_m1(arr, m):
    J = build_Jm_resolution(arr, m)
    rep = verify_Jm_resolution(J, arr, m)
    assert rep["ok"], rep
    assert rep["projective_dimension"] == 3 and rep["depth"] == 0
    assert rep["regularity"] == arr.r - 5
    assert rep["shifts_match_stated"]


def test_Jm_351_shape():
    J = build_Jm_resolution(A351, 1)
    assert J.ranks == [1, 3, 4, 2]
    assert J.degrees[0] == [-5]


def test_negative_control_without_twist():
    J = build_Jm_resolution(A351, 1, twist=False)
    rep = verify_Jm_resolution(J, A351, 1)
    assert not rep["ok"]
    assert not (rep["dd_zero"]["ok"] and rep["minimal"]["ok"])


def test_euler_relations_lie_in_kernel():
    # (r-k) eps_k - eps_{k+1} kills Q, and its bullet vector vanishes mod Q with zero e_0 part
    r = A362.r
    for rel in euler_relations(3, r, 3):
        Qv = Polynomial.zero(3)
        for k, op in rel.items():
            Qv = Qv + apply(op, A362.Q)
        assert Qv.is_zero()
        for b in beta_indices(3, 3)[1:]:
            total = Polynomial.zero(3)
            for k, op in rel.items():
                total = total + bullet(op, A362.Q, 3)[b]
            exact_divide(total, A362.linear_forms)


def test_mixed_order_kernel_missed_without_repair():
    # for m >= 2 the complex built from the per-order resolutions alone is not exact at
    # F~_0; the missing degree-0 homology is S^{m-1}
    J = build_Jm_resolution(A362, 2)
    rep = verify_Jm_resolution(J, A362, 2, degree_bound=2)
    assert rep["dd_zero"]["ok"] and rep["minimal"]["ok"]
    assert not rep["truncated_exact"]["ok"]
    fails = rep["truncated_exact"]["failures"]
    assert [f["degree"] for f in fails] == [0, 1, 2]
    assert all(f["positions"] == [1] for f in fails)


def test_euler_repair_restores_exactness():
    J = build_Jm_resolution(A362, 2, euler_repair=True)
    rep = verify_Jm_resolution(J, A362, 2)
    assert rep["ok"], rep
    assert rep["projective_dimension"] == 3 and rep["regularity"] == 6 - 3 - 2
    assert rep["shifts_match"] and not rep["shifts_match_stated"]
    assert expected_Jm_shifts(3, 6, 2, True)[2][0] == 1


def test_rejects_free_case():
    with pytest.raises(ValueError):
        build_Jm_resolution(A351, 3)
