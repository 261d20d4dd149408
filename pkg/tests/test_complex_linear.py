import numpy as np
from hypothesis import given, settings, strategies as st

from phasegroup import Category, GeneratorSet, Space, Status
from phasegroup.complex_linear import (classify_complex_linear, classify_diag_top, classify_holo,
                                       classify_nonabelian_top, classify_rlinear,
                                       classify_scalar_top)
from phasegroup.witness import evaluate_witness, verify_conjugacy

from builders import complex_linear_pair, complex_recovery_error, conjugate_by, well_conditioned

EQ, NE, INC = Status.EQUIVALENT, Status.NOT_EQUIVALENT, Status.INCONCLUSIVE


def cl(*mats):
    mats = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in mats]
    return GeneratorSet(Space.complex_linear(mats[0].shape[0]), mats)


def test_scalar_two_to_four():
    v = classify_scalar_top([2], [4])
    assert v.status is EQ and abs(v.details["alpha"] - 1) < 1e-12 and not v.details["conj"]
    assert v.residual_report.max_residual < 1e-12
    assert np.allclose(evaluate_witness(v.witness, np.array([2.0 + 0j])), [4])


def test_scalar_i_to_minus_i_is_conjugation():
    v = classify_scalar_top([1j], [-1j])
    assert v.status is EQ and v.details["conj"] and v.details["alpha"] == 0


def test_scalar_contraction_reversal_impossible():
    assert classify_scalar_top([2], [0.5]).status is NE


def test_scalar_identity():
    v = classify_scalar_top([1], [1])
    assert v.status is EQ and v.details["alpha"] == 0


def test_diag_swap():
    v = classify_diag_top(cl(np.diag([2, 3])), cl(np.diag([9, 4])))
    assert v.status is EQ
    assert np.allclose(v.details["alphas"], [1, 1])
    # the coordinate carrying 2 lands on the coordinate carrying 4
    w = v.witness
    assert np.allclose(evaluate_witness(w, np.array([0.5, 0.0])), [0.0, 0.25])


def test_diag_identity():
    v = classify_diag_top(cl(np.diag([2, 3])), cl(np.diag([2, 3])))
    assert v.status is EQ and np.allclose(v.details["alphas"], 0)


def test_diag_repeated_eigenvalue_inconclusive():
    assert classify_diag_top(cl(np.diag([2, 2])), cl(np.diag([2, 2]))).status is INC


def test_rlinear_identity():
    g = cl([[1, 2], [0, 3j]])
    v = classify_rlinear(g, g)
    assert v.status is EQ


def test_rlinear_conjugation():
    v = classify_rlinear(cl(1j), cl(-1j))
    assert v.status is EQ
    w = v.witness
    assert abs(w.A[0, 0]) < 1e-12 and abs(w.B[0, 0]) > 0


def test_rlinear_different_moduli():
    assert classify_rlinear(cl(2), cl(3)).status is NE


def test_holo_shear():
    v = classify_holo(cl([[1, 1], [0, 1]]), cl([[1, 2], [0, 1]]))
    assert v.status is EQ
    s = v.witness.S
    assert abs(s[1, 0]) < 1e-9 and abs(s[0, 0] - 2 * s[1, 1]) < 1e-9


def test_holo_no_invertible_intertwiner():
    v = classify_holo(cl(np.diag([2, 3])), cl(np.diag([2, 5])))
    assert v.status is NE and v.details["kernel_vector"] is not None


def test_holo_identity():
    rng = np.random.default_rng(0)
    g = cl(*(well_conditioned(rng, 3) for _ in range(2)))
    assert classify_holo(g, g).status is EQ


def test_nonabelian_identity_and_conjugate():
    g = cl([[1, 1], [0, 1]], [[2, 0], [0, 1]])
    assert classify_nonabelian_top(g, g).status is EQ
    rng = np.random.default_rng(1)
    s = well_conditioned(rng, 2)
    h = cl(*(conjugate_by(s, m) for m in g))
    v = classify_nonabelian_top(g, h)
    assert v.status is EQ
    assert verify_conjugacy(v.witness, g, h).max_residual < 1e-9


def test_nonabelian_incompatible_inconclusive():
    c, s_ = np.cos(0.5), np.sin(0.5)
    rot = np.array([[c, -s_], [s_, c]])
    g = cl(np.diag([2, 3]) @ rot, [[1, 1], [0, 1]])
    h = cl(np.diag([5, 7]) @ rot, [[1, 1], [0, 1]])
    assert classify_nonabelian_top(g, h).status is INC


def test_count_mismatch():
    assert classify_complex_linear(cl(2, 3), cl(2), "top").status is NE


def test_one_abelian_one_not():
    g = cl(np.diag([2, 3]), np.diag([5, 7]))
    h = cl([[1, 1], [0, 1]], [[1, 0], [1, 1]])
    assert classify_complex_linear(g, h, "top").status is NE


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4), st.integers(2, 3))
def test_round_trip_recovers_exponents(seed, n, nu):
    b = complex_linear_pair(np.random.default_rng(seed), n, nu)
    v = classify_complex_linear(b.g1, b.g2, "top")
    assert v.status is EQ
    assert v.residual_report.max_residual <= 1e-9
    assert complex_recovery_error(b, v) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_similarity_invariance(seed, n):
    rng = np.random.default_rng(seed)
    b = complex_linear_pair(rng, n, 2, perturb=float(rng.choice([0.0, 1e-3])))
    base = classify_complex_linear(b.g1, b.g2, "top").status
    s, t = well_conditioned(rng, n), well_conditioned(rng, n)
    g1 = b.g1.with_generators([conjugate_by(s, m) for m in b.g1])
    g2 = b.g2.with_generators([conjugate_by(t, m) for m in b.g2])
    assert classify_complex_linear(g1, g2, "top").status is base


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_category_hierarchy(seed, n):
    rng = np.random.default_rng(seed)
    g = cl(*(np.diag(np.exp(rng.normal(size=n) + 1j * rng.normal(size=n))) for _ in range(2)))
    s = well_conditioned(rng, n)
    h = cl(*(conjugate_by(s, m) for m in g))
    statuses = {c: classify_complex_linear(g, h, c).status for c in Category}
    assert statuses[Category.HOLOMORPHIC] is EQ
    assert all(st_ is EQ for st_ in statuses.values())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_symmetry(seed, n):
    b = complex_linear_pair(np.random.default_rng(seed), n, 2)
    assert classify_complex_linear(b.g2, b.g1, "top").status is EQ
