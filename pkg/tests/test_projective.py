import numpy as np
from hypothesis import given, settings, strategies as st

from phasegroup import Category, GeneratorSet, Space, Status
from phasegroup.projective import (classify_cp1_top, classify_cpn_top, classify_proj_rigid,
                                   classify_projective, jordan_block_count_compatible)
from phasegroup.witness import verify_conjugacy

from builders import conjugate_by, projective_pair, well_conditioned

EQ, NE, INC = Status.EQUIVALENT, Status.NOT_EQUIVALENT, Status.INCONCLUSIVE


def cp(*mats):
    mats = [np.asarray(m, dtype=complex) for m in mats]
    return GeneratorSet(Space.complex_projective(mats[0].shape[0] - 1), mats)


def test_fixed_point_structures():
    assert jordan_block_count_compatible([np.diag([2, 1])], [np.diag([3, 1])])
    assert not jordan_block_count_compatible([[[1, 1], [0, 1]]], [np.diag([2, 1])])
    assert jordan_block_count_compatible([5 * np.eye(2)], [np.eye(2)])


def test_cp1_inverse_ratio():
    v = classify_cp1_top(cp(np.diag([2, 1])), cp(np.diag([0.5, 1])))
    assert v.status is EQ and v.residual_report.max_residual < 1e-12


def test_cp1_identical():
    g = cp(np.diag([2, 1]), np.diag([1j, 1]))
    v = classify_cp1_top(g, g)
    assert v.status is EQ and abs(v.details["alpha"]) < 1e-12


def test_cp1_against_identity_action():
    assert classify_cp1_top(cp(np.diag([2, 1])), cp(np.eye(2))).status is NE


def test_cp1_recovers_swapping_exponent():
    # sigma = rho |rho|^-2 read in a fixed coordinate order is the inverse ratio
    rho = np.array([2.0, 3.0 * np.exp(0.3j)])
    sigma = rho * np.abs(rho) ** -2.5
    g1 = cp(*(np.diag([r, 1]) for r in rho))
    g2 = cp(*(np.diag([s, 1]) for s in sigma))
    v = classify_cp1_top(g1, g2)
    assert v.status is EQ
    a = v.details["alpha"]
    # the fixed-point swap turns alpha into -2 - alpha
    assert min(abs(a + 2.5), abs(a - 0.5)) < 1e-9


def test_cpn_recovers_half():
    p = np.array([2.0, 3.0, 1.0])
    q = p * np.abs(p) ** 0.5
    v = classify_cpn_top(cp(np.diag(p)), cp(np.diag(q)))
    assert v.status is EQ and abs(v.details["alpha"] - 0.5) < 1e-9


def test_cpn_identical():
    g = cp(np.diag([2, 3, 1]))
    v = classify_cpn_top(g, g)
    assert v.status is EQ and abs(v.details["alpha"]) < 1e-12


def test_cpn_needs_common_exponent():
    assert classify_cpn_top(cp(np.diag([2, 3, 1])), cp(np.diag([4, 27, 1]))).status is NE


def test_cpn_non_simple_inconclusive():
    assert classify_cpn_top(cp(np.diag([2, 4, 1])), cp(np.diag([2, 4, 1]))).status is INC


def test_rigid_identity():
    rng = np.random.default_rng(0)
    g = cp(well_conditioned(rng, 3), well_conditioned(rng, 3))
    v = classify_proj_rigid(g, g, Category.HOLOMORPHIC)
    assert v.status is EQ


def test_rigid_conjugate_family_needs_antiholomorphic_map():
    rng = np.random.default_rng(2)
    ps = [well_conditioned(rng, 2) for _ in range(2)]
    g, h = cp(*ps), cp(*(np.conj(p) for p in ps))
    smooth = classify_proj_rigid(g, h, Category.SMOOTH)
    assert smooth.status is EQ and smooth.witness.conj
    assert classify_proj_rigid(g, h, Category.HOLOMORPHIC).status is NE


def test_rigid_swap():
    g, h = cp(np.diag([2, 1])), cp(np.diag([0.5, 1]))
    for cat in (Category.SMOOTH, Category.HOLOMORPHIC):
        v = classify_proj_rigid(g, h, cat)
        assert v.status is EQ
        s = v.witness.S
        assert abs(s[0, 0]) < 1e-9 and abs(s[1, 1]) < 1e-9


def test_dispatcher_routes_abelian():
    g, h = cp(np.diag([2, 3, 1])), cp(np.diag([2, 3, 1]) ** 1.5)
    assert classify_projective(g, h, "top").details == classify_cpn_top(g, h).details
    g, h = cp(np.diag([2, 1])), cp(np.diag([5, 1]))
    assert classify_projective(g, h, "top").details == classify_cp1_top(g, h).details


def test_dispatcher_nonabelian_conjugate():
    rng = np.random.default_rng(5)
    g = cp([[1, 1], [0, 1]], [[2, 0], [1, 1]])
    s = well_conditioned(rng, 2)
    h = cp(*(conjugate_by(s, m) for m in g))
    v = classify_projective(g, h, "top")
    assert v.status is EQ
    assert verify_conjugacy(v.witness, g, h).max_residual < 1e-9


def test_fixed_point_mismatch_is_not_equivalent():
    assert classify_projective(cp([[1, 1], [0, 1]]), cp(np.diag([2, 1])), "top").status is NE


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(2, 3))
def test_round_trip(seed, n, nu):
    b = projective_pair(np.random.default_rng(seed), n, nu)
    v = classify_projective(b.g1, b.g2, "top")
    assert v.status is EQ and v.residual_report.max_residual <= 1e-9
    a, t = v.details["alpha"], b.truth["alpha"]
    if n == 1:
        assert min(abs(a - t), abs(a + 2 + t)) < 1e-9
    else:
        assert abs(a - t) < 1e-9 and v.details["conj"] == b.truth["conj"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_scale_invariance(seed, n):
    rng = np.random.default_rng(seed)
    b = projective_pair(rng, n, 2, perturb=float(rng.choice([0.0, 1e-3])))
    base = classify_projective(b.g1, b.g2, "top").status
    c = np.exp(rng.normal(size=4) + 1j * rng.uniform(-np.pi, np.pi, 4))
    g1 = b.g1.with_generators([c[0] * b.g1[0], c[1] * b.g1[1]])
    g2 = b.g2.with_generators([c[2] * b.g2[0], c[3] * b.g2[1]])
    assert classify_projective(g1, g2, "top").status is base


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 2))
def test_hierarchy(seed, n):
    rng = np.random.default_rng(seed)
    g = cp(*(np.diag(np.exp(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)))
             for _ in range(2)))
    s = well_conditioned(rng, n + 1)
    h = cp(*(rng.normal() * conjugate_by(s, m) for m in g))
    assert classify_projective(g, h, Category.HOLOMORPHIC).status is EQ
    assert classify_projective(g, h, Category.SMOOTH).status is EQ
    assert classify_projective(g, h, Category.TOPOLOGICAL).status is EQ
