import numpy as np
from hypothesis import given, settings, strategies as st

from phasegroup import Category, GeneratorSet, Space, Status
from phasegroup.mobius import (ELLIPTIC, HYPERBOLIC, IDENTITY, PARABOLIC, classify_mobius_rigid,
                               classify_mobius_top, classify_real_mobius, mobius_type)
from phasegroup.witness import verify_conjugacy

from builders import (mobius_elliptic_pair, mobius_hyperbolic_pair, mobius_parabolic_pair,
                      rotation, well_conditioned)

EQ, NE, INC = Status.EQUIVALENT, Status.NOT_EQUIVALENT, Status.INCONCLUSIVE
finite = dict(allow_nan=False, allow_infinity=False)


def mb(*mats):
    return GeneratorSet(Space.real_mobius(), [np.asarray(m, dtype=float) for m in mats])


def shear(a):
    return np.array([[1.0, a], [0.0, 1.0]])


def test_types():
    assert mobius_type(np.eye(2)).kind == IDENTITY
    c = mobius_type(shear(5))
    assert c.kind == PARABOLIC and abs(c.value - 5) < 1e-12
    c = mobius_type(rotation(np.pi / 3))
    assert c.kind == ELLIPTIC and abs(c.value - np.pi / 3) < 1e-12
    c = mobius_type(np.diag([4.0, 1.0]))
    assert c.kind == HYPERBOLIC and abs(c.value - 4) < 1e-12


@given(st.floats(-5, 5, **finite).filter(lambda c: abs(c) > 1e-3),
       st.sampled_from([np.eye(2), shear(2.0), rotation(0.7), np.diag([3.0, -0.5]),
                        np.array([[2.0, 1.0], [1.0, 1.0]])]))
def test_type_is_scale_invariant(c, m):
    a, b = mobius_type(m), mobius_type(c * m)
    assert a.kind == b.kind and abs(a.value - b.value) < 1e-9


def test_elliptic_reversed_angles():
    g = mb(rotation(np.pi / 3), rotation(np.sqrt(2)))
    h = mb(rotation(-np.pi / 3), rotation(-np.sqrt(2)))
    v = classify_mobius_top(g, h)
    assert v.status is EQ and v.details["sign"] == -1
    assert v.residual_report.max_residual < 1e-12


def test_parabolic_common_scale():
    v = classify_mobius_top(mb(shear(1), shear(2)), mb(shear(3), shear(6)))
    assert v.status is EQ and abs(v.details["lam"] - 3) < 1e-12
    assert v.residual_report.max_residual <= 1e-12


def test_parabolic_no_common_scale():
    assert classify_mobius_top(mb(shear(1), shear(2)), mb(shear(3), shear(5))).status is NE


def test_hyperbolic_ratio_four_to_two():
    g, h = mb(np.diag([4.0, 1.0])), mb(np.diag([2.0, 1.0]))
    v = classify_mobius_top(g, h)
    assert v.status is EQ and abs(v.details["alpha"] + 0.5) < 1e-12
    assert classify_mobius_rigid(g, h, Category.SMOOTH).status is NE


def test_rigid_identity():
    g = mb(np.array([[2.0, 1.0], [1.0, 1.0]]), np.array([[3.0, 2.0], [1.0, 1.0]]))
    v = classify_mobius_rigid(g, g)
    assert v.status is EQ


def test_rigid_reflection_reverses_angles():
    g, h = mb(rotation(0.5), rotation(1.1)), mb(rotation(-0.5), rotation(-1.1))
    v = classify_mobius_rigid(g, h, Category.SMOOTH)
    assert v.status is EQ and v.witness.orientation == -1


def test_mixed_types_not_equivalent():
    assert classify_real_mobius(mb(shear(1)), mb(rotation(0.3)), "top").status is NE


def _rotation_numbers(mats, steps=1000):
    """Average turning per iterate of the circle action, in turns, for
    fixed-point-free orientation-preserving maps."""
    mats = np.array([m / np.sqrt(abs(np.linalg.det(m))) for m in mats])
    t = np.zeros(len(mats))
    total = np.zeros(len(mats))
    for _ in range(steps):
        v = np.stack([np.sin(t / 2), np.cos(t / 2)], axis=1)
        w = np.einsum("kij,kj->ki", mats, v)
        t_new = 2 * np.arctan2(w[:, 0], w[:, 1])
        total += (t_new - t) % (2 * np.pi)
        t = t_new
    return total / (2 * np.pi * steps)


def test_elliptic_verdicts_match_rotation_numbers():
    rng = np.random.default_rng(12)
    pairs = [mobius_elliptic_pair(rng, 2, perturb=0.05 if i % 2 else 0.0) for i in range(100)]
    mats = [m for b in pairs for m in list(b.g1) + list(b.g2)]
    rot = _rotation_numbers(mats).reshape(100, 2, 2)
    agree = 0
    for b, (r1, r2) in zip(pairs, rot):
        oracle = any(np.all(np.abs(((r2 - s * r1) + 0.5) % 1.0 - 0.5) < 5e-3) for s in (1, -1))
        assert (classify_real_mobius(b.g1, b.g2, "top").status is EQ) == oracle
        agree += oracle
    assert agree == 50


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(["hyp", "ell", "par"]))
def test_round_trip_and_smooth_implies_top(seed, kind):
    rng = np.random.default_rng(seed)
    build = {"hyp": mobius_hyperbolic_pair, "ell": mobius_elliptic_pair,
             "par": mobius_parabolic_pair}[kind]
    b = build(rng, 2)
    v = classify_real_mobius(b.g1, b.g2, "top")
    assert v.status is EQ
    assert verify_conjugacy(v.witness, b.g1, b.g2).max_residual <= 1e-9
    if classify_real_mobius(b.g1, b.g2, "smooth").status is EQ:
        assert v.status is EQ


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_smooth_equivalent_pairs_are_topologically_equivalent(seed):
    rng = np.random.default_rng(seed)
    g = mb(*(well_conditioned(rng, 2, real=True) for _ in range(2)))
    s = well_conditioned(rng, 2, real=True)
    h = mb(*(rng.normal() * s @ m @ np.linalg.inv(s) for m in g))
    assert classify_real_mobius(g, h, "smooth").status is EQ
    assert classify_real_mobius(g, h, "top").status is EQ
