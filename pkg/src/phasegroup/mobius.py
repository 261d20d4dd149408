"""Conjugacy of real linear-fractional actions on the extended real line."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (DEFAULT_TOL, Category, GeneratorSet, Singular, SpaceMismatch, Status,
                   ToleranceConfig, Verdict, is_abelian)
from .linalg import contains_invertible, intertwiner_space
from .powerlaw import AVOID, solve_real_power
from .witness import CircleMap, DiagPower, MobiusMap, certify

TOP = Category.TOPOLOGICAL

IDENTITY = "identity"
ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"

_DISC_TOL = 1e-7  # the discriminant of a parabolic matrix is only known to ~sqrt(eps)


@dataclass(frozen=True)
class MobiusClass:
    """Trichotomy datum of a real Moebius generator.

    ``value`` is the rotation angle (elliptic, reported in (-pi/2, pi/2]
    since M and -M act alike), the translation shift (parabolic), the
    eigenvalue ratio mu = p1/p2 with |mu| >= 1 (hyperbolic) or 0 (identity).
    ``normalizer`` S brings the matrix to its canonical form S^-1 M S.
    """

    kind: str
    value: float
    normalizer: np.ndarray


def _unit(m: np.ndarray) -> np.ndarray:
    d = np.linalg.det(m)
    return m / np.sqrt(abs(d))


def _rotation_normalizer(u: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eig(u)
    vec = v[:, int(np.argmax(w.imag))]
    s = np.column_stack([vec.real, vec.imag])
    if np.linalg.det(s) < 0:
        s[:, 1] = -s[:, 1]
    return s / np.sqrt(abs(np.linalg.det(s)))


def _angle_in(u: np.ndarray, s: np.ndarray) -> float:
    m = np.linalg.solve(s, u @ s)
    theta = np.arctan2(m[1, 0], m[0, 0])
    # M and -M act identically: fold into (-pi/2, pi/2]
    if theta > np.pi / 2:
        theta -= np.pi
    elif theta <= -np.pi / 2:
        theta += np.pi
    return float(theta)


def _parabolic_normalizer(u: np.ndarray) -> np.ndarray:
    c = np.sign(np.trace(u))
    _, _, vh = np.linalg.svd(u / c - np.eye(2))
    e = vh[-1]
    e = e * (1 if (e[0], e[1]) > (0, 0) else -1)
    return np.column_stack([e, [-e[1], e[0]]])


def _shift_in(u: np.ndarray, s: np.ndarray) -> float:
    c = np.sign(np.trace(u))
    m = np.linalg.solve(s, (u / c) @ s)
    return float(m[0, 1])


def mobius_type(m, tol: ToleranceConfig = DEFAULT_TOL) -> MobiusClass:
    m = np.asarray(m, dtype=float)
    scale = np.linalg.norm(m, 2)
    if scale == 0 or abs(np.linalg.det(m / scale)) <= tol.det_floor:
        raise Singular("Moebius generator is not invertible")
    u = _unit(m)
    det = np.linalg.det(u)
    tr = np.trace(u)
    if det > 0 and np.linalg.norm(u - np.sign(tr) * np.eye(2)) <= tol.eig_rel * np.linalg.norm(u):
        return MobiusClass(IDENTITY, 0.0, np.eye(2))
    disc = tr * tr - 4 * det
    if det < 0 or disc > _DISC_TOL:
        w, v = np.linalg.eig(u)
        w = w.real
        order = np.argsort(-np.abs(w))
        s = v[:, order].real
        return MobiusClass(HYPERBOLIC, float(w[order[0]] / w[order[1]]), s)
    if disc < -_DISC_TOL:
        s = _rotation_normalizer(u)
        return MobiusClass(ELLIPTIC, _angle_in(u, s), s)
    s = _parabolic_normalizer(u)
    return MobiusClass(PARABOLIC, _shift_in(u, s), s)


def _check_pair(g1, g2, category=TOP):
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    if len(g1) != len(g2):
        return Verdict.not_equivalent(category, "generator counts differ")
    return None


def _family_kind(classes):
    kinds = {c.kind for c in classes if c.kind != IDENTITY}
    if not kinds:
        return IDENTITY
    return kinds.pop() if len(kinds) == 1 else None


def _first_nontrivial(classes):
    return next(c for c in classes if c.kind != IDENTITY)


def _hyperbolic_top(g1, g2, tol):
    p = [_unit(np.asarray(m)) for m in g1]
    q = [_unit(np.asarray(m)) for m in g2]
    s = _first_nontrivial([mobius_type(m, tol) for m in g1]).normalizer
    t = _first_nontrivial([mobius_type(m, tol) for m in g2]).normalizer
    pd, qd = [np.linalg.solve(s, m @ s) for m in p], [np.linalg.solve(t, m @ t) for m in q]
    for d, name in ((pd, "source"), (qd, "target")):
        if any(abs(x[0, 1]) + abs(x[1, 0]) > 1e-7 * np.linalg.norm(x) for x in d):
            return Verdict.inconclusive(TOP, f"{name} generators share no fixed points")
    rho = np.array([x[0, 0] / x[1, 1] for x in pd])
    for order in ((0, 1), (1, 0)):
        sigma = np.array([x[order[0], order[0]] / x[order[1], order[1]] for x in qd])
        sol = solve_real_power(rho, sigma, AVOID, tol)
        if sol is None:
            continue
        w = DiagPower(s, t, order, [sol.alpha.real] * 2, chart="projective")
        return certify(w, g1, g2, TOP, tol, "power map on eigenvalue ratio",
                       alpha=sol.alpha.real, fixed_points_swapped=order != (0, 1))
    return Verdict.not_equivalent(TOP, "no real exponent alpha != -1 relates the ratios")


def _elliptic_top(g1, g2, category, tol):
    s = _first_nontrivial([mobius_type(m, tol) for m in g1]).normalizer
    t = _first_nontrivial([mobius_type(m, tol) for m in g2]).normalizer
    alpha = np.array([_angle_in(_unit(np.asarray(m)), s) for m in g1])
    beta = np.array([_angle_in(_unit(np.asarray(m)), t) for m in g2])
    for sign in (1, -1):
        # M and -M act alike, so angles are compared as 2*theta mod 2*pi
        diff = np.angle(np.exp(2j * (beta - sign * alpha)))
        if np.all(np.abs(diff) <= tol.eig_rel * max(1.0, np.max(np.abs(alpha)))):
            w = CircleMap(sign, 0.0, s, t)
            return certify(w, g1, g2, category, tol, "circle rotation or reflection",
                           sign=sign, angles_source=list(alpha), angles_target=list(beta))
    return Verdict.not_equivalent(category, "rotation angles agree under neither orientation",
                                  angles_source=list(alpha), angles_target=list(beta))


def _parabolic_top(g1, g2, category, tol):
    s = _first_nontrivial([mobius_type(m, tol) for m in g1]).normalizer
    t = _first_nontrivial([mobius_type(m, tol) for m in g2]).normalizer
    p = np.array([_shift_in(_unit(np.asarray(m)), s) for m in g1])
    q = np.array([_shift_in(_unit(np.asarray(m)), t) for m in g2])
    k = int(np.argmax(np.abs(p)))
    lam = q[k] / p[k]
    if lam == 0 or np.any(np.abs(q - lam * p) > tol.eig_rel * max(1.0, np.max(np.abs(q)))):
        return Verdict.not_equivalent(category, "no common scale relates the shifts",
                                      shifts_source=list(p), shifts_target=list(q))
    w = MobiusMap(t @ np.diag([lam, 1.0]) @ np.linalg.inv(s))
    return certify(w, g1, g2, category, tol, "scaling of translations", lam=float(lam),
                   shifts_source=list(p), shifts_target=list(q))


def _structure_mismatch(c1, c2):
    for r, (a, b) in enumerate(zip(c1, c2)):
        if a.kind != b.kind:
            return f"generator {r}: {a.kind} vs {b.kind}"
        if a.kind == HYPERBOLIC and np.sign(a.value) != np.sign(b.value):
            return f"generator {r}: orientation differs"
    return ""


def classify_mobius_top(g1: GeneratorSet, g2: GeneratorSet,
                        tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of abelian Moebius families.

    Generators must have matching types (identity, elliptic, parabolic,
    hyperbolic).  Then: hyperbolic ratios are related by a real power with
    alpha != -1; elliptic angles agree up to a global sign; parabolic shifts
    agree up to a global scale.
    """
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    c1 = [mobius_type(m, tol) for m in g1]
    c2 = [mobius_type(m, tol) for m in g2]
    why = _structure_mismatch(c1, c2)
    if why:
        return Verdict.not_equivalent(TOP, "generator structures differ: " + why)
    kind = _family_kind(c1)
    if kind is None or _family_kind(c2) != kind:
        return Verdict.inconclusive(TOP, "generators of mixed type")
    if kind == IDENTITY:
        w = MobiusMap(np.eye(2))
        return certify(w, g1, g2, TOP, tol, "all generators act as the identity")
    if kind == HYPERBOLIC:
        return _hyperbolic_top(g1, g2, tol)
    if kind == ELLIPTIC:
        return _elliptic_top(g1, g2, TOP, tol)
    return _parabolic_top(g1, g2, TOP, tol)


def classify_mobius_rigid(g1: GeneratorSet, g2: GeneratorSet, category=Category.SMOOTH,
                          tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Real projective intertwiner S P_r = c_r Q_r S with c_r = +-1 after
    normalizing |det| to 1."""
    category = Category(category)
    early = _check_pair(g1, g2, category)
    if early is not None:
        return early
    ps = [_unit(np.asarray(m)) for m in g1]
    qs = [_unit(np.asarray(m)) for m in g2]
    for r, (p, q) in enumerate(zip(ps, qs)):
        if np.sign(np.linalg.det(p)) != np.sign(np.linalg.det(q)):
            return Verdict.not_equivalent(category, f"generator {r}: orientation differs")
    for signs in itertools.product((1.0, -1.0), repeat=len(ps)):
        basis = intertwiner_space(ps, [c * q for c, q in zip(signs, qs)], False, tol)
        s = contains_invertible(basis, tol) if basis else None
        if s is None:
            continue
        return certify(MobiusMap(np.real(s)), g1, g2, category, tol,
                       "linear-fractional intertwiner", signs=list(signs))
    return Verdict.not_equivalent(category, "no linear-fractional intertwiner")


def classify_real_mobius(g1: GeneratorSet, g2: GeneratorSet, category,
                         tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    category = Category(category)
    if category is not TOP:
        return classify_mobius_rigid(g1, g2, category, tol)
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    c1 = [mobius_type(m, tol) for m in g1]
    c2 = [mobius_type(m, tol) for m in g2]
    why = _structure_mismatch(c1, c2)
    if why:
        return Verdict.not_equivalent(TOP, "generator structures differ: " + why)
    a1, a2 = is_abelian(g1, tol), is_abelian(g2, tol)
    if a1 != a2:
        return Verdict.not_equivalent(TOP, "commutation is preserved by conjugacy but only "
                                           "one family is abelian")
    if a1:
        v = classify_mobius_top(g1, g2, tol)
    else:
        v = Verdict.inconclusive(TOP, "non-abelian topological rigidity proven only in "
                                      "general position")
    if v.status is Status.EQUIVALENT:
        return v
    rigid = classify_mobius_rigid(g1, g2, Category.SMOOTH, tol)
    if rigid.status is Status.EQUIVALENT:
        rigid.category = TOP
        rigid.details["premise_note"] = v.reason
        return rigid
    return v
