"""Conjugacy of linear actions on C^n at the four regularity levels."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (DEFAULT_TOL, Category, GeneratorSet, Space, SpaceMismatch, Status,
                   ToleranceConfig, Verdict, ZeroEigenvalue, ZeroGenerator, is_abelian)
from .linalg import (contains_invertible, degeneracy_certificate, intertwiner_space,
                     is_simple_collection, simultaneous_diagonalize)
from .powerlaw import ABOVE, solve_complex_power
from .witness import DiagPower, LinearMap, RLinearMap, _realify, _unrealify, certify

TOP = Category.TOPOLOGICAL


def _as_scalar_set(values, tol) -> GeneratorSet:
    vals = [complex(v) for v in values]
    if any(v == 0 for v in vals):
        raise ZeroGenerator("scalar generators must be nonzero")
    return GeneratorSet(Space.complex_linear(1), [[[v]] for v in vals], tol=tol)


def _check_pair(g1: GeneratorSet, g2: GeneratorSet):
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    if len(g1) != len(g2):
        return Verdict.not_equivalent(TOP, "generator counts differ",
                                      counts=[len(g1), len(g2)])
    return None


def classify_scalar_top(ps: Sequence[complex], qs: Sequence[complex],
                        tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of scalar multiplications w -> p_r w and w -> q_r w.

    Equivalent iff one alpha with Re alpha > -1 gives q_r = c(p_r)|p_r|**alpha
    for every r, c the identity or complex conjugation; the witness is
    w -> c(w)|w|**alpha.
    """
    g1, g2 = _as_scalar_set(ps, tol), _as_scalar_set(qs, tol)
    if len(g1) != len(g2):
        return Verdict.not_equivalent(TOP, "generator counts differ")
    p = np.array([m[0, 0] for m in g1])
    q = np.array([m[0, 0] for m in g2])
    for conj in (False, True):
        sol = solve_complex_power(p, q, conj, ABOVE, tol)
        if sol is not None:
            w = DiagPower([[1.0]], [[1.0]], (0,), [sol.alpha], conj)
            return certify(w, g1, g2, TOP, tol, "power map conjugates the multipliers",
                           alpha=sol.alpha, conj=conj, determined=sol.determined)
    return Verdict.not_equivalent(TOP, "no exponent with Re alpha > -1 in either branch")


def _simple_logs(eigs, tol) -> bool:
    try:
        return is_simple_collection(np.log(np.asarray(eigs, dtype=complex)), tol.S_max,
                                    tol.eig_rel)
    except ZeroEigenvalue:
        return False


def _diag_premises(g1, g2, tol):
    """Common eigenbases and eigenvalue tables, or an unmet premise text."""
    d1 = simultaneous_diagonalize(list(g1), tol)
    d2 = simultaneous_diagonalize(list(g2), tol)
    if d1 is None or d2 is None:
        return None, "families are not simultaneously diagonalizable"
    for name, (_, eigs) in (("source", d1), ("target", d2)):
        for r, e in enumerate(eigs):
            if not _simple_logs(e, tol):
                return None, f"log-spectrum of {name} generator {r} is not simple"
    return (d1, d2), ""


def match_coordinates(p: np.ndarray, q: np.ndarray, conj: bool, tol: ToleranceConfig,
                      bound: str = ABOVE):
    """Perfect matching of source coordinates k to target coordinates l
    with a per-coordinate exponent solving q[l, :] = c(p[k, :])|p[k, :]|**alpha.

    ``p`` and ``q`` have shape (n, nu).  Returns (perm, alphas) or None.
    """
    n = p.shape[0]
    sols = {}
    cost = np.ones((n, n))
    for k in range(n):
        for l in range(n):
            sol = solve_complex_power(p[k], q[l], conj, bound, tol)
            if sol is not None:
                sols[k, l] = sol
                cost[k, l] = 0.0
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].sum() > 0:
        return None
    perm = tuple(int(c) for c in cols)
    return perm, np.array([sols[k, perm[k]].alpha for k in range(n)])


def classify_diag_top(g1: GeneratorSet, g2: GeneratorSet,
                      tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of commuting diagonalizable families on C^n.

    Under the simplicity premise the families are conjugate iff some
    coordinate permutation rho, global conjugation flag and exponents
    alpha_k (Re alpha_k > -1) satisfy q_{rho(k) r} = c(p_{kr})|p_{kr}|**alpha_k.
    """
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    found, why = _diag_premises(g1, g2, tol)
    if found is None:
        return Verdict.inconclusive(TOP, why)
    (s, pe), (t, qe) = found
    p = np.array(pe).T
    q = np.array(qe).T
    for conj in (False, True):
        m = match_coordinates(p, q, conj, tol)
        if m is None:
            continue
        perm, alphas = m
        w = DiagPower(s, t, perm, alphas, conj)
        return certify(w, g1, g2, TOP, tol, "coordinatewise power map",
                       perm=list(perm), alphas=[complex(a) for a in alphas], conj=conj,
                       log_branch="principal")
    return Verdict.not_equivalent(TOP, "no coordinate matching admits exponents with "
                                       "Re alpha > -1", log_branch="principal")


def _realified_basis(g1, g2, tol):
    a_basis = intertwiner_space(list(g1), list(g2), False, tol)
    b_basis = intertwiner_space(list(g1), list(g2), True, tol)
    zero = np.zeros((g1.space.n, g1.space.n), dtype=complex)
    real = []
    for a in a_basis:
        a = np.asarray(a, dtype=complex)
        real += [_realify(a, zero), _realify(1j * a, zero)]
    for b in b_basis:
        b = np.asarray(b, dtype=complex)
        real += [_realify(zero, b), _realify(zero, 1j * b)]
    return real, len(a_basis), len(b_basis)


def classify_rlinear(g1: GeneratorSet, g2: GeneratorSet, tol: ToleranceConfig = DEFAULT_TOL,
                     category: Category = Category.SMOOTH) -> Verdict:
    """R-linear conjugacy w -> A w + B conj(w) (the smooth / R-holomorphic level)."""
    early = _check_pair(g1, g2)
    if early is not None:
        early.category = Category(category)
        return early
    basis, na, nb = _realified_basis(g1, g2, tol)
    m = contains_invertible(basis, tol)
    if m is None:
        return Verdict.not_equivalent(category, "no invertible R-linear intertwiner",
                                      dim_linear=na, dim_antilinear=nb)
    a, b = _unrealify(m)
    return certify(RLinearMap(a, b), g1, g2, category, tol, "R-linear intertwiner",
                   dim_linear=na, dim_antilinear=nb)


def classify_holo(g1: GeneratorSet, g2: GeneratorSet,
                  tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Linear conjugacy S P_r = Q_r S (the holomorphic level)."""
    cat = Category.HOLOMORPHIC
    early = _check_pair(g1, g2)
    if early is not None:
        early.category = cat
        return early
    basis = intertwiner_space(list(g1), list(g2), False, tol)
    s = contains_invertible(basis, tol)
    if s is None:
        cert = degeneracy_certificate(basis, tol)
        return Verdict.not_equivalent(cat, "no invertible linear intertwiner", dim=len(basis),
                                      kernel_vector=None if cert is None else list(cert))
    return certify(LinearMap(s), g1, g2, cat, tol, "linear intertwiner", dim=len(basis))


def rigid_top(g1, g2, tol, premise: str) -> Verdict:
    """Topological verdict from an R-linear witness, else Inconclusive."""
    v = classify_rlinear(g1, g2, tol, Category.SMOOTH)
    if v.status is Status.EQUIVALENT:
        v.category = TOP
        v.reason = "R-linear witness"
        v.details["premise_note"] = premise
        return v
    return Verdict.inconclusive(TOP, premise)


def classify_nonabelian_top(g1: GeneratorSet, g2: GeneratorSet,
                            tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    return rigid_top(g1, g2, tol, "non-abelian topological rigidity proven only in "
                                  "general position")


def classify_complex_linear(g1: GeneratorSet, g2: GeneratorSet, category,
                            tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    category = Category(category)
    if category is Category.HOLOMORPHIC:
        return classify_holo(g1, g2, tol)
    if category in (Category.SMOOTH, Category.RHOLOMORPHIC):
        return classify_rlinear(g1, g2, tol, category)
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    a1, a2 = is_abelian(g1, tol), is_abelian(g2, tol)
    if a1 != a2:
        return Verdict.not_equivalent(TOP, "commutation is preserved by conjugacy but only "
                                           "one family is abelian")
    if not a1:
        return classify_nonabelian_top(g1, g2, tol)
    if g1.space.n == 1:
        v = classify_scalar_top([m[0, 0] for m in g1], [m[0, 0] for m in g2], tol)
    else:
        v = classify_diag_top(g1, g2, tol)
    if v.status is not Status.EQUIVALENT:
        rigid = rigid_top(g1, g2, tol, v.reason)
        if rigid.status is Status.EQUIVALENT:
            return rigid
    return v
