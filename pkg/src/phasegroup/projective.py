"""Conjugacy of linear-fractional actions on CP^n.

Generators are (n+1)x(n+1) matrices taken modulo nonzero scalars; every
criterion below works on det-normalized representatives and eigenvalue
ratios, so rescaling a generator never changes a verdict.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import (DEFAULT_TOL, Category, GeneratorSet, SpaceMismatch, Status,
                   ToleranceConfig, Verdict, ZeroEigenvalue, is_abelian)
from .linalg import (contains_invertible, intertwiner_space,
                     is_simple_collection, simultaneous_diagonalize)
from .powerlaw import ABOVE, AVOID, solve_complex_power
from .witness import DiagPower, LinearMap, certify

TOP = Category.TOPOLOGICAL


def _check_pair(g1, g2, category=TOP):
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    if len(g1) != len(g2):
        return Verdict.not_equivalent(category, "generator counts differ")
    return None


def _unit_det(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.det(m) ** (1.0 / m.shape[0])


def _action_type(m: np.ndarray, tol: ToleranceConfig) -> str:
    """'identity', 'diagonalizable' or 'defective' for a 2x2 projective matrix."""
    u = _unit_det(np.asarray(m, dtype=complex))
    c = np.trace(u) / 2.0
    if np.linalg.norm(u - c * np.eye(2)) <= tol.eig_rel * np.linalg.norm(u):
        return "identity"
    disc = np.trace(u) ** 2 - 4.0
    if abs(disc) <= 1e-7:
        return "defective"
    return "diagonalizable"


def jordan_block_count_compatible(ps, qs, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff each pair (P_r, Q_r) of 2x2 matrices has the same fixed-point
    structure on CP^1: both scalar, both diagonalizable non-scalar, or both
    defective."""
    return all(_action_type(p, tol) == _action_type(q, tol) for p, q in zip(ps, qs))


def _diagonal_data(g: GeneratorSet, tol):
    reps = [_unit_det(np.asarray(m, dtype=complex)) for m in g]
    return simultaneous_diagonalize(reps, tol)


def _ratio_table(eigs, order):
    """ratios[k, r] = e_{order[k], r} / e_{order[-1], r} for k < n."""
    e = np.array(eigs).T  # (n+1, nu)
    last = e[order[-1]]
    return np.array([e[order[k]] / last for k in range(len(order) - 1)])


def classify_cp1_top(g1: GeneratorSet, g2: GeneratorSet,
                     tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of commuting diagonalizable families on CP^1.

    Eigenvalue ratios must satisfy sigma_r = c(rho_r)|rho_r|**alpha with
    Re alpha != -1; Re alpha < -1 corresponds to a witness exchanging the
    two fixed points.
    """
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    if not jordan_block_count_compatible(g1, g2, tol):
        return Verdict.not_equivalent(TOP, "fixed-point structures differ")
    d1, d2 = _diagonal_data(g1, tol), _diagonal_data(g2, tol)
    if d1 is None or d2 is None:
        return Verdict.inconclusive(TOP, "families are not simultaneously diagonalizable")
    (s, pe), (t, qe) = d1, d2
    rho = _ratio_table(pe, (0, 1))[0]
    for order in ((0, 1), (1, 0)):
        sigma = _ratio_table(qe, order)[0]
        for conj in (False, True):
            sol = solve_complex_power(rho, sigma, conj, AVOID, tol)
            if sol is None:
                continue
            # source coordinate k goes to target coordinate order[k]
            w = DiagPower(s, t, order, [sol.alpha, sol.alpha], conj, chart="projective")
            return certify(w, g1, g2, TOP, tol, "power map on eigenvalue ratio",
                           alpha=complex(sol.alpha), conj=conj,
                           fixed_points_swapped=bool(sol.alpha.real < -1 or order != (0, 1)))
    return Verdict.not_equivalent(TOP, "no exponent with Re alpha != -1 relates the ratios")


def _simple_ratio_logs(eigs, tol) -> bool:
    e = np.array(eigs).T
    for r in range(e.shape[1]):
        try:
            logs = np.log(e[:-1, r] / e[-1, r])
            if not is_simple_collection(logs, tol.S_max, tol.eig_rel):
                return False
        except ZeroEigenvalue:
            return False
    return True


def _search_common_alpha(p_rat_full, qe, conj, tol):
    """Backtracking over coordinate bijections with one common exponent.

    ``p_rat_full[k]`` holds the source ratios p_k / p_last (k < n); ``qe`` is
    the target eigenvalue table (n+1, nu).  Returns (assignment, solution)
    where assignment[k] is the target coordinate of source coordinate k and
    the last entry is the image of the source's last coordinate.
    """
    m = qe.shape[0]
    n = m - 1
    for last in range(m):
        rest = [j for j in range(m) if j != last]

        def extend(k, used, ps, qs):
            if k == n:
                sol = solve_complex_power(ps, qs, conj, ABOVE, tol)
                return ([], sol) if sol is not None else None
            for j in rest:
                if j in used:
                    continue
                nps = ps + list(p_rat_full[k])
                nqs = qs + list(qe[j] / qe[last])
                if solve_complex_power(nps, nqs, conj, ABOVE, tol) is None:
                    continue
                found = extend(k + 1, used | {j}, nps, nqs)
                if found is not None:
                    return [j] + found[0], found[1]
            return None

        found = extend(0, frozenset(), [], [])
        if found is not None:
            return found[0] + [last], found[1]
    return None


def classify_cpn_top(g1: GeneratorSet, g2: GeneratorSet,
                     tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of commuting diagonalizable families on CP^n, n > 1.

    Under the simplicity premise on the log-ratio spectra, conjugate iff a
    coordinate permutation, a conjugation flag and ONE exponent alpha
    (Re alpha > -1) relate every ratio p_k / p_{n+1} to the matching target
    ratio.
    """
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    d1, d2 = _diagonal_data(g1, tol), _diagonal_data(g2, tol)
    if d1 is None or d2 is None:
        return Verdict.inconclusive(TOP, "families are not simultaneously diagonalizable")
    (s, pe), (t, qe) = d1, d2
    if not (_simple_ratio_logs(pe, tol) and _simple_ratio_logs(qe, tol)):
        return Verdict.inconclusive(TOP, "log-ratio spectrum is not simple")
    m = g1.space.matrix_size
    p_rat = _ratio_table(pe, tuple(range(m)))
    q_tab = np.array(qe).T
    for conj in (False, True):
        found = _search_common_alpha(p_rat, q_tab, conj, tol)
        if found is None:
            continue
        perm, sol = found
        w = DiagPower(s, t, tuple(perm), [sol.alpha] * m, conj, chart="projective")
        return certify(w, g1, g2, TOP, tol, "common power map on eigenvalue ratios",
                       alpha=complex(sol.alpha), conj=conj, perm=list(perm),
                       log_branch="principal")
    return Verdict.not_equivalent(TOP, "no permutation admits one common exponent",
                                  log_branch="principal")


def _root_options(m: int, count: int):
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    return itertools.product(roots, repeat=count)


def classify_proj_rigid(g1: GeneratorSet, g2: GeneratorSet, category,
                        tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Projective intertwiner S P_r = c_r Q_r S (or S conj(P_r) = c_r Q_r S
    below the holomorphic level)."""
    category = Category(category)
    early = _check_pair(g1, g2, category)
    if early is not None:
        return early
    ps = [_unit_det(np.asarray(p, dtype=complex)) for p in g1]
    qs = [_unit_det(np.asarray(q, dtype=complex)) for q in g2]
    m = g1.space.matrix_size
    branches = [False] if category is Category.HOLOMORPHIC else [False, True]
    for conj in branches:
        for cs in _root_options(m, len(ps)):
            scaled = [c * q for c, q in zip(cs, qs)]
            basis = intertwiner_space(ps, scaled, conj, tol)
            s = contains_invertible(basis, tol) if basis else None
            if s is None:
                continue
            w = LinearMap(s, conj, projective=True)
            kind = "antiholomorphic" if conj else "holomorphic"
            return certify(w, g1, g2, category, tol, f"{kind} projective intertwiner",
                           scales=[complex(c) for c in cs])
    return Verdict.not_equivalent(category, "no projective intertwiner")


def classify_projective(g1: GeneratorSet, g2: GeneratorSet, category,
                        tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    category = Category(category)
    if category is not TOP:
        return classify_proj_rigid(g1, g2, category, tol)
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    n = g1.space.n
    if n == 1 and not jordan_block_count_compatible(g1, g2, tol):
        return Verdict.not_equivalent(TOP, "fixed-point structures differ")
    a1, a2 = is_abelian(g1, tol), is_abelian(g2, tol)
    v = None
    if a1 != a2:
        v = Verdict.not_equivalent(TOP, "commutation is preserved by conjugacy but only "
                                        "one family is abelian")
        premise = v.reason
    elif a1:
        v = classify_cp1_top(g1, g2, tol) if n == 1 else classify_cpn_top(g1, g2, tol)
        if v.status is Status.EQUIVALENT:
            return v
        premise = v.reason
    else:
        premise = "non-abelian topological rigidity proven only in general position"
    rigid = classify_proj_rigid(g1, g2, Category.SMOOTH, tol)
    if rigid.status is Status.EQUIVALENT:
        rigid.category = TOP
        rigid.details["premise_note"] = premise
        return rigid
    return v if v is not None else Verdict.inconclusive(TOP, premise)
