"""Conjugacy of linear actions on R^n."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (DEFAULT_TOL, Category, GeneratorSet, Space, SpaceMismatch, Status,
                   ToleranceConfig, Verdict, ZeroGenerator, is_abelian)
from .linalg import (contains_invertible, intertwiner_space, is_strongly_hyperbolic,
                     real_block_diagonalize, real_jordan_form)
from .powerlaw import ABOVE, rational_near, solve_complex_power, solve_real_power
from .witness import (BlockPowerStage, CanonicalChain, DiagPower, LinearMap, LinearStage,
                      PowerBlock, certify, inverse_witness)

TOP = Category.TOPOLOGICAL


def _check_pair(g1, g2, category=TOP):
    if g1.space != g2.space:
        raise SpaceMismatch(f"{g1.space} vs {g2.space}")
    if len(g1) != len(g2):
        return Verdict.not_equivalent(category, "generator counts differ")
    return None


def classify_real_scalar_top(ps, qs, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of x -> p_r x and x -> q_r x on the real line.

    Equivalent iff signs agree and one real alpha > -1 gives
    q_r = p_r|p_r|**alpha for all r; witness x -> x|x|**alpha.
    """
    p = np.asarray(ps, dtype=float).ravel()
    q = np.asarray(qs, dtype=float).ravel()
    if np.any(p == 0) or np.any(q == 0):
        raise ZeroGenerator("scalar generators must be nonzero")
    space = Space.real_linear(1)
    g1 = GeneratorSet(space, [[[v]] for v in p], tol=tol)
    g2 = GeneratorSet(space, [[[v]] for v in q], tol=tol)
    if len(p) != len(q):
        return Verdict.not_equivalent(TOP, "generator counts differ")
    if np.any(np.sign(p) != np.sign(q)):
        return Verdict.not_equivalent(TOP, "orientation (sign) of some generator differs")
    sol = solve_real_power(p, q, ABOVE, tol)
    if sol is None:
        return Verdict.not_equivalent(TOP, "no real exponent alpha > -1")
    w = DiagPower(np.eye(1), np.eye(1), (0,), [sol.alpha.real])
    return certify(w, g1, g2, TOP, tol, "power map x|x|^alpha", alpha=sol.alpha.real,
                   determined=sol.determined)


def canonical_stages(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL):
    """Stages of a homeomorphism h with h(M x) = C h(x), C canonical.

    C = diag(eps/e, 1/e, ..., 1/e, e, ..., e, delta*e) where the number of
    1/e entries is the stable dimension and eps, delta are the signs of the
    stable and unstable determinants.  Returns (stages, C).
    """
    jf = real_jordan_form(m, tol)
    n = m.shape[0]
    stages = [LinearStage(np.linalg.inv(jf.transform))]
    blocks, mult, offset = [], [], 0
    for b in jf.blocks:
        lam = b.eigenvalue
        if b.kind == "real":
            lnmod = np.log(abs(lam.real))
            alpha = 1.0 / abs(lnmod) - 1.0
            blocks.append(PowerBlock((offset,), (offset,), alpha))
            mult.append(np.sign(lam.real) * np.exp(np.sign(lnmod)))
            offset += 1
        elif b.kind == "rotation":
            # block [[a, b], [-b, a]] multiplies z = x1 + i x2 by conj(lam)
            z = np.conj(lam)
            lnrho, phi = np.log(abs(z)), np.angle(z)
            alpha = complex(1.0 / abs(lnrho) - 1.0, -phi / lnrho)
            blocks.append(PowerBlock((offset, offset + 1), (offset, offset + 1), alpha))
            mult += [np.exp(np.sign(lnrho))] * 2
            offset += 2
        else:
            raise ValueError("canonical chains need a diagonalizable hyperbolic matrix")
    stages.append(BlockPowerStage(blocks, n))
    mult = np.array(mult)
    # pair coordinates with multiplier -1/e (or -e) into planes where
    # z -> z|z|^(i pi / ...) turns the half turn into the identity
    pair_blocks, used = [], set()
    for side in (-1.0, 1.0):
        neg = [i for i in range(n) if mult[i] < 0 and np.sign(np.log(-mult[i])) == side]
        while len(neg) >= 2:
            i, j = neg.pop(0), neg.pop(0)
            pair_blocks.append(PowerBlock((i, j), (i, j), complex(0.0, -np.pi / side)))
            mult[i] = mult[j] = -mult[i]
            used |= {i, j}
    pair_blocks += [PowerBlock((i,), (i,), 0.0) for i in range(n) if i not in used]
    stages.append(BlockPowerStage(pair_blocks, n))
    stable = [i for i in range(n) if abs(mult[i]) < 1]
    unstable = [i for i in range(n) if abs(mult[i]) > 1]
    stable.sort(key=lambda i: mult[i] > 0)
    unstable.sort(key=lambda i: mult[i] < 0)
    order = stable + unstable
    perm = np.zeros((n, n))
    for new, old in enumerate(order):
        perm[new, old] = 1.0
    stages.append(LinearStage(perm))
    return stages, mult[order]


def classify_single_hyperbolic(p, q, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of two strongly hyperbolic real matrices.

    Equivalent iff the stable dimensions agree and the stable and unstable
    determinants have matching signs; the witness is a chain of linear maps
    and radial power maps through a common canonical form.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    space = Space.real_linear(p.shape[0])
    g1, g2 = GeneratorSet(space, [p], tol=tol), GeneratorSet(space, [q], tol=tol)
    if not (is_strongly_hyperbolic(p, tol) and is_strongly_hyperbolic(q, tol)):
        return Verdict.inconclusive(TOP, "a matrix is not strongly hyperbolic")
    jp, jq = real_jordan_form(p, tol), real_jordan_form(q, tol)
    info = dict(stable_dims=[jp.stable_dim, jq.stable_dim],
                det_stable=[jp.det_stable, jq.det_stable],
                det_unstable=[jp.det_unstable, jq.det_unstable])
    if jp.stable_dim != jq.stable_dim:
        return Verdict.not_equivalent(TOP, "stable dimensions differ", **info)
    if jp.det_stable * jq.det_stable <= 0:
        return Verdict.not_equivalent(TOP, "stable determinants have opposite signs", **info)
    if jp.det_unstable * jq.det_unstable <= 0:
        return Verdict.not_equivalent(TOP, "unstable determinants have opposite signs", **info)
    sp, cp = canonical_stages(p, tol)
    sq, cq = canonical_stages(q, tol)
    if not np.allclose(cp, cq):
        return Verdict.inconclusive(TOP, "canonical forms disagree numerically", **info)
    chain = CanonicalChain(sp + inverse_witness(CanonicalChain(sq)).stages)
    return certify(chain, g1, g2, TOP, tol, "canonical chain", canonical=list(cp), **info)


def _nonresonant(form, tol) -> str:
    """Unmet premise text, or '' when the rationality checks pass."""
    first = form.values[0]
    for b, blk in enumerate(form.blocks):
        m1 = np.conj(first[b]) if len(blk) == 2 else first[b]
        lnrho1 = np.log(abs(m1))
        phi1 = np.angle(m1) if len(blk) == 2 else 0.0
        alpha1 = complex(1.0 / abs(lnrho1) - 1.0, -phi1 / lnrho1)
        for r in range(1, len(form.values)):
            v = form.values[r][b]
            ratio = np.log(abs(v)) / lnrho1
            if rational_near(ratio, tol.S_max, tol.eig_rel):
                return f"log-modulus ratio of generator {r} on block {b} is near rational"
            if len(blk) == 2:
                m = np.conj(v)
                canon = m * np.exp(alpha1 * np.log(abs(m)))
                if rational_near(np.angle(canon) / np.pi, tol.S_max, tol.eig_rel):
                    return f"rotation angle of generator {r} on block {b} is near rational"
    return ""


def classify_real_abelian_top(g1: GeneratorSet, g2: GeneratorSet,
                              tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Topological conjugacy of commuting hyperbolic families on R^n.

    Both families are brought to a common real block-diagonal form (1x1
    real blocks and 2x2 rotation-scaling blocks).  Under the non-resonance
    premises, conjugate iff blocks can be matched so that each matched pair
    is related by one radial power map: real blocks with a real exponent
    (signs preserved), rotation blocks with a complex exponent and an
    optional reflection.
    """
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    for name, g in (("source", g1), ("target", g2)):
        for r, m in enumerate(g):
            if np.any(np.abs(np.abs(np.linalg.eigvals(m)) - 1.0) <= tol.eig_rel):
                return Verdict.inconclusive(TOP, f"{name} generator {r} is not hyperbolic")
    f1 = real_block_diagonalize(list(g1), tol)
    f2 = real_block_diagonalize(list(g2), tol)
    if f1 is None or f2 is None:
        return Verdict.inconclusive(TOP, "no common real block-diagonal form")
    for form in (f1, f2):
        why = _nonresonant(form, tol)
        if why:
            return Verdict.inconclusive(TOP, why)
    nb = len(f1.blocks)
    if nb != len(f2.blocks):
        return Verdict.not_equivalent(TOP, "block structures differ")
    cost = np.ones((nb, nb))
    sols = {}
    for b, bp in enumerate(f1.blocks):
        pv = [vals[b] for vals in f1.values]
        for c, bq in enumerate(f2.blocks):
            if len(bp) != len(bq):
                continue
            qv = [vals[c] for vals in f2.values]
            if len(bp) == 1:
                sol = solve_real_power(pv, qv, ABOVE, tol)
            else:
                sol = None
                for conj in (False, True):
                    sol = solve_complex_power(np.conj(pv), np.conj(qv), conj, ABOVE, tol)
                    if sol is not None:
                        break
            if sol is not None:
                sols[b, c] = sol
                cost[b, c] = 0.0
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].sum() > 0:
        return Verdict.not_equivalent(TOP, "no block matching admits radial power maps")
    blocks = []
    for b, c in zip(rows, cols):
        sol = sols[b, c]
        blocks.append(PowerBlock(f1.blocks[b], f2.blocks[c], sol.alpha, sol.conj))
    n = g1.space.n
    chain = CanonicalChain([LinearStage(np.linalg.inv(f1.transform)),
                            BlockPowerStage(blocks, n), LinearStage(f2.transform)])
    return certify(chain, g1, g2, TOP, tol, "blockwise radial power map",
                   block_map=[int(c) for c in cols],
                   alphas=[complex(b.alpha) for b in blocks],
                   conj=[bool(b.conj) for b in blocks])


def classify_real_rigid(g1: GeneratorSet, g2: GeneratorSet, category=Category.SMOOTH,
                        tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Linear conjugacy over the reals (the smooth and holomorphic levels)."""
    category = Category(category)
    early = _check_pair(g1, g2, category)
    if early is not None:
        return early
    basis = intertwiner_space(list(g1), list(g2), False, tol)
    s = contains_invertible(basis, tol)
    if s is None:
        return Verdict.not_equivalent(category, "no invertible real intertwiner", dim=len(basis))
    return certify(LinearMap(np.real(s)), g1, g2, category, tol, "real linear intertwiner",
                   dim=len(basis))


def classify_real_linear(g1: GeneratorSet, g2: GeneratorSet, category,
                         tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    category = Category(category)
    if category is not TOP:
        return classify_real_rigid(g1, g2, category, tol)
    early = _check_pair(g1, g2)
    if early is not None:
        return early
    a1, a2 = is_abelian(g1, tol), is_abelian(g2, tol)
    if a1 != a2:
        return Verdict.not_equivalent(TOP, "commutation is preserved by conjugacy but only "
                                           "one family is abelian")
    if not a1:
        v = Verdict.inconclusive(TOP, "non-abelian topological rigidity proven only in "
                                      "general position")
    elif g1.space.n == 1:
        v = classify_real_scalar_top([m[0, 0] for m in g1], [m[0, 0] for m in g2], tol)
    elif len(g1) == 1:
        v = classify_single_hyperbolic(g1[0], g2[0], tol)
    else:
        v = classify_real_abelian_top(g1, g2, tol)
    if v.status is Status.EQUIVALENT:
        return v
    rigid = classify_real_rigid(g1, g2, Category.SMOOTH, tol)
    if rigid.status is Status.EQUIVALENT:
        rigid.category = TOP
        rigid.details["premise_note"] = v.reason
        return rigid
    return v
