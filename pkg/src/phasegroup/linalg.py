"""Numerical kernels: spectral decompositions, simultaneous reductions,
spectral predicates and intertwiner spaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from .core import DEFAULT_TOL, NonFinite, ToleranceConfig, ZeroEigenvalue

_EPS = np.finfo(float).eps


def _check_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has non-finite entries")


def _sort_key(z: complex, scale: float):
    # rounding keeps the order stable under last-bit noise
    return (round(z.real / scale, 9), round(z.imag / scale, 9))


def sort_order(values: Sequence[complex]) -> list:
    values = list(values)
    scale = max([abs(v) for v in values] + [1.0])
    return sorted(range(len(values)), key=lambda i: _sort_key(values[i], scale))


@dataclass
class SpectralForm:
    eigenvalues: np.ndarray
    transform: np.ndarray
    diagonalizable: bool
    condition_estimate: float

    def reconstruct(self) -> np.ndarray:
        s = self.transform
        return s @ np.diag(self.eigenvalues) @ np.linalg.inv(s)


def eig_decompose(m, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralForm:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    _check_finite(m)
    w, v = np.linalg.eig(m)
    order = sort_order(w)
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    cond = float(np.linalg.cond(v))
    if not np.isfinite(cond):
        cond = np.inf
    return SpectralForm(w, v, cond <= 1.0 / tol.eig_rel, cond)


def _off_diagonal_ratio(d: np.ndarray) -> float:
    off = d - np.diag(np.diag(d))
    return float(np.linalg.norm(off) / max(np.linalg.norm(d), _EPS))


def simultaneous_diagonalize(family: Sequence, tol: ToleranceConfig = DEFAULT_TOL,
                             seed: Optional[int] = None, retries: int = 8):
    """Common eigenbasis of a commuting diagonalizable family.

    Returns ``(S, [eigenvalues of each member])`` with aligned columns, or
    None when the family does not commute or some member is defective.
    """
    mats = [np.asarray(p, dtype=complex) for p in family]
    if not mats:
        raise ValueError("family must be nonempty")
    for p in mats:
        _check_finite(p)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            a, b = mats[i], mats[j]
            if np.linalg.norm(a @ b - b @ a) > tol.eig_rel * np.linalg.norm(a) * np.linalg.norm(b):
                return None
    rng = np.random.default_rng([tol.seed if seed is None else seed, 11])
    for _ in range(retries):
        coeffs = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
        combo = sum(c * p / np.linalg.norm(p) for c, p in zip(coeffs, mats))
        form = eig_decompose(combo, tol)
        if not form.diagonalizable:
            continue
        s = form.transform
        sinv = np.linalg.inv(s)
        diags = [sinv @ p @ s for p in mats]
        bound = tol.eig_rel * max(1.0, form.condition_estimate)
        if all(_off_diagonal_ratio(d) <= bound for d in diags):
            return s, [np.diag(d).copy() for d in diags]
    return None


@dataclass(frozen=True)
class JordanBlock:
    """One real Jordan block.

    ``kind`` is ``"real"`` (1x1), ``"rotation"`` (2x2 block [[a, b], [-b, a]]
    for eigenvalue a + ib, b > 0) or ``"jordan"`` (a Jordan cell of ``size``
    for a real or complex eigenvalue).
    """

    kind: str
    eigenvalue: complex
    size: int = 1

    @property
    def dim(self) -> int:
        return self.size * (1 if abs(self.eigenvalue.imag) == 0 else 2)

    @property
    def modulus(self) -> float:
        return abs(self.eigenvalue)

    def matrix(self) -> np.ndarray:
        lam = self.eigenvalue
        if lam.imag == 0:
            return lam.real * np.eye(self.size) + np.eye(self.size, k=1)
        a, b = lam.real, lam.imag
        rot = np.array([[a, b], [-b, a]])
        out = np.kron(np.eye(self.size), rot) + np.kron(np.eye(self.size, k=1), np.eye(2))
        return out


@dataclass
class RealJordanForm:
    blocks: List[JordanBlock]
    transform: np.ndarray
    stable_dim: int
    unstable_dim: int
    det_stable: float
    det_unstable: float

    @property
    def matrix(self) -> np.ndarray:
        return scipy.linalg.block_diag(*[b.matrix() for b in self.blocks])


def _null_basis(a: np.ndarray, rtol: float) -> np.ndarray:
    if a.size == 0:
        return np.eye(a.shape[1], dtype=a.dtype)
    u, s, vh = np.linalg.svd(a)
    scale = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > rtol * scale))
    return vh[rank:].conj().T


def _cluster(values: np.ndarray, ctol: float) -> list:
    remaining = list(range(len(values)))
    clusters = []
    while remaining:
        i = remaining.pop(0)
        group = [i]
        for j in list(remaining):
            if abs(values[j] - values[i]) <= ctol:
                group.append(j)
                remaining.remove(j)
        clusters.append(group)
    return clusters


def _jordan_chains(n_op: np.ndarray, mult: int, rtol: float) -> list:
    """Jordan chains of the nilpotent part ``n_op`` on a generalized eigenspace
    of dimension ``mult``; each chain is returned eigenvector first."""
    size = n_op.shape[0]
    powers = [np.eye(size, dtype=n_op.dtype)]
    for _ in range(mult):
        powers.append(powers[-1] @ n_op)
    kernels = [_null_basis(p, rtol) for p in powers]
    dims = [k.shape[1] for k in kernels]
    top = next((k for k in range(len(dims)) if dims[k] >= mult), len(dims) - 1)
    heads = []  # (vector, length)
    for level in range(top, 0, -1):
        at_least = dims[level] - dims[level - 1]
        above = dims[level + 1] - dims[level] if level + 1 < len(dims) else 0
        new = at_least - above
        if new <= 0:
            continue
        spanning = [kernels[level - 1]]
        for vec, length in heads:
            spanning.append((powers[length - level] @ vec)[:, None])
        w = np.hstack(spanning) if spanning else np.zeros((size, 0))
        if w.shape[1]:
            q, _ = np.linalg.qr(w)
            qrank = np.linalg.matrix_rank(w, tol=rtol * max(1.0, np.linalg.norm(w, 2)))
            q = q[:, :qrank]
            cand = kernels[level] - q @ (q.conj().T @ kernels[level])
        else:
            cand = kernels[level]
        u, s, _ = np.linalg.svd(cand, full_matrices=False)
        for j in range(new):
            heads.append((u[:, j], level))
    chains = []
    for vec, length in heads:
        chain = [powers[length - 1 - j] @ vec for j in range(length)]
        chains.append(chain)
    return chains


def real_jordan_form(m, tol: ToleranceConfig = DEFAULT_TOL) -> RealJordanForm:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    _check_finite(m)
    n = m.shape[0]
    scale = max(1.0, np.linalg.norm(m, 2))
    w = np.linalg.eigvals(m)
    ctol = 1e-6 * scale
    rtol = 1e-7
    pieces = []  # (block, columns)
    for group in _cluster(w, ctol):
        lam = complex(np.mean(w[group]))
        if lam.imag < -ctol:
            continue  # represented by its conjugate
        is_real = abs(lam.imag) <= ctol
        if is_real:
            lam = complex(lam.real, 0.0)
            n_op = m - lam.real * np.eye(n)
        else:
            n_op = m.astype(complex) - lam * np.eye(n)
        chains = _jordan_chains(n_op, len(group), rtol)
        for chain in chains:
            if is_real:
                norm0 = np.linalg.norm(np.real(chain[0]))
                cols = [np.real(v) / norm0 for v in chain]
                kind = "real" if len(chain) == 1 else "jordan"
            else:
                norm0 = np.linalg.norm(chain[0])
                cols = []
                for v in chain:
                    v = v / norm0
                    cols.extend([v.real, v.imag])
                kind = "rotation" if len(chain) == 1 else "jordan"
            pieces.append((JordanBlock(kind, lam, len(chain)), np.column_stack(cols)))

    mtol = tol.eig_rel

    def group_of(block):
        mod = block.modulus
        complex_block = block.eigenvalue.imag != 0
        if mod < 1 - mtol:
            g = 0
        elif mod > 1 + mtol:
            g = 2
        else:
            g = 4
        return g + (1 if complex_block else 0)

    pieces.sort(key=lambda p: (group_of(p[0]), round(p[0].modulus, 12),
                               round(float(np.angle(p[0].eigenvalue)), 12)))
    blocks = [p[0] for p in pieces]
    transform = np.column_stack([p[1] for p in pieces]) if pieces else np.zeros((n, 0))
    stable = [b for b in blocks if b.modulus < 1 - mtol]
    unstable = [b for b in blocks if b.modulus > 1 + mtol]

    def det_of(bs):
        d = 1.0
        for b in bs:
            d *= np.linalg.det(b.matrix())
        return float(d)

    return RealJordanForm(blocks, transform, sum(b.dim for b in stable),
                          sum(b.dim for b in unstable), det_of(stable), det_of(unstable))


def is_simple_collection(lambdas: Sequence[complex], S_max: int = 32, tol: float = 1e-9) -> bool:
    vals = [complex(v) for v in lambdas]
    if any(v == 0 for v in vals):
        raise ZeroEigenvalue("simple collections consist of nonzero numbers")
    s = np.arange(1, S_max + 1)
    for k in range(len(vals)):
        for l in range(len(vals)):
            if k == l:
                continue
            ratio = vals[k] / vals[l]
            if np.any(np.abs(ratio - s) <= tol) or np.any(np.abs(ratio - 1.0 / s) <= tol):
                return False
    return True


def is_strongly_hyperbolic(m, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    w = np.linalg.eigvals(m)
    gap = tol.eig_rel * np.linalg.norm(m, 2)
    for i in range(len(w)):
        if abs(abs(w[i]) - 1.0) <= tol.eig_rel:
            return False
        for j in range(i + 1, len(w)):
            if abs(w[i] - w[j]) <= gap:
                return False
    return True


def _stacked_sylvester(ps, qs, conjugate: bool) -> np.ndarray:
    rows = []
    for p, q in zip(ps, qs):
        p = np.conj(p) if conjugate else p
        n = p.shape[0]
        # vec(S P - Q S) = (P^T kron I - I kron Q) vec(S), column-major vec
        rows.append(np.kron(p.T, np.eye(n)) - np.kron(np.eye(n), q))
    return np.vstack(rows)


def intertwiner_space(ps: Sequence, qs: Sequence, conjugate: bool = False,
                      tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Orthonormal basis of {S : S P_r = Q_r S for all r} (or with conj(P_r))."""
    if len(ps) != len(qs):
        raise ValueError("families must have equal length")
    is_real = all(np.isrealobj(np.asarray(x)) or not np.any(np.asarray(x).imag)
                  for x in list(ps) + list(qs)) and not conjugate
    dtype = float if is_real else complex
    ps = [np.asarray(p, dtype=complex).real.astype(dtype) if is_real else np.asarray(p, dtype=complex)
          for p in ps]
    qs = [np.asarray(q, dtype=complex).real.astype(dtype) if is_real else np.asarray(q, dtype=complex)
          for q in qs]
    n = ps[0].shape[0]
    if not ps:
        return [np.eye(n)]
    a = _stacked_sylvester(ps, qs, conjugate)
    null = _null_basis(a, tol.eig_rel)
    return [null[:, j].reshape(n, n, order="F") for j in range(null.shape[1])]


def _is_invertible(m: np.ndarray, tol: ToleranceConfig) -> bool:
    scale = np.linalg.norm(m, 2)
    return scale > 0 and abs(np.linalg.det(m / scale)) > tol.det_floor


def contains_invertible(basis: Sequence, tol: ToleranceConfig = DEFAULT_TOL,
                        seed: Optional[int] = None, trials: int = 64):
    """An invertible member of span(basis), or None.

    det restricted to the span is a polynomial, so it either vanishes
    identically or almost nowhere; random combinations find a nonzero point.
    """
    basis = [np.asarray(b) for b in basis]
    if not basis:
        return None
    for b in basis:
        if _is_invertible(b, tol):
            return b.copy()
    rng = np.random.default_rng([tol.seed if seed is None else seed, 23])
    is_complex = any(np.iscomplexobj(b) and np.any(b.imag) for b in basis)
    for _ in range(trials):
        c = rng.normal(size=len(basis))
        if is_complex:
            c = c + 1j * rng.normal(size=len(basis))
        m = sum(ci * b for ci, b in zip(c, basis))
        if _is_invertible(m, tol):
            return m
    return None


def degeneracy_certificate(basis: Sequence, tol: ToleranceConfig = DEFAULT_TOL):
    """A common kernel vector of all basis members, if one exists."""
    if not basis:
        return None
    stacked = np.vstack([np.asarray(b) for b in basis])
    null = _null_basis(stacked, tol.eig_rel)
    return null[:, 0] if null.shape[1] else None


@dataclass
class RealBlockForm:
    """Common real block-diagonal form of a commuting real family.

    ``blocks`` lists coordinate index tuples (length 1 or 2); ``values[r][b]``
    is the eigenvalue of member r on block b (real for 1D blocks, complex
    a + ib for 2D blocks acting as [[a, b], [-b, a]]).
    """

    transform: np.ndarray
    blocks: list
    values: list


def real_block_diagonalize(family: Sequence, tol: ToleranceConfig = DEFAULT_TOL,
                           seed: Optional[int] = None, retries: int = 8):
    mats = [np.asarray(p, dtype=float) for p in family]
    n = mats[0].shape[0]
    rng = np.random.default_rng([tol.seed if seed is None else seed, 17])
    for _ in range(retries):
        coeffs = rng.normal(size=len(mats))
        combo = sum(c * p / np.linalg.norm(p) for c, p in zip(coeffs, mats))
        w, v = np.linalg.eig(combo)
        scale = max(1.0, np.max(np.abs(w)))
        if any(abs(w[i] - w[j]) <= 1e-7 * scale for i in range(n) for j in range(i + 1, n)):
            continue
        cols, blocks, reps = [], [], []
        order = sort_order(w)
        for i in order:
            lam = w[i]
            if abs(lam.imag) <= 1e-9 * scale:
                vec = v[:, i]
                vec = vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))]))
                vec = vec.real / np.linalg.norm(vec.real)
                blocks.append((len(cols),))
                cols.append(vec)
                reps.append(vec.astype(complex))
            elif lam.imag > 0:
                vec = v[:, i] / np.linalg.norm(v[:, i])
                blocks.append((len(cols), len(cols) + 1))
                cols.extend([vec.real, vec.imag])
                reps.append(vec)
        s = np.column_stack(cols)
        if np.linalg.cond(s) > 1.0 / tol.eig_rel:
            continue
        sinv = np.linalg.inv(s)
        values, ok = [], True
        for p in mats:
            d = sinv @ p @ s
            mask = np.zeros_like(d, dtype=bool)
            vals = []
            for blk in blocks:
                idx = np.ix_(blk, blk)
                mask[idx] = True
                sub = d[idx]
                if len(blk) == 1:
                    vals.append(float(sub[0, 0]))
                else:
                    a, b = sub[0, 0], sub[0, 1]
                    if abs(sub[1, 1] - a) + abs(sub[1, 0] + b) > 1e-7 * max(1.0, abs(a) + abs(b)):
                        ok = False
                    vals.append(complex(a, b))
            if np.linalg.norm(d[~mask]) > 1e-7 * np.linalg.norm(d):
                ok = False
            values.append(vals)
        if ok:
            return RealBlockForm(s, blocks, values)
    return None
