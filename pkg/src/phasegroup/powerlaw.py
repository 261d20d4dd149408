"""Exponent solver for power-law relations between multipliers.

Given multipliers p_r and q_r, find one exponent alpha with

    q_r = c(p_r) |p_r|**alpha      for all r,

where c is the identity or complex conjugation.  The map
w -> c(w)|w|**alpha conjugates multiplication by p_r to multiplication by
q_r, which is the basic building block of every power-map witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_TOL, ToleranceConfig, ZeroGenerator

# Lower-bound modes for the real part of alpha.
ABOVE = "above"      # Re alpha > -1
AVOID = "avoid"      # Re alpha != -1


@dataclass(frozen=True)
class PowerSolution:
    alpha: complex
    conj: bool
    determined: bool


def _check_nonzero(values):
    for v in values:
        if v == 0:
            raise ZeroGenerator("multipliers must be nonzero")


def _admissible(re_alpha: float, bound: str, tol: ToleranceConfig) -> bool:
    if bound == ABOVE:
        return re_alpha > -1.0 + tol.eig_rel
    return abs(re_alpha + 1.0) > tol.eig_rel


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def solve_complex_power(ps: Sequence[complex], qs: Sequence[complex], conj: bool = False,
                        bound: str = ABOVE, tol: ToleranceConfig = DEFAULT_TOL
                        ) -> Optional[PowerSolution]:
    """Common complex exponent for ``q_r = c(p_r)|p_r|**alpha``, or None.

    Unit-modulus multipliers force ``q_r = c(p_r)``.  The others fix
    Re alpha through the moduli and leave Im alpha in an arithmetic
    progression per index; the progressions are intersected within
    ``tol.K_max`` branches and the solution of smallest |Im alpha| wins.
    """
    p = np.asarray(ps, dtype=complex).ravel()
    q = np.asarray(qs, dtype=complex).ravel()
    if p.shape != q.shape:
        raise ValueError("multiplier lists differ in length")
    _check_nonzero(p)
    _check_nonzero(q)
    pt = np.conj(p) if conj else p
    logp = np.log(np.abs(p))
    logq = np.log(np.abs(q))
    unit = np.abs(logp) <= tol.eig_rel
    if np.any(np.abs(q[unit] / pt[unit] - 1.0) > tol.eig_rel):
        return None
    if not np.any(~unit):
        return PowerSolution(0j, conj, False)
    lp, lq = logp[~unit], logq[~unit]
    theta = np.angle(q[~unit] / pt[~unit])
    # modulus equations ln|q| = (1 + a) ln|p|
    a = float(np.dot(lp, lq) / np.dot(lp, lp)) - 1.0
    if np.any(np.abs(lq - (1.0 + a) * lp) > tol.eig_rel * np.maximum(1.0, np.abs(lq))):
        return None
    if not _admissible(a, bound, tol):
        return None
    # phase equations b ln|p| = theta (mod 2 pi)
    ref = int(np.argmax(np.abs(lp)))
    ks = sorted(range(-tol.K_max, tol.K_max + 1),
                key=lambda k: (abs(theta[ref] + 2 * np.pi * k), k))
    for k in ks:
        b = (theta[ref] + 2 * np.pi * k) / lp[ref]
        phase = b * lp
        branch = np.round((phase - theta) / (2 * np.pi))
        if np.any(np.abs(branch) > tol.K_max):
            continue
        err = np.abs(_wrap(phase - theta))
        if np.all(err <= tol.eig_rel * np.maximum(1.0, np.abs(phase))):
            return PowerSolution(complex(a, b), conj, True)
    return None


def solve_real_power(ps: Sequence[float], qs: Sequence[float], bound: str = ABOVE,
                     tol: ToleranceConfig = DEFAULT_TOL) -> Optional[PowerSolution]:
    """Common real exponent for ``q_r = p_r|p_r|**alpha``, or None."""
    p = np.asarray(ps, dtype=float).ravel()
    q = np.asarray(qs, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("multiplier lists differ in length")
    _check_nonzero(p)
    _check_nonzero(q)
    if np.any(np.sign(p) != np.sign(q)):
        return None
    logp, logq = np.log(np.abs(p)), np.log(np.abs(q))
    unit = np.abs(logp) <= tol.eig_rel
    if np.any(np.abs(q[unit] / p[unit] - 1.0) > tol.eig_rel):
        return None
    if not np.any(~unit):
        return PowerSolution(0j, False, False)
    lp, lq = logp[~unit], logq[~unit]
    a = float(np.dot(lp, lq) / np.dot(lp, lp)) - 1.0
    if np.any(np.abs(lq - (1.0 + a) * lp) > tol.eig_rel * np.maximum(1.0, np.abs(lq))):
        return None
    if not _admissible(a, bound, tol):
        return None
    return PowerSolution(complex(a, 0.0), False, True)


def solve_any_branch(ps, qs, bound: str = ABOVE, tol: ToleranceConfig = DEFAULT_TOL,
                     conj_options=(False, True)) -> Optional[PowerSolution]:
    for conj in conj_options:
        sol = solve_complex_power(ps, qs, conj, bound, tol)
        if sol is not None:
            return sol
    return None


def apply_power(p, alpha: complex, conj: bool = False):
    """c(p)|p|**alpha, the multiplier a power map sends p to."""
    p = np.asarray(p, dtype=complex)
    base = np.conj(p) if conj else p
    return base * np.exp(alpha * np.log(np.abs(p)))


def inverse_exponent(alpha: complex, conj: bool = False) -> complex:
    """Exponent of the inverse of w -> c(w)|w|**alpha.

    For real alpha this is -alpha / (1 + alpha); only the real part enters
    the denominator because |w|**alpha has modulus |w|**Re(alpha).
    """
    alpha = complex(alpha)
    num = alpha.conjugate() if conj else alpha
    return -num / (1.0 + alpha.real)


def rational_near(x: float, max_den: int, tol: float) -> bool:
    """True if ``x`` lies within ``tol`` of a rational with denominator <= max_den."""
    if not math.isfinite(x):
        return False
    frac = Fraction(x).limit_denominator(max_den)
    return abs(x - float(frac)) <= tol * max(1.0, abs(x))
