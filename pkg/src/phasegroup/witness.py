"""Conjugating maps shipped with Equivalent verdicts.

Every witness is a concrete map that can be evaluated on sample points,
inverted, verified against two generator sets and serialized.  Points are
row vectors; evaluation is batched over the leading axis.  Projective
spaces use homogeneous coordinates (length n + 1 for complex projective
space, length 2 for the extended real line).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from .core import (DEFAULT_TOL, Category, GeneratorSet, PhaseGroupError, ResidualReport,
                   Space, SpaceKind, Status, ToleranceConfig, Verdict)
from .jsonio import decode_complex, decode_matrix, encode_complex, encode_matrix
from .powerlaw import inverse_exponent

_LOG_FLOOR = -745.0  # log of the smallest subnormal double


class ChartOverflow(PhaseGroupError):
    pass


def _is_real(*arrays) -> bool:
    return all(not np.iscomplexobj(a) or not np.any(np.imag(a)) for a in arrays)


@dataclass
class DiagPower:
    """x -> T . D(S^-1 x) with D(y)[perm[k]] = gamma_k c(y_k)|y_k|**alpha_k.

    ``chart`` is ``"linear"`` for vector spaces and ``"projective"`` for
    homogeneous coordinates, where the map is applied coordinatewise and
    the result is only defined up to a common scale.
    """

    S: np.ndarray
    T: np.ndarray
    perm: Tuple[int, ...]
    alphas: np.ndarray
    conj: bool = False
    gammas: Optional[np.ndarray] = None
    chart: str = "linear"

    def __post_init__(self):
        self.S = np.asarray(self.S)
        self.T = np.asarray(self.T)
        self.perm = tuple(int(i) for i in self.perm)
        self.alphas = np.asarray(self.alphas, dtype=complex).ravel()
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError("perm must be a permutation")
        if self.gammas is None:
            self.gammas = np.ones(n, dtype=complex)
        self.gammas = np.asarray(self.gammas, dtype=complex).ravel()
        if np.any(self.gammas == 0):
            raise ValueError("gammas must be nonzero")


@dataclass
class LinearMap:
    """x -> S c(x); projective when acting on homogeneous coordinates."""

    S: np.ndarray
    conj: bool = False
    projective: bool = False

    def __post_init__(self):
        self.S = np.asarray(self.S)


@dataclass
class RLinearMap:
    """w -> A w + B conj(w) on complex space."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        self.B = np.asarray(self.B, dtype=complex)


@dataclass
class MobiusMap:
    """Real linear-fractional map x -> (a x + b) / (c x + d) with S = [[a, b], [c, d]]."""

    S: np.ndarray

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=float)

    @property
    def orientation(self) -> int:
        return 1 if np.linalg.det(self.S) > 0 else -1


@dataclass
class CircleMap:
    """Map of the extended real line acting as t -> sign*t + shift in the
    angle chart t = 2 atan2(y1, y2) of y = S^-1 v, followed by T."""

    sign: int
    shift: float
    S: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.S = np.asarray(self.S, dtype=float)
        self.T = np.asarray(self.T, dtype=float)


@dataclass
class LinearStage:
    M: np.ndarray

    def __post_init__(self):
        self.M = np.asarray(self.M)


@dataclass
class PowerBlock:
    """Radial power map on a real coordinate block.

    A 1-element block maps x -> gamma x|x|**alpha (alpha real); a 2-element
    block treats (x_i, x_j) as z = x_i + i x_j and maps z -> gamma c(z)|z|**alpha.
    """

    src: Tuple[int, ...]
    dst: Tuple[int, ...]
    alpha: complex
    conj: bool = False
    gamma: complex = 1.0

    def __post_init__(self):
        self.src = tuple(int(i) for i in self.src)
        self.dst = tuple(int(i) for i in self.dst)
        if len(self.src) != len(self.dst) or len(self.src) not in (1, 2):
            raise ValueError("power blocks have matching size 1 or 2")
        self.alpha = complex(self.alpha)
        self.gamma = complex(self.gamma)


@dataclass
class BlockPowerStage:
    blocks: list
    size: int


@dataclass
class CanonicalChain:
    """Composition of real linear stages and blockwise radial power maps,
    applied left to right."""

    stages: list


@dataclass
class IndexMap:
    """Generator correspondence: source generator i matches target
    generator mapping[i] (inverted when ``inverted[i]``); ``inner`` is the
    conjugating map itself."""

    mapping: Tuple[int, ...]
    inner: object
    inverted: Tuple[bool, ...] = field(default=())

    def __post_init__(self):
        self.mapping = tuple(int(i) for i in self.mapping)
        if not self.inverted:
            self.inverted = (False,) * len(self.mapping)
        self.inverted = tuple(bool(b) for b in self.inverted)


Witness = Union[DiagPower, LinearMap, RLinearMap, MobiusMap, CircleMap, CanonicalChain, IndexMap]


# -- evaluation ---------------------------------------------------------------

def _log_abs(y):
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.abs(y)), _LOG_FLOOR)


def _power_linear(y, alpha, conj, gamma):
    """gamma c(y)|y|**alpha elementwise, with 0 -> 0."""
    base = np.conj(y) if conj else y
    out = np.zeros_like(base, dtype=complex)
    nz = y != 0
    out[nz] = gamma * base[nz] * np.exp(alpha * np.log(np.abs(y[nz])))
    return out


def _eval_diag(w: DiagPower, x: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(w.S, x.T).T
    n = len(w.perm)
    if w.chart == "linear":
        z = np.empty((x.shape[0], n), dtype=complex)
        for k in range(n):
            z[:, w.perm[k]] = _power_linear(y[:, k], w.alphas[k], w.conj, w.gammas[k])
    else:
        # log form so that fixed-point swaps (Re alpha < -1) stay finite
        la = _log_abs(y)
        arg = np.angle(y)
        if w.conj:
            arg = -arg
        logmag = np.empty_like(la)
        phase = np.empty_like(la)
        for k in range(n):
            a = w.alphas[k]
            logmag[:, w.perm[k]] = np.log(abs(w.gammas[k])) + (1.0 + a.real) * la[:, k]
            phase[:, w.perm[k]] = np.angle(w.gammas[k]) + arg[:, k] + a.imag * la[:, k]
        logmag -= logmag.max(axis=1, keepdims=True)
        z = np.exp(logmag) * np.exp(1j * phase)
    out = z @ w.T.T
    if _is_real(x, w.S, w.T, w.alphas, w.gammas):
        out = out.real
    return out


def _eval_block(stage: BlockPowerStage, x: np.ndarray) -> np.ndarray:
    out = np.zeros((x.shape[0], stage.size), dtype=float)
    for b in stage.blocks:
        if len(b.src) == 1:
            v = x[:, b.src[0]].astype(complex)
            r = _power_linear(v, b.alpha, False, b.gamma)
            out[:, b.dst[0]] = r.real
        else:
            z = x[:, b.src[0]] + 1j * x[:, b.src[1]]
            r = _power_linear(z, b.alpha, b.conj, b.gamma)
            out[:, b.dst[0]] = r.real
            out[:, b.dst[1]] = r.imag
    return out


def _circle_angle(v):
    return 2.0 * np.arctan2(v[:, 0], v[:, 1])


def _circle_point(t):
    return np.column_stack([np.sin(t / 2.0), np.cos(t / 2.0)])


def evaluate_witness(w, x) -> np.ndarray:
    """Image of the point(s) ``x`` under the witness map."""
    x = np.asarray(x)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if not np.all(np.isfinite(x)):
        raise ChartOverflow("sample point is not finite")
    if isinstance(w, IndexMap):
        out = evaluate_witness(w.inner, x)
    elif isinstance(w, DiagPower):
        out = _eval_diag(w, x)
    elif isinstance(w, LinearMap):
        xs = np.conj(x) if w.conj else x
        out = xs @ w.S.T
    elif isinstance(w, RLinearMap):
        out = x @ w.A.T + np.conj(x) @ w.B.T
    elif isinstance(w, MobiusMap):
        out = x @ w.S.T
    elif isinstance(w, CircleMap):
        y = np.linalg.solve(w.S, np.real(x).T).T
        t = w.sign * _circle_angle(y) + w.shift
        out = _circle_point(t) @ w.T.T
    elif isinstance(w, CanonicalChain):
        out = np.real(x).astype(float)
        for stage in w.stages:
            if isinstance(stage, LinearStage):
                out = out @ np.real(stage.M).T
            else:
                out = _eval_block(stage, out)
    else:
        raise TypeError(f"unknown witness {type(w).__name__}")
    if not np.all(np.isfinite(out)):
        raise ChartOverflow("image point left every chart")
    return out[0] if single else out


# -- inverses -----------------------------------------------------------------

def _inverse_power(alpha: complex, conj: bool, gamma: complex):
    """Parameters (alpha', gamma') of the inverse of w -> gamma c(w)|w|**alpha."""
    beta = inverse_exponent(alpha, conj)
    g = 1.0 / gamma
    if conj:
        g = np.conj(g)
    return beta, complex(g * np.exp(-beta * np.log(abs(gamma))))


def _realify(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    return np.block([[ar + br, -ai + bi], [ai + bi, ar - br]])


def _unrealify(m: np.ndarray):
    n = m.shape[0] // 2
    m11, m12, m21, m22 = m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]
    a = (m11 + m22) / 2 + 1j * (m21 - m12) / 2
    b = (m11 - m22) / 2 + 1j * (m12 + m21) / 2
    return a, b


def inverse_witness(w):
    if isinstance(w, DiagPower):
        n = len(w.perm)
        inv_perm = [0] * n
        alphas = np.empty(n, dtype=complex)
        gammas = np.empty(n, dtype=complex)
        for k in range(n):
            j = w.perm[k]
            inv_perm[j] = k
            alphas[j], gammas[j] = _inverse_power(w.alphas[k], w.conj, w.gammas[k])
        return DiagPower(w.T, w.S, tuple(inv_perm), alphas, w.conj, gammas, w.chart)
    if isinstance(w, LinearMap):
        sinv = np.linalg.inv(w.S)
        return LinearMap(np.conj(sinv) if w.conj else sinv, w.conj, w.projective)
    if isinstance(w, RLinearMap):
        return RLinearMap(*_unrealify(np.linalg.inv(_realify(w.A, w.B))))
    if isinstance(w, MobiusMap):
        return MobiusMap(np.linalg.inv(w.S))
    if isinstance(w, CircleMap):
        return CircleMap(w.sign, -w.sign * w.shift, w.T, w.S)
    if isinstance(w, CanonicalChain):
        stages = []
        for stage in reversed(w.stages):
            if isinstance(stage, LinearStage):
                stages.append(LinearStage(np.linalg.inv(stage.M)))
            else:
                blocks = []
                for b in stage.blocks:
                    beta, g = _inverse_power(b.alpha, b.conj, b.gamma)
                    blocks.append(PowerBlock(b.dst, b.src, beta, b.conj, g))
                stages.append(BlockPowerStage(blocks, stage.size))
        return CanonicalChain(stages)
    if isinstance(w, IndexMap):
        if sorted(w.mapping) != list(range(len(w.mapping))):
            raise ValueError("only bijective index maps can be inverted")
        inv = [0] * len(w.mapping)
        flags = [False] * len(w.mapping)
        for i, j in enumerate(w.mapping):
            inv[j] = i
            flags[j] = w.inverted[i]
        return IndexMap(tuple(inv), inverse_witness(w.inner), tuple(flags))
    raise TypeError(f"unknown witness {type(w).__name__}")


def is_invertible_witness(w, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    def ok(m):
        m = np.asarray(m)
        scale = np.linalg.norm(m, 2)
        return scale > 0 and abs(np.linalg.det(m / scale)) > tol.det_floor

    if isinstance(w, IndexMap):
        return is_invertible_witness(w.inner, tol)
    if isinstance(w, DiagPower):
        return ok(w.S) and ok(w.T) and bool(np.all(np.abs(1.0 + w.alphas.real) > tol.eig_rel))
    if isinstance(w, (LinearMap, MobiusMap)):
        return ok(w.S)
    if isinstance(w, RLinearMap):
        return ok(_realify(w.A, w.B))
    if isinstance(w, CircleMap):
        return ok(w.S) and ok(w.T)
    if isinstance(w, CanonicalChain):
        for st in w.stages:
            if isinstance(st, LinearStage) and not ok(st.M):
                return False
            if isinstance(st, BlockPowerStage) and any(1.0 + b.alpha.real <= 0 for b in st.blocks):
                return False
        return True
    return False


# -- verification -------------------------------------------------------------

_SAMPLE_SALT = 101


def sample_points(space: Space, count: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded sample points adapted to the space.

    Vector spaces: log-uniform radii in [1e-3, 1e3] times uniform
    directions.  Complex projective space: normalized Gaussian vectors.
    Extended real line: uniform angles on the circle model.
    """
    n = space.matrix_size
    if space.kind is SpaceKind.REAL_MOBIUS:
        t = rng.uniform(-np.pi, np.pi, size=count)
        return _circle_point(t)
    if space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
    radii = 10.0 ** rng.uniform(-3.0, 3.0, size=count)
    if space.kind is SpaceKind.REAL_LINEAR:
        d = rng.normal(size=(count, n))
    else:
        d = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * radii[:, None]


def point_distance(space: Space, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Chart-normalized distance between rows of ``a`` and ``b``.

    For vector spaces the scale is 1 + |b|.  On complex projective space the
    rows are unit-normalized and phase-aligned before comparison; on the
    extended real line the circle-angle distance is used.
    """
    if space.kind is SpaceKind.REAL_MOBIUS:
        ta = _circle_angle(np.real(a))
        tb = _circle_angle(np.real(b))
        d = (ta - tb + np.pi) % (2 * np.pi) - np.pi
        return np.abs(d)
    if space.kind is SpaceKind.COMPLEX_PROJECTIVE:
        ua = a / np.linalg.norm(a, axis=1, keepdims=True)
        ub = b / np.linalg.norm(b, axis=1, keepdims=True)
        inner = np.sum(np.conj(ub) * ua, axis=1)
        phase = np.where(inner == 0, 1.0, inner / np.where(inner == 0, 1.0, np.abs(inner)))
        return np.linalg.norm(ua - phase[:, None] * ub, axis=1)
    return np.linalg.norm(a - b, axis=1) / (1.0 + np.linalg.norm(b, axis=1))


def generator_pairs(w, g1: GeneratorSet, g2: GeneratorSet):
    """(P, Q) pairs the witness must intertwine."""
    if isinstance(w, IndexMap):
        pairs = []
        for i, j in enumerate(w.mapping):
            p = g1[i]
            if w.inverted[i]:
                p = np.linalg.inv(p)
            pairs.append((p, g2[j]))
        return pairs
    if len(g1) != len(g2):
        raise ValueError("witness without index map needs equal generator counts")
    return list(zip(g1.generators, g2.generators))


def verify_conjugacy(w, g1: GeneratorSet, g2: GeneratorSet,
                     tol: ToleranceConfig = DEFAULT_TOL) -> ResidualReport:
    """max over generators and seeded samples of dist(f(P x), Q f(x))."""
    space = g1.space
    rng = tol.rng(_SAMPLE_SALT)
    x = sample_points(space, tol.samples, rng)
    fx = evaluate_witness(w, x)
    worst = 0.0
    for p, q in generator_pairs(w, g1, g2):
        lhs = evaluate_witness(w, x @ p.T)
        rhs = fx @ q.T
        worst = max(worst, float(np.max(point_distance(space, lhs, rhs))))
    return ResidualReport(worst, int(tol.samples))


def residual_gate(w, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Residual bound a witness must meet; chains of radial powers get the
    looser ``chain_residual`` bound."""
    inner = w.inner if isinstance(w, IndexMap) else w
    return tol.chain_residual if isinstance(inner, CanonicalChain) else tol.residual


def certify(w, g1: GeneratorSet, g2: GeneratorSet, category, tol: ToleranceConfig = DEFAULT_TOL,
            reason: str = "", **details) -> Verdict:
    """Verify a candidate witness and wrap it in a verdict.

    A residual above the gate downgrades the verdict to Inconclusive.
    """
    report = verify_conjugacy(w, g1, g2, tol)
    gate = residual_gate(w, tol)
    details.setdefault("seed", tol.seed)
    if not report.max_residual <= gate:
        return Verdict(Status.INCONCLUSIVE, Category(category), None,
                       f"witness residual {report.max_residual:.3e} exceeds {gate:.1e}",
                       report, details)
    return Verdict(Status.EQUIVALENT, Category(category), w, reason, report, details)


def roundtrip_error(w, space: Space, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """max distance between x and f^-1(f(x)) over the seeded samples."""
    x = sample_points(space, tol.samples, tol.rng(_SAMPLE_SALT))
    back = evaluate_witness(inverse_witness(w), evaluate_witness(w, x))
    return float(np.max(point_distance(space, back, x)))


# -- serialization ------------------------------------------------------------

def _enc_block(b: PowerBlock) -> dict:
    return {"src": list(b.src), "dst": list(b.dst), "alpha": encode_complex(b.alpha),
            "conj": b.conj, "gamma": encode_complex(b.gamma)}


def witness_to_dict(w) -> dict:
    if isinstance(w, DiagPower):
        return {"variant": "diag_power", "S": encode_matrix(w.S), "T": encode_matrix(w.T),
                "perm": list(w.perm), "alphas": [encode_complex(a) for a in w.alphas],
                "conj": w.conj, "gammas": [encode_complex(g) for g in w.gammas],
                "chart": w.chart}
    if isinstance(w, LinearMap):
        return {"variant": "linear_map", "S": encode_matrix(w.S), "conj": w.conj,
                "projective": w.projective}
    if isinstance(w, RLinearMap):
        return {"variant": "rlinear_map", "A": encode_matrix(w.A), "B": encode_matrix(w.B)}
    if isinstance(w, MobiusMap):
        return {"variant": "mobius_map", "S": encode_matrix(w.S), "orientation": w.orientation}
    if isinstance(w, CircleMap):
        return {"variant": "circle_map", "sign": w.sign, "shift": float(w.shift),
                "S": encode_matrix(w.S), "T": encode_matrix(w.T)}
    if isinstance(w, CanonicalChain):
        stages = []
        for st in w.stages:
            if isinstance(st, LinearStage):
                stages.append({"stage": "linear", "M": encode_matrix(st.M)})
            else:
                stages.append({"stage": "block_power", "size": st.size,
                               "blocks": [_enc_block(b) for b in st.blocks]})
        return {"variant": "canonical_chain", "stages": stages}
    if isinstance(w, IndexMap):
        return {"variant": "index_map", "mapping": list(w.mapping),
                "inverted": list(w.inverted), "inner": witness_to_dict(w.inner)}
    raise TypeError(f"unknown witness {type(w).__name__}")


def _real_if_possible(m: np.ndarray) -> np.ndarray:
    return m.real.copy() if not np.any(m.imag) else m


def witness_from_dict(d: dict):
    kind = d.get("variant")
    if kind == "diag_power":
        return DiagPower(_real_if_possible(decode_matrix(d["S"])),
                         _real_if_possible(decode_matrix(d["T"])), d["perm"],
                         [decode_complex(a) for a in d["alphas"]], bool(d["conj"]),
                         [decode_complex(g) for g in d["gammas"]], d.get("chart", "linear"))
    if kind == "linear_map":
        return LinearMap(_real_if_possible(decode_matrix(d["S"])), bool(d["conj"]),
                         bool(d.get("projective", False)))
    if kind == "rlinear_map":
        return RLinearMap(decode_matrix(d["A"]), decode_matrix(d["B"]))
    if kind == "mobius_map":
        return MobiusMap(decode_matrix(d["S"]).real)
    if kind == "circle_map":
        return CircleMap(int(d["sign"]), float(d["shift"]), decode_matrix(d["S"]).real,
                         decode_matrix(d["T"]).real)
    if kind == "canonical_chain":
        stages = []
        for st in d["stages"]:
            if st["stage"] == "linear":
                stages.append(LinearStage(decode_matrix(st["M"]).real))
            else:
                blocks = [PowerBlock(b["src"], b["dst"], decode_complex(b["alpha"]),
                                     bool(b["conj"]), decode_complex(b["gamma"]))
                          for b in st["blocks"]]
                stages.append(BlockPowerStage(blocks, int(st["size"])))
        return CanonicalChain(stages)
    if kind == "index_map":
        return IndexMap(d["mapping"], witness_from_dict(d["inner"]), d.get("inverted", ()))
    raise ValueError(f"unknown witness variant {kind!r}")
