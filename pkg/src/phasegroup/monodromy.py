"""Phase groups of Fuchsian linear systems and Riccati equations.

A system dW/dz = A(z) W is given either by poles with Laurent terms
(punctured plane) or by Fourier terms (cylinder and torus).  Generators are
monodromy matrices: fundamental-matrix transports around loops based at
the base point, integrated with an adaptive Dormand-Prince 5(4) pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import RK45

from .core import (DEFAULT_TOL, GeneratorSet, PhaseGroupError, Space, ToleranceConfig,
                   commutator_residual)


class IntegrationFailure(PhaseGroupError):
    pass


class PoleHit(IntegrationFailure):
    pass


class StepUnderflow(IntegrationFailure):
    pass


class TorusNonFlat(IntegrationFailure):
    pass


class BaseKind(str, enum.Enum):
    PUNCTURED_PLANE = "punctured_plane"
    CYLINDER = "cylinder"
    TORUS = "torus"


@dataclass
class LaurentTerm:
    order: int
    matrix: np.ndarray

    def __post_init__(self):
        if int(self.order) < 1:
            raise ValueError("Laurent term orders start at 1")
        self.order = int(self.order)
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=complex))


@dataclass
class Pole:
    z: complex
    terms: List[LaurentTerm] = field(default_factory=list)

    def __post_init__(self):
        self.z = complex(self.z)

    def term(self, order: int) -> Optional[np.ndarray]:
        for t in self.terms:
            if t.order == order:
                return t.matrix
        return None


@dataclass
class FourierTerm:
    k: int
    matrix: np.ndarray

    def __post_init__(self):
        self.k = int(self.k)
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=complex))


@dataclass
class FuchsianSystemSpec:
    """dW/dz = A(z) W with A a sum of Laurent terms at poles (punctured
    plane) or of Fourier modes C_k exp(2 pi i k z) (cylinder, torus).

    ``projective`` marks systems lifted from Riccati equations, whose
    monodromy acts on CP^1.
    """

    dimension: int
    base_kind: BaseKind = BaseKind.PUNCTURED_PLANE
    base_point: complex = 0j
    poles: List[Pole] = field(default_factory=list)
    fourier_terms: List[FourierTerm] = field(default_factory=list)
    projective: bool = False

    def __post_init__(self):
        self.base_kind = BaseKind(self.base_kind)
        self.base_point = complex(self.base_point)

    def validate(self, tol: ToleranceConfig = DEFAULT_TOL) -> None:
        n = self.dimension
        if n < 1:
            raise ValueError("dimension must be positive")
        if self.base_kind is BaseKind.PUNCTURED_PLANE:
            if self.fourier_terms:
                raise ValueError("punctured-plane systems take poles, not Fourier terms")
        elif self.poles:
            raise ValueError("cylinder and torus systems take Fourier terms, not poles")
        mats = [t.matrix for p in self.poles for t in p.terms]
        mats += [f.matrix for f in self.fourier_terms]
        for m in mats:
            if m.shape != (n, n):
                raise ValueError(f"coefficient of shape {m.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(m)):
                raise ValueError("coefficients must be finite")
        zs = [p.z for p in self.poles]
        for i in range(len(zs)):
            if abs(zs[i] - self.base_point) <= tol.eig_rel:
                raise ValueError("base point coincides with a pole")
            for j in range(i + 1, len(zs)):
                if abs(zs[i] - zs[j]) <= tol.eig_rel:
                    raise ValueError("pole locations must be distinct")

    def sorted_poles(self) -> List[Pole]:
        return sorted(self.poles, key=lambda p: (p.z.real, p.z.imag))


class _Coefficient:
    """Vectorized evaluation of A(z)."""

    def __init__(self, spec: FuchsianSystemSpec, tol: ToleranceConfig):
        n = spec.dimension
        self.n = n
        self.tol = tol
        self.fourier = spec.base_kind is not BaseKind.PUNCTURED_PLANE
        if self.fourier:
            self.ks = np.array([f.k for f in spec.fourier_terms], dtype=float)
            self.mats = (np.array([f.matrix for f in spec.fourier_terms])
                         if spec.fourier_terms else np.zeros((0, n, n), complex))
        else:
            locs, orders, mats = [], [], []
            for p in spec.poles:
                for t in p.terms:
                    locs.append(p.z)
                    orders.append(t.order)
                    mats.append(t.matrix)
            self.locs = np.array(locs, dtype=complex)
            self.orders = np.array(orders, dtype=float)
            self.mats = np.array(mats) if mats else np.zeros((0, n, n), complex)
            self.poles = np.array([p.z for p in spec.poles], dtype=complex)
        self.flat = self.mats.reshape(len(self.mats), n * n)
        self.traces = np.trace(self.mats, axis1=1, axis2=2)

    def weights(self, z: complex) -> np.ndarray:
        if self.fourier:
            return np.exp(2j * np.pi * self.ks * z)
        if len(self.poles) and np.min(np.abs(z - self.poles)) < self.tol.eig_rel:
            raise PoleHit(f"evaluation point {z} is on a pole")
        return (z - self.locs) ** (-self.orders)

    def __call__(self, z: complex) -> np.ndarray:
        if len(self.mats) == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        return (self.weights(z) @ self.flat).reshape(self.n, self.n)


def evaluate_coefficient(spec: FuchsianSystemSpec, z: complex,
                         tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return _Coefficient(spec, tol)(complex(z))


# -- paths --------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def point(self, t):
        return self.a + (self.b - self.a) * t

    def velocity(self, t):
        return self.b - self.a

    @property
    def length(self) -> float:
        return abs(self.b - self.a)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    sweep: float

    def point(self, t):
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep * t))

    def velocity(self, t):
        return 1j * self.sweep * self.radius * np.exp(1j * (self.theta0 + self.sweep * t))

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius


def circle(center: complex, radius: float, start: complex) -> Arc:
    """Counterclockwise circle around ``center`` through ``start``."""
    return Arc(center, radius, float(np.angle(start - center)), 2 * np.pi)


def detoured_segment(a: complex, b: complex, obstacles: Sequence[tuple]) -> list:
    """Straight path a -> b with clockwise arcs around every obstacle
    (center, radius) whose disc the segment enters."""
    d = b - a
    length = abs(d)
    if length == 0:
        return []
    u = d / length
    cuts = []
    for c, rad in obstacles:
        s = ((c - a) * np.conj(u)).real
        dist = abs(((c - a) * np.conj(u)).imag)
        if dist >= rad or s < 0 or s > length:
            continue
        h = np.sqrt(rad * rad - dist * dist)
        cuts.append((s - h, s + h, c, rad))
    cuts.sort(key=lambda x: x[0])
    pieces, pos = [], a
    for s_in, s_out, c, rad in cuts:
        p_in, p_out = a + u * s_in, a + u * s_out
        if abs(p_in - pos) > 0:
            pieces.append(Segment(pos, p_in))
        th_in, th_out = float(np.angle(p_in - c)), float(np.angle(p_out - c))
        sweep = -((th_in - th_out) % (2 * np.pi))
        pieces.append(Arc(c, rad, th_in, sweep))
        pos = p_out
    pieces.append(Segment(pos, b))
    return pieces


# -- integration --------------------------------------------------------------

@dataclass
class Transport:
    matrix: np.ndarray
    steps: int
    liouville_residual: float


_RESTART_NORM = 8.0


def _needs_restart(part: np.ndarray) -> bool:
    if np.linalg.norm(part) > _RESTART_NORM:
        return True
    if part.shape[0] == 1:
        return abs(part[0, 0]) < 1.0 / _RESTART_NORM
    try:
        return np.linalg.norm(np.linalg.inv(part)) > _RESTART_NORM
    except np.linalg.LinAlgError:
        return True


def integrate_loop(spec: FuchsianSystemSpec, pieces: Sequence, tol: ToleranceConfig = DEFAULT_TOL,
                   max_steps: int = 1_000_000, coefficient: Optional[_Coefficient] = None,
                   chunks: int = 4) -> Transport:
    """Transport of dW/dz = A(z) W along a piecewise path, W(start) = I.

    Each piece is cut into ``chunks`` parameter intervals, each integrated
    from the identity and multiplied in, so the absolute tolerance stays
    meaningful relative to the size of W.  The integral of trace A is
    carried along to check Liouville's formula
    det W(end) = exp(int trace A dz).
    """
    coef = coefficient or _Coefficient(spec, tol)
    n = spec.dimension
    start = np.concatenate([np.eye(n, dtype=complex).ravel(), [0j]])
    w = np.eye(n, dtype=complex)
    trace_integral = 0j
    steps = 0
    for piece in pieces:
        def rhs(t, yy, piece=piece):
            out = np.zeros(n * n + 1, dtype=complex)
            if len(coef.flat):
                wt = coef.weights(piece.point(t)) * piece.velocity(t)
                a = (wt @ coef.flat).reshape(n, n)
                out[:-1] = (a @ yy[:-1].reshape(n, n)).ravel()
                out[-1] = wt @ coef.traces
            return out

        knots = np.linspace(0.0, 1.0, chunks + 1)
        for t0, t1 in zip(knots[:-1], knots[1:]):
            solver = RK45(rhs, t0, start, t1, rtol=tol.ode_rel, atol=tol.ode_rel * 1e-2,
                          first_step=(t1 - t0) * 0.05)
            while solver.status == "running":
                msg = solver.step()
                steps += 1
                if solver.status == "failed":
                    raise StepUnderflow(f"integration failed: {msg}")
                if steps > max_steps:
                    raise StepUnderflow("step budget exhausted")
                part = solver.y[:-1].reshape(n, n)
                if solver.status == "running" and _needs_restart(part):
                    # restart from the identity so atol stays small next to W
                    w = part @ w
                    trace_integral += solver.y[-1]
                    solver = RK45(rhs, solver.t, start, t1, rtol=tol.ode_rel,
                                  atol=tol.ode_rel * 1e-2,
                                  first_step=min(solver.step_size, t1 - solver.t))
            w = solver.y[:-1].reshape(n, n) @ w
            trace_integral += solver.y[-1]
    expected = np.exp(trace_integral)
    liouville = float(abs(np.linalg.det(w) - expected) / max(abs(expected), 1e-300))
    return Transport(w, steps, liouville)


# -- phase groups -------------------------------------------------------------

@dataclass
class MonodromyResult:
    generators: GeneratorSet
    loops: list
    diagnostics: list
    warnings: list


def _pole_radii(spec: FuchsianSystemSpec, poles: Sequence[Pole]) -> list:
    radii = []
    for p in poles:
        others = [abs(p.z - q.z) for q in poles if q is not p] + [abs(p.z - spec.base_point)]
        radii.append(0.45 * min(others))
    return radii


def pole_loops(spec: FuchsianSystemSpec) -> list:
    """(connector pieces, circle) for each pole in (Re, Im) order."""
    poles = spec.sorted_poles()
    radii = _pole_radii(spec, poles)
    loops = []
    b = spec.base_point
    for i, p in enumerate(poles):
        start = p.z + radii[i] * (b - p.z) / abs(b - p.z)
        obstacles = [(q.z, radii[j]) for j, q in enumerate(poles) if j != i]
        loops.append((detoured_segment(b, start, obstacles), circle(p.z, radii[i], start)))
    return loops


def _space_for(spec: FuchsianSystemSpec) -> Space:
    if spec.projective:
        return Space.complex_projective(spec.dimension - 1)
    return Space.complex_linear(spec.dimension)


def compute_monodromy(spec: FuchsianSystemSpec, tol: ToleranceConfig = DEFAULT_TOL
                      ) -> MonodromyResult:
    spec.validate(tol)
    coef = _Coefficient(spec, tol)
    gens, loops, diags, warnings = [], [], [], []
    if spec.base_kind is BaseKind.PUNCTURED_PLANE:
        if not spec.poles:
            warnings.append("no poles: the phase group is trivial and has no generators")
        for connector, circ in pole_loops(spec):
            to = integrate_loop(spec, connector, tol, coefficient=coef)
            around = integrate_loop(spec, [circ], tol, coefficient=coef)
            g = np.linalg.solve(to.matrix, around.matrix @ to.matrix)
            gens.append(g)
            loops.append({"center": circ.center, "radius": circ.radius,
                          "connector_pieces": len(connector)})
            diags.append({"steps": to.steps + around.steps,
                          "liouville_residual": max(to.liouville_residual,
                                                    around.liouville_residual)})
    else:
        b = spec.base_point
        periods = [1.0] if spec.base_kind is BaseKind.CYLINDER else [1.0, 1j]
        for period in periods:
            tr = integrate_loop(spec, [Segment(b, b + period)], tol, coefficient=coef)
            gens.append(tr.matrix)
            loops.append({"period": period})
            diags.append({"steps": tr.steps, "liouville_residual": tr.liouville_residual})
        if spec.base_kind is BaseKind.TORUS:
            res = commutator_residual(gens[0], gens[1], spec.projective)
            flat_tol = max(tol.eig_rel, 1e4 * tol.ode_rel)
            if res > flat_tol:
                raise TorusNonFlat(f"torus generators fail to commute (residual {res:.3e})")
    space = _space_for(spec)
    return MonodromyResult(GeneratorSet(space, gens, tol=tol), loops, diags, warnings)


def phase_group(spec: FuchsianSystemSpec, tol: ToleranceConfig = DEFAULT_TOL) -> GeneratorSet:
    return compute_monodromy(spec, tol).generators


def scalar_fuchsian_generators(spec: FuchsianSystemSpec) -> GeneratorSet:
    """Closed form exp(2 pi i Lambda_r1) for scalar punctured-plane systems;
    higher-order Laurent terms do not contribute."""
    if spec.dimension != 1 or spec.base_kind is not BaseKind.PUNCTURED_PLANE:
        raise ValueError("closed form applies to scalar punctured-plane systems")
    gens = []
    for p in spec.sorted_poles():
        res = p.term(1)
        lam = 0j if res is None else complex(res[0, 0])
        gens.append([[np.exp(2j * np.pi * lam)]])
    return GeneratorSet(Space.complex_linear(1), gens)


# -- Riccati equations --------------------------------------------------------

@dataclass
class RiccatiTerm:
    """Coefficients (a2, a1, a0) of one Laurent order or Fourier mode of
    x' = a2 x^2 + a1 x + a0."""

    index: int
    a2: complex = 0j
    a1: complex = 0j
    a0: complex = 0j

    def lift(self) -> np.ndarray:
        return riccati_matrix(self.a2, self.a1, self.a0)


@dataclass
class RiccatiSpec:
    base_kind: BaseKind = BaseKind.PUNCTURED_PLANE
    base_point: complex = 0j
    poles: List[tuple] = field(default_factory=list)      # (z, [RiccatiTerm with index = order])
    fourier_terms: List[RiccatiTerm] = field(default_factory=list)  # index = frequency k

    def __post_init__(self):
        self.base_kind = BaseKind(self.base_kind)
        self.base_point = complex(self.base_point)


def riccati_matrix(a2, a1, a0) -> np.ndarray:
    """2x2 matrix M whose linear flow v' = M v projects (x = v1/v2) onto
    x' = a2 x^2 + a1 x + a0.

    For M = [[al, be], [ga, de]] the projected flow is
    x' = -ga x^2 + (al - de) x + be.
    """
    a2, a1, a0 = complex(a2), complex(a1), complex(a0)
    return np.array([[a1 / 2, a0], [-a2, -a1 / 2]], dtype=complex)


def riccati_lift(spec: RiccatiSpec) -> FuchsianSystemSpec:
    poles = [Pole(z, [LaurentTerm(t.index, t.lift()) for t in terms]) for z, terms in spec.poles]
    fourier = [FourierTerm(t.index, t.lift()) for t in spec.fourier_terms]
    return FuchsianSystemSpec(2, spec.base_kind, spec.base_point, poles, fourier,
                              projective=True)
