"""Shared domain types: spaces, generator sets, regularity categories,
tolerances and verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from typing import Any, Optional, Sequence

import numpy as np


class PhaseGroupError(Exception):
    """Base class for errors raised by this package."""


class NonFinite(PhaseGroupError):
    pass


class ZeroEigenvalue(PhaseGroupError):
    pass


class ZeroGenerator(PhaseGroupError):
    pass


class Singular(PhaseGroupError):
    pass


class SpaceMismatch(PhaseGroupError):
    pass


class SpaceKind(str, enum.Enum):
    COMPLEX_LINEAR = "complex_linear"
    COMPLEX_PROJECTIVE = "complex_projective"
    REAL_LINEAR = "real_linear"
    REAL_MOBIUS = "real_mobius"


@dataclass(frozen=True)
class Space:
    """Ambient space a phase group acts on.

    ``n`` is the geometric dimension; the matrix size is ``n`` for linear
    kinds, ``n + 1`` for complex projective space and 2 for the extended
    real line.
    """

    kind: SpaceKind
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.n < 1:
            raise ValueError("space dimension must be positive")
        if self.kind is SpaceKind.REAL_MOBIUS and self.n != 1:
            raise ValueError("the extended real line has dimension 1")

    def __str__(self):
        return f"{self.kind.value}({self.n})"

    @property
    def matrix_size(self) -> int:
        if self.kind is SpaceKind.COMPLEX_PROJECTIVE:
            return self.n + 1
        if self.kind is SpaceKind.REAL_MOBIUS:
            return 2
        return self.n

    @property
    def is_complex(self) -> bool:
        return self.kind in (SpaceKind.COMPLEX_LINEAR, SpaceKind.COMPLEX_PROJECTIVE)

    @property
    def is_projective(self) -> bool:
        return self.kind in (SpaceKind.COMPLEX_PROJECTIVE, SpaceKind.REAL_MOBIUS)

    @classmethod
    def complex_linear(cls, n: int) -> "Space":
        return cls(SpaceKind.COMPLEX_LINEAR, n)

    @classmethod
    def complex_projective(cls, n: int) -> "Space":
        return cls(SpaceKind.COMPLEX_PROJECTIVE, n)

    @classmethod
    def real_linear(cls, n: int) -> "Space":
        return cls(SpaceKind.REAL_LINEAR, n)

    @classmethod
    def real_mobius(cls) -> "Space":
        return cls(SpaceKind.REAL_MOBIUS, 1)


@dataclass(frozen=True)
class ToleranceConfig:
    eig_rel: float = 1e-9
    det_floor: float = 1e-12
    residual: float = 1e-9
    chain_residual: float = 1e-7
    ode_rel: float = 1e-12
    S_max: int = 32
    K_max: int = 64
    samples: int = 256
    seed: int = 0

    def __post_init__(self):
        for name in ("eig_rel", "det_floor", "residual", "chain_residual", "ode_rel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("S_max", "K_max", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    def with_overrides(self, pairs: Sequence[str]) -> "ToleranceConfig":
        """Return a copy with ``key=value`` overrides applied."""
        types = {f.name: f.type for f in fields(self)}
        updates = {}
        for pair in pairs:
            key, sep, value = pair.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise ValueError(f"bad tolerance override {pair!r}")
            updates[key] = int(value) if types[key] in (int, "int") else float(value)
        return replace(self, **updates)

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


DEFAULT_TOL = ToleranceConfig()


def _normalized_det(m: np.ndarray) -> float:
    scale = np.linalg.norm(m, 2)
    if scale == 0:
        return 0.0
    return abs(np.linalg.det(m / scale))


class GeneratorSet:
    """Finite list of invertible matrices presenting a phase group."""

    def __init__(self, space: Space, generators: Sequence[Any],
                 labels: Optional[Sequence[str]] = None,
                 tol: ToleranceConfig = DEFAULT_TOL):
        size = space.matrix_size
        real = not space.is_complex
        mats = []
        for i, g in enumerate(generators):
            m = np.array(g, dtype=complex)
            if m.ndim == 0 and size == 1:
                m = m.reshape(1, 1)
            if m.shape != (size, size):
                raise ValueError(f"generator {i} has shape {m.shape}, expected {(size, size)}")
            if not np.all(np.isfinite(m)):
                raise NonFinite(f"generator {i} has non-finite entries")
            if real:
                if np.max(np.abs(m.imag), initial=0.0) > tol.eig_rel * max(1.0, np.max(np.abs(m))):
                    raise ValueError(f"generator {i} is not real")
                m = m.real.copy()
            if _normalized_det(m) <= tol.det_floor:
                raise Singular(f"generator {i} is not invertible")
            m.setflags(write=False)
            mats.append(m)
        self.space = space
        self.generators: tuple = tuple(mats)
        if labels is not None and len(labels) != len(mats):
            raise ValueError("labels must match the generator count")
        self.labels = tuple(labels) if labels is not None else None

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def __repr__(self):
        return f"GeneratorSet({self.space.kind.value}, n={self.space.n}, nu={len(self)})"

    def subset(self, indices: Sequence[int]) -> "GeneratorSet":
        labels = [self.labels[i] for i in indices] if self.labels else None
        return GeneratorSet(self.space, [self.generators[i] for i in indices], labels)

    def with_generators(self, mats: Sequence[np.ndarray]) -> "GeneratorSet":
        return GeneratorSet(self.space, mats)

    def normalized(self) -> list:
        """Representatives with unit |det| (projective spaces only)."""
        size = self.space.matrix_size
        out = []
        for m in self.generators:
            d = np.linalg.det(m)
            if self.space.kind is SpaceKind.REAL_MOBIUS:
                out.append(m / np.sqrt(abs(d)))
            else:
                out.append(m / d ** (1.0 / size))
        return out


class Category(str, enum.Enum):
    TOPOLOGICAL = "top"
    SMOOTH = "smooth"
    RHOLOMORPHIC = "rholo"
    HOLOMORPHIC = "holo"


_IMPLIES = {
    Category.HOLOMORPHIC: {Category.HOLOMORPHIC, Category.RHOLOMORPHIC, Category.SMOOTH,
                           Category.TOPOLOGICAL},
    Category.RHOLOMORPHIC: {Category.RHOLOMORPHIC, Category.TOPOLOGICAL},
    Category.SMOOTH: {Category.SMOOTH, Category.TOPOLOGICAL},
    Category.TOPOLOGICAL: {Category.TOPOLOGICAL},
}


def category_implies(a: Category, b: Category, complex_space: bool = True) -> bool:
    """True iff equivalence at level ``a`` forces equivalence at level ``b``.

    On complex spaces smooth and R-holomorphic conjugacy coincide (both
    reduce to R-linear conjugacy), so each implies the other there.
    """
    a, b = Category(a), Category(b)
    if complex_space and {a, b} <= {Category.SMOOTH, Category.RHOLOMORPHIC}:
        return True
    return b in _IMPLIES[a]


def commutator_residual(a: np.ndarray, b: np.ndarray, projective: bool = False) -> float:
    ab, ba = a @ b, b @ a
    scale = np.linalg.norm(a) * np.linalg.norm(b)
    if projective:
        # commute up to a scalar: best c minimizing ||ab - c ba||
        denom = np.vdot(ba, ba)
        c = np.vdot(ba, ab) / denom if denom != 0 else 0.0
        return float(np.linalg.norm(ab - c * ba) / scale)
    return float(np.linalg.norm(ab - ba) / scale)


def is_abelian(g: GeneratorSet, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    gens = g.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if commutator_residual(gens[i], gens[j], g.space.is_projective) > tol.eig_rel:
                return False
    return True


class Status(str, enum.Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {"equivalent": 0, "not_equivalent": 1, "inconclusive": 2}[self.value]


@dataclass
class ResidualReport:
    max_residual: float
    samples: int


@dataclass
class Verdict:
    status: Status
    category: Category
    witness: Any = None
    reason: str = ""
    residual_report: Optional[ResidualReport] = None
    details: dict = field(default_factory=dict)
    relation: str = "equivalence"

    @property
    def equivalent(self) -> bool:
        return self.status is Status.EQUIVALENT

    @classmethod
    def not_equivalent(cls, category, reason, **details) -> "Verdict":
        return cls(Status.NOT_EQUIVALENT, Category(category), reason=reason, details=details)

    @classmethod
    def inconclusive(cls, category, premise, **details) -> "Verdict":
        return cls(Status.INCONCLUSIVE, Category(category), reason=premise, details=details)
