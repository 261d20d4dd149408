"""Phase groups (monodromy generator sets) of Fuchsian linear and Riccati
systems, and their classification up to topological, smooth,
R-holomorphic and holomorphic conjugacy with verifiable witnesses."""

from .core import (DEFAULT_TOL, Category, GeneratorSet, NonFinite, PhaseGroupError,
                   ResidualReport, Singular, Space, SpaceKind, SpaceMismatch, Status,
                   ToleranceConfig, Verdict, ZeroEigenvalue, ZeroGenerator, category_implies,
                   is_abelian)
from .monodromy import (BaseKind, FourierTerm, FuchsianSystemSpec, IntegrationFailure,
                        LaurentTerm, Pole, PoleHit, RiccatiSpec, RiccatiTerm, StepUnderflow,
                        TorusNonFlat, compute_monodromy, evaluate_coefficient, integrate_loop,
                        phase_group, riccati_lift, scalar_fuchsian_generators)
from .morphisms import classify, covering, embedding, equivalence
from .witness import evaluate_witness, inverse_witness, verify_conjugacy

__all__ = [
    "DEFAULT_TOL", "Category", "GeneratorSet", "NonFinite", "PhaseGroupError", "ResidualReport",
    "Singular", "Space", "SpaceKind", "SpaceMismatch", "Status", "ToleranceConfig", "Verdict",
    "ZeroEigenvalue", "ZeroGenerator", "category_implies", "is_abelian",
    "BaseKind", "FourierTerm", "FuchsianSystemSpec", "IntegrationFailure", "LaurentTerm", "Pole",
    "PoleHit", "RiccatiSpec", "RiccatiTerm", "StepUnderflow", "TorusNonFlat",
    "compute_monodromy", "evaluate_coefficient", "integrate_loop", "phase_group", "riccati_lift",
    "scalar_fuchsian_generators",
    "classify", "covering", "embedding", "equivalence",
    "evaluate_witness", "inverse_witness", "verify_conjugacy",
]
