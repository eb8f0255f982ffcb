"""Phase transitions in Modern Hopfield Networks.

Energy-descent dynamics, the equidistant-pattern reduction to an iterated
softmax, the critical point (p_c, beta_c) and the experiment drivers built on
them.
"""

__version__ = "0.1.0"

from .critical import CriticalPoint, critical_residual, critical_sweep, solve_critical
from .dynamics import FixedPointResult, PDynamicsConfig, find_fixed_point, jacobian, p_update
from .network import (
    PatternSet,
    TrajectoryRecord,
    energy,
    iterate_to_fixed_point,
    softmax_probabilities,
    update_state,
)
from .patterns import EquidistantSpec, build_equidistant, effective_beta, gram_metadata

__all__ = [
    "CriticalPoint",
    "EquidistantSpec",
    "FixedPointResult",
    "PDynamicsConfig",
    "PatternSet",
    "TrajectoryRecord",
    "build_equidistant",
    "critical_residual",
    "critical_sweep",
    "effective_beta",
    "energy",
    "find_fixed_point",
    "gram_metadata",
    "iterate_to_fixed_point",
    "jacobian",
    "p_update",
    "softmax_probabilities",
    "solve_critical",
    "update_state",
]
