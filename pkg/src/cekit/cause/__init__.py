"""Causal-effect solvers, classical counterparts and derived checks."""

from .checks import DiamondBounds, DualityRecord, diamond_bounds, duality_check
from .classical import (
    binary_entropy,
    capacity_lower_bound,
    classical_ace,
    classical_ce_min,
)
from .conditional import MODES, conditional_ce
from .config import SolverConfig, pmap, worker_count
from .recovery import (
    Correctability,
    SingularOutputWarning,
    correctability_check,
    petz_recovery,
    recovery_error,
    theorem_bound,
)
from .solvers import (
    CEReport,
    DPResult,
    PiAverage,
    ce_max,
    ce_min,
    ce_pi_average,
    ce_weighted_max,
    ce_weighted_min,
    dp_min,
    dp_min_search,
    hermitian_kernel,
    is_constant_channel,
    pair_value,
)
