"""Semi-tensor product algebra and logical dynamic network models.

The heavy lifting lives in the compiled extension; this package re-exports it.
Matrices are numpy float64 arrays, distributions are 1-D arrays summing to 1,
and deterministic states are 1-based integers throughout.
"""

from ._core import (
    DimensionCapError,
    ParseError,
    ShapeError,
    ValidationError,
    __version__,
    check_consistency,
    compare,
    khatri_rao,
    khatri_rao_fold,
    kron,
    load_model,
    monte_carlo,
    point_consistency,
    power_reduce,
    simulate_conditional,
    simulate_deterministic,
    simulate_independent,
    stp,
    swap_matrix,
)

__all__ = [
    "DimensionCapError",
    "ParseError",
    "ShapeError",
    "ValidationError",
    "__version__",
    "check_consistency",
    "compare",
    "khatri_rao",
    "khatri_rao_fold",
    "kron",
    "load_model",
    "monte_carlo",
    "point_consistency",
    "power_reduce",
    "simulate_conditional",
    "simulate_deterministic",
    "simulate_independent",
    "stp",
    "swap_matrix",
]
