"""Self-similar profiles for ``f_t = f^2 + eps N(f)`` and the linearized operator about ``1/(1+z)``."""

from .core import (
    DEFAULT_GRID,
    F0,
    N1,
    N2,
    N3,
    N4,
    NONLINEARITIES,
    CompatibilityError,
    HalfLineFn,
    Nonlinearity,
    WeightedNorm,
    WeightKind,
    apply_L,
    apply_L_angular,
    compatibility_defect,
    invert_L,
    kernel_alignment,
    kernel_element,
    over_s2,
    working_norm,
)
from .profiles import (
    NonContraction,
    ProfileResult,
    Stagnation,
    compactness_profile,
    fixed_point_profile,
    profile_residual,
    read_profile,
    write_profile,
)

__all__ = [
    "CompatibilityError",
    "DEFAULT_GRID",
    "F0",
    "HalfLineFn",
    "N1",
    "N2",
    "N3",
    "N4",
    "NONLINEARITIES",
    "NonContraction",
    "Nonlinearity",
    "ProfileResult",
    "Stagnation",
    "WeightKind",
    "WeightedNorm",
    "apply_L",
    "apply_L_angular",
    "compactness_profile",
    "compatibility_defect",
    "fixed_point_profile",
    "invert_L",
    "kernel_alignment",
    "kernel_element",
    "over_s2",
    "profile_residual",
    "read_profile",
    "working_norm",
    "write_profile",
]
