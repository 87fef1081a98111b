"""Axisymmetric no-swirl fundamental model and its self-similar blow-up."""

from .fundamental import (
    FundamentalHistory,
    L12Kernel,
    PolarField,
    RadialHistory,
    evolve_fundamental,
    evolve_radial,
    fit_blowup_time,
    l12,
    local_rate,
    profile_residual,
    self_similar_solution,
    weno5_derivative,
)

__all__ = [
    "FundamentalHistory",
    "L12Kernel",
    "PolarField",
    "RadialHistory",
    "evolve_fundamental",
    "evolve_radial",
    "fit_blowup_time",
    "l12",
    "local_rate",
    "profile_residual",
    "self_similar_solution",
    "weno5_derivative",
]
