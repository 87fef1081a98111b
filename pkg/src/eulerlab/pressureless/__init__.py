"""Exact pressureless Euler solutions from nilpotent-gradient data."""

from .core import (
    GradientTrajectory,
    LagrangianCheck,
    NilpotencyReport,
    NilpotentFlow,
    NormRow,
    NormTable,
    blowup_family_curve,
    chain_gradient,
    chain_norm_at_origin,
    check_nilpotent,
    evolve_gradient,
    lagrangian_map,
    lattice,
    neumann_gradient,
    ode_gradient,
    resolvent_gradient,
    rotation_flow,
    row_sum_norm,
    sample_points,
)

__all__ = [
    "GradientTrajectory",
    "LagrangianCheck",
    "NilpotencyReport",
    "NilpotentFlow",
    "NormRow",
    "NormTable",
    "blowup_family_curve",
    "chain_gradient",
    "chain_norm_at_origin",
    "check_nilpotent",
    "evolve_gradient",
    "lagrangian_map",
    "lattice",
    "neumann_gradient",
    "ode_gradient",
    "resolvent_gradient",
    "rotation_flow",
    "row_sum_norm",
    "sample_points",
]
