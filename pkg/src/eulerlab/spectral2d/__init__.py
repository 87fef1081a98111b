"""Pseudospectral 2D Euler / Navier-Stokes on the torus and the periodic channel."""

from .diagnostics import (
    DiagnosticRecord,
    DiagnosticsTracker,
    diagnostics,
    fit_envelope,
    holder_norm,
    holder_quotient,
)
from .grid import Field2D, Grid2D, SpectralOps, Spectrum2D
from .solver import (
    EulerSolver,
    EulerState,
    ResolutionExceeded,
    SolverConfig,
    biot_savart,
    step,
    tendency,
)
from .tracers import CurveAdvector, advect_curve, curve_distance

__all__ = [
    "CurveAdvector",
    "DiagnosticRecord",
    "DiagnosticsTracker",
    "EulerSolver",
    "EulerState",
    "Field2D",
    "Grid2D",
    "ResolutionExceeded",
    "SolverConfig",
    "SpectralOps",
    "Spectrum2D",
    "advect_curve",
    "biot_savart",
    "curve_distance",
    "diagnostics",
    "fit_envelope",
    "holder_norm",
    "holder_quotient",
    "step",
    "tendency",
]
