"""1D vorticity models on the circle, Burgers and scale-invariant Euler."""

from .burgers import (
    burgers_1d,
    characteristic_lp,
    characteristic_max_slope,
    scale_invariant_euler,
    sie_stream,
)
from .core import (
    CircleField,
    History1D,
    Variant,
    VARIANT_METADATA,
    closure,
    evolve_1d,
    hilbert,
    p1_coefficient,
    project_p1,
    trig_interpolate,
)
from .oracle import LambdaOracle, LambdaRate, calpha_data, lambda_oracle, transported

__all__ = [
    "CircleField",
    "History1D",
    "LambdaOracle",
    "LambdaRate",
    "VARIANT_METADATA",
    "Variant",
    "burgers_1d",
    "calpha_data",
    "characteristic_lp",
    "characteristic_max_slope",
    "closure",
    "evolve_1d",
    "hilbert",
    "lambda_oracle",
    "p1_coefficient",
    "project_p1",
    "scale_invariant_euler",
    "sie_stream",
    "transported",
    "trig_interpolate",
]
