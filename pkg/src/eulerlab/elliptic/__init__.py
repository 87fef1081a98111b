"""Alpha-scaled Biot-Savart solver, singular split, pointwise expansion and the order-2 model."""

from .bsalpha import (
    DEFAULT_GRID,
    AngularField,
    ModeProfile,
    l2_dR,
    mode_exponents,
    regular_operator_ratio,
    regular_part,
    sharp_regular_bound,
    singular_split,
    solve_bsalpha,
    solve_mode,
    stated_regular_bound,
    tail_L,
)
from .keylemma import (
    P2_COEFFICIENT,
    P2Projection,
    PoissonResidualError,
    PolarSource,
    key_lemma_remainder,
    polar_key_lemma,
)
from .p2model import (
    DiskField,
    P2Run,
    P2Stream,
    SupportAtOrigin,
    p2_model_run,
    p2_model_step,
    p2_stream,
    rotation_rate,
)

__all__ = [
    "AngularField",
    "DEFAULT_GRID",
    "DiskField",
    "ModeProfile",
    "P2Projection",
    "P2Run",
    "P2Stream",
    "P2_COEFFICIENT",
    "PoissonResidualError",
    "PolarSource",
    "SupportAtOrigin",
    "key_lemma_remainder",
    "l2_dR",
    "mode_exponents",
    "p2_model_run",
    "p2_model_step",
    "p2_stream",
    "polar_key_lemma",
    "regular_operator_ratio",
    "regular_part",
    "rotation_rate",
    "sharp_regular_bound",
    "singular_split",
    "solve_bsalpha",
    "solve_mode",
    "stated_regular_bound",
    "tail_L",
]
