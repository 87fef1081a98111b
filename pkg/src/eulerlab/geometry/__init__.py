"""Action of flow paths, path perturbations, travel times and isochronality."""

from .paths import (
    EndpointDrift,
    FlowPath,
    action,
    cellular_pressure_hessian,
    cellular_velocity,
    hessian_sup,
    label_lattice,
    map_jacobian_det,
    minimality_horizon,
    path_from_velocity,
    path_velocity,
    perturb_path,
    pressure_from_velocity,
    stream_perturbation,
    time_bump,
)
from .travel import LevelResult, StreamfunctionAnalysis, TravelTable, isochronality_defect, travel_time

__all__ = [
    "EndpointDrift",
    "FlowPath",
    "LevelResult",
    "StreamfunctionAnalysis",
    "TravelTable",
    "action",
    "cellular_pressure_hessian",
    "cellular_velocity",
    "hessian_sup",
    "isochronality_defect",
    "label_lattice",
    "map_jacobian_det",
    "minimality_horizon",
    "path_from_velocity",
    "path_velocity",
    "perturb_path",
    "pressure_from_velocity",
    "stream_perturbation",
    "time_bump",
    "travel_time",
]
