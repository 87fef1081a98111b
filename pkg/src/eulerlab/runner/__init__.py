"""Config parsing, scenario drivers, acceptance suites and the ``lab`` CLI."""

from .config import ConfigError, dumps, load, output_root, parse_text, resolve
from .criteria import CRITERIA, SUITES, CriterionResult, evaluate, run_suite
from .scenarios import DESCRIPTIONS, RUNNERS, ScenarioResult, channel_growth, make_rng

__all__ = [
    "CRITERIA",
    "ConfigError",
    "CriterionResult",
    "DESCRIPTIONS",
    "RUNNERS",
    "SUITES",
    "ScenarioResult",
    "channel_growth",
    "dumps",
    "evaluate",
    "load",
    "make_rng",
    "output_root",
    "parse_text",
    "resolve",
    "run_suite",
]
