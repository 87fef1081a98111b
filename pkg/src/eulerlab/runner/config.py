"""Run configuration: a TOML subset of ``[section]`` headers and ``key = value`` lines.

Every scenario has a fixed schema. Validation collects all problems (unknown
sections or keys, wrong types, out-of-range values) before reporting, and the
resolved configuration with every default filled in is what gets written back
as the run manifest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import tomli
import tomli_w

DEFAULT_OUTPUT_ROOT = "lab_output"


class ConfigError(ValueError):
    """One or more validation problems; ``errors`` lists them all."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Key:
    kind: type | tuple
    default: object
    check: object = None
    help: str = ""


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _one_of(*opts):
    def f(v):
        return v in opts

    f.options = opts
    return f


def _even_at_least(m):
    def f(v):
        return v >= m and v % 2 == 0

    return f


def _list_of_positive(v):
    return len(v) > 0 and all(isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0 for x in v)


def _list_of_nonneg(v):
    return len(v) > 0 and all(isinstance(x, (int, float)) and not isinstance(x, bool) and x >= 0 for x in v)


def _list_of_dims(v):
    return len(v) > 0 and all(isinstance(x, int) and not isinstance(x, bool) and x >= 2 for x in v)


RUN = {
    "scenario": Key(str, None),
    "seed": Key(int, 0, _nonneg),
    "name": Key(str, ""),
    "output_dir": Key(str, ""),
}

SCHEMAS = {
    "euler2d": {
        "grid": {
            "n": Key(int, 64, _even_at_least(8)),
            "length": Key(float, 6.283185307179586, _positive),
        },
        "solver": {
            "dt": Key(float, 1e-3, _positive),
            "nu": Key(float, 0.0, _nonneg),
            "end_time": Key(float, 0.01, _positive),
            "snapshot_every": Key(int, 10, _positive),
            "dealias": Key(str, "two_thirds", _one_of("two_thirds", "none")),
            "guard": Key(float, 1e3, _positive),
        },
        "initial": {
            "kind": Key(str, "cellular", _one_of("cellular", "spiral", "shear", "random")),
            "amplitude": Key(float, 1.0),
            "modes": Key(int, 6, _positive),
        },
        "output": {
            "heatmaps": Key(bool, False),
            "snapshots": Key(bool, False),
            "holder_alpha": Key(float, 0.5, lambda v: 0 < v < 1),
            "holder_pairs": Key(int, 10000, _nonneg),
            "norm_p_max": Key(int, 64, lambda v: v >= 2),
        },
    },
    "channel-growth": {
        "grid": {
            "nx": Key(int, 256, _even_at_least(8)),
            "ny": Key(int, 128, _even_at_least(8)),
        },
        "solver": {
            "dt": Key(float, 0.01, _positive),
            "end_time": Key(float, 20.0, _positive),
            "snapshot_every": Key(int, 25, _positive),
        },
        "perturbation": {
            "eps": Key(float, 0.05, _positive),
            "margin": Key(float, 0.0, lambda v: 0 <= v < 0.5),
        },
        "curves": {
            "markers": Key(int, 2001, lambda v: v >= 10),
            "substeps": Key(int, 4, _positive),
            "alpha": Key(float, 0.5, lambda v: 0 < v < 1),
        },
    },
    "model1d": {
        "model": {
            "variant": Key(str, "projection_a", _one_of("projection_a", "projection_b", "de_gregorio", "clm",
                                                        "burgers", "scale_invariant_euler")),
            "n": Key(int, 256, _even_at_least(16)),
            "dt": Key(float, 1e-3, _positive),
            "end_time": Key(float, 0.5, _positive),
            "snapshot_every": Key(int, 10, _positive),
            "initial": Key(str, "smooth", _one_of("smooth", "sin", "calpha", "cos")),
            "holder_alpha": Key(float, 0.5, lambda v: 0 < v < 1),
            "symmetry": Key(int, 3, lambda v: v >= 3),
            "guard": Key(float, 1e3, _positive),
        },
    },
    "fundamental": {
        "fundamental": {
            "solver": Key(str, "radial", _one_of("radial", "polar")),
            "n_radial": Key(int, 128, _even_at_least(8)),
            "n_theta": Key(int, 25, lambda v: v >= 7 and (v - 1) % 6 == 0),
            "dt": Key(float, 1e-3, _positive),
            "end_time": Key(float, 0.9, _positive),
            "amplitude": Key(float, 2.0, _positive),
            "snapshot_every": Key(int, 100, _positive),
        },
    },
    "selfsimilar": {
        "profile": {
            "nonlinearity": Key(str, "N1", _one_of("N1", "N2", "N3", "N4")),
            "eps": Key(float, 1e-3, _nonneg),
            "method": Key(str, "fixed_point", _one_of("fixed_point", "compactness")),
        },
    },
    "bsalpha": {
        "bsalpha": {
            "alphas": Key(list, [0.5, 0.1, 0.02], _list_of_positive),
            "mode": Key(int, 2, _nonneg),
            "trials": Key(int, 20, _positive),
        },
    },
    "pressureless": {
        "pressureless": {
            "dims": Key(list, [4, 8, 16, 32, 64], _list_of_dims),
            "times": Key(list, [0.0, 0.5, 0.9], _list_of_nonneg),
            "samples": Key(int, 10000, _positive),
        },
    },
    "geometry": {
        "geometry": {
            "psi": Key(str, "elliptic", _one_of("elliptic", "cellular", "radial")),
            "n": Key(int, 256, _even_at_least(16)),
            "a": Key(float, 1.5, _positive),
            "b": Key(float, 0.5, _positive),
            "levels": Key(list, [0.2, 0.6, 1.0, 1.4, 1.8], _list_of_positive),
            "action_trials": Key(int, 5, _nonneg),
            "horizon": Key(float, 1.0, _positive),
            "lattice": Key(int, 32, _even_at_least(8)),
        },
    },
}

SCENARIOS = tuple(SCHEMAS)


def _type_ok(value, key: Key) -> bool:
    if key.kind is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if key.kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, key.kind)


def _coerce(value, key: Key):
    if key.kind is float:
        return float(value)
    if key.kind is list:
        return list(value)
    return value


def _check_section(name, given, schema, errors, resolved):
    out = {}
    for k in given:
        if k not in schema:
            errors.append(f"[{name}] unknown key {k!r}")
    for k, key in schema.items():
        if k not in given:
            if key.default is None:
                errors.append(f"[{name}] missing required key {k!r}")
                continue
            out[k] = _coerce(key.default, key)
            continue
        v = given[k]
        if not _type_ok(v, key):
            errors.append(f"[{name}] {k} must be {key.kind.__name__}, got {type(v).__name__}")
            continue
        v = _coerce(v, key)
        if key.check is not None and not key.check(v):
            opts = getattr(key.check, "options", None)
            hint = f" (one of {', '.join(opts)})" if opts else ""
            errors.append(f"[{name}] {k} = {v!r} is out of range{hint}")
            continue
        out[k] = v
    resolved[name] = out


def resolve(raw: dict, source_name: str = "") -> dict:
    """Validate a parsed config and fill defaults; raises :class:`ConfigError`."""
    errors = []
    resolved = {}
    if not isinstance(raw.get("run"), dict):
        errors.append("missing [run] section")
        raise ConfigError(errors)
    _check_section("run", raw["run"], RUN, errors, resolved)
    scenario = resolved["run"].get("scenario")
    if scenario is not None and scenario not in SCHEMAS:
        errors.append(f"[run] unknown scenario {scenario!r} (one of {', '.join(SCENARIOS)})")
        scenario = None
    schema = SCHEMAS.get(scenario, {})
    for sec, body in raw.items():
        if sec == "run":
            continue
        if not isinstance(body, dict):
            errors.append(f"top-level key {sec!r} is not a section")
        elif scenario is not None and sec not in schema:
            errors.append(f"unknown section [{sec}] for scenario {scenario!r}")
    for sec, keys in schema.items():
        given = raw.get(sec, {})
        if isinstance(given, dict):
            _check_section(sec, given, keys, errors, resolved)
    if errors:
        raise ConfigError(errors)
    if not resolved["run"]["name"]:
        resolved["run"]["name"] = source_name or scenario
    return resolved


def parse_text(text: str, source_name: str = "") -> dict:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError([f"syntax error: {exc}"]) from None
    return resolve(raw, source_name)


def load(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {p}: {exc.strerror}"]) from None
    return parse_text(text, p.stem)


def dumps(resolved: dict) -> str:
    return tomli_w.dumps(resolved)


def output_root(resolved: dict) -> Path:
    given = resolved["run"]["output_dir"]
    if given:
        return Path(given)
    return Path(os.environ.get("LAB_OUTPUT_DIR", DEFAULT_OUTPUT_ROOT))
