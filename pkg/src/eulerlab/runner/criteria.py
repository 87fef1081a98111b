"""Acceptance checks grouped into the ``conservation``, ``oracles`` and ``bounds`` suites.

Every check returns a :class:`CriterionResult` with a single measured number
and the bound it is compared against, so the report is one line per check.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SEED = 20240611


@dataclass
class CriterionResult:
    id: int
    name: str
    measured: float
    bound: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"criterion {self.id:2d} {flag} {self.name}: measured={self.measured:.6g} "
                f"bound={self.bound:.6g} ({self.detail}) [{self.seconds:.1f}s]")


def _rng():
    return np.random.Generator(np.random.Philox(SEED))


# ---------------------------------------------------------------- 2D Euler

def cellular_steady() -> CriterionResult:
    from ..spectral2d import EulerSolver, EulerState, Field2D, Grid2D, SolverConfig

    t0 = time.perf_counter()
    grid = Grid2D.torus(64)
    w = Field2D.from_function(grid, lambda X, Y: -2.0 * np.sin(X) * np.sin(Y))
    tend = EulerSolver(grid, SolverConfig(dt=1e-3)).tendency(EulerState(w))
    m = float(np.max(np.abs(tend.values)))
    sec = time.perf_counter() - t0
    return CriterionResult(1, "cellular steady state", m, 1e-10, m < 1e-10 and sec < 1.0,
                           f"max |d omega/dt| at 64^2, runtime {sec:.3f}s < 1s", sec)


def inviscid_conservation() -> CriterionResult:
    from ..spectral2d import DiagnosticsTracker, EulerSolver, EulerState, Field2D, Grid2D, SolverConfig
    from .scenarios import random_vorticity

    grid = Grid2D.torus(256)
    state = EulerState(Field2D(grid, random_vorticity(grid, 4, _rng())), 0.0, np.array([0.3, -0.2]))
    solver = EulerSolver(grid, SolverConfig(dt=1e-3, end_time=1.0, snapshot_every=100))
    tracker = DiagnosticsTracker(n_pairs=0)
    mean = []
    solver.run(state, lambda s, n: (tracker(s), mean.append(s.mean_velocity.copy())))
    recs = tracker.records
    drifts = []
    for key in ("energy", "enstrophy", "casimir"):
        v = np.array([getattr(r, key) for r in recs])
        drifts.append(float(np.max(np.abs(v - v[0])) / abs(v[0])))
    same = all(np.array_equal(m, mean[0]) for m in mean)
    worst = max(drifts)
    return CriterionResult(2, "inviscid conservation", worst, 1e-6, worst < 1e-6 and same,
                           "relative drift of energy / enstrophy / int omega^4: "
                           + ", ".join(f"{d:.2e}" for d in drifts) + f"; mean velocity constant: {same}")


def _envelope_run(kind: str, n: int, dt: float, T: float, rng):
    from ..spectral2d import DiagnosticsTracker, EulerSolver, EulerState, Field2D, Grid2D, SolverConfig
    from ..spectral2d import fit_envelope
    from .scenarios import initial_vorticity

    grid = Grid2D.torus(n)
    state = EulerState(Field2D(grid, initial_vorticity(grid, kind, 1.0, 4, rng)))
    solver = EulerSolver(grid, SolverConfig(dt=dt, end_time=T, snapshot_every=max(1, int(round(0.1 / dt)))))
    tracker = DiagnosticsTracker(alpha=0.5, n_pairs=20000, rng=rng)
    solver.run(state, lambda s, k: tracker(s))
    recs = tracker.records
    times = [r.t for r in recs]
    hn = [r.max_vorticity + r.holder for r in recs]
    return fit_envelope(times, hn, recs[0].max_vorticity, 0.5)


def growth_envelope() -> CriterionResult:
    from ..spectral2d.diagnostics import ENVELOPE_C_MAX

    rng = _rng()
    runs = [("cellular", 64, 1e-2, 2.0), ("spiral", 128, 2e-3, 2.0), ("random", 128, 2e-3, 4.0)]
    margins, cs, ok = [], [], True
    for kind, n, dt, T in runs:
        c, good, margin = _envelope_run(kind, n, dt, T, rng)
        margins.append(margin)
        cs.append(c)
        ok = ok and good
    return CriterionResult(15, "Hoelder growth envelope", max(cs), ENVELOPE_C_MAX, ok,
                           "largest fitted c over inviscid runs " + ", ".join(r[0] for r in runs)
                           + " (" + ", ".join(f"{c:.3g}" for c in cs) + "); min envelope/measured "
                           + f"{min(margins):.3f}")


# ---------------------------------------------------------------- 1D models

def _smooth(x):
    return np.sin(x) + 0.5 * np.cos(2 * x) + 0.25 * np.sin(3 * x)


def projection_a_oracle() -> CriterionResult:
    from ..models1d import CircleField, evolve_1d, lambda_oracle

    w0 = CircleField.from_function(256, _smooth)
    h = evolve_1d(w0, "projection_a", 1e-3, 0.5, snapshot_every=10)
    orc = lambda_oracle(_smooth, "projection_a", 5e-4, 0.5)
    err = max(float(np.max(np.abs(f - orc.omega(w0.x, t)))) for f, t in zip(h.fields, h.times))
    return CriterionResult(3, "ProjectionA oracle", err, 1e-6, err < 1e-6,
                           "max_t |omega - transported(Lambda)| at n=256, t in [0, 0.5]")


def projection_b_blowup() -> CriterionResult:
    from ..models1d import CircleField, evolve_1d, lambda_oracle

    orc = lambda_oracle(np.sin, "projection_b", 1e-3, 2.0)
    h = evolve_1d(CircleField.from_function(256, np.sin), "projection_b", 1e-3, 2.0, snapshot_every=5,
                  cfl=0.4, stop_at=1e3, guard=1e4)
    xf = np.linspace(-np.pi, np.pi, 20001)
    rel = 0.0
    for f, t in zip(h.fields, h.times):
        mo = np.max(np.abs(orc.omega(xf, t)))
        rel = max(rel, abs(np.max(np.abs(f)) - mo) / mo)
    reached = float(np.max(np.abs(h.fields[-1])))
    ok = orc.status == "diverged" and orc.T_star is not None and reached >= 1e3 and rel < 0.05
    Ts = orc.T_star if orc.T_star is not None else float("nan")
    return CriterionResult(4, "ProjectionB blow-up", rel, 0.05, ok,
                           f"oracle T*={Ts:.6f}, solver reached max|omega|={reached:.4g} at t={h.times[-1]:.6f}")


def de_gregorio_steady() -> CriterionResult:
    from ..models1d import CircleField, evolve_1d

    w0 = CircleField.from_function(256, np.sin)
    h = evolve_1d(w0, "de_gregorio", 1e-3, 1.0, snapshot_every=10)
    err = max(float(np.max(np.abs(f - w0.values))) for f in h.fields)
    return CriterionResult(5, "De Gregorio steady state", err, 1e-10, err < 1e-10, "max_t |omega - sin x| on [0, 1]")


def burgers() -> CriterionResult:
    from ..models1d import CircleField, burgers_1d
    from ..models1d.burgers import characteristic_max_slope

    h = burgers_1d(CircleField.from_function(8192, np.sin), 1e-3, 0.99, snapshot_every=10**9)
    T = h.T_star
    growth = h.norms[1.5][-1] / h.norms[1.5][0]
    l1 = abs(h.norms[1.0][-1] - h.norms[1.0][0])
    s = characteristic_max_slope(np.cos, 0.9)
    h9 = burgers_1d(CircleField.from_function(2048, np.sin), 1e-3, 0.9 * T, snapshot_every=10**9)
    slope_err = max(abs(s - 10.0), abs(h9.max_slope[-1] - 10.0)) / 10.0
    ok = growth > 10.0 and l1 < 1e-3 and slope_err < 1e-4
    return CriterionResult(16, "Burgers norms", growth, 10.0, ok,
                           f"|u_x|_3/2 growth at 0.99T* (must exceed bound); L1 drift {l1:.2e} < 1e-3; "
                           f"max|u_x| at 0.9 relative error {slope_err:.2e} < 1e-4")


# ---------------------------------------------------------------- axisymmetric and profiles

def fundamental_selfsimilar() -> CriterionResult:
    from ..axisym import evolve_radial, self_similar_solution
    from ..radial import Profile1D, RadialGrid

    grid = RadialGrid("algebraic", 128)
    F0 = Profile1D.from_function(grid, lambda R: 2 * R / (1 + R) ** 2)
    h = evolve_radial(F0, 1e-3, 0.9, snapshot_every=50)
    err = 0.0
    for t, p in zip(h.times, h.profiles):
        ex = self_similar_solution(grid, t).values
        err = max(err, float(np.max(np.abs(p.values - ex)) / np.max(np.abs(ex))))
    long = evolve_radial(F0, 1e-3, 2.0, snapshot_every=50)
    Ts = long.T_star if long.T_star is not None else float("nan")
    ok = err < 1e-4 and 0.99 <= Ts <= 1.01
    return CriterionResult(6, "fundamental self-similar solution", err, 1e-4, ok,
                           f"relative sup error up to t=0.9; fitted T*={Ts:.6f} in [0.99, 1.01]")


def profile_residuals() -> CriterionResult:
    from ..axisym import profile_residual
    from ..radial import Profile1D, RadialGrid

    grid = RadialGrid("algebraic", 128)
    r1 = profile_residual(Profile1D.from_function(grid, lambda R: 1 / (1 + R)), None)
    r2 = profile_residual(Profile1D.from_function(grid, lambda R: R / (1 + R) ** 2), 2.0)
    worst = max(r1, r2)
    return CriterionResult(7, "profile residuals", worst, 1e-10, worst < 1e-10,
                           f"local {r1:.2e}, nonlocal amplitude 2 {r2:.2e}")


def _compatible_inputs(rng, grid, count=20):
    from ..selfsimilar import HalfLineFn

    z = grid.z
    out = []
    for _ in range(count):
        a, b, c = rng.normal(size=3)
        s = rng.uniform(0.3, 3.0)
        f0, f1 = a, -2 * a + b
        d = -(f1 + 2 * f0)
        vals = a / (1 + z) ** 2 + b * z / (1 + s * z) ** 3 + c * z**2 / (1 + z) ** 4 + d * z / (1 + z) ** 2
        out.append(HalfLineFn(grid, vals, (f0, f1 + d)))
    return out


def l_inverse() -> CriterionResult:
    from ..selfsimilar import DEFAULT_GRID, HalfLineFn, apply_L, invert_L, kernel_element

    grid = DEFAULT_GRID
    z = grid.z
    ident = max(float(np.max(np.abs(apply_L(invert_L(f)).values - f.values))) / max(1.0, f.max_abs())
                for f in _compatible_inputs(_rng(), grid))
    ker = apply_L(kernel_element(grid)).max_abs()
    pair = float(np.max(np.abs(invert_L(HalfLineFn(grid, -1 / (1 + z) ** 2, (-1.0, 2.0))).values
                               - (1 + 2 * z) / (1 + z) ** 2)))
    ok = ident < 1e-8 and ker < 1e-10 and pair < 1e-8
    return CriterionResult(8, "L inverse", ident, 1e-8, ok,
                           f"identity on 20 compatible inputs; kernel {ker:.2e} < 1e-10; worked pair {pair:.2e} < 1e-8")


def fixed_point_profile_check() -> CriterionResult:
    from ..selfsimilar import N1, compactness_profile, fixed_point_profile, kernel_alignment, working_norm

    eps = [1e-5, 1e-4, 1e-3]
    runs = [fixed_point_profile(N1, e) for e in eps]
    le = np.log(eps)
    sg = np.polyfit(le, np.log([working_norm(r.g) for r in runs]), 1)[0]
    sd = np.polyfit(le, np.log([abs(r.delta) for r in runs]), 1)[0]
    comp = compactness_profile(N1, 1e-3)
    _, rest = kernel_alignment(comp.g - runs[-1].g)
    agree = rest.max_abs()
    res = runs[-1].residual
    ok = res < 1e-9 and abs(sg - 1) <= 0.1 and abs(sd - 1) <= 0.1 and agree < 1e-7
    return CriterionResult(9, "fixed-point profile", res, 1e-9, ok,
                           f"residual at eps=1e-3; slopes |g| {sg:.4f}, |delta| {sd:.4f}; "
                           f"methods agree to {agree:.2e} < 1e-7")


# ---------------------------------------------------------------- elliptic

def _random_profiles(rng, grid, count):
    from .scenarios import random_profile

    return [random_profile(rng, grid) for _ in range(count)]


def regular_bound() -> CriterionResult:
    from ..elliptic import DEFAULT_GRID, regular_operator_ratio, stated_regular_bound

    rng = _rng()
    worst = 0.0
    for a in (1.0, 0.5, 0.1):
        for F in _random_profiles(rng, DEFAULT_GRID, 100):
            worst = max(worst, regular_operator_ratio(F, a) / stated_regular_bound(a))
    return CriterionResult(10, "regular part bound", worst, 1.0, worst <= 1.0,
                           "max |R(F)| / (|F| / (8(8-alpha))) over 100 random F per alpha in {1, 0.5, 0.1}")


def bsalpha_decomposition() -> CriterionResult:
    from ..elliptic import DEFAULT_GRID, ModeProfile, regular_operator_ratio, singular_split, solve_bsalpha
    from ..radial import Profile1D

    rng = _rng()
    grid = DEFAULT_GRID
    alphas = (0.5, 0.1, 0.02)
    F = Profile1D.from_function(grid, lambda R: 1.0 / (1.0 + R) ** 2)
    agree = 0.0
    for a in alphas:
        psi = solve_bsalpha(ModeProfile(2, F, a), a).values
        L, Rg = singular_split(F, a)
        split = -(L.values / (4 * a) + Rg.values)
        agree = max(agree, float(np.max(np.abs(psi - split)) / np.max(np.abs(split))))
    profiles = _random_profiles(rng, grid, 20)
    consts = [max(regular_operator_ratio(f, a) for f in profiles) for a in alphas]
    spread = max(consts) / min(consts)
    ok = agree < 1e-8 and spread < 2.0
    return CriterionResult(11, "alpha Biot-Savart decomposition", agree, 1e-8, ok,
                           "relative sup gap between direct solve and -(L/(4 alpha) + R) on n=2; "
                           f"regular constant spread {spread:.3f} < 2")


# ---------------------------------------------------------------- pressureless

def pressureless() -> CriterionResult:
    from ..pressureless import NilpotentFlow, blowup_family_curve, chain_norm_at_origin, evolve_gradient

    rng = _rng()
    res_def, ode_def = 0.0, 0.0
    for d in (4, 8):
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        for flow in (NilpotentFlow.sine_chain(d), NilpotentFlow.sine_chain(d).conjugated(Q)):
            for x in rng.uniform(0, 2 * np.pi, size=(3, d)):
                tr = evolve_gradient(flow, x, [0.25, 0.5, 0.9])
                res_def = max(res_def, tr.resolvent_defect)
                ode_def = max(ode_def, tr.ode_defect)
    dims = [4, 8, 16, 32, 64]
    table = blowup_family_curve(dims, [0.5, 0.9], 2000)
    exact = max(abs(r.norm_at_0 - (1 - r.t ** (r.d - 1)) / (1 - r.t)) for r in table.rows)
    bound_ok = all(r.norm_global <= r.bound + 1e-12 for r in table.rows)
    origin_ok = all(abs(r.norm_at_0 - chain_norm_at_origin(r.d, r.t)) < 1e-12 for r in table.rows)
    ok = res_def < 1e-12 and ode_def < 1e-8 and exact < 1e-12 and bound_ok and origin_ok
    return CriterionResult(12, "pressureless gradient", exact, 1e-12, ok,
                           f"origin values vs (1-t^(d-1))/(1-t); Neumann vs resolvent {res_def:.1e} < 1e-12; "
                           f"vs ODE {ode_def:.1e} < 1e-8; global bound holds: {bound_ok}")


# ---------------------------------------------------------------- geometry

def travel_time_check() -> CriterionResult:
    from ..geometry import isochronality_defect, travel_time
    from .scenarios import stream_field

    a, b = 1.5, 0.5
    levels = [0.2, 0.6, 1.0, 1.4, 1.8]
    psi, _ = stream_field("elliptic", 512, a, b)
    table = travel_time(psi, levels)
    exact = 2 * np.pi * a * b
    err = max(max(abs(r.mu_contour - exact), abs(r.mu_area - exact)) / exact for r in table.levels)
    agree = max(abs(r.mu_contour - r.mu_area) / exact for r in table.levels)
    iso = isochronality_defect(psi, levels)
    cell, center = stream_field("cellular", 256, 1.0, 1.0)
    iso_cell = isochronality_defect(cell, [0.1, 0.3, 0.5, 0.7, 0.9], center)
    ok = len(table.levels) == 5 and err < 1e-3 and agree < 1e-3 and iso < 1e-3 and iso_cell > 0.1
    return CriterionResult(13, "travel time", err, 1e-3, ok,
                           f"relative error vs 2 pi a b on 5 levels; contour vs area {agree:.1e}; "
                           f"isochronality defect elliptic {iso:.1e} < 1e-3, cellular {iso_cell:.3f} > 0.1")


def channel_curves() -> CriterionResult:
    from .scenarios import channel_growth

    cg = channel_growth()
    ratio = float(np.max(cg.distance / cg.bound))
    c = cg.fitted_constant()
    trend = cg.late_to_early()
    ok = ratio <= 1.0 and c > 0 and trend >= 0.5
    return CriterionResult(14, "channel curve distance", ratio, 1.0, ok,
                           f"max dist/(8A/t) over {cg.times.size} samples with t > 2 pi; "
                           f"fitted c = {c:.3e} > 0; late/early q/t^alpha = {trend:.2f} >= 0.5")


# ---------------------------------------------------------------- determinism

DETERMINISM_CONFIGS = ["""
[run]
scenario = "euler2d"
seed = 7

[grid]
n = 32

[solver]
dt = 0.01
end_time = 0.2
snapshot_every = 5

[initial]
kind = "random"

[output]
holder_pairs = 2000
""", """
[run]
scenario = "bsalpha"
seed = 7

[bsalpha]
alphas = [0.5]
trials = 4
""", """
[run]
scenario = "geometry"
seed = 7

[geometry]
n = 64
levels = [0.5, 1.0]
action_trials = 2
lattice = 16
"""]


def determinism() -> CriterionResult:
    from .cli import execute
    from .config import parse_text

    outs = [{}, {}]
    with tempfile.TemporaryDirectory() as tmp:
        for i, text in enumerate(DETERMINISM_CONFIGS):
            cfg = parse_text(text, f"determinism{i}")
            for k in range(2):
                cfg["run"]["output_dir"] = str(Path(tmp) / f"r{k}")
                d = execute(cfg)
                outs[k].update({f"{d.name}/{p.name}": p.read_bytes() for p in sorted(d.glob("*.csv"))})
    same = bool(outs[0]) and outs[0] == outs[1]
    diff = sum(1 for k in outs[0] if outs[0][k] != outs[1].get(k))
    return CriterionResult(17, "determinism", float(diff), 0.0, same,
                           f"differing CSV files between two identical runs ({len(outs[0])} compared)")


CRITERIA = {
    1: cellular_steady,
    2: inviscid_conservation,
    3: projection_a_oracle,
    4: projection_b_blowup,
    5: de_gregorio_steady,
    6: fundamental_selfsimilar,
    7: profile_residuals,
    8: l_inverse,
    9: fixed_point_profile_check,
    10: regular_bound,
    11: bsalpha_decomposition,
    12: pressureless,
    13: travel_time_check,
    14: channel_curves,
    15: growth_envelope,
    16: burgers,
    17: determinism,
}

SUITES = {
    "conservation": (1, 2, 5, 17),
    "oracles": (3, 4, 6, 7, 8, 9, 11, 13, 16),
    "bounds": (10, 12, 14, 15),
}


def evaluate(cid: int) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        r = CRITERIA[cid]()
    except Exception as exc:  # a crash is reported as a failed criterion
        r = CriterionResult(cid, CRITERIA[cid].__name__, float("nan"), float("nan"), False,
                            f"error: {type(exc).__name__}: {exc}")
    if not r.seconds:
        r.seconds = time.perf_counter() - t0
    return r


def run_suite(name: str, report=print) -> list[CriterionResult]:
    out = []
    for cid in SUITES[name]:
        r = evaluate(cid)
        report(r.line())
        out.append(r)
    return out
