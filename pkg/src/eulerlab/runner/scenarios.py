"""Scenario drivers: each takes a resolved config, an output directory and a generator."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import io

DESCRIPTIONS = {
    "euler2d": "2D Euler / Navier-Stokes on the torus with conservation and growth diagnostics",
    "channel-growth": "Couette channel with a small perturbation: curve distance and Hoelder proxy",
    "model1d": "1D vorticity models, Burgers and scale-invariant Euler on the circle",
    "fundamental": "fundamental axisymmetric model from self-similar data",
    "selfsimilar": "toy self-similar profile by fixed point or compactness iteration",
    "bsalpha": "alpha-scaled Biot-Savart modes against the singular split, regular-part audit",
    "pressureless": "gradient norms of the nilpotent chain family",
    "geometry": "travel times of closed streamlines and action of perturbed paths",
}


@dataclass
class ScenarioResult:
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    status: str = "ok"


def make_rng(seed: int) -> np.random.Generator:
    """The single counter-based generator of a run."""
    return np.random.Generator(np.random.Philox(int(seed)))


# ---------------------------------------------------------------- euler2d

def spiral_vorticity(X, Y):
    """Cellular flow plus a thin perturbation concentrated near a level set."""
    base = np.sin(X) * np.sin(Y)
    return base + base * np.exp(-100.0 * (np.cos(X) ** 2 * np.cos(Y) ** 2 - 0.25) ** 2)


def random_vorticity(grid, modes: int, rng) -> np.ndarray:
    X, Y = grid.mesh()
    out = np.zeros(grid.shape)
    for kx in range(-modes, modes + 1):
        for ky in range(0, modes + 1):
            if (kx, ky) == (0, 0) or kx * kx + ky * ky > modes * modes:
                continue
            a, b = rng.normal(size=2) / (1.0 + kx * kx + ky * ky)
            out += a * np.cos(kx * X + ky * Y) + b * np.sin(kx * X + ky * Y)
    out -= out.mean()
    return out / np.max(np.abs(out))


def initial_vorticity(grid, kind: str, amplitude: float, modes: int, rng) -> np.ndarray:
    X, Y = grid.mesh()
    if kind == "cellular":
        w = -2.0 * np.sin(X) * np.sin(Y)
    elif kind == "spiral":
        w = spiral_vorticity(X, Y)
    elif kind == "shear":
        w = np.sin(Y)
    else:
        w = random_vorticity(grid, modes, rng)
    return amplitude * w


def run_euler2d(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..spectral2d import DiagnosticsTracker, EulerSolver, EulerState, Field2D, Grid2D, SolverConfig
    from ..spectral2d.diagnostics import fit_envelope

    g, s, ini, o = cfg["grid"], cfg["solver"], cfg["initial"], cfg["output"]
    grid = Grid2D.torus(g["n"], g["n"], g["length"], g["length"])
    w0 = initial_vorticity(grid, ini["kind"], ini["amplitude"], ini["modes"], rng)
    state = EulerState(Field2D(grid, w0))
    sc = SolverConfig(dt=s["dt"], nu=s["nu"], dealias=s["dealias"], end_time=s["end_time"],
                      snapshot_every=s["snapshot_every"], guard_factor=s["guard"])
    solver = EulerSolver(grid, sc)
    probe = EulerSolver(grid, sc)
    tracker = DiagnosticsTracker(alpha=o["holder_alpha"], P=o["norm_p_max"], n_pairs=o["holder_pairs"], rng=rng)
    rows = []
    res = ScenarioResult()

    def callback(st, n):
        rec = tracker(st)
        tend = float(np.max(np.abs(probe.tendency(st).values)))
        rows.append([rec.t, rec.energy, rec.enstrophy, rec.max_vorticity, rec.max_gradient, rec.holder,
                     rec.bkm, rec.y_norm, rec.x_norm, rec.casimir, tend])
        k = len(rows) - 1
        if o["heatmaps"]:
            path = out / f"heatmap_{k:04d}.pgm"
            io.write_pgm(path, st.omega.values)
            res.files.append(path.name)
        if o["snapshots"]:
            path = out / f"snapshot_{k:04d}.fld"
            io.write_snapshot(path, st.omega.values, "torus", st.t)
            res.files.append(path.name)

    _, status = solver.run(state, callback)
    header = ["t", "energy", "enstrophy", "max_vorticity", "max_gradient", "holder_quotient", "bkm",
              "y_norm", "x_norm", "casimir", "tendency_norm"]
    io.write_csv(out / "diagnostics.csv", header, rows)
    res.files.append("diagnostics.csv")
    arr = np.array(rows)
    inf0 = arr[0, 3]
    holder_norms = arr[:, 3] + arr[:, 5]
    c, ok, margin = fit_envelope(arr[:, 0], holder_norms, inf0, o["holder_alpha"]) if inf0 > 0 else (0.0, True, np.inf)
    res.status = status
    res.summary = {
        "energy_drift": float(np.max(np.abs(arr[:, 1] - arr[0, 1])) / max(arr[0, 1], 1e-300)),
        "enstrophy_drift": float(np.max(np.abs(arr[:, 2] - arr[0, 2])) / max(arr[0, 2], 1e-300)),
        "max_tendency_norm": float(np.max(arr[:, 10])),
        "enstrophy_monotone_decreasing": bool(np.all(np.diff(arr[:, 2]) < 0)) if len(arr) > 1 else True,
        "envelope_c": c,
        "envelope_ok": ok,
        "envelope_margin": margin,
        "warnings": [f"{w['kind']} at t={w['t']:.6g}: {w['detail']}" for w in solver.warnings.entries][:20],
    }
    return res


# ---------------------------------------------------------------- channel-growth

@dataclass
class ChannelGrowth:
    times: np.ndarray
    distance: np.ndarray
    bound: np.ndarray
    proxy: np.ndarray
    area: float
    alpha: float

    def fitted_constant(self) -> float:
        """``min q(t) / t^alpha`` over the samples."""
        return float(np.min(self.proxy / self.times**self.alpha))

    def late_to_early(self) -> float:
        r = self.proxy / self.times**self.alpha
        return float(r[-1] / r[0])


def channel_perturbation(X, Y, margin=0.0):
    """Vanishes on both walls; larger on ``x = 3 pi/2`` than on ``x = 7 pi/4``.

    With ``margin > 0`` the wall profile ``sin(pi y)`` is replaced by
    ``sin^4`` of the rescaled strip ``[margin, 1 - margin]``, zero outside
    it, so the data is compactly supported away from both walls.
    """
    if margin <= 0:
        env = np.sin(np.pi * Y)
    else:
        s = (Y - margin) / (1.0 - 2.0 * margin)
        env = np.where((s > 0) & (s < 1), np.sin(np.pi * np.clip(s, 0, 1)) ** 4, 0.0)
    return 0.5 * env * np.cos(X - 1.5 * np.pi)


def channel_growth(nx=256, ny=128, dt=0.01, end_time=20.0, snapshot_every=25, eps=0.05, markers=2001,
                   substeps=4, alpha=0.5, margin=0.0) -> ChannelGrowth:
    """Two vertical lines in a Couette channel ``u = y`` with vorticity ``-1 + eps h``.

    The lines start at ``x = 3 pi/2`` and ``x = 7 pi/4`` (``-pi/2`` and
    ``-pi/4`` on the circle), bounding a rectangle of area ``pi/4``. Each
    marker carries its initial vorticity, so the proxy
    ``max |omega_i - omega_j| / |p_i - p_j|^alpha`` over pairs closer than
    twice the curve distance bounds the grid Hoelder quotient from below.
    """
    from ..spectral2d import EulerSolver, EulerState, Field2D, Grid2D, SolverConfig
    from ..spectral2d.tracers import CurveAdvector, curve_distance, pairs_within

    grid = Grid2D.channel(nx, ny, 2 * np.pi, 1.0)
    w = Field2D.from_function(grid, lambda X, Y: eps * channel_perturbation(X, Y, margin))
    state = EulerState(w, 0.0, np.array([0.5, 0.0]), shear=1.0)
    solver = EulerSolver(grid, SolverConfig(dt=dt, end_time=end_time, snapshot_every=snapshot_every))
    ys = np.linspace(0.0, 1.0, markers)
    x1, x2 = 1.5 * np.pi, 1.75 * np.pi
    c1 = np.column_stack([np.full_like(ys, x1), ys])
    c2 = np.column_stack([np.full_like(ys, x2), ys])
    w1 = eps * channel_perturbation(c1[:, 0], c1[:, 1], margin)
    w2 = eps * channel_perturbation(c2[:, 0], c2[:, 1], margin)
    adv = CurveAdvector([c1, c2], substeps=substeps)
    area = (x2 - x1) * 1.0
    rows = []

    def callback(st, n):
        adv.push(st)
        if st.t > 2 * np.pi:
            a, b = adv.curves
            d, _ = curve_distance(a, b, grid)
            i, j, v = pairs_within(a, b, grid, 2 * d)
            q = float(np.max(np.abs(w1[i] - w2[j]) / np.maximum(v, 1e-300) ** alpha))
            rows.append((st.t, d, 8 * area / st.t, q))

    _, status = solver.run(state, callback)
    if status != "ok":
        raise RuntimeError(f"channel run stopped: {status}")
    arr = np.array(rows)
    return ChannelGrowth(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], area, alpha)


def run_channel(cfg: dict, out: Path, rng) -> ScenarioResult:
    g, s, p, c = cfg["grid"], cfg["solver"], cfg["perturbation"], cfg["curves"]
    cg = channel_growth(g["nx"], g["ny"], s["dt"], s["end_time"], s["snapshot_every"], p["eps"], c["markers"],
                        c["substeps"], c["alpha"], p["margin"])
    io.write_csv(out / "curves.csv", ["t", "distance", "bound", "holder_proxy"],
                 zip(cg.times, cg.distance, cg.bound, cg.proxy))
    return ScenarioResult(["curves.csv"], {
        "area": cg.area,
        "distance_within_bound": bool(np.all(cg.distance <= cg.bound)),
        "fitted_c": cg.fitted_constant(),
        "late_to_early": cg.late_to_early(),
    })


# ---------------------------------------------------------------- model1d

def model1d_initial(kind: str, holder_alpha: float):
    from ..models1d import calpha_data

    if kind == "sin":
        return np.sin
    if kind == "cos":
        return np.cos
    if kind == "calpha":
        return calpha_data(holder_alpha)
    return lambda x: np.sin(x) + 0.5 * np.cos(2 * x) + 0.25 * np.sin(3 * x)


def run_model1d(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..models1d import CircleField, Variant, burgers_1d, evolve_1d, lambda_oracle, scale_invariant_euler

    m = cfg["model"]
    variant = Variant(m["variant"])
    n, dt, T = m["n"], m["dt"], m["end_time"]
    f0 = model1d_initial(m["initial"], m["holder_alpha"])
    res = ScenarioResult()
    if variant is Variant.BURGERS:
        h = burgers_1d(CircleField.from_function(n, f0), dt, T, m["snapshot_every"])
        header = ["t", "max_slope"] + [f"lp_{p:g}" for p in h.norms]
        rows = [[t, s] + [h.norms[p][k] for p in h.norms] for k, (t, s) in enumerate(zip(h.times, h.max_slope))]
        io.write_csv(out / "history.csv", header, rows)
        res.files.append("history.csv")
        res.summary = {"T_star": h.T_star}
        return res
    if variant is Variant.SCALE_INVARIANT_EULER:
        k = m["symmetry"]
        h = scale_invariant_euler(CircleField.from_function(n, lambda x: np.cos(k * x)), k, dt, T,
                                  m["snapshot_every"])
        io.write_csv(out / "history.csv", ["t", "sup", "max_slope"], zip(h.times, h.sup, h.max_slope))
        res.files.append("history.csv")
        return res
    w0 = CircleField.from_function(n, f0)
    h = evolve_1d(w0, variant, dt, T, m["snapshot_every"], guard=m["guard"])
    header = ["t", "max_abs"]
    rows = [[t, float(np.max(np.abs(f)))] for t, f in zip(h.times, h.fields)]
    if h.lam:
        header += ["lam", "Lambda", "oracle_error"]
        orc = lambda_oracle(f0, variant, dt / 2, h.times[-1])
        x = w0.x
        for r, L, lam, f, t in zip(rows, h.Lam, h.lam, h.fields, h.times):
            r += [lam, L, float(np.max(np.abs(f - orc.omega(x, t))))]
        res.summary["oracle_status"] = orc.status
    io.write_csv(out / "history.csv", header, rows)
    res.files.append("history.csv")
    res.status = h.status
    return res


# ---------------------------------------------------------------- fundamental

def run_fundamental(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..axisym import PolarField, evolve_fundamental, evolve_radial, self_similar_solution
    from ..radial import Profile1D, RadialGrid

    f = cfg["fundamental"]
    grid = RadialGrid("algebraic", f["n_radial"])
    amp = f["amplitude"]
    F0 = Profile1D.from_function(grid, lambda R: amp * R / (1 + R) ** 2)
    res = ScenarioResult()
    if f["solver"] == "radial":
        h = evolve_radial(F0, f["dt"], f["end_time"], f["snapshot_every"])
        profiles = h.profiles
    else:
        h = evolve_fundamental(PolarField.radial(F0, f["n_theta"]), f["dt"], f["end_time"], f["snapshot_every"])
        profiles = [s.values[:, 0] for s in h.snapshots]
        last = h.snapshots[-1]
        last.write(out / "final.pol")
        res.files.append("final.pol")
    rows = []
    for t, m, prof in zip(h.times, h.max_abs, profiles):
        vals = prof.values if hasattr(prof, "values") else prof
        if t < 1.0 and amp == 2.0:
            ex = self_similar_solution(grid, t, amp).values
            err = float(np.max(np.abs(vals - ex)) / np.max(np.abs(ex)))
        else:
            err = float("nan")
        rows.append([t, m, err])
    io.write_csv(out / "history.csv", ["t", "max_abs", "rel_error_vs_self_similar"], rows)
    res.files.append("history.csv")
    res.status = h.status
    res.summary = {"T_star": h.T_star, "status": h.status}
    return res


# ---------------------------------------------------------------- selfsimilar

def run_selfsimilar(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..selfsimilar import N1, N2, N3, N4, compactness_profile, fixed_point_profile, write_profile

    p = cfg["profile"]
    N = {"N1": N1, "N2": N2, "N3": N3, "N4": N4}[p["nonlinearity"]]
    solve = fixed_point_profile if p["method"] == "fixed_point" else compactness_profile
    result = solve(N, p["eps"])
    write_profile(out / "profile", result)
    return ScenarioResult(["profile.csv", "profile.json"], result.metadata())


# ---------------------------------------------------------------- bsalpha

def random_profile(rng, grid):
    """Sum of three log-Gaussian bumps with random signs, centres and widths."""
    c = rng.normal(size=3)
    mu = rng.uniform(-3.0, 3.0, size=3)
    w = rng.uniform(0.4, 2.0, size=3)

    def F(R):
        x = np.log(R)
        return sum(c[i] * np.exp(-(((x - mu[i]) / w[i]) ** 2)) for i in range(3)) / np.sqrt(R)

    return F


def run_bsalpha(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..elliptic import (DEFAULT_GRID, ModeProfile, regular_operator_ratio, sharp_regular_bound, singular_split,
                            solve_bsalpha, stated_regular_bound)
    from ..radial import Profile1D

    b = cfg["bsalpha"]
    grid = DEFAULT_GRID
    F = Profile1D.from_function(grid, lambda R: 1.0 / (1.0 + R) ** 2)
    res = ScenarioResult()
    agreement = {}
    for a in b["alphas"]:
        if a > 1:
            raise ValueError(f"alpha must lie in (0, 1], got {a}")
        psi = solve_bsalpha(ModeProfile(b["mode"], F, a), a).values
        name = f"mode{b['mode']}_alpha{a:g}.csv"
        cols = ["R", "psi_direct"]
        rows = [list(r) for r in zip(grid.z, psi)]
        if b["mode"] == 2:
            L, Rg = singular_split(F, a)
            split = -(L.values / (4 * a) + Rg.values)
            cols.append("psi_split")
            for r, v in zip(rows, split):
                r.append(v)
            agreement[f"{a:g}"] = float(np.max(np.abs(psi - split)) / np.max(np.abs(split)))
        io.write_csv(out / name, cols, rows)
        res.files.append(name)
    audit = []
    for a in b["alphas"]:
        for k in range(b["trials"]):
            r = regular_operator_ratio(random_profile(rng, grid), a, grid)
            audit.append([a, k, r, stated_regular_bound(a), sharp_regular_bound(a)])
    io.write_csv(out / "regular_audit.csv", ["alpha", "trial", "ratio", "stated_bound", "sharp_bound"], audit)
    res.files.append("regular_audit.csv")
    res.summary = {"split_agreement": agreement,
                   "max_ratio": {f"{a:g}": max(r[2] for r in audit if r[0] == a) for a in b["alphas"]}}
    return res


# ---------------------------------------------------------------- pressureless

def run_pressureless(cfg: dict, out: Path, rng) -> ScenarioResult:
    from ..pressureless import blowup_family_curve, chain_norm_at_origin

    p = cfg["pressureless"]
    table = blowup_family_curve(p["dims"], p["times"], p["samples"])
    table.write_csv(out / "norms.csv")
    worst = max(abs(r.norm_at_0 - chain_norm_at_origin(r.d, r.t)) for r in table.rows)
    return ScenarioResult(["norms.csv"], {"max_origin_error": worst,
                                          "bound_holds": all(r.norm_global <= r.bound + 1e-12 for r in table.rows)})


# ---------------------------------------------------------------- geometry

def stream_field(kind: str, n: int, a: float, b: float):
    from ..spectral2d import Field2D, Grid2D

    grid = Grid2D.torus(n)
    c = np.pi
    if kind == "elliptic":
        return Field2D.from_function(grid, lambda X, Y: 0.5 * (((X - c) / a) ** 2 + ((Y - c) / b) ** 2)), None
    if kind == "radial":
        return Field2D.from_function(grid, lambda X, Y: ((X - c) ** 2 + (Y - c) ** 2) ** 2 / 4), None
    return Field2D.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y)), (np.pi / 2, np.pi / 2)


def random_stream_gradient(rng, kmax: int = 2):
    kx, ky = rng.integers(1, kmax + 1, size=2)
    ph1, ph2 = rng.uniform(0, 2 * np.pi, size=2)
    amp = 1.0 / max(kx, ky)

    def grad(X):
        x, y = X[..., 0], X[..., 1]
        return (amp * kx * np.cos(kx * x + ph1) * np.sin(ky * y + ph2),
                amp * ky * np.sin(kx * x + ph1) * np.cos(ky * y + ph2))

    return grad


def run_geometry(cfg: dict, out: Path, rng) -> ScenarioResult:
    import warnings

    from ..geometry import action, cellular_velocity, path_from_velocity, perturb_path, stream_perturbation
    from ..geometry import isochronality_defect, travel_time

    g = cfg["geometry"]
    psi, center = stream_field(g["psi"], g["n"], g["a"], g["b"])
    table = travel_time(psi, g["levels"], center)
    table.write_csv(out / "travel_time.csv")
    res = ScenarioResult(["travel_time.csv"])
    res.summary = {"notices": table.notices,
                   "isochronality_defect": isochronality_defect(psi, g["levels"], center)
                   if table.levels else None}
    if g["action_trials"]:
        T = g["horizon"]
        times = np.linspace(0.0, T, 21)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            base = path_from_velocity(cellular_velocity, g["lattice"], times, velocity_id="cellular")
            A0 = action(base)
            rows = []
            for k in range(g["action_trials"]):
                v = stream_perturbation(random_stream_gradient(rng), 0.0, T)
                A = action(perturb_path(base, v, eps=0.1, steps=10))
                rows.append([k, A0, A, A - A0])
        io.write_csv(out / "action.csv", ["trial", "action_base", "action_perturbed", "difference"], rows)
        res.files.append("action.csv")
        res.summary["base_action"] = A0
        res.summary["min_difference"] = min(r[3] for r in rows)
    return res


RUNNERS = {
    "euler2d": run_euler2d,
    "channel-growth": run_channel,
    "model1d": run_model1d,
    "fundamental": run_fundamental,
    "selfsimilar": run_selfsimilar,
    "bsalpha": run_bsalpha,
    "pressureless": run_pressureless,
    "geometry": run_geometry,
}
