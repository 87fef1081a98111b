"""The axisymmetric no-swirl fundamental model in ``(R, theta)``.

    Omega_t - (3/2) L12(Omega) sin(2 theta) Omega_theta = L12(Omega) Omega,
    L12(Omega)(R) = int_R^inf int_0^{pi/2} Omega(s, theta) K(theta) / s dtheta ds,

with ``K = 3 cos^2 sin``. Radial nodes come from an algebraic-map Chebyshev
grid (``R = inf`` is the last node); ``theta`` is uniform on ``[0, pi/2]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import newton_cotes

from .. import io
from ..radial import Profile1D, RadialGrid

DECAY_TOL = 1e-10
PANEL = 6


def composite_newton_cotes(n_nodes: int, h: float) -> np.ndarray:
    """Composite 7-point Newton-Cotes weights (all positive)."""
    if (n_nodes - 1) % PANEL:
        raise ValueError(f"n_theta - 1 must be a multiple of {PANEL}, got {n_nodes}")
    a, _ = newton_cotes(PANEL, 1)
    w = np.zeros(n_nodes)
    for start in range(0, n_nodes - 1, PANEL):
        w[start : start + PANEL + 1] += a
    return w * h


@dataclass(frozen=True)
class L12Kernel:
    """``K(theta) = 3 cos(theta)^2 sin(theta)`` with its quadrature weights."""

    n_theta: int = 97

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, np.pi / 2, self.n_theta)

    @property
    def K(self) -> np.ndarray:
        th = self.theta
        return 3.0 * np.cos(th) ** 2 * np.sin(th)

    @property
    def weights(self) -> np.ndarray:
        return composite_newton_cotes(self.n_theta, np.pi / 2 / (self.n_theta - 1))

    @property
    def kernel_weights(self) -> np.ndarray:
        """``K(theta_j) w_j``: the angular average applied before the radial integral."""
        return self.K * self.weights


@dataclass
class PolarField:
    """``Omega`` sampled on ``grid.z`` x ``theta``; rows are radii.

    The row at ``R = inf`` must vanish to ``DECAY_TOL`` relative to the maximum.
    """

    grid: RadialGrid
    n_theta: int
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size, self.n_theta):
            raise ValueError(f"values shape {self.values.shape} does not match grid "
                             f"({self.grid.size}, {self.n_theta})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("polar field contains non-finite values")
        scale = max(float(np.max(np.abs(self.values))), 1e-300)
        if np.max(np.abs(self.values[-1])) > DECAY_TOL * scale:
            raise ValueError("Omega does not decay at R_max")

    @property
    def R(self) -> np.ndarray:
        return self.grid.z

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, np.pi / 2, self.n_theta)

    @classmethod
    def from_function(cls, grid: RadialGrid, n_theta: int, fn, t: float = 0.0) -> "PolarField":
        """``fn(R, theta)`` broadcast on the finite radii; the row at infinity is zero."""
        th = np.linspace(0.0, np.pi / 2, n_theta)
        vals = np.zeros((grid.size, n_theta))
        R = grid.z
        fin = np.isfinite(R)
        vals[fin] = np.broadcast_to(fn(R[fin][:, None], th[None, :]), (int(fin.sum()), n_theta))
        return cls(grid, n_theta, vals, t)

    @classmethod
    def radial(cls, profile: Profile1D, n_theta: int, t: float = 0.0) -> "PolarField":
        return cls(profile.grid, n_theta, np.repeat(profile.values[:, None], n_theta, axis=1), t)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def write(self, path):
        io.write_polar_snapshot(path, self.values, self.t, self.grid.kind)

    @classmethod
    def read(cls, path, grid: RadialGrid | None = None) -> "PolarField":
        values, t, kind = io.read_polar_snapshot(path)
        if grid is None:
            grid = RadialGrid(kind, values.shape[0] - 1)
        if grid.kind != kind or grid.size != values.shape[0]:
            raise ValueError("snapshot does not match the supplied radial grid")
        return cls(grid, values.shape[1], values, t)


def l12(omega: PolarField, kernel: L12Kernel | None = None) -> Profile1D:
    """Angular quadrature against ``K`` followed by the radial tail integral of ``f/s``."""
    kernel = kernel or L12Kernel(omega.n_theta)
    if kernel.n_theta != omega.n_theta:
        raise ValueError("kernel and field use different theta grids")
    ang = omega.values @ kernel.kernel_weights
    scale = max(omega.max_abs(), 1e-300)
    if abs(ang[-1]) > DECAY_TOL * scale:
        raise ValueError("non-decaying tail in L12")
    ang[-1] = 0.0
    if abs(ang[0]) <= DECAY_TOL * scale:
        ang[0] = 0.0
    return Profile1D(omega.grid, omega.grid.tail_log_integral(ang, tol=DECAY_TOL))


def local_rate(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """``L(F) = int_R^inf F/s ds`` for a radial sample; the theta-independent reduction."""
    F = np.asarray(values, dtype=float).copy()
    scale = max(float(np.max(np.abs(F))), 1e-300)
    for i in (0, -1):
        if abs(F[i]) <= DECAY_TOL * scale:
            F[i] = 0.0
    return grid.tail_log_integral(F, tol=DECAY_TOL)


def _extrapolate_ghosts(f: np.ndarray, n_ghost: int = 3) -> np.ndarray:
    """Pad the last axis with quartic extrapolation on both sides."""
    n = f.shape[-1]
    out = np.empty(f.shape[:-1] + (n + 2 * n_ghost,))
    out[..., n_ghost : n_ghost + n] = f
    # Lagrange weights for extrapolating from nodes 0..4 to -k
    nodes = np.arange(5.0)
    for k in range(1, n_ghost + 1):
        x = -float(k)
        w = np.array([np.prod([(x - nodes[m]) / (nodes[j] - nodes[m]) for m in range(5) if m != j])
                      for j in range(5)])
        out[..., n_ghost - k] = f[..., :5] @ w
        out[..., n_ghost + n - 1 + k] = f[..., -5:][..., ::-1] @ w
    return out


def weno5_derivative(f: np.ndarray, h: float, speed: np.ndarray) -> np.ndarray:
    """Upwind WENO5 approximation of ``df/dtheta`` for ``f_t + speed f_theta = 0``."""
    g = 3
    p = _extrapolate_ghosts(f, g)
    d = np.diff(p, axis=-1) / h  # d[j] = (p[j+1]-p[j])/h, j = 0..n+4
    n = f.shape[-1]
    i = np.arange(n) + g  # index of node i in p

    def weno(v1, v2, v3, v4, v5):
        s1 = 13 / 12 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - 4 * v2 + 3 * v3) ** 2
        s2 = 13 / 12 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
        s3 = 13 / 12 * (v3 - 2 * v4 + v5) ** 2 + 0.25 * (3 * v3 - 4 * v4 + v5) ** 2
        eps = 1e-6 * np.maximum(np.mean(d * d, axis=-1, keepdims=True), 1e-30)
        a1 = 0.1 / (eps + s1) ** 2
        a2 = 0.6 / (eps + s2) ** 2
        a3 = 0.3 / (eps + s3) ** 2
        tot = a1 + a2 + a3
        return (a1 * (v1 / 3 - 7 * v2 / 6 + 11 * v3 / 6)
                + a2 * (-v2 / 6 + 5 * v3 / 6 + v4 / 3)
                + a3 * (v3 / 3 + 5 * v4 / 6 - v5 / 6)) / tot

    minus = weno(d[..., i - 3], d[..., i - 2], d[..., i - 1], d[..., i], d[..., i + 1])
    plus = weno(d[..., i + 2], d[..., i + 1], d[..., i], d[..., i - 1], d[..., i - 2])
    return np.where(speed > 0, minus, plus)


@dataclass
class FundamentalHistory:
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    max_abs: list = field(default_factory=list)
    min_value: list = field(default_factory=list)
    L0: list = field(default_factory=list)
    status: str = "ok"
    T_star: float | None = None


def fit_blowup_time(times, max_abs, decade: float = 10.0) -> float | None:
    """Zero of the least-squares line through ``1/max|Omega|`` over the final decade of growth."""
    times = np.asarray(times, dtype=float)
    m = np.asarray(max_abs, dtype=float)
    if m.size < 3 or m[-1] < decade * m[0]:
        return None
    sel = m >= m[-1] / decade
    if sel.sum() < 3:
        sel = np.zeros(m.size, dtype=bool)
        sel[-3:] = True
    slope, icept = np.polyfit(times[sel], 1.0 / m[sel], 1)
    if slope >= 0:
        return None
    return float(-icept / slope)


def _time_loop(state, rhs, dt, T, rate_bound, guard, snapshot_every, record):
    t = 0.0
    step = 0
    limit = guard * max(float(np.max(np.abs(state))), 1e-300)
    status = "ok"
    record(t, state)
    while t < T - 1e-14 * max(1.0, T):
        h = min(dt, T - t, 0.1 / max(rate_bound(state), 1e-300))
        k1 = rhs(state)
        k2 = rhs(state + h / 2 * k1)
        k3 = rhs(state + h / 2 * k2)
        k4 = rhs(state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        step += 1
        m = float(np.max(np.abs(state)))
        if not np.isfinite(m) or m > limit:
            status = "blow-up guard"
            if np.isfinite(m):
                record(t, state)
            break
        if step % snapshot_every == 0 or t >= T - 1e-14 * max(1.0, T):
            record(t, state)
    return status


def evolve_fundamental(omega0: PolarField, dt: float, T: float, snapshot_every: int = 1,
                       guard: float = 1e3, stretching: bool = True, transport: bool = True,
                       keep_snapshots: bool = True) -> FundamentalHistory:
    """RK4 with WENO5 theta-advection and pointwise stretching.

    The step is ``min(dt, 0.1 / rate)`` where ``rate`` bounds both the
    stretching rate ``max|L12|`` and the advection CFL number per unit time, so
    the step shrinks like ``T* - t`` near a blow-up. Once ``max|Omega|``
    exceeds ``guard`` times its initial value the run stops with status
    ``"blow-up guard"`` and ``T_star`` is fitted from ``1/max|Omega|``.
    """
    grid = omega0.grid
    nth = omega0.n_theta
    kernel = L12Kernel(nth)
    kw = kernel.kernel_weights
    th = kernel.theta
    s2 = np.sin(2 * th)
    s2[[0, -1]] = 0.0
    hth = th[1] - th[0]

    def L_of(w):
        ang = w @ kw
        ang[[0, -1]] = 0.0
        return grid.tail_log_integral(ang, tol=np.inf)

    def rhs(w):
        L = L_of(w)
        out = np.zeros_like(w)
        if stretching:
            out += L[:, None] * w
        if transport:
            speed = -1.5 * L[:, None] * s2[None, :]
            out -= speed * weno5_derivative(w, hth, speed)
        out[-1] = 0.0
        return out

    def rate_bound(w):
        L = np.max(np.abs(L_of(w)))
        return L * ((1.0 if stretching else 0.0) + (1.5 / hth if transport else 0.0) / 4.0)

    hist = FundamentalHistory()

    def record(t, w):
        hist.times.append(t)
        hist.max_abs.append(float(np.max(np.abs(w))))
        hist.min_value.append(float(np.min(w)))
        hist.L0.append(float(L_of(w)[0]))
        if keep_snapshots:
            hist.snapshots.append(PolarField(grid, nth, w.copy(), t))

    hist.status = _time_loop(omega0.values.copy(), rhs, dt, T, rate_bound, guard, snapshot_every, record)
    if hist.status != "ok":
        hist.T_star = fit_blowup_time(hist.times, hist.max_abs)
    return hist


@dataclass
class RadialHistory:
    times: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    max_abs: list = field(default_factory=list)
    status: str = "ok"
    T_star: float | None = None


def evolve_radial(F0: Profile1D, dt: float, T: float, snapshot_every: int = 1,
                  guard: float = 1e3) -> RadialHistory:
    """The theta-independent reduction ``Omega_t = Omega L(Omega)`` with the same stepping."""
    grid = F0.grid
    local_rate(F0.values, grid)

    def rate(w):
        return grid.tail_log_integral(np.concatenate([[0.0], w[1:-1], [0.0]]), tol=np.inf)

    def rhs(w):
        out = w * rate(w)
        out[-1] = 0.0
        return out

    def rate_bound(w):
        return float(np.max(np.abs(rate(w))))

    hist = RadialHistory()

    def record(t, w):
        hist.times.append(t)
        hist.profiles.append(Profile1D(grid, w.copy()))
        hist.max_abs.append(float(np.max(np.abs(w))))

    hist.status = _time_loop(F0.values.copy(), rhs, dt, T, rate_bound, guard, snapshot_every, record)
    if hist.status != "ok":
        hist.T_star = fit_blowup_time(hist.times, hist.max_abs)
    return hist


def self_similar_solution(grid: RadialGrid, t: float, amplitude: float = 2.0) -> Profile1D:
    """``(amplitude/(1-t)) F(R/(1-t))`` with ``F = R/(1+R)^2``."""
    lam = 1.0 - t
    return Profile1D.from_function(grid, lambda R: amplitude / lam * (R / lam) / (1 + R / lam) ** 2)


def profile_residual(F: Profile1D, amplitude: float | None = 2.0) -> float:
    """Max-norm residual of the profile equation on the finite nodes.

    ``amplitude=None`` selects the local equation ``F + zF' = F^2``; otherwise
    ``F + zF' = amplitude * F * L(F)``.
    """
    v = F.values
    zf = F.zdz()
    if amplitude is None:
        r = v + zf - v * v
    else:
        r = v + zf - amplitude * v * local_rate(v, F.grid)
    fin = np.isfinite(F.z)
    return float(np.max(np.abs(r[fin])))
