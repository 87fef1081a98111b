"""Inviscid Burgers up to the shock and the scale-invariant 1D Euler system."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy.integrate import quad

from .core import CircleField, circle_sup, dealias_mask, derivative, grid_points, wavenumbers

LP_EXPONENTS = (1.0, 1.2, 1.4, 1.5, 2.0)


def lp_norm_circle(values: np.ndarray, p: float) -> float:
    n = values.size
    return float((np.sum(np.abs(values) ** p) * 2 * np.pi / n) ** (1.0 / p))


@dataclass
class BurgersHistory:
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    norms: dict = field(default_factory=lambda: {p: [] for p in LP_EXPONENTS})
    max_slope: list = field(default_factory=list)
    T_star: float = np.inf


def shock_time(du0: np.ndarray) -> float:
    m = float(np.min(du0))
    return np.inf if m >= 0 else -1.0 / m


def burgers_1d(u0: CircleField, dt: float, T: float, snapshot_every: int = 1, cfl: float = 0.4,
               refine: int = 8) -> BurgersHistory:
    """Pseudospectral RK4 solve of ``u_t + (u^2/2)_x = 0`` on ``[0, T]`` with ``T < T*``.

    ``T*`` is ``-1/min(u0')`` where ``u0'`` is sampled on a ``refine``-times
    finer grid through the trigonometric interpolant. Continuation to or past
    ``T*`` is refused.
    """
    n = u0.n
    fine = sfft.irfft(np.pad(sfft.rfft(u0.values), (0, (refine - 1) * n // 2)), refine * n) * refine
    Ts = shock_time(derivative(fine))
    if T >= Ts:
        raise ValueError(f"requested T={T} reaches the shock time T*={Ts:.6g}")
    mask = dealias_mask(n)
    k = wavenumbers(n)
    k[-1] = 0.0
    dx = 2 * np.pi / n

    def rhs(u):
        h = sfft.rfft(u) * mask
        uu = sfft.irfft(h, n)
        return -sfft.irfft(1j * k * sfft.rfft(0.5 * uu * uu) * mask, n)

    hist = BurgersHistory(T_star=Ts)
    u = u0.values.copy()
    t = 0.0

    def record():
        ux = derivative(u)
        hist.times.append(t)
        hist.fields.append(u.copy())
        for p in LP_EXPONENTS:
            hist.norms[p].append(lp_norm_circle(ux, p))
        hist.max_slope.append(float(np.max(np.abs(ux))))

    record()
    step = 0
    while t < T - 1e-14:
        h = min(dt, T - t, cfl * dx / max(np.max(np.abs(u)), 1e-300))
        k1 = rhs(u)
        k2 = rhs(u + h / 2 * k1)
        k3 = rhs(u + h / 2 * k2)
        k4 = rhs(u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        step += 1
        if step % snapshot_every == 0 or t >= T - 1e-14:
            record()
    return hist


def characteristic_slope(du0, t):
    """``u_x`` carried along the characteristic from label ``a``: ``u0'(a)/(1 + t u0'(a))``."""
    return du0 / (1.0 + t * du0)


def characteristic_lp(du0_fn, t: float, p: float, breakpoints=()) -> float:
    """Exact ``|u_x(t)|_p`` from the labels: ``int |u0'|^p |1 + t u0'|^(1-p) da``."""

    def integrand(a):
        d = du0_fn(a)
        return abs(d) ** p * abs(1.0 + t * d) ** (1.0 - p)

    val, _ = quad(integrand, 0.0, 2 * np.pi, points=list(breakpoints) or None, limit=500,
                  epsabs=1e-13, epsrel=1e-12)
    return val ** (1.0 / p)


def characteristic_max_slope(du0_fn, t: float, n: int = 200_001) -> float:
    a = np.linspace(0, 2 * np.pi, n)
    return float(np.max(np.abs(characteristic_slope(du0_fn(a), t))))


@dataclass
class SIEHistory:
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    sup: list = field(default_factory=list)
    max_slope: list = field(default_factory=list)


def sie_stream(g: np.ndarray, m: int) -> np.ndarray:
    """Solve ``4G + G_tt = g`` mode by mode."""
    n = g.size
    h = sfft.rfft(g)
    k = wavenumbers(n)
    active = np.abs(h) > 1e-13 * max(1.0, np.max(np.abs(h)))
    bad = active & (k % m != 0)
    if np.any(bad):
        raise ValueError(f"data has modes {k[bad].astype(int).tolist()[:5]} that are not multiples of m={m}")
    denom = 4.0 - k**2
    out = np.zeros_like(h)
    ok = denom != 0
    out[ok] = h[ok] / denom[ok]
    return sfft.irfft(out, n)


def scale_invariant_euler(g0: CircleField, m: int, dt: float, T: float, snapshot_every: int = 1) -> SIEHistory:
    """``g_t + 2 G g_theta = 0`` with ``4G + G_thetatheta = g`` on m-fold symmetric data.

    ``m >= 3`` keeps ``k = +-2`` out of the spectrum, where ``4 + d^2`` has a
    kernel.
    """
    if int(m) != m or m < 3:
        raise ValueError(f"m-fold symmetry needs m >= 3, got {m}")
    n = g0.n
    mask = dealias_mask(n)

    def rhs(g):
        gm = sfft.irfft(sfft.rfft(g) * mask, n)
        G = sie_stream(gm, m)
        return -sfft.irfft(sfft.rfft(2 * G * derivative(gm)) * mask, n)

    sie_stream(g0.values, m)
    hist = SIEHistory()
    g = g0.values.copy()
    t = 0.0

    def record():
        hist.times.append(t)
        hist.fields.append(g.copy())
        hist.sup.append(circle_sup(g))
        hist.max_slope.append(float(np.max(np.abs(derivative(g)))))

    record()
    step = 0
    while t < T - 1e-14:
        h = min(dt, T - t)
        k1 = rhs(g)
        k2 = rhs(g + h / 2 * k1)
        k3 = rhs(g + h / 2 * k2)
        k4 = rhs(g + h * k3)
        g = g + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        step += 1
        if step % snapshot_every == 0 or t >= T - 1e-14:
            record()
    return hist


__all__ = [
    "BurgersHistory",
    "LP_EXPONENTS",
    "SIEHistory",
    "burgers_1d",
    "characteristic_lp",
    "characteristic_max_slope",
    "characteristic_slope",
    "grid_points",
    "lp_norm_circle",
    "scale_invariant_euler",
    "shock_time",
    "sie_stream",
]
