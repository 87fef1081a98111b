"""Exact solutions of the projection models through the scalar Lambda ODE.

For both projection closures the velocity is ``lam(t) sin(x - x0)`` with
``x0 = 0`` (``u = P1 omega``) or ``x0 = pi/2`` (``u_x = P1 omega``). Writing
``y = x - x0`` and ``Lambda = int lam``, the back-to-label map is
``b = 2 arctan(exp(-Lambda) tan(y/2))`` and

    omega(x, t) = omega0(x0 + b) * exp(Lambda) / (cos(b/2)^2 + exp(2 Lambda) sin(b/2)^2).

Since the right side depends on ``t`` only through ``Lambda``,
``Lambda' = (1/pi) int omega(x; Lambda) sin(x) dx`` is autonomous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import CircleField, Variant, trig_interpolate

SHIFTS = {Variant.PROJECTION_A: 0.0, Variant.PROJECTION_B: np.pi / 2}


def _as_callable(omega0):
    if isinstance(omega0, CircleField):
        vals = omega0.values
        return lambda x: trig_interpolate(vals, x)
    return omega0


def back_label(y, Lam):
    """``b`` with ``tan(b/2) = exp(-Lambda) tan(y/2)``, continuous on ``(-pi, pi]``."""
    return 2 * np.arctan2(np.exp(-Lam) * np.sin(y / 2), np.cos(y / 2))


def stretch_factor(b, Lam):
    return np.exp(Lam) / (np.cos(b / 2) ** 2 + np.exp(2 * Lam) * np.sin(b / 2) ** 2)


def transported(omega0, variant, x, Lam):
    """Exact vorticity at points ``x`` once the flow has accumulated ``Lambda``."""
    variant = Variant(variant)
    f = _as_callable(omega0)
    x0 = SHIFTS[variant]
    y = np.angle(np.exp(1j * (np.asarray(x, dtype=float) - x0)))
    b = back_label(y, Lam)
    return f(x0 + b) * stretch_factor(b, Lam)


@dataclass
class LambdaOracle:
    """Time series of ``Lambda`` with the exact transported vorticity.

    Attributes
    ----------
    times, Lambda, lam : ndarray
    variant : Variant
    T_star : float or None
        Estimated blow-up time when ``Lambda`` diverges, else ``None``.
    status : str
    """

    omega0: object
    variant: Variant
    times: np.ndarray
    Lambda: np.ndarray
    lam: np.ndarray
    T_star: float | None
    status: str

    def Lambda_at(self, t):
        """Cubic Hermite interpolation of the stored samples (``lam`` is the slope)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        i = np.clip(np.searchsorted(self.times, t) - 1, 0, len(self.times) - 2)
        t0, t1 = self.times[i], self.times[i + 1]
        h = t1 - t0
        s = (t - t0) / h
        y0, y1 = self.Lambda[i], self.Lambda[i + 1]
        m0, m1 = self.lam[i] * h, self.lam[i + 1] * h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1

    def omega(self, x, t):
        Lam = float(self.Lambda_at(t)[0])
        return transported(self.omega0, self.variant, x, Lam)


class LambdaRate:
    """``Lambda -> Lambda'`` for given data.

    Parameters
    ----------
    method : {"trapezoid", "adaptive"}
        Periodic trapezoid on ``n_quad`` nodes (spectrally accurate for
        smooth data) or adaptive Gauss-Kronrod with the listed break points
        (for data with a cusp).
    """

    def __init__(self, omega0, variant, n_quad=4096, method="trapezoid", breakpoints=(0.0,)):
        self.variant = Variant(variant)
        if self.variant not in SHIFTS:
            raise ValueError("the Lambda oracle covers the two projection closures only")
        self.f = _as_callable(omega0)
        self.x0 = SHIFTS[self.variant]
        self.method = method
        self.x = -np.pi + 2 * np.pi * np.arange(n_quad) / n_quad
        self.breakpoints = sorted({float(np.angle(np.exp(1j * (p - self.x0)))) for p in breakpoints})

    def _integrand(self, y, Lam):
        b = back_label(y, Lam)
        return self.f(self.x0 + b) * stretch_factor(b, Lam) * np.sin(self.x0 + y)

    def __call__(self, Lam: float) -> float:
        if self.method == "trapezoid":
            return float(np.mean(self._integrand(self.x, Lam)) * 2.0)
        pts = [p for p in self.breakpoints if -np.pi < p < np.pi]
        val, _ = quad(lambda y: float(self._integrand(np.array(y), Lam)), -np.pi, np.pi,
                      points=pts or None, limit=400, epsabs=1e-14, epsrel=1e-13)
        return val / np.pi


def lambda_oracle(omega0, variant, dt: float, T: float, n_quad: int = 4096, method: str = "trapezoid",
                  breakpoints=(0.0,), Lambda_max: float = 40.0) -> LambdaOracle:
    """Integrate ``Lambda' = rate(Lambda)`` by RK4 from ``Lambda(0) = 0``.

    Integration stops early once ``Lambda`` exceeds ``Lambda_max`` (the data
    has then grown by ``exp(Lambda_max)``); in that case ``T_star`` is
    extrapolated from ``int_Lambda^inf dL / rate(L)`` assuming exponential
    growth of the rate.
    """
    variant = Variant(variant)
    rate = LambdaRate(omega0, variant, n_quad, method, breakpoints)
    times, Ls, lams = [0.0], [0.0], [rate(0.0)]
    t, L = 0.0, 0.0
    status = "ok"
    while t < T - 1e-14 * max(T, 1.0):
        h = min(dt, T - t)
        lam0 = lams[-1]
        if lam0 > 0:
            # keep the step small relative to the growth of the rate
            h = min(h, 0.05 / max(lam0, 1e-300))
        k1 = lam0
        k2 = rate(L + h / 2 * k1)
        k3 = rate(L + h / 2 * k2)
        k4 = rate(L + h * k3)
        L = L + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        times.append(t)
        Ls.append(L)
        lams.append(rate(L))
        if not np.isfinite(L) or L > Lambda_max:
            status = "diverged"
            break
    T_star = None
    if status == "diverged" or (len(Ls) > 2 and Ls[-1] > 5.0):
        l1, l0 = lams[-1], lams[-2]
        kappa = (np.log(l1) - np.log(l0)) / (Ls[-1] - Ls[-2]) if l0 > 0 and l1 > 0 else 0.0
        if kappa > 0:
            T_star = times[-1] + 1.0 / (kappa * l1)
    return LambdaOracle(omega0, variant, np.array(times), np.array(Ls), np.array(lams), T_star, status)


def calpha_data(alpha: float):
    """``C^alpha`` data whose odd part near ``x = 0`` behaves like ``sgn(x)|x/2|^alpha``.

    ``omega0(x) = sgn(sin x) |sin(x/2)|^alpha cos(x/2)^2``: Hölder-``alpha`` at
    0, smooth elsewhere (the ``cos^2`` factor removes the jump at ``pi``).
    """

    def omega0(x):
        x = np.asarray(x, dtype=float)
        return np.sign(np.sin(x)) * np.abs(np.sin(x / 2)) ** alpha * np.cos(x / 2) ** 2

    return omega0
