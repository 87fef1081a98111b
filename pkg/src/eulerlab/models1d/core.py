"""Circle fields, closures and the pseudospectral solver for 1D vorticity models.

Conventions
-----------
``P1(f) = lam * sin(x)`` with ``lam = (1/pi) * int f sin dx``, the
L2-orthonormal projection onto ``sin``. The Hilbert transform acts as
``H(e^{ikx}) = -i sgn(k) e^{ikx}``, so ``H(sin) = -cos``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.fft as sfft


class Variant(str, Enum):
    PROJECTION_A = "projection_a"
    PROJECTION_B = "projection_b"
    DE_GREGORIO = "de_gregorio"
    CLM = "clm"
    SCALE_INVARIANT_EULER = "scale_invariant_euler"
    BURGERS = "burgers"


# symbol metadata: (parity of the velocity law, degree of the multiplier u_x <- omega)
VARIANT_METADATA = {
    Variant.PROJECTION_A: {"parity": "odd", "degree": "finite rank", "law": "u = P1(omega)"},
    Variant.PROJECTION_B: {"parity": "odd", "degree": "finite rank", "law": "u_x = P1(omega)"},
    Variant.DE_GREGORIO: {"parity": "odd", "degree": 0, "law": "u_x = H(omega)"},
    Variant.CLM: {"parity": "odd", "degree": 0, "law": "omega_t = omega H(omega)"},
    Variant.SCALE_INVARIANT_EULER: {"parity": "even", "degree": -2, "law": "4G + G_tt = g"},
    Variant.BURGERS: {"parity": "none", "degree": None, "law": "u_t + u u_x = 0"},
}


@dataclass
class CircleField:
    """Samples at ``x_j = 2 pi j / n``."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.values.size
        if self.values.ndim != 1 or n < 16 or n % 2:
            raise ValueError(f"circle fields need an even number of samples >= 16, got {n}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("circle field contains non-finite values")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.n)

    @classmethod
    def from_function(cls, n: int, fn) -> "CircleField":
        return cls(np.broadcast_to(fn(grid_points(n)), (n,)).astype(float))


def grid_points(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def wavenumbers(n: int) -> np.ndarray:
    return np.arange(n // 2 + 1, dtype=float)


def p1_coefficient(values: np.ndarray) -> float:
    n = values.size
    return float(np.sum(values * np.sin(grid_points(n))) * (2 * np.pi / n) / np.pi)


def project_p1(omega: CircleField) -> CircleField:
    """``lam * sin(x)`` with ``lam = (1/pi) int omega sin``."""
    return CircleField(p1_coefficient(omega.values) * np.sin(omega.x))


def hilbert(values: np.ndarray) -> np.ndarray:
    n = values.size
    h = sfft.rfft(values)
    h = -1j * h
    h[0] = 0.0
    if n % 2 == 0:
        h[-1] = 0.0
    return sfft.irfft(h, n)


def derivative(values: np.ndarray) -> np.ndarray:
    n = values.size
    k = wavenumbers(n)
    k[-1] = 0.0
    return sfft.irfft(1j * k * sfft.rfft(values), n)


def antiderivative_mean_free(values: np.ndarray) -> np.ndarray:
    """Mean-free ``u`` with ``u_x = f - mean(f)``."""
    n = values.size
    k = wavenumbers(n)
    h = sfft.rfft(values)
    out = np.zeros_like(h)
    out[1:] = h[1:] / (1j * k[1:])
    out[-1] = 0.0
    return sfft.irfft(out, n)


def dealias_mask(n: int) -> np.ndarray:
    return wavenumbers(n) <= n // 3


def trig_interpolate(values: np.ndarray, pts) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``values`` at arbitrary points."""
    n = values.size
    c = sfft.rfft(values) / n
    w = np.full(c.shape, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    k = wavenumbers(n)
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(pts.shape)
    flat = pts.ravel()
    chunk = 4096
    res = np.empty(flat.shape)
    for s in range(0, flat.size, chunk):
        e = np.exp(1j * np.outer(flat[s : s + chunk], k))
        res[s : s + chunk] = (e @ (w * c)).real
    out[...] = res.reshape(pts.shape)
    return out


def circle_sup(values: np.ndarray, upsample: int = 8) -> float:
    """Sup of ``|f|`` for the trigonometric interpolant, polished by Newton steps."""
    n = values.size
    h = sfft.rfft(values)
    fine = sfft.irfft(np.pad(h, (0, (upsample - 1) * n // 2)), upsample * n) * upsample
    k = wavenumbers(n)
    c = h / n
    w = np.full(c.shape, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    cw = c * w
    best = float(np.max(np.abs(fine)))
    dxf = 2 * np.pi / (upsample * n)
    for idx in np.argsort(np.abs(fine))[-4:]:
        x = idx * dxf
        for _ in range(20):
            e = cw * np.exp(1j * k * x)
            d1 = np.sum(1j * k * e).real
            d2 = -np.sum(k * k * e).real
            if d2 == 0:
                break
            dx = -d1 / d2
            if abs(dx) > 2 * dxf:
                break
            x += dx
            if abs(dx) < 1e-15:
                break
        best = max(best, abs(float(np.sum(cw * np.exp(1j * k * x)).real)))
    return best


def closure(values: np.ndarray, variant: Variant):
    """Velocity ``u`` and its derivative ``u_x`` for a vorticity sample."""
    x = grid_points(values.size)
    if variant is Variant.PROJECTION_A:
        lam = p1_coefficient(values)
        return lam * np.sin(x), lam * np.cos(x)
    if variant is Variant.PROJECTION_B:
        lam = p1_coefficient(values)
        return -lam * np.cos(x), lam * np.sin(x)
    if variant is Variant.DE_GREGORIO:
        ux = hilbert(values)
        return antiderivative_mean_free(ux), ux
    if variant is Variant.CLM:
        return np.zeros_like(values), hilbert(values)
    raise ValueError(f"{variant} has no vorticity closure")


def vorticity_rhs(values: np.ndarray, variant: Variant, mask=None) -> np.ndarray:
    """``-u omega_x + omega u_x`` with 2/3-rule dealiasing of both products."""
    n = values.size
    mask = dealias_mask(n) if mask is None else mask
    h = sfft.rfft(values) * mask
    w = sfft.irfft(h, n)
    u, ux = closure(w, variant)
    wx = derivative(w)
    prod = -u * wx + w * ux
    return sfft.irfft(sfft.rfft(prod) * mask, n)


@dataclass
class History1D:
    times: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    lam: list = field(default_factory=list)
    Lam: list = field(default_factory=list)
    status: str = "ok"
    warnings: list = field(default_factory=list)

    def max_abs(self) -> np.ndarray:
        return np.array([np.max(np.abs(f)) for f in self.fields])


def evolve_1d(omega0: CircleField, variant, dt: float, T: float, snapshot_every: int = 1,
              guard: float = 1e3, cfl: float | None = None, stop_at: float | None = None) -> History1D:
    """RK4 pseudospectral evolution of a 1D vorticity model.

    Parameters
    ----------
    omega0 : CircleField
    variant : Variant or str
        One of the projection, De Gregorio or CLM closures.
    dt : float
        Maximum time step.
    T : float
        Final time.
    snapshot_every : int
        Store every k-th step (the last step is always stored).
    guard : float
        Stop with status ``"resolution exceeded"`` once ``max|omega|`` exceeds
        ``guard * max|omega0|``.
    cfl : float, optional
        If given, the step is shrunk so that ``dt*max|u|/dx`` and
        ``dt*max|u_x|`` stay below ``cfl``.
    stop_at : float, optional
        Stop (status ``"ok"``) once ``max|omega|`` reaches this value.

    Returns
    -------
    History1D
        For the projection closures ``lam`` and ``Lam`` hold
        ``lambda(t)`` and ``Lambda(t) = int_0^t lambda``.
    """
    variant = Variant(variant)
    if variant in (Variant.BURGERS, Variant.SCALE_INVARIANT_EULER):
        raise ValueError(f"use the dedicated solver for {variant.value}")
    n = omega0.n
    mask = dealias_mask(n)
    w = omega0.values.copy()
    projection = variant in (Variant.PROJECTION_A, Variant.PROJECTION_B)
    Lam = 0.0
    t = 0.0
    hist = History1D()
    limit = guard * max(np.max(np.abs(w)), 1e-300)
    dx = 2 * np.pi / n

    def record():
        hist.times.append(t)
        hist.fields.append(w.copy())
        if projection:
            hist.lam.append(p1_coefficient(w))
            hist.Lam.append(Lam)

    def rates(v):
        r = vorticity_rhs(v, variant, mask)
        return r, (p1_coefficient(v) if projection else 0.0)

    record()
    k = 0
    while t < T - 1e-14 * max(1.0, T):
        h = min(dt, T - t)
        if cfl is not None:
            u, ux = closure(w, variant)
            speed = max(np.max(np.abs(u)) / dx, np.max(np.abs(ux)), 1e-300)
            h = min(h, cfl / speed)
        k1, l1 = rates(w)
        k2, l2 = rates(w + h / 2 * k1)
        k3, l3 = rates(w + h / 2 * k2)
        k4, l4 = rates(w + h * k3)
        w = w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        Lam = Lam + h / 6 * (l1 + 2 * l2 + 2 * l3 + l4)
        t += h
        k += 1
        m = np.max(np.abs(w))
        if not np.isfinite(m) or m > limit:
            hist.status = "resolution exceeded"
            record()
            break
        if stop_at is not None and m >= stop_at:
            record()
            break
        if k % snapshot_every == 0 or t >= T - 1e-14 * max(1.0, T):
            record()
    return hist
