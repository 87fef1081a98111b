"""Transport by the order-2 part of the stream function on a disk.

    psi(r, theta) = r^2 int_r^inf P2 omega(rho, theta) / rho d rho,
    omega_t + (psi_theta omega_r - psi_r omega_theta) / r = 0.

The update is written in flux form
``(r omega)_t + (psi_theta omega)_r - (psi_r omega)_theta = 0`` on cell
centres ``r_i = (i + 1/2) dr``, so ``int omega r dr dtheta`` is conserved to
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

SUPPORT_TOL = 1e-12


class SupportAtOrigin(ValueError):
    """The vorticity does not vanish in the innermost ring of cells."""


@dataclass
class DiskField:
    """Cell-centred samples ``values[i, j]`` at ``r_i = (i + 1/2) dr``, ``theta_j = 2 pi j / m``."""

    r_max: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] < 8:
            raise ValueError("disk fields need shape (n_r, m) with m >= 8")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("disk field contains non-finite values")

    @property
    def dr(self) -> float:
        return self.r_max / self.values.shape[0]

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.values.shape[0]) + 0.5) * self.dr

    @property
    def theta(self) -> np.ndarray:
        m = self.values.shape[1]
        return 2 * np.pi * np.arange(m) / m

    @classmethod
    def from_function(cls, r_max: float, n_r: int, m: int, fn) -> "DiskField":
        dr = r_max / n_r
        r = (np.arange(n_r) + 0.5) * dr
        th = 2 * np.pi * np.arange(m) / m
        return cls(r_max, np.broadcast_to(fn(r[:, None], th[None, :]), (n_r, m)).copy())

    def circulation(self) -> float:
        """``int omega r dr dtheta``."""
        m = self.values.shape[1]
        return float(np.sum(self.values * self.r[:, None]) * self.dr * 2 * np.pi / m)

    def grad_sup(self) -> float:
        """``max |grad omega|`` with centred differences in ``r`` and spectral ``theta``."""
        w = self.values
        wr = np.gradient(w, self.dr, axis=0)
        wt = _dtheta(w)
        return float(np.max(np.sqrt(wr**2 + (wt / self.r[:, None]) ** 2)))


def _dtheta(w: np.ndarray) -> np.ndarray:
    m = w.shape[1]
    k = np.arange(m // 2 + 1, dtype=float)
    if m % 2 == 0:
        k[-1] = 0.0
    return sfft.irfft(1j * k * sfft.rfft(w, axis=1), m, axis=1)


@dataclass
class P2Stream:
    """Stream function and its derivatives at cell centres, plus ``psi_theta`` on outer faces."""

    psi: np.ndarray
    psi_r: np.ndarray
    psi_theta: np.ndarray
    psi_theta_face: np.ndarray


def p2_stream(omega: DiskField) -> P2Stream:
    w = omega.values
    m = w.shape[1]
    r, dr, th = omega.r, omega.dr, omega.theta
    a = w @ np.cos(2 * th) * (2.0 / m)
    b = w @ np.sin(2 * th) * (2.0 / m)
    # tail integrals of the band coefficients over each cell (midpoint rule)
    cell_a = a * dr / r
    cell_b = b * dr / r
    face_a = np.concatenate([np.cumsum(cell_a[::-1])[::-1][1:], [0.0]])
    face_b = np.concatenate([np.cumsum(cell_b[::-1])[::-1][1:], [0.0]])
    Ia = face_a + 0.5 * cell_a
    Ib = face_b + 0.5 * cell_b
    c2, s2 = np.cos(2 * th)[None, :], np.sin(2 * th)[None, :]
    I = Ia[:, None] * c2 + Ib[:, None] * s2
    I_t = 2 * (-Ia[:, None] * s2 + Ib[:, None] * c2)
    P = a[:, None] * c2 + b[:, None] * s2
    rr = r[:, None]
    rf = (np.arange(1, r.size + 1) * dr)[:, None]
    face_t = 2 * (-face_a[:, None] * s2 + face_b[:, None] * c2)
    return P2Stream(psi=rr**2 * I, psi_r=2 * rr * I - rr * P, psi_theta=rr**2 * I_t,
                    psi_theta_face=rf**2 * face_t)


def rotation_rate(omega: DiskField) -> np.ndarray:
    """Angular velocity ``d theta/dt = -psi_r / r`` at cell centres."""
    return -p2_stream(omega).psi_r / omega.r[:, None]


def _check_origin(w: np.ndarray):
    scale = max(float(np.max(np.abs(w))), 1e-300)
    if np.max(np.abs(w[0])) > SUPPORT_TOL * scale:
        raise SupportAtOrigin("vorticity reaches the innermost ring of cells")


def p2_rhs(omega: DiskField) -> np.ndarray:
    w = omega.values
    st = p2_stream(omega)
    wf = 0.5 * (w[:-1] + w[1:])
    flux = np.zeros((w.shape[0] + 1, w.shape[1]))
    flux[1:-1] = st.psi_theta_face[:-1] * wf
    d_rw = -(flux[1:] - flux[:-1]) / omega.dr + _dtheta(st.psi_r * w)
    return d_rw / omega.r[:, None]


def p2_model_step(omega: DiskField, dt: float) -> DiskField:
    """One classical RK4 step of the order-2 transport model.

    Raises
    ------
    SupportAtOrigin
        If ``omega`` does not vanish in the first ring of cells.
    """
    _check_origin(omega.values)
    w0 = omega.values

    def f(w):
        return p2_rhs(DiskField(omega.r_max, w))

    k1 = f(w0)
    k2 = f(w0 + dt / 2 * k1)
    k3 = f(w0 + dt / 2 * k2)
    k4 = f(w0 + dt * k3)
    return DiskField(omega.r_max, w0 + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


@dataclass
class P2Run:
    times: list = field(default_factory=list)
    grad_sup: list = field(default_factory=list)
    circulation: list = field(default_factory=list)
    status: str = "ok"
    final: DiskField | None = None


def p2_model_run(omega0: DiskField, T: float, cfl: float = 0.4, dt_max: float = 0.05,
                 record_every: int = 1) -> P2Run:
    """Evolve to ``T`` and record ``max |grad omega|``; stops if the support reaches the origin."""
    w = omega0
    t = 0.0
    run = P2Run()
    m = w.values.shape[1]

    def record():
        run.times.append(t)
        run.grad_sup.append(w.grad_sup())
        run.circulation.append(w.circulation())

    record()
    step = 0
    while t < T - 1e-14 * max(T, 1.0):
        st = p2_stream(w)
        ur = np.max(np.abs(st.psi_theta / w.r[:, None]))
        ang = np.max(np.abs(st.psi_r / w.r[:, None]))
        speed = max(ur / w.dr, ang * m / (2 * np.pi), 1e-300)
        h = min(dt_max, T - t, cfl / speed)
        try:
            w = p2_model_step(w, h)
        except SupportAtOrigin:
            run.status = "support at origin"
            break
        t += h
        step += 1
        if step % record_every == 0 or t >= T - 1e-14 * max(T, 1.0):
            record()
    run.final = w
    return run
