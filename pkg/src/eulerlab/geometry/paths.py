"""Discretized paths of volume-preserving maps of the torus and their action.

A path is stored as marker positions ``X[k, j, i]`` for labels on a regular
``n x n`` lattice of ``[0, L)^2``. Positions are unwrapped, so the
displacement ``X - label`` is periodic in the label and is differentiated
spectrally.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

VOLUME_TOL = 1e-6
ENDPOINT_TOL = 1e-10


class EndpointDrift(ValueError):
    """A perturbation moved the first or last configuration."""


def label_lattice(n: int, L: float = 2 * np.pi) -> np.ndarray:
    """``(n, n, 2)`` array of labels ``(x_i, y_j)`` indexed ``[j, i]``."""
    g = np.arange(n) * (L / n)
    X, Y = np.meshgrid(g, g)
    return np.stack([X, Y], axis=-1)


def _spectral_gradient(f: np.ndarray, L: float) -> tuple[np.ndarray, np.ndarray]:
    n = f.shape[0]
    k = sfft.fftfreq(n, 1.0 / n) * (2 * np.pi / L)
    k[n // 2] = 0.0
    h = sfft.fft2(f)
    return sfft.ifft2(1j * k[None, :] * h).real, sfft.ifft2(1j * k[:, None] * h).real


def map_jacobian_det(labels: np.ndarray, positions: np.ndarray, L: float) -> np.ndarray:
    """Determinant of the label-to-position map on the lattice."""
    disp = positions - labels
    ux, uy = _spectral_gradient(disp[..., 0], L)
    vx, vy = _spectral_gradient(disp[..., 1], L)
    return (1.0 + ux) * (1.0 + vy) - uy * vx


@dataclass
class FlowPath:
    """Marker positions ``positions[k]`` of shape ``(n, n, 2)`` at ``times[k]``."""

    labels: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    L: float = 2 * np.pi
    velocity_id: str = ""
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.shape != (self.times.size,) + self.labels.shape:
            raise ValueError("positions must have shape (n_times,) + labels.shape")

    @property
    def n_markers(self) -> int:
        return self.labels.shape[0] * self.labels.shape[1]

    @property
    def cell_area(self) -> float:
        return self.L**2 / self.n_markers

    def volume_defect(self) -> np.ndarray:
        """``max |det - 1|`` at each stored time."""
        return np.array([np.max(np.abs(map_jacobian_det(self.labels, X, self.L) - 1.0)) for X in self.positions])

    def relabeled(self, perm: np.ndarray) -> "FlowPath":
        """Same path with markers permuted (``perm`` indexes the flattened lattice)."""
        shape = self.labels.shape
        lab = self.labels.reshape(-1, 2)[perm].reshape(shape)
        pos = self.positions.reshape(self.times.size, -1, 2)[:, perm].reshape(self.positions.shape)
        out = FlowPath.__new__(FlowPath)
        out.labels, out.times, out.positions, out.L = lab, self.times, pos, self.L
        out.velocity_id, out.warnings = self.velocity_id, []
        return out


def _rk4_flow(v, t: float, X: np.ndarray, h: float) -> np.ndarray:
    k1 = v(t, X)
    k2 = v(t + h / 2, X + h / 2 * k1)
    k3 = v(t + h / 2, X + h / 2 * k2)
    k4 = v(t + h, X + h * k3)
    return X + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def path_from_velocity(velocity, n: int, times, substeps: int = 8, L: float = 2 * np.pi,
                       velocity_id: str = "") -> FlowPath:
    """Markers carried by ``velocity(t, X)`` (``X`` of shape ``(..., 2)``), RK4 between stored times."""
    times = np.asarray(times, dtype=float)
    lab = label_lattice(n, L)
    X = lab.copy()
    out = [X.copy()]
    for t0, t1 in zip(times[:-1], times[1:]):
        h = (t1 - t0) / substeps
        for s in range(substeps):
            X = _rk4_flow(velocity, t0 + s * h, X, h)
        out.append(X.copy())
    return FlowPath(lab, times, np.array(out), L, velocity_id)


def path_velocity(path: FlowPath) -> np.ndarray:
    """``d gamma / dt`` by second-order differences (one-sided at the ends)."""
    X, t = path.positions, path.times
    return np.gradient(X, t, axis=0, edge_order=2)


def action(path: FlowPath, tol: float = VOLUME_TOL) -> float:
    """``int int |d gamma/dt|^2 / 2 dx dt``: lattice sum in labels, trapezoid in time.

    A warning is attached (and emitted) when the map loses volume by more
    than ``tol``.
    """
    if path.times.size < 3:
        raise ValueError("the action needs at least 3 stored times")
    defect = float(np.max(path.volume_defect()))
    if defect > tol:
        msg = f"volume defect {defect:.3e} exceeds {tol:.1e}"
        path.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    V = path_velocity(path)
    kinetic = 0.5 * np.sum(V**2, axis=(1, 2, 3)) * path.cell_area
    return float(np.trapezoid(kinetic, path.times))


def time_bump(t, t1: float, t2: float):
    """``sin(pi (t - t1)/(t2 - t1))``, exactly zero at both ends."""
    t = np.asarray(t, dtype=float)
    s = np.sin(np.pi * (t - t1) / (t2 - t1))
    return np.where((t == t1) | (t == t2), 0.0, s)


def stream_perturbation(stream_grad, t1: float, t2: float):
    """``v(t, X) = bump(t) grad^perp s(X)`` from ``stream_grad(X) -> (s_x, s_y)``."""

    def v(t, X):
        sx, sy = stream_grad(X)
        return float(time_bump(t, t1, t2)) * np.stack([-sy, sx], axis=-1)

    return v


def perturb_path(path: FlowPath, v, eps: float = 0.1, steps: int = 20, tol: float = ENDPOINT_TOL,
                 volume_tol: float = 1e-8) -> FlowPath:
    """Move every configuration along the flow of ``v(t_k, .)`` for ``eps`` units.

    Raises
    ------
    EndpointDrift
        If the first or last configuration moves by more than ``tol``.
    """
    out = []
    h = eps / steps
    for t, X in zip(path.times, path.positions):
        Y = X.copy()
        if np.any(v(t, Y[:1, :1]) != 0.0) or np.any(v(t, Y) != 0.0):
            for s in range(steps):
                Y = _rk4_flow(lambda _e, Z: v(t, Z), s * h, Y, h)
        out.append(Y)
    out = np.array(out)
    drift = max(np.max(np.abs(out[0] - path.positions[0])), np.max(np.abs(out[-1] - path.positions[-1])))
    if drift > tol:
        raise EndpointDrift(f"endpoint configurations moved by {drift:.3e}")
    new = FlowPath(path.labels, path.times, out, path.L, path.velocity_id + "+perturbed")
    vol = float(np.max(new.volume_defect()))
    if vol > volume_tol:
        new.warnings.append(f"perturbed volume defect {vol:.3e}")
    return new


def cellular_velocity(t, X):
    """``u = grad^perp (sin x sin y) = (-sin x cos y, cos x sin y)``."""
    x, y = X[..., 0], X[..., 1]
    return np.stack([-np.sin(x) * np.cos(y), np.cos(x) * np.sin(y)], axis=-1)


def cellular_pressure_hessian(X):
    """Hessian of ``p = (cos 2x + cos 2y)/4``, the steady pressure of the cellular flow."""
    x, y = X[..., 0], X[..., 1]
    H = np.zeros(X.shape[:-1] + (2, 2))
    H[..., 0, 0] = -np.cos(2 * x)
    H[..., 1, 1] = -np.cos(2 * y)
    return H


def pressure_from_velocity(u: np.ndarray, v: np.ndarray, L: float = 2 * np.pi) -> np.ndarray:
    """Mean-free ``p`` with ``-Delta p = d_i d_j (u_i u_j)`` on a periodic grid."""
    n = u.shape[0]
    k = sfft.fftfreq(n, 1.0 / n) * (2 * np.pi / L)
    KX, KY = np.meshgrid(k, k)
    k2 = KX**2 + KY**2
    src = -(KX**2 * sfft.fft2(u * u) + 2 * KX * KY * sfft.fft2(u * v) + KY**2 * sfft.fft2(v * v))
    ph = np.zeros_like(src)
    np.divide(-src, k2, out=ph, where=k2 > 0)
    # -Delta p = S  ->  k^2 p_hat = S_hat
    return sfft.ifft2(-ph).real


def hessian_sup(p: np.ndarray, L: float = 2 * np.pi) -> float:
    """Largest eigenvalue of ``grad^2 p`` over the grid (spectral second derivatives)."""
    n = p.shape[0]
    k = sfft.fftfreq(n, 1.0 / n) * (2 * np.pi / L)
    KX, KY = np.meshgrid(k, k)
    h = sfft.fft2(p)
    pxx = sfft.ifft2(-KX**2 * h).real
    pyy = sfft.ifft2(-KY**2 * h).real
    pxy = sfft.ifft2(-KX * KY * h).real
    mean = 0.5 * (pxx + pyy)
    rad = np.sqrt(0.25 * (pxx - pyy) ** 2 + pxy**2)
    return float(np.max(mean + rad))


def minimality_horizon(K: float) -> float:
    """``pi / sqrt(K)``: below this length a steady Euler path minimizes the action."""
    return np.inf if K <= 0 else float(np.pi / np.sqrt(K))
