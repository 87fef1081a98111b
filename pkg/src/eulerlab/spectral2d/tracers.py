"""Lagrangian markers advected through a stored velocity history."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.spatial import cKDTree

from .grid import Grid2D, SpectralOps
from .solver import EulerState, biot_savart

PAD = 4


class VelocityInterpolant:
    """Bicubic spline of the full velocity of one state, valid on the periodic cover."""

    def __init__(self, state: EulerState, ops: SpectralOps | None = None):
        g = state.grid
        self.grid = g
        ops = ops or SpectralOps(g)
        _, (u1, u2) = biot_savart(state.omega, ops)
        u = u1.values + state.background_u()
        v = u2.values + state.mean_velocity[1]
        if g.is_channel:
            # u is even and v odd about both walls
            u = ops.even_extend(u)
            v = ops.extend(v)
            period_y = 2 * g.Ly
        else:
            period_y = g.Ly
        self.period_y = period_y
        xs = (np.arange(-PAD, g.nx + PAD)) * g.dx
        ys = (np.arange(-PAD, u.shape[0] + PAD)) * g.dy
        self._u = RectBivariateSpline(ys, xs, np.pad(u, PAD, mode="wrap"), kx=3, ky=3)
        self._v = RectBivariateSpline(ys, xs, np.pad(v, PAD, mode="wrap"), kx=3, ky=3)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        x = np.mod(pts[:, 0], self.grid.Lx)
        y = np.mod(pts[:, 1], self.period_y)
        return np.stack([self._u.ev(y, x), self._v.ev(y, x)], axis=1)


@dataclass
class CurveHistory:
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    flags: list = field(default_factory=list)


class CurveAdvector:
    """Advect markers with RK4, fed one snapshot at a time.

    Between consecutive snapshots the velocity is interpolated linearly in
    time; ``substeps`` RK4 steps are taken per interval.
    """

    def __init__(self, curves, substeps: int = 1, wall_tol: float = 1e-6):
        self.curves = [np.array(c, dtype=float) for c in curves]
        self.substeps = substeps
        self.wall_tol = wall_tol
        self.history = [CurveHistory() for _ in self.curves]
        self._prev = None
        self._ops = None

    def push(self, state: EulerState):
        if self._ops is None:
            self._ops = SpectralOps(state.grid)
        interp = VelocityInterpolant(state, self._ops)
        if self._prev is not None:
            t0, f0 = self._prev
            t1 = state.t
            h = (t1 - t0) / self.substeps

            def vel(t, p):
                s = (t - t0) / (t1 - t0)
                return (1 - s) * f0(p) + s * interp(p)

            for i, p in enumerate(self.curves):
                for k in range(self.substeps):
                    t = t0 + k * h
                    k1 = vel(t, p)
                    k2 = vel(t + h / 2, p + h / 2 * k1)
                    k3 = vel(t + h / 2, p + h / 2 * k2)
                    k4 = vel(t + h, p + h * k3)
                    p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                self.curves[i] = p
        self._prev = (state.t, interp)
        for i, p in enumerate(self.curves):
            self._record(i, state.t, state.grid)

    def _record(self, i, t, grid: Grid2D):
        p = self.curves[i]
        hist = self.history[i]
        hist.times.append(float(t))
        hist.positions.append(p.copy())
        flag = ""
        if grid.is_channel:
            out = np.maximum(-p[:, 1], p[:, 1] - grid.Ly)
            if np.max(out) > self.wall_tol:
                flag = f"marker left the channel by {np.max(out):.2e}"
        hist.flags.append(flag)


def advect_curve(state_history, curve, substeps: int = 1):
    """Advect one polyline through a list of states sorted by time.

    Returns
    -------
    CurveHistory
        Marker positions (unwrapped, on the periodic cover) at every state time.
    """
    adv = CurveAdvector([curve], substeps)
    for st in state_history:
        adv.push(st)
    return adv.history[0]


def curve_distance(a: np.ndarray, b: np.ndarray, grid: Grid2D):
    """Minimum distance between two marker sets, periodic in x (and y on the torus).

    Returns
    -------
    dist : float
    (i, j) : tuple of int
        Indices of the closest pair.
    """
    if grid.is_channel:
        box = [grid.Lx, 8.0 * grid.Ly]
        pa = np.column_stack([np.mod(a[:, 0], grid.Lx), a[:, 1] + 2 * grid.Ly])
        pb = np.column_stack([np.mod(b[:, 0], grid.Lx), b[:, 1] + 2 * grid.Ly])
    else:
        box = [grid.Lx, grid.Ly]
        pa = np.mod(a, box)
        pb = np.mod(b, box)
    tree = cKDTree(pb, boxsize=box)
    d, j = tree.query(pa)
    i = int(np.argmin(d))
    return float(d[i]), (i, int(j[i]))


def pairs_within(a: np.ndarray, b: np.ndarray, grid: Grid2D, radius: float):
    """All index pairs ``(i, j)`` with ``|a_i - b_j| <= radius`` and their distances."""
    if grid.is_channel:
        box = [grid.Lx, 8.0 * grid.Ly]
        pa = np.column_stack([np.mod(a[:, 0], grid.Lx), a[:, 1] + 2 * grid.Ly])
        pb = np.column_stack([np.mod(b[:, 0], grid.Lx), b[:, 1] + 2 * grid.Ly])
    else:
        box = [grid.Lx, grid.Ly]
        pa = np.mod(a, box)
        pb = np.mod(b, box)
    ta = cKDTree(pa, boxsize=box)
    tb = cKDTree(pb, boxsize=box)
    sparse = ta.sparse_distance_matrix(tb, radius, output_type="ndarray")
    return sparse["i"], sparse["j"], sparse["v"]
