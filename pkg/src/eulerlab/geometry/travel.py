"""Travel time ``mu(c)`` of closed streamlines.

For a level set ``{psi = c}`` around a single critical point,
``mu(c) = int_{psi = c} dl / |grad psi|`` is the time a particle needs to go
once around it, and ``mu(c) = d/dc Area({psi <= c})`` for the component
enclosing the critical point. Both are computed: the first on marching-squares
contours with a bicubic gradient, the second by a centred difference of the
enclosed polygon area.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline
from skimage.measure import find_contours, points_in_poly

from ..io import write_csv
from ..spectral2d.grid import Field2D

CRITICAL_EPS = 1e-6
PAD = 4


@dataclass
class LevelResult:
    c: float
    mu_contour: float
    mu_area: float
    contour: np.ndarray

    @property
    def agreement(self) -> float:
        return abs(self.mu_contour - self.mu_area) / abs(self.mu_contour)


@dataclass
class TravelTable:
    levels: list = field(default_factory=list)
    notices: list = field(default_factory=list)

    @property
    def mu(self) -> np.ndarray:
        return np.array([lv.mu_contour for lv in self.levels])

    @property
    def c(self) -> np.ndarray:
        return np.array([lv.c for lv in self.levels])

    def write_csv(self, path) -> None:
        write_csv(path, ["c", "mu_contour", "mu_area"],
                  [[lv.c, lv.mu_contour, lv.mu_area] for lv in self.levels])


class StreamfunctionAnalysis:
    """Contours of ``psi`` around ``center`` with a bicubic spline for ``grad psi``.

    On the torus the samples are padded periodically so contours crossing the
    box edge stay closed.
    """

    def __init__(self, psi: Field2D, center=None):
        grid = psi.grid
        if grid.is_channel:
            raise ValueError("travel times are computed on torus grids")
        v = psi.values
        self.dx, self.dy = grid.dx, grid.dy
        self.values = np.pad(v, PAD, mode="wrap")
        self.x = (np.arange(self.values.shape[1]) - PAD) * grid.dx
        self.y = (np.arange(self.values.shape[0]) - PAD) * grid.dy
        self.spline = RectBivariateSpline(self.y, self.x, self.values, kx=3, ky=3)
        if center is None:
            j, i = np.unravel_index(np.argmin(v), v.shape)
            center = (i * grid.dx, j * grid.dy)
        self.center = np.asarray(center, dtype=float)
        self.critical_value = float(self.spline(self.center[1], self.center[0])[0, 0])
        self.critical_values = [self.critical_value] + _saddle_values(v, grid.dx, grid.dy)

    def contour(self, c: float) -> np.ndarray | None:
        """Closed contour at level ``c`` enclosing the centre, as ``(x, y)`` points."""
        best = None
        for C in find_contours(self.values, c):
            if not np.allclose(C[0], C[-1]):
                continue
            xy = np.column_stack([self.x[0] + C[:, 1] * self.dx, self.y[0] + C[:, 0] * self.dy])
            if points_in_poly(self.center[None, :], xy)[0]:
                if best is None or len(xy) < len(best):
                    best = xy
        return best

    def grad_norm(self, pts: np.ndarray) -> np.ndarray:
        gx = self.spline(pts[:, 1], pts[:, 0], dy=1, grid=False)
        gy = self.spline(pts[:, 1], pts[:, 0], dx=1, grid=False)
        return np.hypot(gx, gy)

    def mu_contour(self, xy: np.ndarray) -> float:
        seg = np.diff(xy, axis=0)
        mid = 0.5 * (xy[1:] + xy[:-1])
        return float(np.sum(np.hypot(seg[:, 0], seg[:, 1]) / self.grad_norm(mid)))

    @staticmethod
    def area(xy: np.ndarray) -> float:
        x, y = xy[:, 0], xy[:, 1]
        return 0.5 * abs(float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1])))


def _saddle_values(v: np.ndarray, dx: float, dy: float, rel: float = 1e-3) -> list:
    """Values at grid nodes where ``|grad psi|`` has a small local minimum."""
    gx = (np.roll(v, -1, 1) - np.roll(v, 1, 1)) / (2 * dx)
    gy = (np.roll(v, -1, 0) - np.roll(v, 1, 0)) / (2 * dy)
    g2 = gx**2 + gy**2
    nb = np.max([np.roll(np.roll(g2, a, 0), b, 1) for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b], axis=0)
    small = (g2 <= nb) & (g2 < (rel * np.sqrt(g2.max())) ** 2)
    return sorted({float(x) for x in v[small]})


def travel_time(psi: Field2D, levels, center=None, dc: float | None = None,
                critical_eps: float = CRITICAL_EPS) -> TravelTable:
    """``mu(c)`` by the contour integral and by ``dA/dc`` at each requested level.

    Levels within ``critical_eps`` of the centre's value, or without a closed
    contour around the centre (for instance beyond a separatrix), are
    skipped and listed in ``notices``.
    """
    an = StreamfunctionAnalysis(psi, center)
    table = TravelTable()
    levels = [float(c) for c in levels]
    span = float(np.ptp(psi.values))
    for c in levels:
        if any(abs(c - cv) < critical_eps * max(span, 1e-300) for cv in an.critical_values):
            table.notices.append(f"level {c:g} is within tolerance of the critical value; skipped")
            continue
        xy = an.contour(c)
        if xy is None:
            table.notices.append(f"level {c:g} has no closed contour around the centre; skipped")
            continue
        h = dc if dc is not None else 0.05 * abs(c - an.critical_value)
        lo, hi = an.contour(c - h), an.contour(c + h)
        if lo is None or hi is None:
            table.notices.append(f"level {c:g}: neighbouring level lost its contour; area method skipped")
            mu_area = np.nan
        else:
            mu_area = (an.area(hi) - an.area(lo)) / (2 * h)
            if c < an.critical_value:
                mu_area = -mu_area
        table.levels.append(LevelResult(c, an.mu_contour(xy), float(mu_area), xy))
    return table


def isochronality_defect(psi: Field2D, levels, center=None, **kwargs) -> float:
    """``(max mu - min mu) / mean mu`` over the levels that have a closed contour."""
    mu = travel_time(psi, levels, center, **kwargs).mu
    if mu.size == 0:
        raise ValueError("no level produced a closed contour")
    return float((mu.max() - mu.min()) / mu.mean())
