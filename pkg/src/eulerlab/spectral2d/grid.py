"""Grids, fields and spectral transforms for the periodic torus and channel."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

TORUS = "torus"
CHANNEL = "channel"


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid on a flat torus or a periodic channel.

    Parameters
    ----------
    geometry : {"torus", "channel"}
    nx, ny : int
        Number of intervals in x and y. Both must be even and at least 8.
        On the channel the sample rows include both walls, so a field has
        ``ny + 1`` rows.
    Lx, Ly : float
        Period in x, and period (torus) or height (channel) in y.
    """

    geometry: str
    nx: int
    ny: int
    Lx: float = 2 * np.pi
    Ly: float = 2 * np.pi

    def __post_init__(self):
        if self.geometry not in (TORUS, CHANNEL):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {n}")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("domain lengths must be positive")

    @classmethod
    def torus(cls, nx: int, ny: int | None = None, Lx: float = 2 * np.pi, Ly: float = 2 * np.pi):
        return cls(TORUS, nx, nx if ny is None else ny, Lx, Ly)

    @classmethod
    def channel(cls, nx: int, ny: int, Lx: float = 2 * np.pi, height: float = 1.0):
        return cls(CHANNEL, nx, ny, Lx, height)

    @property
    def is_channel(self) -> bool:
        return self.geometry == CHANNEL

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def rows(self) -> int:
        return self.ny + 1 if self.is_channel else self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.nx)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.rows) * self.dy

    @property
    def area(self) -> float:
        return self.Lx * self.Ly

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` arrays of shape :attr:`shape`."""
        return np.meshgrid(self.x, self.y)

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights: rectangle rule on the torus, trapezoid across the channel."""
        w = np.full(self.shape, self.dx * self.dy)
        if self.is_channel:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values * self.weights))


@dataclass
class Field2D:
    """Real samples on a :class:`Grid2D`, ``rows x nx`` in row-major order."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values have shape {self.values.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def from_function(cls, grid: Grid2D, fn) -> "Field2D":
        X, Y = grid.mesh()
        return cls(grid, np.broadcast_to(fn(X, Y), grid.shape).astype(float))

    @classmethod
    def zeros(cls, grid: Grid2D) -> "Field2D":
        return cls(grid, np.zeros(grid.shape))

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy())

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return self.grid.integrate(self.values) / self.grid.area


@dataclass
class Spectrum2D:
    """Half-plane (real-to-complex) Fourier coefficients of a field.

    On the channel the coefficients belong to the odd extension in y, so they
    are sine coefficients in y.
    """

    grid: Grid2D
    coeffs: np.ndarray


class SpectralOps:
    """Wavenumbers, masks and transforms for one grid.

    Each solver owns one instance, which keeps its own FFT workspace.
    """

    def __init__(self, grid: Grid2D):
        self.grid = grid
        self.ny_ext = 2 * grid.ny if grid.is_channel else grid.ny
        Ly_ext = 2 * grid.Ly if grid.is_channel else grid.Ly
        ix = np.arange(grid.nx // 2 + 1)
        iy = sfft.fftfreq(self.ny_ext, 1.0 / self.ny_ext)
        self.kx = (2 * np.pi / grid.Lx) * ix[None, :]
        self.ky = (2 * np.pi / Ly_ext) * iy[:, None]
        self.k2 = self.kx**2 + self.ky**2
        self.inv_k2 = np.zeros_like(self.k2)
        np.divide(1.0, self.k2, out=self.inv_k2, where=self.k2 > 0)
        # odd derivatives drop the Nyquist modes so real fields stay real
        self.dx_mult = 1j * np.where(ix[None, :] == grid.nx // 2, 0.0, self.kx)
        self.dy_mult = 1j * np.where(np.abs(iy[:, None]) == self.ny_ext // 2, 0.0, self.ky)
        self.dealias = (ix[None, :] <= grid.nx // 3) & (np.abs(iy[:, None]) <= self.ny_ext // 3)

    # extension to a periodic array and back
    def extend(self, values: np.ndarray) -> np.ndarray:
        if not self.grid.is_channel:
            return values
        ny = self.grid.ny
        return np.concatenate([values[:ny], -values[ny:0:-1]], axis=0)

    def restrict(self, ext: np.ndarray) -> np.ndarray:
        if not self.grid.is_channel:
            return ext
        return ext[: self.grid.ny + 1]

    def even_extend(self, values: np.ndarray) -> np.ndarray:
        if not self.grid.is_channel:
            return values
        ny = self.grid.ny
        return np.concatenate([values[:ny], values[ny:0:-1]], axis=0)

    def forward(self, values: np.ndarray) -> np.ndarray:
        return sfft.rfft2(self.extend(values))

    def forward_ext(self, ext: np.ndarray) -> np.ndarray:
        return sfft.rfft2(ext)

    def inverse_ext(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.irfft2(coeffs, s=(self.ny_ext, self.grid.nx))

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return self.restrict(self.inverse_ext(coeffs))

    def spectrum(self, f: Field2D) -> Spectrum2D:
        return Spectrum2D(self.grid, self.forward(f.values))

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        return self.inverse(-self.k2 * self.forward(values))

    def gradient(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = self.forward(values)
        return self.inverse(self.dx_mult * h), self.inverse(self.dy_mult * h)

    def sup(self, values: np.ndarray, upsample: int = 4, candidates: int = 8) -> float:
        """Sup of ``|f|`` for the trigonometric interpolant of the samples.

        The maximum is located on a zero-padded (upsampled) grid and then
        polished by Newton iterations on the interpolant itself, so the result
        does not depend on where the grid points sit.
        """
        g = self.grid
        ny, nx = self.ny_ext, g.nx
        h = self.forward(values)
        big = np.zeros((upsample * ny, upsample * nx // 2 + 1), dtype=complex)
        hy = ny // 2
        big[:hy, : nx // 2 + 1] = h[:hy]
        big[-hy:, : nx // 2 + 1] = h[-hy:]
        fine = sfft.irfft2(big, s=(upsample * ny, upsample * nx)) * upsample**2
        if g.is_channel:
            fine = fine[: upsample * g.ny + 1]
        flat = np.abs(fine).ravel()
        top = np.argpartition(flat, -candidates)[-candidates:]
        best = float(np.max(flat))
        # weights for the half-plane sum
        c = h / (nx * ny)
        w = np.full(c.shape, 2.0)
        w[:, 0] = 1.0
        w[:, nx // 2] = 1.0
        keep = np.abs(c) > 1e-15 * np.max(np.abs(c)) if np.any(c) else np.zeros(c.shape, bool)
        kx = np.broadcast_to(self.kx, c.shape)[keep]
        ky = np.broadcast_to(self.ky, c.shape)[keep]
        cw = (c * w)[keep]
        if cw.size == 0:
            return 0.0
        dxf = g.dx / upsample
        dyf = g.dy / upsample
        for idx in top:
            i, j = np.unravel_index(idx, fine.shape)
            p = np.array([j * dxf, i * dyf])
            sgn = np.sign(fine[i, j]) or 1.0
            for _ in range(12):
                e = cw * np.exp(1j * (kx * p[0] + ky * p[1]))
                grad = np.array([np.sum(1j * kx * e).real, np.sum(1j * ky * e).real]) * sgn
                hxx = -np.sum(kx * kx * e).real * sgn
                hxy = -np.sum(kx * ky * e).real * sgn
                hyy = -np.sum(ky * ky * e).real * sgn
                H = np.array([[hxx, hxy], [hxy, hyy]])
                if np.all(np.linalg.eigvalsh(H) < 0):
                    dp = -np.linalg.solve(H, grad)
                else:
                    dp = 0.1 * min(dxf, dyf) * grad / (np.linalg.norm(grad) + 1e-300)
                if np.linalg.norm(dp) > 2 * max(dxf, dyf):
                    break
                p = p + dp
                if np.linalg.norm(dp) < 1e-13:
                    break
            if g.is_channel and not (0.0 <= p[1] <= g.Ly):
                continue
            val = abs(np.sum(cw * np.exp(1j * (kx * p[0] + ky * p[1]))).real)
            best = max(best, float(val))
        return best

    def sine_residual(self, values: np.ndarray) -> float:
        """Size of the part of a channel field that the sine basis cannot carry."""
        if not self.grid.is_channel:
            return 0.0
        return float(max(np.max(np.abs(values[0])), np.max(np.abs(values[-1]))))


@dataclass
class WarningLog:
    """Append-only list of runtime warnings attached to a run."""

    entries: list = field(default_factory=list)

    def add(self, kind: str, t: float, detail: str):
        self.entries.append({"kind": kind, "t": float(t), "detail": detail})

    def __len__(self):
        return len(self.entries)
