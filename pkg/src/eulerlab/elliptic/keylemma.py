"""Pointwise second-order expansion of a planar stream function.

For ``Delta psi = f`` with ``f`` bounded and compactly supported,

    psi(x) - psi(0) - x . grad psi(0) + (|x|^2 / 4) int_|x|^inf P2 f(rho, sigma) / rho d rho

is ``O(|f|_inf |x|^2)``. Here ``P2 f(rho, .)`` is the ``cos 2 theta, sin 2 theta``
band of ``f`` on the circle of radius ``rho`` and ``sigma = x/|x|``. The
coefficient ``-1/4`` is the one carried by the mode-2 Green's function
``psi_2(r) = -(1/4)(r^-2 int_0^r s^3 f_2 ds + r^2 int_r^inf f_2 / s ds)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..spectral2d.grid import Field2D, SpectralOps

P2_COEFFICIENT = -0.25
N_ANGLES = 32


class PoissonResidualError(ValueError):
    """``Delta psi`` does not match ``f`` on the grid."""


@dataclass
class P2Projection:
    """``P2 f(rho, theta) = a(rho) cos 2 theta + b(rho) sin 2 theta``."""

    rho: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_samples(cls, rho, values) -> "P2Projection":
        """Project samples ``values[i, j] = f(rho_i, 2 pi j / m)``."""
        values = np.asarray(values, dtype=float)
        m = values.shape[1]
        if m < 5:
            raise ValueError("need at least 5 angles to resolve the order-2 band")
        th = 2 * np.pi * np.arange(m) / m
        a = values @ np.cos(2 * th) * (2.0 / m)
        b = values @ np.sin(2 * th) * (2.0 / m)
        return cls(np.asarray(rho, dtype=float), a, b)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return self.a[:, None] * np.cos(2 * theta)[None, :] + self.b[:, None] * np.sin(2 * theta)[None, :]


def _log_panels(lo: float, hi: float, width: float = 0.5, order: int = 16):
    """Gauss-Legendre nodes and weights for ``int_lo^hi g(s) ds`` in ``log s``."""
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    a, b = np.log(lo), np.log(hi)
    m = max(1, int(np.ceil((b - a) / width)))
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, m + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    x = (mid + half * gx).ravel()
    w = (half * gw).ravel()
    s = np.exp(x)
    return s, w * s


class PolarSource:
    """A bounded source ``f(r, theta)`` supported in ``r <= support``.

    Angular modes come from ``n_theta`` equispaced samples; radial integrals
    use Gauss-Legendre panels in ``log r`` down to ``floor * support``, which
    handles power-law behaviour at the origin.
    """

    def __init__(self, fn, support: float, n_theta: int = 128, floor: float = 1e-16):
        if not support > 0:
            raise ValueError("support radius must be positive")
        self.fn = fn
        self.support = float(support)
        self.n_theta = int(n_theta)
        self.floor = floor
        self.theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta
        self.weights = np.full(self.n_theta // 2 + 1, 2.0)
        self.weights[0] = 1.0
        if self.n_theta % 2 == 0:
            self.weights[-1] = 1.0

    def modes(self, s) -> np.ndarray:
        """``c_n(s)`` with ``f(s, theta) = Re sum_n w_n c_n(s) exp(i n theta)``."""
        vals = self.fn(np.asarray(s)[:, None], self.theta[None, :])
        vals = np.broadcast_to(vals, (len(s), self.n_theta))
        return sfft.rfft(vals, axis=1) / self.n_theta

    def sup(self, n_r: int = 400) -> float:
        s = self.support * np.geomspace(1e-8, 1.0, n_r)
        return float(np.max(np.abs(self.fn(s[:, None], self.theta[None, :]))))

    def stream_modes(self, r: float) -> np.ndarray:
        """``psi_n(r)`` for every resolved mode ``n``."""
        R0 = self.support
        n = np.arange(self.n_theta // 2 + 1)
        out = np.zeros(n.size, dtype=complex)
        s_in, w_in = _log_panels(self.floor * R0, min(r, R0))
        s_out, w_out = _log_panels(r, R0)
        c_in = self.modes(s_in) if s_in.size else np.zeros((0, n.size))
        c_out = self.modes(s_out) if s_out.size else np.zeros((0, n.size))
        # n = 0
        inner0 = np.sum(w_in * s_in * c_in[:, 0]) if s_in.size else 0.0
        outer0 = np.sum(w_out * s_out * np.log(s_out) * c_out[:, 0]) if s_out.size else 0.0
        out[0] = np.log(r) * inner0 + outer0
        for k in n[1:]:
            inner = np.sum(w_in * (s_in / r) ** k * s_in * c_in[:, k]) if s_in.size else 0.0
            outer = np.sum(w_out * (r / s_out) ** k * s_out * c_out[:, k]) if s_out.size else 0.0
            out[k] = -(inner + outer) / (2.0 * k)
        return out

    def stream(self, r: float, sigma) -> np.ndarray:
        psi_n = self.stream_modes(r)
        n = np.arange(psi_n.size)
        return (np.exp(1j * np.outer(sigma, n)) @ (self.weights * psi_n)).real

    def jet_at_origin(self) -> tuple[float, np.ndarray]:
        """``psi(0)`` and ``grad psi(0)``."""
        s, w = _log_panels(self.floor * self.support, self.support)
        c = self.modes(s)
        psi0 = float(np.sum(w * s * np.log(s) * c[:, 0]).real)
        # psi_1(r) ~ -(r/2) int_0^inf c_1 ds, times w_1 = 2
        g = -np.sum(w * c[:, 1])
        return psi0, np.array([g.real, -g.imag])

    def p2_integral(self, r: float, sigma) -> np.ndarray:
        """``int_r^inf P2 f(rho, sigma) / rho d rho``."""
        s, w = _log_panels(r, self.support)
        if not s.size:
            return np.zeros(np.shape(sigma))
        c2 = np.sum(w * self.modes(s)[:, 2] / s)
        return (2.0 * c2 * np.exp(2j * np.asarray(sigma))).real


def _dyadic(r_max: float, levels: int) -> np.ndarray:
    return r_max * 2.0 ** -np.arange(levels)


def remainder(psi_at, psi0, grad0, p2_term, radii, n_angles=N_ANGLES, coefficient=P2_COEFFICIENT):
    """Array ``(len(radii), n_angles)`` of remainders divided by ``|x|^2``."""
    sig = 2 * np.pi * np.arange(n_angles) / n_angles
    out = np.empty((len(radii), n_angles))
    for i, r in enumerate(radii):
        lin = r * (grad0[0] * np.cos(sig) + grad0[1] * np.sin(sig))
        rem = psi_at(r, sig) - psi0 - lin - coefficient * r * r * p2_term(r, sig)
        out[i] = rem / (r * r)
    return out


def polar_key_lemma(fn, support: float, levels: int = 14, n_angles: int = N_ANGLES, n_theta: int = 128,
                    coefficient: float = P2_COEFFICIENT) -> float:
    """Empirical constant for a source given as ``fn(r, theta)`` on a disk.

    ``psi`` is the decaying-gradient solution built from the exact mode
    Green's functions, so no Poisson solve is involved.
    """
    src = PolarSource(fn, support, n_theta)
    fmax = src.sup()
    if fmax == 0.0:
        return 0.0
    psi0, grad0 = src.jet_at_origin()
    radii = _dyadic(0.5 * support, levels)
    rem = remainder(src.stream, psi0, grad0, src.p2_integral, radii, n_angles, coefficient)
    return float(np.max(np.abs(rem)) / fmax)


def _trig_eval(coeffs: np.ndarray, grid, X, Y) -> np.ndarray:
    """Evaluate a full complex 2D Fourier series (``fft2 / N``) at points."""
    ny, nx = coeffs.shape
    kx = sfft.fftfreq(nx, 1.0 / nx) * (2 * np.pi / grid.Lx)
    ky = sfft.fftfreq(ny, 1.0 / ny) * (2 * np.pi / grid.Ly)
    Ex = np.exp(1j * np.outer(np.ravel(X), kx))
    Ey = np.exp(1j * np.outer(np.ravel(Y), ky))
    return np.einsum("pj,jk,pk->p", Ey, coeffs, Ex).real.reshape(np.shape(X))


def key_lemma_remainder(psi: Field2D, f: Field2D, center=None, levels: int = 8, n_angles: int = N_ANGLES,
                        tol: float = 1e-8, coefficient: float = P2_COEFFICIENT) -> float:
    """Empirical constant ``sup |remainder| / (|f|_inf |x|^2)`` on the torus.

    ``f`` should vanish outside a disk about ``center`` (default: the middle
    of the box) of radius below half the shorter period. ``psi`` must satisfy
    ``Delta psi = f - mean(f)``; periodic images and the mean only add
    smooth quadratic terms, which stay inside the bound. Points ``x`` lie on
    dyadic radii from a quarter of the shorter period down, at ``n_angles``
    directions.
    """
    grid = psi.grid
    if grid.is_channel or f.grid != grid:
        raise ValueError("the pointwise expansion is evaluated on a single torus grid")
    ops = SpectralOps(grid)
    fmax = f.max_abs()
    lap = ops.inverse(-ops.k2 * ops.forward(psi.values))
    resid = np.max(np.abs(lap - (f.values - f.mean())))
    if resid > tol * max(fmax, 1.0):
        raise PoissonResidualError(f"Poisson residual {resid:.3e} exceeds tolerance")
    if fmax == 0.0:
        return 0.0
    if center is None:
        center = (grid.Lx / 2, grid.Ly / 2)
    cx, cy = center
    N = grid.nx * grid.ny
    cpsi = sfft.fft2(psi.values) / N
    cf = sfft.fft2(f.values) / N
    for c in (cpsi, cf):
        c[grid.ny // 2, :] = 0.0
        c[:, grid.nx // 2] = 0.0
    kx = sfft.fftfreq(grid.nx, 1.0 / grid.nx) * (2 * np.pi / grid.Lx)
    ky = sfft.fftfreq(grid.ny, 1.0 / grid.ny) * (2 * np.pi / grid.Ly)
    psi0 = float(_trig_eval(cpsi, grid, np.array([cx]), np.array([cy]))[0])
    grad0 = np.array([
        float(_trig_eval(1j * kx[None, :] * cpsi, grid, np.array([cx]), np.array([cy]))[0]),
        float(_trig_eval(1j * ky[:, None] * cpsi, grid, np.array([cx]), np.array([cy]))[0]),
    ])
    rho_max = 0.5 * min(grid.Lx, grid.Ly)
    m = 64
    th = 2 * np.pi * np.arange(m) / m

    def psi_at(r, sig):
        return _trig_eval(cpsi, grid, cx + r * np.cos(sig), cy + r * np.sin(sig))

    radii = _dyadic(0.25 * min(grid.Lx, grid.Ly), levels)
    # int_r^rho_max of the band, accumulated over panels between radii
    edges = np.concatenate([[rho_max], radii])
    acc = np.zeros((edges.size, 2))
    for i in range(1, edges.size):
        s, w = _log_panels(edges[i], edges[i - 1], width=0.35)
        X = cx + s[:, None] * np.cos(th)[None, :]
        Y = cy + s[:, None] * np.sin(th)[None, :]
        proj = P2Projection.from_samples(s, _trig_eval(cf, grid, X, Y))
        acc[i] = acc[i - 1] + [np.sum(w * proj.a / s), np.sum(w * proj.b / s)]
    table = {float(r): acc[i + 1] for i, r in enumerate(radii)}

    def p2_term(r, sig):
        a, b = table[float(r)]
        return a * np.cos(2 * sig) + b * np.sin(2 * sig)

    rem = remainder(psi_at, psi0, grad0, p2_term, radii, n_angles, coefficient)
    return float(np.max(np.abs(rem)) / fmax)
