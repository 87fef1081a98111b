"""Chebyshev grids on mapped half-lines ``z in [0, inf)``.

Two maps are provided.

``algebraic``
    ``z = s / (1 - s)`` with Chebyshev-Lobatto nodes in ``s in [0, 1]``. Both
    ends are nodes: ``s = 0`` is ``z = 0`` and ``s = 1`` is ``z = inf``.
    Rational profiles such as ``z/(1+z)^2 = s(1-s)`` are low-degree
    polynomials in ``s``.
``log``
    ``z = exp(x)`` with Chebyshev-Lobatto nodes in ``x in [x_min, x_max]``.
    ``z d/dz`` becomes ``d/dx``, so logarithmic tails stay smooth.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as C


def lobatto(n: int) -> np.ndarray:
    """``n + 1`` Chebyshev-Lobatto points on ``[-1, 1]`` in increasing order."""
    return -np.cos(np.pi * np.arange(n + 1) / n)


def cheb_diff_matrix(n: int) -> np.ndarray:
    """Differentiation matrix on increasing Lobatto points."""
    x = lobatto(n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def _coeff_matrix(n: int) -> np.ndarray:
    # values on increasing Lobatto points -> Chebyshev coefficients
    V = C.chebvander(lobatto(n), n)
    return np.linalg.inv(V)


def cheb_cumint_matrix(n: int) -> np.ndarray:
    """Matrix ``Q`` with ``(Q f)_i = int_{-1}^{x_i} f`` for the interpolant of ``f``."""
    x = lobatto(n)
    A = _coeff_matrix(n)
    Q = np.empty((n + 1, n + 1))
    for j in range(n + 1):
        ic = C.chebint(A[:, j], lbnd=-1.0)
        Q[:, j] = C.chebval(x, ic)
    return Q


def clenshaw_curtis(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights on increasing Lobatto points for ``int_{-1}^{1}``."""
    return cheb_cumint_matrix(n)[-1].copy()


@dataclass(frozen=True)
class RadialGrid:
    """Mapped Chebyshev grid on the half line.

    Parameters
    ----------
    kind : {"algebraic", "log"}
    n : int
        Polynomial degree; there are ``n + 1`` nodes.
    x_min, x_max : float
        Interval in ``x = log z`` (log map only).
    """

    kind: str = "algebraic"
    n: int = 128
    x_min: float = -34.0
    x_max: float = 34.0

    def __post_init__(self):
        if self.kind not in ("algebraic", "log"):
            raise ValueError(f"unknown radial map {self.kind!r}")
        if self.n < 8:
            raise ValueError("radial grids need n >= 8")
        if self.kind == "log" and not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @cached_property
    def xi(self) -> np.ndarray:
        """Computational coordinate: ``s`` (algebraic) or ``x = log z`` (log)."""
        t = lobatto(self.n)
        if self.kind == "algebraic":
            return 0.5 * (t + 1.0)
        return self.x_min + 0.5 * (t + 1.0) * (self.x_max - self.x_min)

    @property
    def _half_length(self) -> float:
        return 0.5 if self.kind == "algebraic" else 0.5 * (self.x_max - self.x_min)

    @cached_property
    def z(self) -> np.ndarray:
        """Physical nodes; the last algebraic node is ``inf``."""
        if self.kind == "algebraic":
            s = self.xi
            with np.errstate(divide="ignore"):
                return np.where(s < 1.0, s / np.where(s < 1.0, 1.0 - s, 1.0), np.inf)
        return np.exp(self.xi)

    @property
    def size(self) -> int:
        return self.n + 1

    @cached_property
    def D(self) -> np.ndarray:
        """``d/d xi``."""
        return cheb_diff_matrix(self.n) / self._half_length

    @cached_property
    def Q(self) -> np.ndarray:
        """``(Q f)_i = int_{xi_0}^{xi_i} f d xi``."""
        return cheb_cumint_matrix(self.n) * self._half_length

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights for ``int f d xi`` over the whole interval."""
        return self.Q[-1].copy()

    @cached_property
    def zdz(self) -> np.ndarray:
        """Matrix of ``z d/dz``."""
        if self.kind == "algebraic":
            s = self.xi
            return (s * (1.0 - s))[:, None] * self.D
        return self.D.copy()

    def from_function(self, fn, at_infinity: float = 0.0) -> np.ndarray:
        """Sample ``fn`` at the nodes, using ``at_infinity`` for ``z = inf``."""
        z = self.z
        out = np.empty(z.shape)
        fin = np.isfinite(z)
        out[fin] = fn(z[fin])
        out[~fin] = at_infinity
        return out

    def interpolate(self, values: np.ndarray, z) -> np.ndarray:
        """Evaluate the Chebyshev interpolant at physical points ``z``."""
        coeffs = _coeff_matrix(self.n) @ values
        z = np.asarray(z, dtype=float)
        if self.kind == "algebraic":
            s = np.where(np.isinf(z), 1.0, z / (1.0 + np.where(np.isinf(z), 0.0, z)))
            t = 2.0 * s - 1.0
        else:
            t = 2.0 * (np.log(z) - self.x_min) / (self.x_max - self.x_min) - 1.0
        return C.chebval(t, coeffs)

    def tail_log_integral(self, values: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """``L(F)(z) = int_z^inf F(t) / t dt`` at every node.

        On the algebraic map the integrand in ``s`` is ``F / (s (1 - s))``; its
        end values are limits taken from ``dF/ds``, which requires ``F`` to
        vanish at both ends.
        """
        F = np.asarray(values, dtype=float)
        scale = max(float(np.max(np.abs(F))), 1e-300)
        if self.kind == "log":
            if abs(F[-1]) > tol * scale:
                raise ValueError(f"non-decaying tail: F(z_max) = {F[-1]:.3e}")
            q = self.Q @ F
            return q[-1] - q
        if abs(F[-1]) > tol * scale:
            raise ValueError(f"non-decaying tail: F(inf) = {F[-1]:.3e}")
        if abs(F[0]) > tol * scale:
            raise ValueError(f"F(0) = {F[0]:.3e}: F/z is not integrable at 0")
        s = self.xi
        dF = self.D @ F
        h = np.empty_like(F)
        h[1:-1] = F[1:-1] / (s[1:-1] * (1.0 - s[1:-1]))
        h[0] = dF[0]
        h[-1] = -dF[-1]
        q = self.Q @ h
        return q[-1] - q


@dataclass
class Profile1D:
    """Samples of a radial function on a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError("profile values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile contains non-finite values")

    @classmethod
    def from_function(cls, grid: RadialGrid, fn, at_infinity: float = 0.0) -> "Profile1D":
        return cls(grid, grid.from_function(fn, at_infinity))

    @property
    def z(self) -> np.ndarray:
        return self.grid.z

    def zdz(self) -> np.ndarray:
        return self.grid.zdz @ self.values

    def tail_log_integral(self) -> np.ndarray:
        return self.grid.tail_log_integral(self.values)
