"""Half-line functions, the linearized operator about ``F0 = 1/(1+z)`` and its inverse.

Functions live on a log-mapped Chebyshev grid ``z = exp(x)``. The value and
slope at ``z = 0`` (the jet) are carried alongside the samples because they
control solvability: ``L(g) = f`` has a ``C^1`` solution iff
``f'(0) + 2 f(0) = 0``.

In ``x`` the toy operator is ``L(g) = g_x + tanh(x/2) g``; its kernel is
spanned by ``z/(1+z)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from ..radial import RadialGrid

DEFAULT_GRID = RadialGrid("log", 400, -32.0, 32.0)
COMPAT_TOL = 1e-9
JET_ZERO = 1e-14


class CompatibilityError(ValueError):
    """Raised when ``f'(0) + 2 f(0)`` is not zero; ``defect`` holds its value."""

    def __init__(self, defect: float):
        super().__init__(f"L(g) = f is not solvable: f'(0) + 2 f(0) = {defect:.3e}")
        self.defect = defect


def _jet_from_callable(fn, h: float = 1e-5) -> tuple[float, float]:
    f0, f1 = _raw_jet(fn, h)
    # exact zeros matter: they select the factored derivative in ``zdz``
    return (0.0 if abs(f0) < JET_ZERO else f0), (0.0 if abs(f1) < JET_ZERO else f1)


def _raw_jet(fn, h):
    f0 = float(np.real(fn(np.array([0.0]))[0]))
    try:
        step = 1e-30
        d = np.imag(fn(np.array([1j * step]))[0]) / step
        if np.isfinite(d):
            return f0, float(d)
    except (TypeError, ValueError):
        pass
    f1, f2 = (float(v) for v in fn(np.array([h, 2 * h])))
    return f0, (-3 * f0 + 4 * f1 - f2) / (2 * h)


@dataclass
class HalfLineFn:
    """Samples on ``grid.z`` plus the jet ``(g(0), g'(0))``."""

    grid: RadialGrid
    values: np.ndarray
    jet: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.grid.kind != "log":
            raise ValueError("half-line functions use the log map")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("half-line function contains non-finite values")
        self.jet = (float(self.jet[0]), float(self.jet[1]))

    @classmethod
    def from_function(cls, fn: Callable, grid: RadialGrid = DEFAULT_GRID, jet=None) -> "HalfLineFn":
        """Sample ``fn``; the jet is taken from ``fn`` near 0 unless supplied."""
        vals = np.real(fn(grid.z)).astype(float)
        return cls(grid, vals, _jet_from_callable(fn) if jet is None else jet)

    @classmethod
    def zeros(cls, grid: RadialGrid = DEFAULT_GRID) -> "HalfLineFn":
        return cls(grid, np.zeros(grid.size), (0.0, 0.0))

    @property
    def z(self) -> np.ndarray:
        return self.grid.z

    def _wrap(self, values, jet):
        return HalfLineFn(self.grid, values, jet)

    def __add__(self, other):
        if isinstance(other, HalfLineFn):
            return self._wrap(self.values + other.values, (self.jet[0] + other.jet[0], self.jet[1] + other.jet[1]))
        return self._wrap(self.values + other, (self.jet[0] + other, self.jet[1]))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.values, (-self.jet[0], -self.jet[1]))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, HalfLineFn):
            a0, a1 = self.jet
            b0, b1 = other.jet
            return self._wrap(self.values * other.values, (a0 * b0, a0 * b1 + a1 * b0))
        return self._wrap(self.values * other, (self.jet[0] * other, self.jet[1] * other))

    __rmul__ = __mul__

    def zdz(self) -> "HalfLineFn":
        """``z d/dz``; the jet becomes ``(0, g'(0))``.

        When the jet vanishes the samples are divided by ``s^m`` with
        ``s = z/(1+z)`` before differentiating, which keeps the derivative
        accurate relative to ``z^m`` near the origin.
        """
        v = self.values
        D = self.grid.D
        if self.jet[0] != 0.0:
            d = D @ v
        else:
            m = 2 if self.jet[1] == 0.0 else 1
            z = self.z
            s = z / (1 + z)
            h = v / s**m
            d = s**m * (D @ h) + m * v / (1 + z)
        return self._wrap(d, (0.0, self.jet[1]))

    def tail_log_integral(self) -> np.ndarray:
        """``int_z^inf g(t)/t dt``."""
        return self.grid.tail_log_integral(self.values, tol=1e-8)

    def integrate(self) -> float:
        """``int_0^inf g dz``."""
        return float(self.grid.weights @ (self.values * self.z))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def interpolate(self, z) -> np.ndarray:
        return self.grid.interpolate(self.values, z)


def rational(grid: RadialGrid, fn: Callable, jet) -> HalfLineFn:
    return HalfLineFn(grid, fn(grid.z), jet)


def F0(grid: RadialGrid = DEFAULT_GRID) -> HalfLineFn:
    """``1/(1+z)``."""
    return rational(grid, lambda z: 1.0 / (1.0 + z), (1.0, -1.0))


def kernel_element(grid: RadialGrid = DEFAULT_GRID) -> HalfLineFn:
    """``z/(1+z)^2``, spanning the kernel of the toy operator."""
    return rational(grid, lambda z: z / (1.0 + z) ** 2, (0.0, 1.0))


def _two_over(grid):
    return rational(grid, lambda z: 2.0 / (1.0 + z), (2.0, -2.0))


def apply_L(g: HalfLineFn, variant: str = "toy") -> HalfLineFn:
    """``g + z g' - 2g/(1+z)``; ``variant="nonlocal"`` subtracts ``z/(1+z)^2 L(g)``.

    The nonlocal variant needs ``g(0) = 0`` so that ``L(g)`` is finite at 0.
    """
    out = g + g.zdz() - _two_over(g.grid) * g
    if variant == "toy":
        return out
    if variant != "nonlocal":
        raise ValueError(f"unknown variant {variant!r}")
    if abs(g.jet[0]) > 1e-12:
        raise ValueError("the nonlocal variant needs g(0) = 0")
    Lg = g.tail_log_integral()
    z = g.z
    return out - HalfLineFn(g.grid, z / (1 + z) ** 2 * Lg, (0.0, float(Lg[0])))


def apply_L_angular(values: np.ndarray, grid: RadialGrid, theta: np.ndarray) -> np.ndarray:
    """Toy part, nonlocal ``L12`` part and angular transport for ``g(z, theta)`` arrays.

    ``values`` has shape ``(grid.size, theta.size)`` and must vanish at ``z = 0``.
    """
    z = grid.z[:, None]
    g = np.asarray(values, dtype=float)
    zg = grid.D @ g
    K = 3 * np.cos(theta) ** 2 * np.sin(theta)
    ang = np.trapezoid(g * K[None, :], theta, axis=1)
    L12 = grid.tail_log_integral(ang, tol=1e-8)[:, None]
    gth = np.gradient(g, theta, axis=1, edge_order=2)
    return (g + zg - 2 / (1 + z) * g - z / (1 + z) ** 2 * L12
            + 1.5 / (1 + z) * np.sin(2 * theta)[None, :] * gth)


def compatibility_defect(f: HalfLineFn) -> float:
    return f.jet[1] + 2.0 * f.jet[0]


def over_s2(values: np.ndarray, grid: RadialGrid, z_cut: float = 3e-4, fit_span: float = 30.0) -> np.ndarray:
    """``v / s^2`` with ``s = z/(1+z)`` for samples that vanish quadratically at 0.

    Near ``z = 0`` the quotient is dominated by rounding in ``v``, so below
    ``z_cut`` it is blended into a quadratic in ``z`` fitted on
    ``[z_cut, fit_span * z_cut]``; the blend is a smooth step in ``x``.
    """
    z = grid.z
    q = ((1 + z) / z) ** 2 * values
    x = grid.xi
    xc = np.log(z_cut)
    fit = (z >= z_cut) & (z <= fit_span * z_cut)
    if x[0] < xc and fit.sum() >= 4:
        coef = np.polynomial.polynomial.polyfit(z[fit] / z_cut, q[fit], 2)
        near = z <= fit_span * z_cut
        model = np.polynomial.polynomial.polyval(z[near] / z_cut, coef)
        chi = 0.5 * (1.0 + np.tanh(x[near] - xc))
        q[near] = chi * q[near] + (1.0 - chi) * model
    return q


def invert_L(f: HalfLineFn, tol: float = COMPAT_TOL, z_cut: float = 3e-4,
             fit_span: float = 30.0) -> HalfLineFn:
    """The solution of ``L(g) = f`` with ``g'(0) = 0``.

    With ``s = z/(1+z)`` one has ``L(s^2 Q) = s^2 (Q + z Q')`` and
    ``L(-f(0)) = -f(0)(z-1)/(z+1)``, so ``g = -f(0) + s^2 Q`` where
    ``Q_x + Q = J`` in ``x = log z`` and
    ``J = (f + f(0)(z-1)/(z+1)) / s^2``. ``J`` is regular exactly when
    ``f'(0) + 2 f(0) = 0``; it is evaluated with :func:`over_s2`. ``Q`` is
    bounded and tends to ``J(0)`` at the left end.
    """
    defect = compatibility_defect(f)
    scale = max(1.0, abs(f.jet[0]), f.max_abs())
    if abs(defect) > tol * scale:
        raise CompatibilityError(defect)
    grid = f.grid
    z = grid.z
    f0 = f.jet[0]
    J = over_s2(f.values + f0 * (z - 1) / (z + 1), grid, z_cut, fit_span)
    A = grid.D + np.eye(grid.size)
    A[0] = 0.0
    A[0, 0] = 1.0
    Q = np.linalg.solve(A, J)
    s2 = (z / (1 + z)) ** 2
    return HalfLineFn(grid, -f0 + s2 * Q, (-f0, 0.0))


def kernel_alignment(diff: HalfLineFn) -> tuple[float, HalfLineFn]:
    """Least-squares kernel coefficient ``c`` of ``diff`` and the residual ``diff - c k``."""
    k = kernel_element(diff.grid)
    w = diff.grid.weights
    c = float((w @ (diff.values * k.values)) / (w @ (k.values * k.values)))
    return c, diff - c * k


class WeightKind(str, Enum):
    PLAIN = "plain"
    HARDY = "hardy"
    HARDY_ANGULAR = "hardy_angular"


@dataclass(frozen=True)
class WeightedNorm:
    """``(f,g)_X = (f,g)_w + c1 (zf', zg')_w + c2 ((z d_z)^2 f, (z d_z)^2 g)_w``.

    ``kind`` selects ``w = 1``, ``w = (1+z)^4/z^4`` or the latter times
    ``sin(2 theta)^-(1+delta)``.
    """

    kind: WeightKind = WeightKind.HARDY
    delta: float = 0.125
    c1: float = 0.5
    c2: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if not 0.0 < self.delta <= 0.25:
            raise ValueError("delta must lie in (0, 1/4]")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 and c2 must be positive")

    def radial_density(self, grid: RadialGrid) -> np.ndarray:
        """Weight times ``dz/dx = z``, so that ``(f,g)_w = int f g density dx``."""
        z = grid.z
        if self.kind is WeightKind.PLAIN:
            return z
        return (1 + z) ** 4 / z**3

    def l2(self, f, g, grid: RadialGrid, theta=None) -> float:
        """Weighted ``L^2`` pairing of sample arrays (1D or ``(z, theta)``)."""
        dens = self.radial_density(grid)
        prod = np.asarray(f) * np.asarray(g)
        if prod.ndim == 1:
            return float(grid.weights @ (prod * dens))
        if theta is None:
            raise ValueError("2D samples need theta nodes")
        if self.kind is WeightKind.HARDY_ANGULAR:
            s = np.sin(2 * theta)
            wt = np.zeros_like(s)
            inner = s > 0
            wt[inner] = s[inner] ** -(1 + self.delta)
            prod = prod * wt[None, :]
        return float(grid.weights @ (np.trapezoid(prod, theta, axis=1) * dens))

    def inner(self, f: HalfLineFn, g: HalfLineFn) -> float:
        grid = f.grid
        f1, g1 = f.zdz(), g.zdz()
        f2, g2 = f1.zdz(), g1.zdz()
        return (self.l2(f.values, g.values, grid) + self.c1 * self.l2(f1.values, g1.values, grid)
                + self.c2 * self.l2(f2.values, g2.values, grid))

    def norm(self, f: HalfLineFn) -> float:
        return float(np.sqrt(max(self.inner(f, f), 0.0)))


def working_norm(g: HalfLineFn) -> float:
    """Discrete ``H^2``-type norm ``sum_k |(z d_z)^k g|`` in ``L^2(dz/(1+z)^2)``."""
    z = g.z
    dens = z / (1 + z) ** 2
    v = g.values
    tot = 0.0
    for _ in range(3):
        tot += float(g.grid.weights @ (v * v * dens))
        v = g.grid.D @ v
    return float(np.sqrt(tot))


@dataclass(frozen=True)
class Nonlinearity:
    """A degree-two nonlinearity with declared symmetry metadata.

    Attributes
    ----------
    fn : callable
        ``HalfLineFn -> HalfLineFn`` propagating the jet.
    degree : int
        Scaling degree: ``N(a f) = a^degree N(f)``.
    equivariant : bool
        Whether ``N(f(a .)) = N(f)(a .)``.
    bounded : str
        Short statement of where the map is bounded.
    """

    name: str
    fn: Callable
    degree: int = 2
    equivariant: bool = False
    bounded: str = ""

    def __call__(self, f: HalfLineFn) -> HalfLineFn:
        return self.fn(f)

    def scaling_defect(self, f: HalfLineFn, a: float) -> float:
        lhs = self.fn(a * f).values
        rhs = a**self.degree * self.fn(f).values
        return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))

    def equivariance_defect(self, fn: Callable, a: float, grid: RadialGrid = DEFAULT_GRID,
                            window: float = 20.0) -> float:
        """``max |N(f(a.))(z) - N(f)(a z)|`` over ``|log z| < window``, relative."""
        lhs = self.fn(HalfLineFn.from_function(lambda z: fn(a * z), grid)).values
        full = self.fn(HalfLineFn.from_function(fn, grid))
        z = grid.z
        sel = np.abs(np.log(z)) < window
        rhs = full.interpolate(a * z[sel])
        return float(np.max(np.abs(lhs[sel] - rhs)) / max(np.max(np.abs(rhs)), 1e-300))


def _n1(f: HalfLineFn) -> HalfLineFn:
    m = rational(f.grid, lambda z: z / (1 + z), (0.0, 1.0))
    return f * f * m


def _n2(f: HalfLineFn) -> HalfLineFn:
    d = f.zdz()
    m = rational(f.grid, lambda z: 1.0 / (1 + z) ** 2, (1.0, -2.0))
    return d * d * m


def _n3(f: HalfLineFn) -> HalfLineFn:
    return f * f.zdz()


def _n4(f: HalfLineFn) -> HalfLineFn:
    d = f.zdz()
    return d * d


N1 = Nonlinearity("f2_z_over_1pz", _n1, 2, False, "bounded on H^k: multiplier z/(1+z) is smooth and bounded")
N2 = Nonlinearity("zdz_f_sq_over_1pz_sq", _n2, 2, False, "loses one derivative; L^-1 N bounded")
N3 = Nonlinearity("f_zdz_f", _n3, 2, True, "loses one derivative; L^-1 N bounded")
N4 = Nonlinearity("zdz_f_sq", _n4, 2, True, "loses one derivative; L^-1 N bounded")
NONLINEARITIES = {n.name: n for n in (N1, N2, N3, N4)}
