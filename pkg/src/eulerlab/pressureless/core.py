"""Pressureless Euler ``u_t + (u . grad) u = 0`` from data with nilpotent gradient.

Trajectories are straight lines ``x + t u0(x)``, and along them the gradient
``A(t) = grad u`` solves ``A' = -A^2``, so ``A(t) = A0 (I + t A0)^-1``. When
``A0^d = 0`` the resolvent is the finite sum ``sum_m (-t)^m A0^(m+1)`` and
``det(I + t A0) = 1`` for every ``t``. Matrix norms are maximum absolute row
sums throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

NILPOTENT_TOL = 1e-10


def row_sum_norm(A: np.ndarray) -> np.ndarray:
    """Maximum absolute row sum of each matrix in a ``(..., d, d)`` stack."""
    return np.max(np.sum(np.abs(A), axis=-1), axis=-1)


@dataclass
class NilpotentFlow:
    """Initial velocity ``u0`` on the torus ``[0, 2 pi)^d``.

    Either ``chain`` holds ``d - 1`` pairs ``(u_i, du_i)`` so that
    ``u0_i = u_i(x_{i+1})`` and ``u0_d = 0``, or ``velocity`` and
    ``jacobian`` are callables on ``(N, d)`` point arrays.
    """

    d: int
    chain: list | None = None
    velocity: object = None
    jacobian: object = None
    name: str = ""

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")
        if self.chain is None and (self.velocity is None or self.jacobian is None):
            raise ValueError("give either chain components or velocity and jacobian callables")
        if self.chain is not None and len(self.chain) != self.d - 1:
            raise ValueError(f"a chain in dimension {self.d} needs {self.d - 1} components")

    @classmethod
    def sine_chain(cls, d: int) -> "NilpotentFlow":
        """``u_i = -sin(x_{i+1})``: ``|d u_i| <= 1`` with equality at the origin."""
        return cls(d, chain=[(lambda s: -np.sin(s), lambda s: -np.cos(s))] * (d - 1), name=f"sine-chain-{d}")

    def u0(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if self.chain is None:
            return np.asarray(self.velocity(X), dtype=float)
        out = np.zeros_like(X)
        for i, (f, _) in enumerate(self.chain):
            out[:, i] = f(X[:, i + 1])
        return out

    def superdiagonal(self, points) -> np.ndarray:
        """``(N, d - 1)`` entries ``d u_i / d x_{i+1}`` of a chain flow."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([df(X[:, i + 1]) for i, (_, df) in enumerate(self.chain)], axis=1)

    def grad(self, points) -> np.ndarray:
        """``(N, d, d)`` Jacobians with ``A[i, j] = d u_i / d x_j``."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if self.chain is None:
            return np.asarray(self.jacobian(X), dtype=float).reshape(X.shape[0], self.d, self.d)
        A = np.zeros((X.shape[0], self.d, self.d))
        idx = np.arange(self.d - 1)
        A[:, idx, idx + 1] = self.superdiagonal(X)
        return A

    def conjugated(self, Q: np.ndarray) -> "NilpotentFlow":
        """``v0(y) = Q u0(Q^T y)``, whose gradient is ``Q A0 Q^T``."""
        Q = np.asarray(Q, dtype=float)
        base = self

        def vel(Y):
            return base.u0(Y @ Q) @ Q.T

        def jac(Y):
            return Q[None] @ base.grad(Y @ Q) @ Q.T[None]

        return NilpotentFlow(self.d, velocity=vel, jacobian=jac, name=f"{self.name}-conjugated")


def rotation_flow(d: int = 3) -> NilpotentFlow:
    """``u0 = (x_2, -x_1, 0, ...)``: the gradient has a rotation block, so ``A0^2 = -I`` there."""

    def vel(X):
        out = np.zeros_like(X)
        out[:, 0] = X[:, 1]
        out[:, 1] = -X[:, 0]
        return out

    def jac(X):
        A = np.zeros((X.shape[0], d, d))
        A[:, 0, 1] = 1.0
        A[:, 1, 0] = -1.0
        return A

    return NilpotentFlow(d, velocity=vel, jacobian=jac, name="rotation")


def sample_points(d: int, n: int = 10_000, include_origin: bool = True) -> np.ndarray:
    """Deterministic scrambled-free Halton points in ``[0, 2 pi)^d``, plus the origin."""
    pts = qmc.Halton(d, scramble=False).random(n) * 2 * np.pi
    if include_origin:
        pts = np.vstack([np.zeros((1, d)), pts])
    return pts


@dataclass
class NilpotencyReport:
    power_defect: float
    det_defect: float
    tol: float = NILPOTENT_TOL

    @property
    def passed(self) -> bool:
        return self.power_defect < self.tol and self.det_defect < self.tol


def check_nilpotent(flow: NilpotentFlow, points=None, t_grid=None) -> NilpotencyReport:
    """``max |A0^d|`` and ``max |det(I + t A0) - 1|`` over the samples."""
    X = sample_points(flow.d, 1000) if points is None else np.atleast_2d(points)
    t_grid = np.linspace(-4.0, 4.0, 17) if t_grid is None else np.asarray(t_grid, dtype=float)
    A = flow.grad(X)
    P = np.linalg.matrix_power(A, flow.d)
    eye = np.eye(flow.d)
    dets = np.array([np.linalg.det(eye[None] + t * A) for t in t_grid])
    return NilpotencyReport(float(np.max(row_sum_norm(P))), float(np.max(np.abs(dets - 1.0))))


def neumann_gradient(A0: np.ndarray, t: float) -> np.ndarray:
    """``sum_{m=0}^{d-2} (-t)^m A0^(m+1)``, exact for nilpotent ``A0``."""
    d = A0.shape[-1]
    out = np.zeros_like(A0)
    P = A0.copy()
    for m in range(d - 1):
        out = out + (-t) ** m * P
        P = P @ A0
    return out


def resolvent_gradient(A0: np.ndarray, t: float) -> np.ndarray:
    """``A0 (I + t A0)^-1`` by a linear solve."""
    d = A0.shape[-1]
    M = np.eye(d) + t * A0
    if abs(np.linalg.det(M)) < 1e-300:
        raise FloatingPointError("I + t A0 is singular; the data cannot be nilpotent")
    # A0 (I + t A0)^-1 = ((I + t A0)^-T A0^T)^T
    return np.linalg.solve(M.T, A0.T).T


def ode_gradient(A0: np.ndarray, t: float, steps: int = 2000) -> np.ndarray:
    """RK4 for ``A' = -A^2`` on ``[0, t]``."""
    A = A0.copy()
    h = t / steps

    def f(B):
        return -B @ B

    for _ in range(steps):
        k1 = f(A)
        k2 = f(A + h / 2 * k1)
        k3 = f(A + h / 2 * k2)
        k4 = f(A + h * k3)
        A = A + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return A


@dataclass
class GradientTrajectory:
    x: np.ndarray
    times: np.ndarray
    A: np.ndarray
    resolvent_defect: float
    ode_defect: float
    det_defect: float

    def norms(self) -> np.ndarray:
        return row_sum_norm(self.A)


def evolve_gradient(flow: NilpotentFlow, x, t_grid, check: bool = True, ode_steps: int = 2000) -> GradientTrajectory:
    """``A(t) = grad u(Phi_t(x), t)`` by the finite sum, cross-checked by the resolvent and by RK4."""
    x = np.asarray(x, dtype=float).reshape(1, flow.d)
    if check:
        rep = check_nilpotent(flow, np.vstack([x, sample_points(flow.d, 256, False)]))
        if not rep.passed:
            raise ValueError(f"data gradient is not nilpotent (defect {rep.power_defect:.3e})")
    A0 = flow.grad(x)[0]
    times = np.asarray(t_grid, dtype=float)
    A = np.array([neumann_gradient(A0, t) for t in times])
    res = max(float(np.max(np.abs(resolvent_gradient(A0, t) - a))) for t, a in zip(times, A))
    ode = max(float(np.max(np.abs(ode_gradient(A0, t, ode_steps) - a))) for t, a in zip(times, A))
    det = max(abs(float(np.linalg.det(np.eye(flow.d) + t * A0)) - 1.0) for t in times)
    return GradientTrajectory(x[0], times, A, res, ode, det)


def chain_gradient(a: np.ndarray, t: float) -> np.ndarray:
    """``A(t)`` for chains from the superdiagonal ``a`` of shape ``(N, d - 1)``.

    Entry ``(i, j)``, ``j > i``, is ``(-t)^(j-i-1) a_i ... a_{j-1}``.
    """
    N, m = a.shape
    d = m + 1
    A = np.zeros((N, d, d))
    for i in range(m):
        prod = np.ones(N)
        for j in range(i + 1, d):
            prod = prod * a[:, j - 1]
            A[:, i, j] = (-t) ** (j - i - 1) * prod
    return A


@dataclass
class NormRow:
    d: int
    t: float
    norm_at_0: float
    norm_global: float
    bound: float


@dataclass
class NormTable:
    rows: list = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["d", "t", "norm_at_0", "norm_global", "bound"])
            for r in self.rows:
                w.writerow([r.d, repr(float(r.t)), repr(r.norm_at_0), repr(r.norm_global), repr(r.bound)])

    def lookup(self, d: int, t: float) -> NormRow:
        for r in self.rows:
            if r.d == d and abs(r.t - t) < 1e-15:
                return r
        raise KeyError((d, t))


def chain_norm_at_origin(d: int, t: float) -> float:
    """``sum_{i=0}^{d-2} t^i`` for ``t >= 0``."""
    return float(sum(t**i for i in range(d - 1)))


def blowup_family_curve(d_list, t_grid, n_samples: int = 10_000) -> NormTable:
    """Gradient norms of the sine chain in each dimension along ``t``.

    ``norm_global`` is the largest row sum over the origin and ``n_samples``
    Halton points; ``bound`` is ``|A0| / (1 - t |A0|)`` with ``|A0| = 1``.
    """
    table = NormTable()
    for d in d_list:
        flow = NilpotentFlow.sine_chain(d)
        X = sample_points(d, n_samples)
        a = flow.superdiagonal(X)
        a0 = float(np.max(row_sum_norm(flow.grad(X))))
        for t in t_grid:
            norms = row_sum_norm(chain_gradient(a, t))
            bound = a0 / (1.0 - t * a0) if t * a0 < 1 else np.inf
            table.rows.append(NormRow(int(d), float(t), float(norms[0]), float(np.max(norms)), float(bound)))
    return table


@dataclass
class LagrangianCheck:
    points: np.ndarray
    mapped: np.ndarray
    det_defect: float
    tol: float = 1e-8

    @property
    def volume_preserved(self) -> bool:
        return self.det_defect < self.tol


def lagrangian_map(flow: NilpotentFlow, points, t: float, h: float = 1e-3, tol: float = 1e-8) -> LagrangianCheck:
    """``Phi_t(x) = x + t u0(x)`` with a fourth-order finite-difference Jacobian determinant."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    mapped = X + t * flow.u0(X)
    N, d = X.shape
    J = np.empty((N, d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        phi = [Y + t * flow.u0(Y) for Y in (X - 2 * e, X - e, X + e, X + 2 * e)]
        J[:, :, j] = (phi[0] - 8 * phi[1] + 8 * phi[2] - phi[3]) / (12 * h)
    det = np.linalg.det(J)
    return LagrangianCheck(X, mapped, float(np.max(np.abs(det - 1.0))), tol)


def lattice(d: int, n: int) -> np.ndarray:
    """``n^d`` points of the regular lattice on ``[0, 2 pi)^d``."""
    g = 2 * np.pi * np.arange(n) / n
    return np.stack(np.meshgrid(*([g] * d), indexing="ij"), axis=-1).reshape(-1, d)
