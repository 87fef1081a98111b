"""Self-similar profiles of ``f_t = f^2 + eps N(f)`` near ``F0 = 1/(1+z)``.

A profile ``F`` with ``f = (1/(1-t)) F(x/(1-t)^(1+delta))`` solves
``F + (1+delta) z F' = F^2 + eps N(F)``. Both solvers write ``F = F0 + g``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .. import io
from .core import (
    DEFAULT_GRID,
    F0,
    HalfLineFn,
    Nonlinearity,
    invert_L,
    over_s2,
    working_norm,
)


class NonContraction(RuntimeError):
    """The fixed-point map failed to contract; ``lipschitz`` is the observed ratio."""

    def __init__(self, lipschitz: float, iteration: int):
        super().__init__(f"iteration is not contracting: ratio {lipschitz:.3g} at step {iteration}")
        self.lipschitz = lipschitz


class Stagnation(RuntimeError):
    """The fake-time flow stopped decreasing above tolerance."""

    def __init__(self, residual: float, steps: int):
        super().__init__(f"fake-time flow stagnated at |g_tau| = {residual:.3e} after {steps} steps")
        self.residual = residual


@dataclass
class ProfileResult:
    g: HalfLineFn
    eps: float
    delta: float
    mu: float
    lam: float
    residual: float
    iterations: int
    method: str

    @property
    def profile(self) -> HalfLineFn:
        """``F0 + g``."""
        return F0(self.g.grid) + self.g

    def normalized(self) -> HalfLineFn:
        """``(F0 + g)/(1 + mu)``, the profile with unit time scale."""
        return self.profile * (1.0 / (1.0 + self.mu))

    def metadata(self) -> dict:
        return {"eps": self.eps, "delta_eps": self.delta, "mu": self.mu, "lambda": self.lam,
                "residual": self.residual, "iterations": self.iterations, "method": self.method,
                "jet": list(self.normalized().jet)}


def zdz_F0(grid) -> HalfLineFn:
    """``z F0' = -z/(1+z)^2``."""
    z = grid.z
    return HalfLineFn(grid, -z / (1 + z) ** 2, (0.0, -1.0))


def profile_residual(F: HalfLineFn, delta: float, N: Nonlinearity | None, eps: float) -> float:
    """``max |F + (1+delta) z F' - F^2 - eps N(F)|`` over the grid."""
    r = F + (1.0 + delta) * F.zdz() - F * F
    if N is not None and eps:
        r = r - eps * N(F)
    return r.max_abs()


def fixed_point_profile(N: Nonlinearity, eps: float, grid=DEFAULT_GRID, tol: float = 1e-10,
                        max_iter: int = 200, eps_max: float = 0.05) -> ProfileResult:
    """Iterate ``g <- L^-1(-delta z F0' - delta z g' + g^2 + eps N(F0 + g))`` from ``g = 0``.

    Each iterate picks ``delta`` so that the right side satisfies
    ``h'(0) + 2 h(0) = 0``; the inverse is normalized by ``g'(0) = 0``.
    Convergence is measured in :func:`working_norm`.
    """
    if abs(eps) > eps_max:
        raise ValueError(f"|eps| = {abs(eps)} exceeds eps_max = {eps_max}")
    f0 = F0(grid)
    zf0 = zdz_F0(grid)
    g = HalfLineFn.zeros(grid)
    delta = 0.0
    growth = 0
    prev = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        q = g * g
        if eps:
            q = q + eps * N(f0 + g)
        delta = -(q.jet[1] + 2.0 * q.jet[0]) / (1.0 - g.jet[1])
        h = q - delta * zf0 - delta * g.zdz()
        g_new = invert_L(h)
        step = working_norm(g_new - g)
        g = g_new
        if step < tol:
            break
        growth = growth + 1 if step > prev else 0
        if growth >= 5:
            raise NonContraction(step / prev, it)
        prev = step
    res = profile_residual(f0 + g, delta, N, eps)
    return ProfileResult(g, eps, delta, 0.0, delta, res, it, "fixed_point")


def compactness_profile(N: Nonlinearity, eps: float, grid=DEFAULT_GRID, dtau: float = 0.5,
                        tol: float = 1e-10, max_steps: int = 5000, patience: int = 200,
                        refresh: int = 10) -> ProfileResult:
    """Fake-time flow ``g_tau + L(g) = RHS(g; mu, lambda)`` with implicit Euler.

    With ``kappa = mu + lambda + mu lambda`` the right side is
    ``-mu F0 - kappa z F0' + g^2 - mu g - kappa z g' + eps N(F0 + g)``;
    ``mu`` and ``lambda`` are reset every step so that it vanishes to second
    order at ``z = 0``, which keeps ``g`` in the weighted space. The flow is
    advanced for ``G = g/s^2``, ``s = z/(1+z)``, in which ``L`` becomes
    ``G + z G'``. Steps are linearly implicit: the Jacobian of the right side
    is refreshed every ``refresh`` steps. The
    profile ``(F0 + g)/(1 + mu)`` then solves the profile equation with
    ``delta = lambda``.
    """
    f0 = F0(grid)
    zf0 = zdz_F0(grid)
    z = grid.z
    s2 = (z / (1 + z)) ** 2
    # in G = g / s^2 the operator is G + G_x: damped transport from the left
    A = np.eye(grid.size) + grid.D

    def forcing(G):
        g = HalfLineFn(grid, s2 * G, (0.0, 0.0))
        n = eps * N(f0 + g) if eps else HalfLineFn.zeros(grid)
        mu = n.jet[0]
        lam = -(2.0 * mu + n.jet[1]) / (1.0 + mu)
        kappa = mu + lam + mu * lam
        rhs = (g * g - mu * f0 - kappa * zf0 - mu * g - kappa * g.zdz() + n).values
        return over_s2(rhs, grid), mu, lam

    def jacobian(G):
        # the forcing is quadratic in G, so central differences are exact
        h = 1e-4
        cols = np.empty((grid.size, grid.size))
        for j in range(grid.size):
            e = np.zeros(grid.size)
            e[j] = h
            cols[:, j] = (forcing(G + e)[0] - forcing(G - e)[0]) / (2 * h)
        return cols

    G = np.zeros(grid.size)
    g = HalfLineFn.zeros(grid)
    mu = lam = 0.0
    best = np.inf
    since_best = 0
    rate = np.inf
    steps = 0
    lu = None
    for steps in range(1, max_steps + 1):
        R, mu, lam = forcing(G)
        if lu is None or (steps - 1) % refresh == 0:
            M = np.eye(grid.size) + dtau * (A - (jacobian(G) if eps else 0.0))
            # inflow node: G' + G = R without transport
            M[0] = 0.0
            M[0, 0] = 1.0 + dtau
            lu = lu_factor(M)
        b = dtau * (R - A @ G)
        b[0] = dtau * (R[0] - G[0])
        G_new = G + lu_solve(lu, b)
        new = HalfLineFn(grid, s2 * G_new, (0.0, 0.0))
        rate = working_norm(new - g) / dtau
        g, G = new, G_new
        if not np.isfinite(rate):
            raise Stagnation(rate, steps)
        if rate < tol:
            break
        if rate < best * (1 - 1e-3):
            best, since_best = rate, 0
        else:
            since_best += 1
            if since_best > patience:
                raise Stagnation(rate, steps)
    else:
        raise Stagnation(rate, steps)
    res = profile_residual((f0 + g) * (1.0 / (1.0 + mu)), lam, N, eps)
    return ProfileResult(g, eps, lam, mu, lam, res, steps, "compactness")


def write_profile(stem, result: ProfileResult):
    """``<stem>.csv`` with columns ``z, value`` and ``<stem>.json`` with the parameters."""
    F = result.normalized()
    rows = [(z, v) for z, v in zip(F.z, F.values)]
    io.write_csv(f"{stem}.csv", ["z", "value"], rows)
    io.write_json(f"{stem}.json", result.metadata())


def read_profile(stem, grid=DEFAULT_GRID) -> tuple[HalfLineFn, dict]:
    _, rows = io.read_csv(f"{stem}.csv")
    with open(f"{stem}.json") as fh:
        meta = json.load(fh)
    return HalfLineFn(grid, rows[:, 1], tuple(meta["jet"])), meta


__all__ = [
    "NonContraction",
    "ProfileResult",
    "Stagnation",
    "compactness_profile",
    "fixed_point_profile",
    "profile_residual",
    "read_profile",
    "write_profile",
]
