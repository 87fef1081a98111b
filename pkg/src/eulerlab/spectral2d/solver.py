"""Pseudospectral 2D Euler / Navier-Stokes in vorticity form.

The torus solver evolves the mean-free vorticity together with the constant
mean velocity. The channel solver evolves a perturbation vorticity that
vanishes on the walls, advected by a prescribed Couette background
``u(y) = U + S (y - H/2)`` plus the perturbation velocity. The background has
constant vorticity ``-S``, which the sine basis cannot carry, so it is held
analytically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Field2D, Grid2D, SpectralOps, WarningLog

MEAN_TOL = 1e-10


class ResolutionExceeded(RuntimeError):
    """Raised when max|omega| passes the blow-up guard."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    nu: float = 0.0
    dealias: str = "two_thirds"
    end_time: float = 1.0
    snapshot_every: int = 10
    guard_factor: float = 1e3

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.nu < 0:
            raise ValueError("nu must be non-negative")
        if self.dealias not in ("two_thirds", "none"):
            raise ValueError(f"unknown dealias mode {self.dealias!r}")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


@dataclass
class EulerState:
    """Vorticity, time and harmonic (mean) velocity.

    ``shear`` is only meaningful on the channel, where the background flow is
    ``(mean_velocity[0] + shear * (y - H/2), 0)``.
    """

    omega: Field2D
    t: float = 0.0
    mean_velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    shear: float = 0.0

    def __post_init__(self):
        self.mean_velocity = np.asarray(self.mean_velocity, dtype=float).reshape(2)
        if not np.isfinite(self.t):
            raise ValueError("time must be finite")
        g = self.omega.grid
        if g.is_channel:
            if self.mean_velocity[1] != 0.0:
                raise ValueError("channel walls forbid a vertical mean velocity")
        elif self.shear != 0.0:
            raise ValueError("a background shear is only defined on the channel")

    @property
    def grid(self) -> Grid2D:
        return self.omega.grid

    def background_u(self) -> np.ndarray:
        """Background horizontal velocity as a column (rows x 1)."""
        g = self.grid
        y = g.y[:, None]
        if g.is_channel:
            return self.mean_velocity[0] + self.shear * (y - g.Ly / 2)
        return np.full_like(y, self.mean_velocity[0])

    def total_vorticity(self) -> np.ndarray:
        return self.omega.values - self.shear


def _check_vorticity(omega: Field2D, ops: SpectralOps):
    v = omega.values
    if not np.all(np.isfinite(v)):
        raise ValueError("vorticity contains NaN or inf")
    scale = max(1.0, float(np.max(np.abs(v))))
    if omega.grid.is_channel:
        if ops.sine_residual(v) > MEAN_TOL * scale:
            raise ValueError("channel vorticity must vanish on both walls (sine-representable)")
    elif abs(omega.mean()) > MEAN_TOL * scale:
        raise ValueError(f"torus vorticity must be mean-free, mean = {omega.mean():.3e}")


def biot_savart(omega: Field2D, ops: SpectralOps | None = None):
    """Invert ``Delta psi = omega`` and return ``(psi, (u1, u2))`` with ``u = grad_perp psi``.

    Parameters
    ----------
    omega : Field2D
        Mean-free on the torus, zero on both walls on the channel.
    ops : SpectralOps, optional
        Reused transform workspace.

    Returns
    -------
    psi : Field2D
    u : tuple of Field2D
        ``(-d_y psi, d_x psi)``. The mean velocity is not included.
    """
    ops = ops or SpectralOps(omega.grid)
    _check_vorticity(omega, ops)
    w_hat = ops.forward(omega.values)
    psi_hat = -w_hat * ops.inv_k2
    g = omega.grid
    psi = ops.inverse(psi_hat)
    u1 = -ops.inverse(ops.dy_mult * psi_hat)
    u2 = ops.inverse(ops.dx_mult * psi_hat)
    if g.is_channel:
        psi[0] = 0.0
        psi[-1] = 0.0
        u2[0] = 0.0
        u2[-1] = 0.0
    return Field2D(g, psi), (Field2D(g, u1), Field2D(g, u2))


class EulerSolver:
    """Single-threaded solver instance owning its transform workspace.

    Parameters
    ----------
    grid : Grid2D
    config : SolverConfig
    """

    def __init__(self, grid: Grid2D, config: SolverConfig):
        self.grid = grid
        self.config = config
        self.ops = SpectralOps(grid)
        self.warnings = WarningLog()
        self.mask = self.ops.dealias if config.dealias == "two_thirds" else np.ones_like(self.ops.dealias)
        k2 = self.ops.k2
        self._E = np.exp(-config.nu * k2 * config.dt)
        self._E2 = np.exp(-config.nu * k2 * config.dt / 2)
        self._max_speed = 0.0

    def _background(self, state: EulerState) -> np.ndarray:
        return self.ops.even_extend(np.broadcast_to(state.background_u(), self.grid.shape))

    def _velocity_hat(self, w_hat):
        psi_hat = -w_hat * self.ops.inv_k2
        return -self.ops.dy_mult * psi_hat, self.ops.dx_mult * psi_hat

    def _nonlinear(self, w_hat, ubg, vbg) -> np.ndarray:
        ops = self.ops
        w_hat = w_hat * self.mask
        u_hat, v_hat = self._velocity_hat(w_hat)
        u = ops.inverse_ext(u_hat) + ubg
        v = ops.inverse_ext(v_hat) + vbg
        wx = ops.inverse_ext(ops.dx_mult * w_hat)
        wy = ops.inverse_ext(ops.dy_mult * w_hat)
        self._max_speed = max(self._max_speed, float(np.sqrt(np.max(u * u + v * v))))
        adv = u * wx + v * wy
        if self.grid.is_channel:
            adv = ops.extend(_zero_walls(ops.restrict(adv)))
        out = -ops.forward_ext(adv) * self.mask
        out[0, 0] = 0.0
        return out

    def tendency(self, state: EulerState) -> Field2D:
        """``-(u + U) . grad omega + nu Delta omega`` with the dealiased product."""
        _check_vorticity(state.omega, self.ops)
        ubg = self._background(state)
        vbg = state.mean_velocity[1]
        w_hat = self.ops.forward(state.omega.values)
        self._max_speed = 0.0
        out = self._nonlinear(w_hat, ubg, vbg) - self.config.nu * self.ops.k2 * w_hat
        self._cfl_check(state.t)
        return Field2D(self.grid, self.ops.inverse(out))

    def _cfl_check(self, t):
        g = self.grid
        cfl = self.config.dt * self._max_speed / min(g.dx, g.dy)
        if cfl >= 1.0:
            self.warnings.add("cfl", t, f"dt*max|u|/min(dx,dy) = {cfl:.3f}")

    def _rk4(self, w_hat, ubg, vbg):
        dt = self.config.dt
        E, E2 = self._E, self._E2
        k1 = dt * self._nonlinear(w_hat, ubg, vbg)
        k2 = dt * self._nonlinear(E2 * (w_hat + k1 / 2), ubg, vbg)
        k3 = dt * self._nonlinear(E2 * w_hat + k2 / 2, ubg, vbg)
        k4 = dt * self._nonlinear(E * w_hat + E2 * k3, ubg, vbg)
        return E * w_hat + (E * k1 + 2 * E2 * (k2 + k3) + k4) / 6

    def step(self, state: EulerState) -> EulerState:
        """Advance one RK4 step, keeping the mean velocity untouched."""
        _check_vorticity(state.omega, self.ops)
        ubg = self._background(state)
        w_hat = self.ops.forward(state.omega.values)
        self._max_speed = 0.0
        w_hat = self._rk4(w_hat, ubg, state.mean_velocity[1])
        self._cfl_check(state.t)
        values = self.ops.inverse(w_hat)
        if self.grid.is_channel:
            values = _zero_walls(values)
        return replace(state, omega=Field2D(self.grid, values), t=state.t + self.config.dt)

    def run(self, state: EulerState, callback=None, n_steps: int | None = None):
        """Step until ``end_time`` (or ``n_steps``), calling ``callback(state, step)`` on snapshots.

        Returns
        -------
        state : EulerState
            Final state (or last good state on guard trip).
        status : str
            ``"ok"`` or ``"resolution exceeded"``.
        """
        cfg = self.config
        if n_steps is None:
            n_steps = int(round((cfg.end_time - state.t) / cfg.dt))
        limit = cfg.guard_factor * max(state.omega.max_abs(), 1e-300)
        ubg = self._background(state)
        vbg = state.mean_velocity[1]
        w_hat = self.ops.forward(state.omega.values)
        t0 = state.t
        if callback is not None:
            callback(state, 0)
        current = state
        for n in range(1, n_steps + 1):
            self._max_speed = 0.0
            w_hat = self._rk4(w_hat, ubg, vbg)
            t = t0 + n * cfg.dt
            self._cfl_check(t)
            if n % cfg.snapshot_every == 0 or n == n_steps:
                values = self.ops.inverse(w_hat)
                if self.grid.is_channel:
                    values = _zero_walls(values)
                if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > limit:
                    return current, "resolution exceeded"
                current = replace(state, omega=Field2D(self.grid, values), t=t)
                if callback is not None:
                    callback(current, n)
        return current, "ok"


def _zero_walls(values: np.ndarray) -> np.ndarray:
    values = values.copy()
    values[0] = 0.0
    values[-1] = 0.0
    return values


def tendency(state: EulerState, config: SolverConfig) -> Field2D:
    return EulerSolver(state.grid, config).tendency(state)


def step(state: EulerState, config: SolverConfig) -> EulerState:
    solver = EulerSolver(state.grid, config)
    new = solver.step(state)
    limit = config.guard_factor * max(state.omega.max_abs(), 1e-300)
    if new.omega.max_abs() > limit:
        raise ResolutionExceeded("resolution exceeded: max|omega| passed the guard", new)
    return new
