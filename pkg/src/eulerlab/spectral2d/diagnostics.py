"""Scalar diagnostics of a 2D vorticity state."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .grid import Field2D, SpectralOps
from .solver import EulerState, biot_savart


@dataclass
class DiagnosticRecord:
    t: float
    energy: float
    enstrophy: float
    max_vorticity: float
    max_gradient: float
    holder: float
    bkm: float
    y_norm: float
    y_tail: float
    x_norm: float
    x_tail: float
    casimir: float

    def as_dict(self) -> dict:
        return asdict(self)


def lp_norm(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    a = np.abs(values)
    m = float(np.max(a))
    if m == 0.0:
        return 0.0
    return m * float(np.sum(weights * (a / m) ** p)) ** (1.0 / p)


def yudovich_norms(values: np.ndarray, weights: np.ndarray, P: int = 64):
    """Truncated ``Y`` and ``X`` norms and bounds on the neglected tails.

    ``Y_P = max_{2<=p<=P} |f|_p / log p`` and
    ``X_P = sum_{p=2}^{P} |f|_p / (p log(p)^2)``. Because
    ``|f|_p <= |M|^{1/p} |f|_inf``, the tails are bounded by
    ``m |f|_inf / log(P+1)`` and ``m |f|_inf / log(P)`` (integral test) with
    ``m = max(1, |M|^{1/(P+1)})``.
    """
    ps = np.arange(2, P + 1)
    norms = np.array([lp_norm(values, weights, p) for p in ps])
    logs = np.log(ps)
    y = float(np.max(norms / logs))
    x = float(np.sum(norms / (ps * logs**2)))
    area = float(np.sum(weights))
    sup = float(np.max(np.abs(values))) * max(1.0, area ** (1.0 / (P + 1)))
    return y, sup / np.log(P + 1), x, sup / np.log(P)


def holder_quotient(field: Field2D, alpha: float, n_pairs: int = 100_000, rng=None) -> float:
    """Grid Hölder quotient ``max |f(a)-f(b)| / |a-b|^alpha``.

    All pairs at dyadic offsets ``2^k`` grid cells (horizontal, vertical,
    diagonal) are included, plus ``n_pairs`` random pairs. Distances are
    periodic where the grid is.
    """
    g = field.grid
    f = field.values
    best = 0.0
    rows = f.shape[0]
    shifts = []
    k = 1
    while k <= max(rows, f.shape[1]) // 2:
        shifts += [(0, k), (k, 0), (k, k), (k, -k)]
        k *= 2
    for sy, sx in shifts:
        if sx > f.shape[1] // 2 or sy > (rows - 1 if g.is_channel else rows // 2):
            continue
        b = np.roll(f, -sx, axis=1)
        if g.is_channel:
            a, b = f[: rows - sy], b[sy:]
        else:
            a, b = f, np.roll(b, -sy, axis=0)
        d = np.hypot(sx * g.dx, sy * g.dy)
        best = max(best, float(np.max(np.abs(a - b))) / d**alpha)
    if n_pairs > 0:
        rng = rng if rng is not None else np.random.Generator(np.random.Philox(0))
        cols = f.shape[1]
        i1 = rng.integers(0, rows, n_pairs)
        j1 = rng.integers(0, cols, n_pairs)
        i2 = rng.integers(0, rows, n_pairs)
        j2 = rng.integers(0, cols, n_pairs)
        ddx = np.abs(j1 - j2) * g.dx
        ddx = np.minimum(ddx, g.Lx - ddx)
        ddy = np.abs(i1 - i2) * g.dy
        if not g.is_channel:
            ddy = np.minimum(ddy, g.Ly - ddy)
        dist = np.hypot(ddx, ddy)
        ok = dist > 0
        if np.any(ok):
            q = np.abs(f[i1, j1] - f[i2, j2])[ok] / dist[ok] ** alpha
            best = max(best, float(np.max(q)))
    return best


def holder_norm(field: Field2D, alpha: float, **kwargs) -> float:
    """``|f|_inf + [f]_alpha`` on the grid."""
    return field.max_abs() + holder_quotient(field, alpha, **kwargs)


def casimir(values: np.ndarray, weights: np.ndarray, H) -> float:
    """``int H(omega)`` with ``H`` a callable or a ``(nodes, table)`` lookup pair."""
    if callable(H):
        h = H(values)
    else:
        nodes, table = H
        h = np.interp(values, nodes, table)
    return float(np.sum(weights * h))


class DiagnosticsTracker:
    """Produce :class:`DiagnosticRecord` objects and accumulate the BKM integral.

    Parameters
    ----------
    alpha : float
        Hölder exponent for the grid quotient.
    P : int
        Truncation of the ``Y`` / ``X`` norms.
    H : callable or (nodes, table), optional
        Casimir density. Defaults to ``s**4``.
    n_pairs : int
        Random pairs for the Hölder quotient.
    rng : numpy Generator, optional
    """

    def __init__(self, alpha=0.5, P=64, H=None, n_pairs=100_000, rng=None):
        self.alpha = alpha
        self.P = P
        self.H = H if H is not None else (lambda s: s**4)
        self.n_pairs = n_pairs
        self.rng = rng if rng is not None else np.random.Generator(np.random.Philox(0))
        self.bkm = 0.0
        self._last = None
        self.records: list[DiagnosticRecord] = []
        self._ops = None

    def __call__(self, state: EulerState) -> DiagnosticRecord:
        g = state.grid
        if self._ops is None or self._ops.grid != g:
            self._ops = SpectralOps(g)
        ops = self._ops
        w = g.weights
        omega_tot = state.total_vorticity()
        _, (u1, u2) = biot_savart(state.omega, ops)
        ut = u1.values + state.background_u()
        vt = u2.values + state.mean_velocity[1]
        energy = 0.5 * float(np.sum(w * (ut**2 + vt**2)))
        enstrophy = 0.5 * float(np.sum(w * omega_tot**2))
        wmax = float(np.max(np.abs(omega_tot)))
        gx, gy = ops.gradient(state.omega.values)
        gmax = float(np.sqrt(np.max(gx**2 + gy**2)))
        if self._last is not None:
            t0, m0 = self._last
            self.bkm += 0.5 * (state.t - t0) * (m0 + wmax)
        self._last = (state.t, wmax)
        tot = Field2D(g, omega_tot)
        hq = holder_quotient(tot, self.alpha, self.n_pairs, self.rng)
        y, yt, x, xt = yudovich_norms(omega_tot, w, self.P)
        rec = DiagnosticRecord(
            t=float(state.t), energy=energy, enstrophy=enstrophy, max_vorticity=wmax,
            max_gradient=gmax, holder=hq, bkm=self.bkm, y_norm=y, y_tail=yt, x_norm=x,
            x_tail=xt, casimir=casimir(omega_tot, w, self.H),
        )
        self.records.append(rec)
        return rec


def diagnostics(state: EulerState, **kwargs) -> DiagnosticRecord:
    """One-off diagnostics for a single state (BKM integral is zero)."""
    return DiagnosticsTracker(**kwargs)(state)


def holder_envelope(inf0: float, holder0: float, alpha: float, c: float, t):
    """Double-exponential envelope ``inf0 * (holder0/inf0) ** exp(c inf0 t / alpha)``."""
    t = np.asarray(t, dtype=float)
    ratio = max(holder0 / inf0, 1.0)
    return inf0 * ratio ** np.exp(c * inf0 * t / alpha)


ENVELOPE_C_MAX = 10.0


def fit_envelope(times, holder_norms, inf0: float, alpha: float, c_max: float = ENVELOPE_C_MAX):
    """Fit one envelope constant for a whole run.

    Returns
    -------
    c : float
        Smallest constant (floored at ``1e-3``, with a 10% margin on the
        exponent) for which every sample lies below the envelope.
    ok : bool
        Whether ``c <= c_max``: the growth is explained by an order-one
        constant. Growth faster than double exponential drives ``c`` up
        without bound as the run gets longer.
    margin : float
        ``min(envelope / measured)`` over all samples.
    """
    times = np.asarray(times, dtype=float)
    hn = np.asarray(holder_norms, dtype=float)
    h0 = hn[0]
    ratio = max(h0 / inf0, 1.0 + 1e-12)
    cs = [np.log(np.log(h / inf0) / np.log(ratio)) * alpha / (inf0 * t)
          for t, h in zip(times[1:], hn[1:]) if t > 0 and h > inf0 * ratio]
    c = max(1.1 * max(cs) if cs else 0.0, 1e-3)
    env = np.maximum(holder_envelope(inf0, h0, alpha, c, times), h0)
    margin = float(np.min(env / np.maximum(hn, 1e-300)))
    return float(c), bool(c <= c_max and margin >= 1.0 - 1e-9), margin
