"""Lagrangian particle tracking and slope diagnostics.

Particles carry the solution value v0 = u(X(t), t) and the slope
v1 = u_x(X(t), t) along trajectories dX/dt = u(X, t); v0 and v1 are
re-sampled from the Eulerian field after each advance rather than
integrated, so they agree with the field by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridField, derivative, interpolate


@dataclass
class CharacteristicBundle:
    labels: np.ndarray      # initial positions x
    positions: np.ndarray   # current X(t; x), reduced mod period
    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        for name in ("labels", "positions", "v0", "v1", "v2"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.labels.size < 2:
            raise ValueError("bundle needs at least 2 particles")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("particle positions must be finite")


@dataclass
class SlopeTracker:
    """Time series of the global minimum slope m(t) and the ratio q(t)."""

    m0: float
    times: list = field(default_factory=list)
    m_values: list = field(default_factory=list)
    argmin_x: list = field(default_factory=list)
    q_values: list = field(default_factory=list)
    anomaly: bool = False

    def __post_init__(self):
        if self.m0 >= 0:
            raise ValueError("tracker requires m0 < 0")


@dataclass
class SigmaSet:
    """Labels whose slope is within factor (1 - gamma) of the minimum."""

    gamma: float
    member_indices: np.ndarray


def seed(u0: GridField, xs: np.ndarray) -> CharacteristicBundle:
    xs = np.asarray(xs, dtype=float)
    return CharacteristicBundle(
        labels=xs.copy(),
        positions=xs.copy(),
        v0=interpolate(u0, xs),
        v1=interpolate(derivative(u0, 1), xs),
        v2=interpolate(derivative(u0, 2), xs),
    )


def _reduce(positions: np.ndarray, L: float) -> np.ndarray:
    return np.mod(positions + L, 2.0 * L) - L


def advance(bundle: CharacteristicBundle, u_provider, t0: float, dt: float) -> CharacteristicBundle:
    """One classical RK4 step of dX/dt = u(X, t) for every particle.

    ``u_provider(t)`` must return the Eulerian field at t0, t0+dt/2 and
    t0+dt.  v0, v1 are re-sampled from the field at t0+dt.
    """
    X = bundle.positions
    u_mid = u_provider(t0 + 0.5 * dt)
    u_end = u_provider(t0 + dt)
    k1 = interpolate(u_provider(t0), X)
    k2 = interpolate(u_mid, X + 0.5 * dt * k1)
    k3 = interpolate(u_mid, X + 0.5 * dt * k2)
    k4 = interpolate(u_end, X + dt * k3)
    X_new = _reduce(X + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), u_end.half_length)
    return CharacteristicBundle(
        labels=bundle.labels,
        positions=X_new,
        v0=interpolate(u_end, X_new),
        v1=interpolate(derivative(u_end, 1), X_new),
        v2=interpolate(derivative(u_end, 2), X_new),
    )


def min_slope(u: GridField) -> tuple[float, float]:
    """Global minimum of u_x with one Newton refinement off the grid.

    Newton iterates on the critical-point equation u_xx = 0 using the
    trigonometric interpolant; falls back to the grid minimum when the
    refinement is unreliable.
    """
    w = derivative(u, 1)
    k = int(np.argmin(w.values))
    x0 = float(u.nodes()[k])
    m_grid = float(w.values[k])
    w1 = derivative(u, 2)
    w2 = derivative(u, 3)
    slope = float(interpolate(w1, x0)[0])
    curv = float(interpolate(w2, x0)[0])
    if curv > 0.0:
        x1 = x0 - slope / curv
        if abs(x1 - x0) <= u.dx:
            m_ref = float(interpolate(w, x1)[0])
            if m_ref <= m_grid:
                return m_ref, x1
    return m_grid, x0


def track(tracker: SlopeTracker, t: float, u: GridField) -> SlopeTracker:
    """Append (t, m(t), argmin, q = m0/m) to the tracker."""
    m, x_at = min_slope(u)
    if m >= 0.0:
        tracker.anomaly = True
    tracker.times.append(float(t))
    tracker.m_values.append(m)
    tracker.argmin_x.append(x_at)
    tracker.q_values.append(tracker.m0 / m if m < 0.0 else np.inf)
    return tracker


def sigma_members(u: GridField, gamma: float, m: float,
                  ref_positions: np.ndarray) -> SigmaSet:
    """Indices of positions where u_x <= (1 - gamma) * m."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if m >= 0.0:
        raise ValueError("m must be negative")
    v1 = interpolate(derivative(u, 1), np.asarray(ref_positions, dtype=float))
    members = np.nonzero(v1 <= (1.0 - gamma) * m)[0]
    return SigmaSet(gamma, members)


def nesting_violations(member_sets: list[np.ndarray], v1_series: list[np.ndarray],
                       thresholds: list[float], position_tol: float,
                       v2_series: list[np.ndarray] | None = None,
                       gamma: float = 1.0 / 3.0, abs_tol: float = 1e-9) -> int:
    """Count strict violations of monotone nesting across sampled times.

    A label entering the set at time j after being absent at time i < j is
    a violation only when both memberships are determinate.  A particle
    position known to within ``position_tol`` carries a slope uncertainty
    of |v2| * position_tol + abs_tol; membership is determinate when that
    uncertainty is below half the set's defining margin gamma*|m| and the
    slope clears the threshold by more than the uncertainty.  Without
    ``v2_series`` the tolerance degenerates to ``abs_tol``.
    """
    # threshold = (1-gamma)*m, so the defining margin gamma*|m| equals
    # gamma/(1-gamma) times |threshold|
    margin_factor = 0.5 * gamma / (1.0 - gamma)

    def tol(i, idx):
        base = abs_tol
        if v2_series is not None:
            base += abs(v2_series[i][idx]) * position_tol
        return base

    count = 0
    for i in range(len(member_sets) - 1):
        earlier = set(member_sets[i].tolist())
        for j in range(i + 1, len(member_sets)):
            for idx in member_sets[j].tolist():
                if idx in earlier:
                    continue
                t_i, t_j = tol(i, idx), tol(j, idx)
                determinate = (t_i <= margin_factor * abs(thresholds[i])
                               and t_j <= margin_factor * abs(thresholds[j]))
                absent_before = v1_series[i][idx] > thresholds[i] + t_i
                present_after = v1_series[j][idx] < thresholds[j] - t_j
                if determinate and absent_before and present_after:
                    count += 1
    return count
