"""Time integration of u_t + alpha*u*u_x + beta*u_xxx + nu*(dissipative
+ dispersive half-derivative) = 0.

The linear symbol is treated exactly inside an ETDRK4 scheme; the
quadratic term is evaluated pseudo-spectrally in conservative form
-alpha*(u^2/2)_x with two-thirds dealiasing, so the mean mode is
conserved to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import characteristics as chars
from .grid import (GridField, dealias_mask, derivative, frequencies,
                   interpolate, spectral_tail_fraction)
from .operators import combined_op, combined_symbol_table, apply as op_apply


@dataclass(frozen=True)
class EquationSpec:
    """Coefficients (alpha, beta, nu) of the equation family."""

    alpha: float = 1.0
    beta: float = 0.0
    nu: float = 1.0

    def __post_init__(self):
        if self.alpha == 0.0 and self.beta == 0.0 and self.nu == 0.0:
            raise ValueError("at least one of alpha, beta, nu must be nonzero")
        if self.nu < 0.0:
            raise ValueError("nu must be >= 0")


@dataclass
class SolverState:
    t: float
    u: GridField
    dt: float = 0.0
    step_count: int = 0


@dataclass
class StepControl:
    cfl: float = 0.5
    dt_min: float = 1e-10
    dt_max: float = 1e-2
    slope_safety: float = 0.1
    sample_stride: int = 1
    breaking_ratio: float = 100.0
    resolution_fraction: float = 0.01
    strict_resolution: bool = False
    snapshot_stride: int = 0
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.dt_min <= 0 or self.dt_max < self.dt_min:
            raise ValueError("need 0 < dt_min <= dt_max")
        if self.slope_safety <= 0:
            raise ValueError("slope_safety must be positive")


@dataclass
class MonitorSet:
    g5: bool = False
    g5_epsilon: float = 0.1
    b7: bool = False
    b7_delta: float = 1.0
    nesting: bool = False
    nesting_gamma: float = 1.0 / 3.0
    nesting_labels: np.ndarray | None = None
    q_monotone: bool = False


@dataclass
class Trajectory:
    m0: float
    times: list = field(default_factory=list)
    m: list = field(default_factory=list)
    q: list = field(default_factory=list)
    argmin_x: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    g5_ok: list = field(default_factory=list)
    b7_ok: list = field(default_factory=list)
    forcing_at_argmin: list = field(default_factory=list)
    member_sets: list = field(default_factory=list)
    v1_series: list = field(default_factory=list)
    v2_series: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    terminated_by_breaking: bool = False
    near_breaking_signal: bool = False
    resolution_warning: bool = False
    resolution_time: float | None = None
    final_state: SolverState | None = None

    def riccati_residuals(self) -> np.ndarray:
        """Centered-difference residual of dm/dt + m^2 + forcing, per sample."""
        t = np.asarray(self.times)
        m = np.asarray(self.m)
        f = np.asarray(self.forcing_at_argmin)
        res = np.full(t.size, np.nan)
        for i in range(1, t.size - 1):
            dmdt = (m[i + 1] - m[i - 1]) / (t[i + 1] - t[i - 1])
            if m[i] != 0.0:
                res[i] = abs(dmdt + m[i] ** 2 + f[i]) / m[i] ** 2
        return res

    def g5_held_throughout(self) -> bool:
        return len(self.g5_ok) > 0 and all(self.g5_ok)


@dataclass
class BreakingReport:
    verdict: str                      # "breaking" or "no_breaking"
    t_est: float | None = None
    fit_residual: float | None = None
    t_last: float | None = None
    m_last: float | None = None
    fallback_estimate: float | None = None

    def to_record(self) -> dict:
        return {
            "verdict": self.verdict,
            "t_est": self.t_est,
            "fit_residual": self.fit_residual,
            "t_last": self.t_last,
            "m_last": self.m_last,
            "fallback_estimate": self.fallback_estimate,
        }


class ETDRK4:
    """Exponential time-differencing RK4 stepper for one grid/equation pair.

    phi-function coefficients are evaluated by averaging over a unit
    circle around each lam*dt (mean-value property of entire functions),
    which avoids cancellation for small |lam*dt|.
    """

    def __init__(self, half_length: float, n_points: int, spec: EquationSpec,
                 sign: int = 1, n_contour: int = 32):
        self.half_length = half_length
        self.n_points = n_points
        self.spec = spec
        self.lam = -combined_symbol_table(half_length, n_points, spec.nu,
                                         spec.beta, sign)
        xi = frequencies(half_length, n_points)
        xi_odd = xi.copy()
        xi_odd[n_points // 2] = 0.0
        self._deriv = 1j * xi_odd * dealias_mask(n_points)
        roots = np.exp(2j * np.pi * (np.arange(n_contour) + 0.5) / n_contour)
        self._roots = roots
        self._cached_dt = None
        self._coeffs = None

    def _prepare(self, dt: float):
        if self._cached_dt == dt:
            return
        lr = dt * self.lam[:, None] + self._roots[None, :]
        elr = np.exp(lr)
        e_half = np.exp(0.5 * dt * self.lam)
        e_full = np.exp(dt * self.lam)
        q = dt * np.mean((np.exp(lr / 2.0) - 1.0) / lr, axis=1)
        f1 = dt * np.mean((-4.0 - lr + elr * (4.0 - 3.0 * lr + lr ** 2)) / lr ** 3, axis=1)
        f2 = dt * np.mean((2.0 + lr + elr * (lr - 2.0)) / lr ** 3, axis=1)
        f3 = dt * np.mean((-4.0 - 3.0 * lr - lr ** 2 + elr * (4.0 - lr)) / lr ** 3, axis=1)
        self._coeffs = (e_half, e_full, q, f1, f2, f3)
        self._cached_dt = dt

    def _nonlinear(self, vhat: np.ndarray) -> np.ndarray:
        if self.spec.alpha == 0.0:
            return np.zeros_like(vhat)
        u = np.fft.ifft(vhat).real
        return -self.spec.alpha * self._deriv * np.fft.fft(0.5 * u * u)

    def step_values(self, values: np.ndarray, dt: float) -> np.ndarray:
        self._prepare(dt)
        e_half, e_full, q, f1, f2, f3 = self._coeffs
        v = np.fft.fft(values)
        n_v = self._nonlinear(v)
        a = e_half * v + q * n_v
        n_a = self._nonlinear(a)
        b = e_half * v + q * n_a
        n_b = self._nonlinear(b)
        c = e_half * a + q * (2.0 * n_b - n_v)
        n_c = self._nonlinear(c)
        v_new = e_full * v + f1 * n_v + 2.0 * f2 * (n_a + n_b) + f3 * n_c
        return np.fft.ifft(v_new).real


def linear_exact(u: GridField, spec: EquationSpec, t: float, sign: int = 1) -> GridField:
    """Exact solution of the linear part: each mode times exp(-t*symbol)."""
    table = combined_symbol_table(u.half_length, u.n_points, spec.nu, spec.beta, sign)
    vals = np.fft.ifft(np.fft.fft(u.values) * np.exp(-t * table)).real
    tag = None if u.time_tag is None else u.time_tag + t
    return u.with_values(vals, tag)


def step(state: SolverState, spec: EquationSpec, dt: float, sign: int = 1,
         stepper: ETDRK4 | None = None) -> SolverState:
    """One ETDRK4 step; raises no error on overflow, caller checks finiteness."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if stepper is None:
        stepper = ETDRK4(state.u.half_length, state.u.n_points, spec, sign)
    vals = stepper.step_values(state.u.values, dt)
    u_new = state.u.with_values(vals, state.t + dt)
    return SolverState(state.t + dt, u_new, dt, state.step_count + 1)


def choose_dt(state: SolverState, spec: EquationSpec, control: StepControl) -> float:
    """CFL-style bound from |u| plus a slope-resolution bound from |u_x|."""
    eps = np.finfo(float).eps
    u_max = float(np.max(np.abs(state.u.values)))
    ux_max = float(np.max(np.abs(derivative(state.u, 1).values)))
    advect = state.u.dx / (abs(spec.alpha) * u_max + eps)
    slope = control.slope_safety / ux_max if ux_max > 0 else np.inf
    dt = control.cfl * min(advect, slope)
    return float(np.clip(dt, control.dt_min, control.dt_max))


def _b7_ok(u: GridField, delta: float, forcing_op, nu: float) -> bool:
    from .certificates import KPHI_CONSTANT  # local import avoids cycle
    ux = derivative(u, 1)
    lhs = float(np.max(np.abs(op_apply(forcing_op, ux).values)))
    v1 = float(np.max(np.abs(ux.values)))
    v2 = float(np.max(np.abs(derivative(u, 2).values)))
    rhs = KPHI_CONSTANT * (v1 / np.sqrt(delta) + v2 * np.sqrt(delta))
    return lhs <= rhs


def integrate(state: SolverState, spec: EquationSpec, t_end: float,
              monitors: MonitorSet | None = None,
              control: StepControl | None = None,
              sign: int = 1) -> Trajectory:
    """Advance until t_end, breaking, or dt exhaustion, recording diagnostics."""
    monitors = monitors or MonitorSet()
    control = control or StepControl()
    L, n = state.u.half_length, state.u.n_points
    stepper = ETDRK4(L, n, spec, sign)
    nonlocal_op = combined_op(L, n, nu=1.0, beta=0.0, sign=sign) if spec.nu > 0 else None

    m0, _ = chars.min_slope(state.u)
    traj = Trajectory(m0=m0)

    bundle = None
    if monitors.nesting:
        labels = monitors.nesting_labels
        if labels is None:
            labels = np.linspace(-L, L, 129, endpoint=False)
        bundle = chars.seed(state.u, np.asarray(labels, dtype=float))

    def forcing_field(u: GridField) -> GridField | None:
        if nonlocal_op is None:
            return None
        return op_apply(nonlocal_op, derivative(u, 1))

    def record(st: SolverState, dt_used: float):
        u = st.u
        m, x_at = chars.min_slope(u)
        traj.times.append(st.t)
        traj.m.append(m)
        traj.argmin_x.append(x_at)
        traj.q.append(m0 / m if (m0 < 0 and m < 0) else np.nan)
        traj.mass.append(float(np.mean(u.values)))
        traj.l2.append(float(np.sqrt(2.0 * L * np.mean(u.values ** 2))))
        traj.dt.append(dt_used)
        ff = forcing_field(u)
        if ff is not None:
            forcing_sup = spec.nu * float(np.max(np.abs(ff.values)))
            forcing_min = spec.nu * float(interpolate(ff, x_at)[0])
        else:
            forcing_sup, forcing_min = 0.0, 0.0
        traj.forcing_at_argmin.append(forcing_min)
        if monitors.g5:
            traj.g5_ok.append(bool(forcing_sup <= monitors.g5_epsilon ** 2 * m * m))
        if monitors.b7:
            if nonlocal_op is not None:
                traj.b7_ok.append(_b7_ok(u, monitors.b7_delta, nonlocal_op, spec.nu))
            else:
                traj.b7_ok.append(True)
        if monitors.nesting and bundle is not None and m < 0:
            thr = (1.0 - monitors.nesting_gamma) * m
            traj.member_sets.append(np.nonzero(bundle.v1 <= thr)[0])
            traj.v1_series.append(bundle.v1.copy())
            traj.v2_series.append(bundle.v2.copy())
            traj.thresholds.append(thr)
        if control.snapshot_stride > 0 and (
                len(traj.times) - 1) % control.snapshot_stride == 0:
            traj.snapshots.append((st.t, u.values.copy()))

    record(state, 0.0)
    m_prev = m0

    while state.t < t_end and state.step_count < control.max_steps:
        dt = min(choose_dt(state, spec, control), t_end - state.t)
        vals = stepper.step_values(state.u.values, dt)
        if not np.all(np.isfinite(vals)):
            traj.terminated_by_breaking = True
            break
        u_old = state.u
        u_new = u_old.with_values(vals, state.t + dt)
        if bundle is not None:
            def provider(tt, t0=state.t, a=u_old, b=u_new, h=dt):
                w = 0.0 if h == 0 else (tt - t0) / h
                return a.with_values((1.0 - w) * a.values + w * b.values)
            bundle = chars.advance(bundle, provider, state.t, dt)
        state = SolverState(state.t + dt, u_new, dt, state.step_count + 1)

        sampled = state.step_count % control.sample_stride == 0 or state.t >= t_end
        if sampled:
            record(state, dt)
        m_now = traj.m[-1] if sampled else chars.min_slope(state.u)[0]

        if not traj.resolution_warning and \
                spectral_tail_fraction(state.u, band_limit=n // 3) \
                > control.resolution_fraction:
            traj.resolution_warning = True
            traj.resolution_time = state.t
            if control.strict_resolution:
                break
        if m0 < 0 and m_now <= control.breaking_ratio * m0:
            traj.terminated_by_breaking = True
            if not sampled:
                record(state, dt)
            break
        if dt <= control.dt_min and m_now < m_prev:
            traj.near_breaking_signal = True
            traj.terminated_by_breaking = True
            if not sampled:
                record(state, dt)
            break
        m_prev = m_now

    traj.final_state = state
    return traj


def detect_breaking(traj: Trajectory, min_samples: int = 10,
                    window_ratio: float = 5.0) -> BreakingReport:
    """Estimate the breaking time by extrapolating the Riccati law.

    Fits -1/m(t) ~ T - t over the tail window where m(t) <= window_ratio
    * m(0); the fitted zero crossing is the estimate.  Samples recorded
    after the resolution warning fired are excluded: once the slope
    outruns the grid, m(t) saturates and would bias the fit late.
    """
    t = np.asarray(traj.times)
    m = np.asarray(traj.m)
    neg = m < 0
    if traj.resolution_time is not None:
        reliable = t <= traj.resolution_time
        if np.count_nonzero(neg & reliable) >= min_samples:
            neg &= reliable
    if np.count_nonzero(neg) < min_samples:
        return BreakingReport(verdict="no_breaking")
    m0 = traj.m0
    window = neg & (m <= window_ratio * m0)
    if np.count_nonzero(window) < 2:
        return BreakingReport(verdict="no_breaking")
    tw = t[window]
    yw = -1.0 / m[window]
    coeffs = np.polyfit(tw, yw, 1)
    slope, intercept = coeffs[0], coeffs[1]
    fit_residual = float(np.sqrt(np.mean((np.polyval(coeffs, tw) - yw) ** 2)))
    t_last = float(tw[-1])
    m_last = float(m[window][-1])
    fallback = t_last - 1.0 / m_last
    if slope >= 0.0:
        return BreakingReport(verdict="no_breaking", t_last=t_last, m_last=m_last,
                              fallback_estimate=fallback)
    t_est = float(-intercept / slope)
    return BreakingReport(verdict="breaking", t_est=t_est,
                          fit_residual=fit_residual, t_last=t_last,
                          m_last=m_last, fallback_estimate=fallback)
