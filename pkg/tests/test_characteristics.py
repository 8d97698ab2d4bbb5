"""Particle tracking, slope extraction, nesting diagnostics."""

import numpy as np
import pytest

from kmwave import characteristics as chars
from kmwave.grid import GridField, field_from_function


def _const_provider(u):
    return lambda t: u


def test_seed_samples_field_values():
    u = field_from_function(lambda x: np.sin(x), np.pi, 128)
    xs = np.array([-1.0, 0.0, 0.5])
    b = chars.seed(u, xs)
    assert np.allclose(b.v0, np.sin(xs), atol=1e-12)
    assert np.allclose(b.v1, np.cos(xs), atol=1e-12)
    assert np.allclose(b.v2, -np.sin(xs), atol=1e-12)


def test_advance_uniform_field_translates():
    c = 0.7
    u = GridField(np.pi, np.full(64, c))
    b = chars.seed(u, np.array([0.0, 1.0]))
    b2 = chars.advance(b, _const_provider(u), 0.0, 0.5)
    assert np.allclose(b2.positions, [0.35, 1.35], atol=1e-13)
    assert np.allclose(b2.v0, c)


def test_advance_wraps_periodically():
    c = 1.0
    u = GridField(np.pi, np.full(64, c))
    b = chars.seed(u, np.array([3.0, 0.0]))
    b2 = chars.advance(b, _const_provider(u), 0.0, 1.0)
    # 3.0 + 1.0 wraps to 4.0 - 2*pi
    assert b2.positions[0] == pytest.approx(4.0 - 2 * np.pi, abs=1e-12)


def test_advance_rk4_order_on_frozen_field():
    # frozen u(x) = sin(x): dX/dt = sin(X) has solution
    # X(t) = 2*atan(tan(X0/2)*e^t)
    u = field_from_function(lambda x: np.sin(x), np.pi, 256)
    x0 = 0.3
    exact = 2.0 * np.arctan(np.tan(x0 / 2.0) * np.exp(0.5))
    errs = []
    for nsteps in (4, 8):
        b = chars.seed(u, np.array([x0, 1.0]))
        dt = 0.5 / nsteps
        for k in range(nsteps):
            b = chars.advance(b, _const_provider(u), k * dt, dt)
        errs.append(abs(b.positions[0] - exact))
    order = np.log2(errs[0] / errs[1])
    assert order > 3.5


def test_min_slope_refines_off_grid():
    # u = sin(x + 0.37): min slope -1 at x = pi - 0.37 exactly
    u = field_from_function(lambda x: np.sin(x + 0.37), np.pi, 64)
    m, x_at = chars.min_slope(u)
    assert m == pytest.approx(-1.0, abs=1e-10)
    target = np.pi - 0.37
    assert min(abs(x_at - target), abs(x_at + 2 * np.pi - target),
               abs(x_at - 2 * np.pi - target)) < 1e-5


def test_tracker_records_q_and_anomaly():
    u = field_from_function(lambda x: np.sin(x), np.pi, 64)
    tr = chars.SlopeTracker(m0=-1.0)
    chars.track(tr, 0.0, u)
    assert tr.q_values[0] == pytest.approx(1.0, abs=1e-10)
    assert not tr.anomaly
    with pytest.raises(ValueError):
        chars.SlopeTracker(m0=0.5)


def test_sigma_members_threshold():
    u = field_from_function(lambda x: np.sin(x), np.pi, 128)
    xs = np.linspace(-np.pi, np.pi, 64, endpoint=False)
    s = chars.sigma_members(u, gamma=1.0 / 3.0, m=-1.0, ref_positions=xs)
    # members satisfy cos(x) <= -2/3
    assert np.all(np.cos(xs[s.member_indices]) <= -2.0 / 3.0 + 1e-9)
    outside = np.setdiff1d(np.arange(64), s.member_indices)
    assert np.all(np.cos(xs[outside]) > -2.0 / 3.0 - 1e-9)


def test_nesting_violation_counting():
    sets = [np.array([0, 1]), np.array([0, 1, 2])]
    v1 = [np.array([-2.0, -2.0, -0.5]), np.array([-3.0, -3.0, -2.5])]
    thr = [-1.0, -2.0]
    # label 2 convincingly enters: absent by 0.5, present by 0.5
    assert chars.nesting_violations(sets, v1, thr, position_tol=0.0) == 1
    # with slope uncertainty |v2|*position_tol above half the margin the
    # membership is indeterminate and not counted
    v2 = [np.array([0.0, 0.0, 50.0]), np.array([0.0, 0.0, 50.0])]
    assert chars.nesting_violations(sets, v1, thr, position_tol=0.1,
                                    v2_series=v2) == 0
