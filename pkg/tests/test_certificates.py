"""Hypothesis checks, brackets, combinatorial lemma, runtime bounds."""

import math

import numpy as np
import pytest

from kmwave import certificates as cert
from kmwave.errors import DomainError
from kmwave.grid import field_from_function


def test_profile_norm_tables():
    # [DERIVED] closed-form critical points of (-x e^{-x^2})^{(n)}:
    # sup|f| = sqrt(1/2)e^{-1/2}, sup|f'| = 1 (at 0), inf f' = -1
    p = cert.PROFILES["neg_x_gaussian"]
    assert p.sup_norm(0) == pytest.approx(math.sqrt(0.5) * math.exp(-0.5), rel=1e-12)
    assert p.sup_norm(1) == pytest.approx(1.0, rel=1e-12)
    assert p.inf_derivative() == pytest.approx(-1.0, rel=1e-12)
    # [DERIVED] ||x e^{-x^2}||_{L^2}^2 = sqrt(pi/2)/4
    assert p.l2_norm(0) == pytest.approx((math.sqrt(math.pi / 2.0) / 4.0) ** 0.5,
                                         rel=1e-10)
    g = cert.PROFILES["gaussian_bump"]
    assert g.sup_norm(0) == pytest.approx(1.0, rel=1e-12)
    assert g.l2_norm(0) == pytest.approx((math.pi / 2.0) ** 0.25, rel=1e-10)


def test_scaled_family_scaling_laws():
    fam = cert.ScaledFamily("neg_x_gaussian", amplitude=6.0, width=2.0)
    base = cert.ScaledFamily("neg_x_gaussian", amplitude=1.0, width=1.0)
    assert fam.min_slope() == pytest.approx(3.0 * base.min_slope(), rel=1e-12)
    assert fam.derivative_sup(2) == pytest.approx(6.0 / 4.0 * base.derivative_sup(2),
                                                  rel=1e-12)
    # grid cross-check of the closed-form H^3 norm
    f = field_from_function(lambda x: -6.0 * (x / 2.0) * np.exp(-(x / 2.0) ** 2),
                            40.0, 2048)
    from kmwave.grid import sobolev_norm
    assert fam.h3_norm() == pytest.approx(sobolev_norm(f, 3), rel=1e-8)


def test_bracket_formula_and_domain():
    b = cert.blowup_bracket(-100.0, 0.1)
    assert b.t_lower == pytest.approx(1.0 / 110.0, rel=1e-14)
    assert b.t_upper == pytest.approx(1.0 / 81.0, rel=1e-14)
    assert b.contains(0.0105)
    assert not b.contains(0.02)
    with pytest.raises(DomainError):
        cert.blowup_bracket(1.0, 0.1)
    with pytest.raises(DomainError):
        cert.blowup_bracket(-1.0, 1.5)


def test_check_hypotheses_satisfiable_family():
    # a parameter set chosen so that every condition passes: amplitude
    # 5e30, width 5e10 gives m0 = -1e20, and g = 6.3e4 clears the
    # derivative growth conditions
    fam = cert.ScaledFamily("neg_x_gaussian", amplitude=5e30, width=5e10)
    rep = cert.check_hypotheses(fam, epsilon=0.015, g=6.3e4)
    for name in ("a1", "c5", "d8", "b3"):
        assert rep.conditions[name].passed, name
    assert rep.overall
    assert rep.bracket is not None
    assert rep.bracket.t_lower == pytest.approx(-1.0 / (1.015 * rep.m0))


def test_check_hypotheses_rejects_bad_params():
    fam = cert.ScaledFamily("neg_x_gaussian", amplitude=1.0, width=1.0)
    with pytest.raises(DomainError):
        cert.check_hypotheses(fam, epsilon=0.015, g=0.5)
    with pytest.raises(DomainError):
        cert.check_hypotheses(fam, epsilon=1.5, g=2.0)


def test_epsilon_admissibility_gates_overall():
    fam = cert.ScaledFamily("neg_x_gaussian", amplitude=5e30, width=5e10)
    rep = cert.check_hypotheses(fam, epsilon=0.05, g=6.3e4)  # eps > 1/52
    assert not rep.params.epsilon_admissible
    assert not rep.overall


def test_grid_path_marks_unresolved_b3_indeterminate():
    # a field with spectral content at the grid limit cannot certify its
    # high derivatives
    f = field_from_function(lambda x: np.cos(24 * x), np.pi, 64)
    rep = cert.check_hypotheses(f, epsilon=0.015, g=10.0, n_max=6)
    assert rep.conditions["b3"].indeterminate
    assert not rep.conditions["b3"].passed


def test_stirling_lemma_small_range():
    rep = cert.verify_stirling_lemma(3, 30)
    assert rep.passed
    # n=3: single term C(3,2)*1*1 = 3 against (3/2) e * 3 * 2^4
    expected = 3.0 / (1.5 * math.e * 3.0 * 16.0)
    assert rep.ratios[0][1] == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        cert.verify_stirling_lemma(2, 10)


def test_kphi_bound_sample_fields():
    u = field_from_function(lambda x: np.sin(x) + 0.2 * np.cos(3 * x), np.pi, 256)
    for order in range(4):
        s = cert.kphi_bound_check(u, order, delta=1.0)
        assert s.holds_adjusted
        assert s.rhs > 0
    with pytest.raises(DomainError):
        cert.kphi_bound_check(u, 4, delta=1.0)
    with pytest.raises(DomainError):
        cert.kphi_bound_check(u, 1, delta=-1.0)


def test_g5_monitor_scaling():
    # forcing scales linearly in amplitude, the barrier quadratically, so
    # large amplitudes satisfy the monitor and small ones fail it
    L, n = np.pi, 256
    small = field_from_function(lambda x: 1.0 * np.sin(x), L, n)
    large = field_from_function(lambda x: 500.0 * np.sin(x), L, n)
    assert not cert.g5_monitor(small, m=-1.0, epsilon=0.1)
    assert cert.g5_monitor(large, m=-500.0, epsilon=0.1)


def test_riccati_residual_burgers_exact():
    # for the frozen profile u = sin(x), dm/dt = -m^2 at t=0 with nu=0
    u = field_from_function(np.sin, np.pi, 256)
    res = cert.riccati_residual(u, m=-1.0, dmdt=-1.0, nu=0.0)
    assert res < 1e-10
