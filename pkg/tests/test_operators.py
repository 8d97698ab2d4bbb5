"""Fractional operators: multiplier actions, quadrature oracle, calibration."""

import numpy as np
import pytest

from kmwave import operators as ops
from kmwave.errors import CalibrationError, ConfigurationError
from kmwave.grid import GridField, field_from_function


def test_eigenfunction_actions():
    # [TRIVIAL] cos(kx) is an eigenfunction pair: the dissipative half
    # derivative scales by sqrt(k); the dispersive one rotates to -sin
    L, n = np.pi, 256
    for k in (1, 3, 10):
        f = field_from_function(lambda x: np.cos(k * x), L, n)
        x = f.nodes()
        d = ops.apply(ops.lambda_half_op(L, n), f)
        assert np.max(np.abs(d.values - np.sqrt(k) * np.cos(k * x))) < 1e-12
        h = ops.apply(ops.hilbert_lambda_half_op(L, n, sign=1), f)
        assert np.max(np.abs(h.values + np.sqrt(k) * np.sin(k * x))) < 1e-12


def test_apply_rejects_mismatched_grid():
    op = ops.lambda_half_op(np.pi, 64)
    with pytest.raises(ConfigurationError):
        ops.apply(op, GridField(np.pi, np.zeros(128)))


def test_symbol_zero_mode_vanishes():
    for op in (ops.lambda_half_op(2.0, 64), ops.hilbert_lambda_half_op(2.0, 64),
               ops.combined_op(2.0, 64, nu=1.0, beta=0.5)):
        assert op.symbol_table[0] == 0.0


def test_operators_preserve_realness_and_mean():
    rng = np.random.default_rng(3)
    f = GridField(np.pi, rng.normal(size=64))
    for op in (ops.lambda_half_op(np.pi, 64),
               ops.hilbert_lambda_half_op(np.pi, 64),
               ops.combined_op(np.pi, 64, nu=2.0, beta=1.0)):
        out = ops.apply(op, f)
        assert np.all(np.isreal(out.values))
        scale = max(1.0, float(np.max(np.abs(out.values))))
        assert abs(np.mean(out.values)) < 1e-14 * scale


def test_quadrature_gaussian_closed_form():
    # [DERIVED] at x=0 the symmetrized integrand is 2(1-exp(-z^2))z^{-3/2};
    # integrating by parts gives 4*Gamma(3/4) = 4.901666809860711
    expected = 4.901666809860711
    got = ops.pv_quadrature(ops.KernelKind.LAMBDA_HALF,
                            lambda y: np.exp(-y * y), 0.0, radius=40.0, tol=1e-10)
    assert got == pytest.approx(expected, rel=1e-11)


def test_quadrature_antisymmetric_kernel_odd_behavior():
    # the sgn-weighted kernel annihilates even profiles at x=0
    got = ops.pv_quadrature(ops.KernelKind.HILBERT_LAMBDA_HALF,
                            lambda y: np.exp(-y * y), 0.0, radius=40.0, tol=1e-10)
    assert abs(got) < 1e-9


def test_calibrate_rejects_coarse_grid():
    with pytest.raises(CalibrationError):
        ops.calibrate(ops.KernelKind.LAMBDA_HALF, 10.0, 2048)
    with pytest.raises(CalibrationError):
        ops.calibrate(ops.KernelKind.LAMBDA_HALF, 100.0, 512)


def test_combined_symbol_structure():
    L, n = np.pi, 64
    table = ops.combined_symbol_table(L, n, nu=2.0, beta=0.5)
    lam = ops.lambda_half_op(L, n).symbol_table
    hil = ops.hilbert_lambda_half_op(L, n).symbol_table
    from kmwave.grid import frequencies
    xi = frequencies(L, n)
    airy = (1j * xi) ** 3
    airy[n // 2] = airy[n // 2].real
    ref = 2.0 * (lam + hil) + 0.5 * airy
    ref[n // 2] = ref[n // 2].real
    assert np.max(np.abs(table - ref)) < 1e-13
