#!/usr/bin/env python3
"""Walk through the two singular operators and their calibration.

The dissipative and dispersive half-derivatives are defined twice over:
as Fourier multipliers (|xi|^{1/2} and i*sgn(xi)|xi|^{1/2}) and as
principal-value integrals with the kernel |x-y|^{-3/2}.  This script
shows the eigenfunction actions, then reproduces the constant 2*sqrt(2*pi)
linking the two definitions.

Usage: python demos/demo_operators.py [--quick]
"""

import argparse
import math

import numpy as np

from kmwave import operators as ops
from kmwave.grid import field_from_function, interpolate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="skip the full-size calibration")
    args = parser.parse_args()

    print("== eigenfunction actions on cos(kx), [-pi, pi) ==")
    L, n = np.pi, 256
    for k in (1, 4, 16):
        f = field_from_function(lambda x: np.cos(k * x), L, n)
        x = f.nodes()
        d = ops.apply(ops.lambda_half_op(L, n), f)
        h = ops.apply(ops.hilbert_lambda_half_op(L, n), f)
        err_d = np.max(np.abs(d.values - math.sqrt(k) * np.cos(k * x)))
        err_h = np.max(np.abs(h.values + math.sqrt(k) * np.sin(k * x)))
        print(f"  k={k:2d}: sqrt(k)*cos residual {err_d:.2e}, "
              f"-sqrt(k)*sin residual {err_h:.2e}")

    print("\n== quadrature oracle at x = 0 for the Gaussian probe ==")
    val = ops.pv_quadrature(ops.KernelKind.LAMBDA_HALF,
                            lambda y: np.exp(-y * y), 0.0, radius=40.0)
    print(f"  p.v. integral  : {val:.12f}")
    print(f"  4*Gamma(3/4)   : {4.0 * math.gamma(0.75):.12f}")

    if args.quick:
        print("\n(--quick: skipping calibration; the analytic constant is "
              f"2*sqrt(2*pi) = {2.0 * math.sqrt(2.0 * math.pi):.9f})")
        return

    print("\n== calibrating kernel constants on the oversized grid ==")
    for kind in ops.KernelKind:
        cal = ops.default_calibration(kind)
        print(f"  {kind.value:20s}: c = {cal.constant:.9f}, s = {cal.sign:+d}, "
              f"residual = {cal.residual:.2e}")
    print(f"  analytic value      : {2.0 * math.sqrt(2.0 * math.pi):.9f}")


if __name__ == "__main__":
    main()
