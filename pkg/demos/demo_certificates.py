#!/usr/bin/env python3
"""Exercise the exact-arithmetic hypothesis checker.

Hypothesis-satisfying amplitudes are astronomically large (the minimum
slope must beat constants like 28(1+...+g^2)/eps^2 raised to the 4/3),
far beyond what a grid can represent.  The closed-form scaled family
A*f(x/lambda) makes the checks exact.  This script shows one parameter
set that satisfies every condition, one that fails, and the resulting
breaking-time bracket; it finishes with the combinatorial factorial-sum
bound used by the high-derivative induction.

Usage: python demos/demo_certificates.py
"""

from kmwave import certificates as cert


def show(title, fam, eps, g):
    rep = cert.check_hypotheses(fam, epsilon=eps, g=g)
    print(f"== {title} ==")
    print(f"  amplitude {fam.amplitude:.3g}, width {fam.width:.3g}, "
          f"eps {eps}, g {g:.3g} -> m0 = {rep.m0:.3g}")
    for name in ("a1", "c5", "d8", "b3"):
        c = rep.conditions[name]
        verdict = "ok  " if c.passed else "FAIL"
        print(f"  {name}: {verdict} lhs={c.lhs:.4g} rhs={c.rhs:.4g}")
    print(f"  overall: {rep.overall}")
    if rep.bracket:
        print(f"  breaking-time bracket: ({rep.bracket.t_lower:.4g}, "
              f"{rep.bracket.t_upper:.4g})")
    print()


def main():
    show("satisfiable parameter set",
         cert.ScaledFamily("neg_x_gaussian", amplitude=5e30, width=5e10),
         eps=0.015, g=6.3e4)
    show("under-powered data (fails the slope-strength conditions)",
         cert.ScaledFamily("neg_x_gaussian", amplitude=200.0, width=1.0),
         eps=0.015, g=10.0)

    print("== factorial-sum bound, exact for n in [3, 200] ==")
    rep = cert.verify_stirling_lemma(3, 200)
    rec = rep.to_record()
    print(f"  all hold: {rep.passed}; worst ratio {rec['max_ratio']:.6f} "
          f"(attained at n = 3)")


if __name__ == "__main__":
    main()
