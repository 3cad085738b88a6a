"""
Pade convergence for 1/sqrt(z^2 - 1)
====================================

The m = 1 system is ordinary Pade approximation at infinity.  We solve it
exactly for n = 1..20, watch the ratio converge at z = 2 and fit the
geometric rate.  The theoretical rate is (2 + sqrt(3))^-2 ~ 0.0718.
"""

import mpmath

from hpsys import AlgebraicCurve, GermSpec, GermTuple, germ_of_expression, hp_polynomials
from hpsys import infer_limit_and_rate, subset_sum_oracle

curve = AlgebraicCurve.from_string("w^2 - (z^2 - 1)")
branch = GermSpec(pole_order=1, leading=1)

# germ of f = 1/w at infinity, in t = 1/z
f = germ_of_expression(curve, branch, "1/w", 60)
print("f(t) =", f)

germs = GermTuple((f,))
sols = [hp_polynomials(germs, n, 1, backend="exact") for n in range(1, 21)]
print("P_0 for n = 3:", [str(c) for c in sols[2].poly((0,))])

with mpmath.workprec(256):
    table = subset_sum_oracle(curve, "1/w", branch, 1, 2)
    report = infer_limit_and_rate(sols, table)

for n, e in zip(report.ns, report.errors):
    print(f"n={n:2d}  |ratio - limit| = {mpmath.nstr(e, 5)}")

with mpmath.workprec(256):
    print("limit     :", mpmath.nstr(report.matched_value.real, 40))
    print("1/sqrt(3) :", mpmath.nstr(1 / mpmath.sqrt(3), 40))
print(f"rate {report.rate:.5f}  (R^2 = {report.r_squared:.6f}), expected {(2 + 3 ** 0.5) ** -2:.5f}")
