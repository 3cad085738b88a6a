"""
Ratios of k = 2 polynomials and sums of branch values
=====================================================

On the curve (w - z)(w - 2z)(w + 3z) + 1 = 0 the three branches at infinity
behave like z, 2z and -3z.  With f = 1/w on the first branch and the power
tuple (f, f^2), the ratio P_{0,2} / P_{0,1} of the k = 2 polynomials
converges to a sum of two values of f over the fiber.  We print every
candidate pair sum and see which one the ratios pick.
"""

import mpmath

from hpsys import AlgebraicCurve, GermSpec, GermTuple, germ_of_expression, hp_polynomials
from hpsys import infer_limit_and_rate, subset_sum_oracle

curve = AlgebraicCurve.from_string("(w - z)*(w - 2*z)*(w + 3*z) + 1")
branch = GermSpec(pole_order=1, leading=1)
f = germ_of_expression(curve, branch, "1/w", 60)
germs = GermTuple.power_tuple(f, 2)

sols = [hp_polynomials(germs, n, 2, backend="exact") for n in range(1, 16)]

for z in (2, mpmath.mpc(2, 1), -3):
    with mpmath.workprec(256):
        table = subset_sum_oracle(curve, "1/w", branch, 2, z)
        report = infer_limit_and_rate(sols, table)
    print(f"z = {z}")
    for S, v in zip(table.subsets, table.values):
        mark = "<-" if S == report.matched else ""
        print(f"   branches {S}: {mpmath.nstr(v, 10)} {mark}")
    print(f"   germ branch {table.germ_label} in matched pair: {report.germ_in_subset}")
    print(f"   error at n=15: {mpmath.nstr(report.final_error, 3)}, rate {report.rate}")
