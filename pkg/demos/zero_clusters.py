"""
Where the zeros go
==================

Zeros of the denominators P_0 for the Pade problem of 1/sqrt(z^2 - 1)
cluster on the segment [-1, 1].  We export them for a few n and write an
SVG picture of the last one next to the critical values.
"""

from pathlib import Path

from hpsys import AlgebraicCurve, GermSpec, GermTuple, export_zeros, germ_of_expression, hp_polynomials
from hpsys.reconstruction import curve_critical_points, distance_to_segment, write_zeros_svg

curve = AlgebraicCurve.from_string("w^2 - (z^2 - 1)")
f = germ_of_expression(curve, GermSpec(pole_order=1, leading=1), "1/w", 60)
germs = GermTuple((f,))

for n in (5, 10, 20):
    zeros = export_zeros(hp_polynomials(germs, n, 1, backend="exact"), (0,))
    worst = max(distance_to_segment(z) for z, _ in zeros)
    print(f"n={n}: {len(zeros)} zeros, farthest from [-1,1] at {worst:.2e}")

out = Path("demo_output")
out.mkdir(exist_ok=True)
write_zeros_svg(zeros, out / "zeros_n20.svg", curve_critical_points(curve), (-1.5, -1.5, 1.5, 1.5))
print("wrote", out / "zeros_n20.svg")
