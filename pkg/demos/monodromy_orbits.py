"""
Monodromy of k-subsets
======================

For a few quartic curves we compute the sheet permutations around every
critical value and the orbits of the induced action on 2-subsets of
sheets.  A single orbit means the surface of unordered pairs is connected.
"""

from hpsys import AlgebraicCurve, ksubset_action, monodromy_generators, simple_branching_check

curves = {
    "sqrt(z) + sqrt(z-1)": "w^4 - 2*(2*z - 1)*w^2 + 1",
    "fourth root of z": "w^4 - z",
    "generic quartic": "w^4 - (1+i)*w^3 + 3*i*w^2 - z*(w^2 + (1+i)/3*w + i/3)",
    "w^4 = z(z-1)": "w^4 - z*(z - 1)",
}

for label, text in curves.items():
    gens = monodromy_generators(AlgebraicCurve.from_string(text))
    print(label)
    for cv, p in zip(gens.critical_values, gens.permutations):
        print(f"   around {complex(cv):.4g}: {p}")
    print("   at infinity:", gens.infinity_permutation)
    ok, _ = simple_branching_check(gens.profile())
    print("   simple branching:", ok)
    for k in range(1, gens.m + 1):
        act = ksubset_action(gens, k)
        print(f"   k={k}: orbit sizes {act.orbit_sizes}")
