"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the pytest terminal
summary, then asserts.
"""

import functools
import math
import random
from collections import Counter

import mpmath
import pytest

from conftest import ACCEPTANCE_LINES, POLE1, curve, power_germs
from hpsys import (
    GaussianRational,
    Path,
    continue_branch,
    critical_values,
    export_zeros,
    fiber_roots,
    germ_branch_at,
    hp_polynomials,
    infer_limit_and_rate,
    ksubset_action,
    minor_ratio_candidates,
    monodromy_generators,
    ratio_eval,
    simple_branching_check,
    subset_sum_oracle,
    track_permutation,
    verify_homogeneous_conditions,
    verify_order_conditions,
)
from hpsys.continuation import clearance_radius
from hpsys.monodromy import binomial, compose
from hpsys.reconstruction import distance_to_segment


def record(label: str, checks: dict):
    ok = all(v for v, _ in checks.values())
    parts = "; ".join(f"{name}={'ok' if v else 'FAIL'} ({detail})" for name, (v, detail) in checks.items())
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {label}: {parts}")
    failed = [name for name, (v, _) in checks.items() if not v]
    assert not failed, f"{label} failed: {failed}"


@functools.lru_cache(maxsize=None)
def solutions(name: str, k: int, n_max: int, backend: str = "exact"):
    germs = power_germs(name)
    return tuple(hp_polynomials(germs, n, k, backend=backend) for n in range(1, n_max + 1))


# -- 1. monodromy fixtures ----------------------------------------------------


def test_criterion_1_monodromy_fixtures():
    checks = {}
    gens = {name: monodromy_generators(curve(name))
            for name in ("sqrt_sum", "fourth_root", "simple_quartic", "cyclic_quartic")}

    sizes = sorted(ksubset_action(gens["sqrt_sum"], 2).orbit_sizes)
    checks["a sqrt-sum orbits"] = (sizes == [2, 2, 2], sizes)

    sizes = sorted(ksubset_action(gens["fourth_root"], 2).orbit_sizes)
    checks["b fourth-root orbits"] = (sizes == [2, 4], sizes)

    sizes = ksubset_action(gens["simple_quartic"], 2).orbit_sizes
    checks["c orbits"] = (sizes == [6], sizes)
    ok, witness = simple_branching_check(gens["simple_quartic"].profile())
    checks["c simple branching"] = (ok, f"witness={witness}")
    expected = [GaussianRational(0), GaussianRational(3, 6) / 5, GaussianRational(3, 6),
                GaussianRational(-3, 6) / 5, GaussianRational(-3, 6)]
    with mpmath.workprec(256):
        found = list(critical_values(curve("simple_quartic"), 256).values)
        exp = [e.to_mpc() for e in expected]
        worst = max(min(abs(f - e) for f in found) for e in exp) if len(found) == 5 else mpmath.inf
        checks["c critical values"] = (len(found) == 5 and worst < mpmath.mpf(10) ** -20,
                                       f"count={len(found)} worst={mpmath.nstr(worst, 3)}")

    sizes = ksubset_action(gens["cyclic_quartic"], 2).orbit_sizes
    checks["d cyclic orbits"] = (len(sizes) > 1, sizes)
    record("criterion 1 (monodromy fixtures)", checks)


# -- 2. order conditions ------------------------------------------------------

ORDER_SUITE = [("sqrt", 1, range(1, 7)), ("cubic", 1, range(1, 7)),
               ("cubic", 2, range(1, 7)), ("quartic", 2, range(1, 4))]


def test_criterion_2_order_conditions():
    checks = {}
    for name, k, ns in ORDER_SUITE:
        germs = power_germs(name)
        m = germs.m
        exact_ok = numeric_ok = dim_ok = True
        worst = 0.0
        for n in ns:
            sol = hp_polynomials(germs, n, k, backend="exact")
            order = verify_order_conditions(sol, germs)
            homog = verify_homogeneous_conditions(sol, germs)
            exact_ok &= order.all_zero and homog.all_zero
            dim_ok &= sol.nullspace_dim >= binomial(m, k - 1)

            num = hp_polynomials(germs, n, k, backend="numeric", prec_bits=256)
            ngerms = germs.to_numeric(256)
            tol = mpmath.mpf(2) ** -128
            for rep in (verify_order_conditions(num, ngerms), verify_homogeneous_conditions(num, ngerms)):
                numeric_ok &= rep.within(tol)
                if rep.scale:
                    worst = max(worst, float(rep.max_residual) / float(rep.scale))
            dim_ok &= num.nullspace_dim >= binomial(m, k - 1)
        label = f"m={m},k={k},n={ns.start}..{ns.stop - 1}"
        checks[f"{label} exact"] = (exact_ok, "all residuals zero" if exact_ok else "nonzero residual")
        checks[f"{label} numeric"] = (numeric_ok, f"max rel residual {worst:.1e}")
        checks[f"{label} nullspace"] = (dim_ok, f">= {binomial(m, k - 1)}")
    record("criterion 2 (order conditions)", checks)


# -- 3. Pade degeneration -----------------------------------------------------


def toeplitz_pade_denominator(c, n):
    """Denominator b of the [n/n] Pade form a/b of sum c_j t^j, with b_0 = 1.

    Solves the Toeplitz system sum_j b_j c_{i-j} = 0 for i = n+1..2n.
    """
    T = mpmath.matrix(n, n)
    rhs = mpmath.matrix(n, 1)
    for r, i in enumerate(range(n + 1, 2 * n + 1)):
        for j in range(1, n + 1):
            T[r, j - 1] = c[i - j] if i - j >= 0 else 0
        rhs[r] = -c[i]
    b = mpmath.lu_solve(T, rhs)
    return [mpmath.mpc(1)] + [b[j] for j in range(n)]


def test_criterion_3_pade():
    checks = {}
    sols = solutions("sqrt", 1, 20)
    with mpmath.workprec(256):
        table = subset_sum_oracle(curve("sqrt"), "1/w", POLE1, 1, 2)
        rep = infer_limit_and_rate(list(sols), table)
        target = 1 / mpmath.sqrt(3)
        checks["limit is 1/sqrt(3)"] = (abs(rep.matched_value - target) < mpmath.mpf(10) ** -30,
                                        mpmath.nstr(rep.matched_value, 12))
        err20 = abs(rep.ratios[-1] - target)
        checks["error at n=20"] = (err20 < 1e-8, mpmath.nstr(err20, 3))
    checks["rate"] = (rep.rate is not None and rep.rate <= 0.2, f"rho={rep.rate}")
    checks["fit"] = (rep.r_squared is not None and rep.r_squared >= 0.98, f"R2={rep.r_squared}")

    germ = power_germs("sqrt").f(1)
    worst = mpmath.mpf(0)
    with mpmath.workprec(512):
        c = [mpmath.mpc(germ.coeff(j).to_mpc()) for j in range(0, 41)]
        for sol in sols:
            n = sol.n
            b = toeplitz_pade_denominator(c, n)
            q0 = [mpmath.mpc(x.to_mpc()) for x in sol.poly((0,))]
            ref = b[::-1]
            top = max(range(len(ref)), key=lambda i: abs(ref[i]))
            scale = q0[top] / ref[top]
            big = max(abs(x) for x in ref)
            for a, r in zip(q0, ref):
                denom = abs(r) if abs(r) > big * mpmath.mpf(2) ** -200 else big
                worst = max(worst, abs(a - scale * r) / (abs(scale) * denom))
    checks["Toeplitz oracle"] = (worst < mpmath.mpf(2) ** -100, f"max coef rel err {mpmath.nstr(worst, 3)}")
    record("criterion 3 (Pade degeneration)", checks)


# -- 4. zeros near [-1, 1] ----------------------------------------------------


def test_criterion_4_zeros():
    checks = {}
    sols = {s.n: s for s in solutions("sqrt", 1, 25)}
    zeros20 = export_zeros(sols[20], (0,))
    far = max(distance_to_segment(z) for z, _ in zeros20)
    checks["n=20 within 0.02"] = (far < 0.02, f"max distance {far:.1e}, {len(zeros20)} zeros")
    for n in (10, 15, 20, 25):
        outside = sum(mult for z, mult in export_zeros(sols[n], (0,)) if distance_to_segment(z) > 0.1)
        checks[f"n={n} outside 0.1"] = (outside == 0, f"{outside} zeros")
    record("criterion 4 (zeros near [-1,1])", checks)


# -- 5. subset-sum limits on w^3 = z^3 - 1 --------------------------------------

POINTS = [GaussianRational(2), GaussianRational(2, 1), GaussianRational(-3)]


@pytest.mark.parametrize("k", [1, 2])
def test_criterion_5_subset_sum_limits(k):
    checks = {}
    c = curve("cubic")
    sols = list(solutions("cubic", k, 15))
    for z in POINTS:
        with mpmath.workprec(256):
            zz = z.to_mpc()
            table = subset_sum_oracle(c, "1/w", POLE1, k, zz)
            rep = infer_limit_and_rate(sols, table)
            label = f"z={z}"
            if k == 1:
                w = germ_branch_at(c, POLE1, zz)
                err = abs(rep.ratios[-1] - 1 / w)
                checks[f"{label} germ value"] = (err < 1e-8, f"err={mpmath.nstr(err, 3)}")
                continue
            final = rep.final_error
            checks[f"{label} germ in subset"] = (bool(rep.germ_in_subset), f"matched={rep.matched}")
            checks[f"{label} error n=15"] = (final is not None and final < 1e-6,
                                             f"err={mpmath.nstr(final, 3) if final is not None else None}")
            checks[f"{label} rate"] = (rep.rate is not None and rep.rate < 1 and len(rep.tail) >= 4,
                                       f"rho={rep.rate}, tail={len(rep.tail)}")
    record(f"criterion 5 (subset-sum limits, k={k})", checks)


# -- 6. oracle cross-check ----------------------------------------------------


def test_criterion_6_oracle_crosscheck():
    c = curve("cubic")
    rng = random.Random(20240611)
    worst = mpmath.mpf(0)
    count = 0
    with mpmath.workprec(256):
        for _ in range(10):
            r = rng.uniform(2, 5)
            theta = rng.uniform(0, 2 * math.pi)
            z = mpmath.mpc(r * math.cos(theta), r * math.sin(theta))
            sums = subset_sum_oracle(c, "1/w", POLE1, 2, z)
            minors = minor_ratio_candidates(c, ["1/w", "1/w^2"], POLE1, (0, 2), (0, 1), 2, z)
            for S, a, b in zip(sums.subsets, sums.values, minors.values):
                assert S in minors.subsets
                if a is None or b is None:
                    worst = mpmath.inf
                    continue
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
                count += 1
    record("criterion 6 (oracle cross-check)", {
        "agreement": (count == 30 and worst < mpmath.mpf(2) ** -100,
                      f"{count} candidates, max rel diff {mpmath.nstr(worst, 3)}"),
    })


# -- 7. invariances -----------------------------------------------------------


def test_criterion_7_invariances():
    checks = {}

    sol = solutions("cubic", 2, 6)[-1]
    z = GaussianRational(2, 1)
    J, I = (0, 2), (0, 1)
    base = ratio_eval(sol, J, I, z)
    scaled = [ratio_eval(sol.scaled(GaussianRational.coerce(cc)), J, I, z) for cc in (7, "3/5-2i")]
    checks["rescale"] = (all(s == base for s in scaled) and isinstance(base, GaussianRational),
                         "exact equality")

    mismatches = []
    for name in ("sqrt_sum", "fourth_root", "simple_quartic", "cyclic_quartic"):
        g1 = monodromy_generators(curve(name))
        g2 = monodromy_generators(curve(name), base_scale=2.0)
        for k in range(1, g1.m + 1):
            a = Counter(ksubset_action(g1, k).orbit_sizes)
            b = Counter(ksubset_action(g2, k).orbit_sizes)
            if a != b:
                mismatches.append((name, k))
    checks["base doubling"] = (not mismatches, f"mismatches={mismatches}")

    worst = mpmath.mpf(0)
    with mpmath.workprec(256):
        for name, a, b in (("cubic", 2, 1 + 2j), ("quartic", 3, -2 + 0.5j), ("skew_cubic", 4, 3j)):
            cc = curve(name)
            cvs = critical_values(cc, 256)
            r = clearance_radius(list(cvs.values), [a, b])
            out = Path.line(a, b, r, avoid=list(cvs.values))
            loop = out.then(out.reversed())
            for w0 in fiber_roots(cc, mpmath.mpc(a), 256).roots:
                w1 = continue_branch(cc, loop, w0, 256)
                worst = max(worst, abs(w1 - w0))
    checks["round trip"] = (worst < mpmath.mpf(2) ** -100, f"max drift {mpmath.nstr(worst, 3)}")

    bad = []
    for name in ("sqrt_sum", "fourth_root", "simple_quartic", "cyclic_quartic", "cubic"):
        g = monodromy_generators(curve(name))
        ident = tuple(range(g.m + 1))
        total = ident
        for p in g.permutations:
            total = compose(total, p)
        big = critical_values(curve(name), 256)
        cvs = list(big.values)
        rho = float(g.base_point.real) if hasattr(g.base_point, "real") else float(g.base_point)
        circle = Path.circle(0, rho, clearance=clearance_radius(cvs, [rho]))
        direct = tuple(track_permutation(curve(name), circle, 256))
        if g.product() != ident or total != direct:
            bad.append(name)
    checks["generator product"] = (not bad, f"failures={bad}")
    record("criterion 7 (invariances)", checks)
