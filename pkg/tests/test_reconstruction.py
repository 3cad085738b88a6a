import csv
import xml.etree.ElementTree as ET

import mpmath
import pytest

from conftest import POLE1, curve, power_germs
from hpsys import (
    GaussianRational,
    HPSolution,
    export_zeros,
    hp_polynomials,
    infer_limit_and_rate,
    minor_ratio_candidates,
    ratio_eval,
    subset_sum_oracle,
)
from hpsys.reconstruction import (
    CandidateTable,
    DenominatorNearZero,
    NoUsableN,
    distance_to_segment,
    distinguished_pair,
    fit_rate,
    write_errors_csv,
    write_zeros_csv,
    write_zeros_svg,
)


def tiny_solution(polys, k=1, m=1, n=1):
    subsets = [(0,), (1,)] if m == 1 else None
    return HPSolution(n, k, m, subsets, [[GaussianRational(c) for c in p] for p in polys], "exact", None, 1)


def test_distinguished_pair():
    assert distinguished_pair(1) == ((1,), (0,))
    assert distinguished_pair(2) == ((0, 2), (0, 1))
    assert distinguished_pair(3) == ((0, 1, 3), (0, 1, 2))


def test_ratio_hand_solution():
    # q0 = z, q1 = 1: ratio q1/q0 at z = 2 is exactly 1/2
    sol = hp_polynomials(power_germs("sqrt"), 1, 1, backend="exact")
    assert ratio_eval(sol, (1,), (0,), GaussianRational(2)) == GaussianRational(1, 0) / 2


def test_ratio_control_and_scaling():
    sol = hp_polynomials(power_germs("cubic"), 5, 2, backend="exact")
    z = GaussianRational(2, 1)
    assert ratio_eval(sol, (0, 1), (0, 1), z) == 1
    J, I = distinguished_pair(2)
    assert ratio_eval(sol.scaled(7), J, I, z) == ratio_eval(sol, J, I, z)


def test_ratio_denominator_zero():
    sol = tiny_solution([[0, 1], [1, 0]])
    with pytest.raises(DenominatorNearZero):
        ratio_eval(sol, (1,), (0,), GaussianRational(0))
    num = hp_polynomials(power_germs("sqrt"), 1, 1, backend="numeric")
    with pytest.raises(DenominatorNearZero):
        ratio_eval(num, (1,), (0,), 0)


def test_sqrt_candidates():
    with mpmath.workprec(256):
        t = subset_sum_oracle(curve("sqrt"), "1/w", POLE1, 1, 2)
        r3 = 1 / mpmath.sqrt(3)
        assert sorted(float(v.real) for v in t.values) == pytest.approx([-float(r3), float(r3)])
        germ = t.values[t.germ_label]
        assert abs(germ - r3) < mpmath.mpf(2) ** -200


def test_cubic_pair_sums():
    with mpmath.workprec(256):
        t = subset_sum_oracle(curve("cubic"), "1/w", POLE1, 2, 2)
        vals = sorted((complex(v) for v in t.values), key=lambda c: (c.real, c.imag))
        expected = [complex(-0.522758, 0), complex(0.261379, -0.452722), complex(0.261379, 0.452722)]
        for a, b in zip(vals, expected):
            assert abs(a - b) < 1e-5
        # 1/w over the fiber w^3 = 7 sums to zero, so each pair sum is minus the third value
        singles = subset_sum_oracle(curve("cubic"), "1/w", POLE1, 1, 2).values
        for S, v in zip(t.subsets, t.values):
            (other,) = set(range(3)) - set(S)
            assert abs(v + singles[other]) < mpmath.mpf(2) ** -200


def test_minor_ratio_reduces_to_subset_sum():
    with mpmath.workprec(256):
        z = mpmath.mpc(1.5, -2.5)
        a = subset_sum_oracle(curve("skew_cubic"), "1/w", POLE1, 2, z)
        b = minor_ratio_candidates(curve("skew_cubic"), ["1/w", "1/w^2"], POLE1, (0, 2), (0, 1), 2, z)
        assert a.subsets == b.subsets
        for x, y in zip(a.values, b.values):
            assert abs(x - y) < mpmath.mpf(2) ** -200 * abs(x)


def test_candidate_nearest_and_separation():
    t = CandidateTable(0, 1, [(0,), (1,)], [mpmath.mpc(1), mpmath.mpc(-1)], ())
    assert t.separation == 2
    idx, dist = t.nearest(mpmath.mpc(0.9))
    assert idx == 0 and abs(dist - 0.1) < 1e-12


def test_pade_reconstruction():
    sols = [hp_polynomials(power_germs("sqrt"), n, 1, backend="exact") for n in range(1, 13)]
    with mpmath.workprec(256):
        t = subset_sum_oracle(curve("sqrt"), "1/w", POLE1, 1, 2)
        rep = infer_limit_and_rate(sols, t)
    assert rep.matched == (t.germ_label,) and rep.germ_in_subset
    assert not rep.ambiguous
    assert rep.rate == pytest.approx((2 + 3 ** 0.5) ** -2, rel=0.05)


def test_skew_cubic_pair_limit():
    # an asymmetric curve where the pair-sum limit is reached
    sols = [hp_polynomials(power_germs("skew_cubic"), n, 2, backend="exact") for n in range(1, 16)]
    with mpmath.workprec(256):
        t = subset_sum_oracle(curve("skew_cubic"), "1/w", POLE1, 2, 2)
        rep = infer_limit_and_rate(sols, t)
    assert rep.germ_in_subset
    assert rep.final_error < 1e-5
    assert rep.rate is not None and rep.rate < 1


def test_no_usable_n():
    sol = tiny_solution([[0, 1], [1, 0]])
    t = CandidateTable(mpmath.mpc(0), 1, [(0,), (1,)], [mpmath.mpc(1), mpmath.mpc(-1)], ())
    with pytest.raises(NoUsableN):
        infer_limit_and_rate([sol], t)


def test_fit_rate_exact_geometric():
    ns = list(range(1, 9))
    rho, r2 = fit_rate(ns, [3 * 0.25 ** n for n in ns])
    assert rho == pytest.approx(0.25) and r2 == pytest.approx(1.0)


def test_zeros_simple_cases():
    z = export_zeros(tiny_solution([[0, 1], [1, 0]]), (0,))
    assert len(z) == 1 and abs(z[0][0]) < 1e-60 and z[0][1] == 1
    assert export_zeros(tiny_solution([[0, 1], [1, 0]]), (1,)) == []


def test_zeros_double_root_clusters():
    sol = tiny_solution([[1, -2, 1], [1, 0, 0]], n=2)
    zeros = export_zeros(sol, (0,))
    assert len(zeros) == 1 and zeros[0][1] == 2
    assert abs(zeros[0][0] - 1) < 1e-30


def test_distance_to_segment():
    assert distance_to_segment(0.5) == 0
    assert distance_to_segment(2) == 1
    assert distance_to_segment(complex(0, 3)) == 3


def test_writers(tmp_path):
    sols = [hp_polynomials(power_germs("sqrt"), n, 1, backend="exact") for n in range(1, 8)]
    with mpmath.workprec(256):
        t = subset_sum_oracle(curve("sqrt"), "1/w", POLE1, 1, 2)
        rep = infer_limit_and_rate(sols, t)
    write_errors_csv(rep, tmp_path / "e.csv")
    rows = list(csv.reader(open(tmp_path / "e.csv")))
    assert rows[0] == ["n", "abs_error", "skipped"] and len(rows) == 8

    zeros = export_zeros(sols[-1], (0,))
    write_zeros_csv(zeros, tmp_path / "z.csv")
    rows = list(csv.DictReader(open(tmp_path / "z.csv")))
    assert sum(int(r["multiplicity"]) for r in rows) == 7

    write_zeros_svg(zeros, tmp_path / "z.svg", critical=[-1, 1])
    root = ET.parse(tmp_path / "z.svg").getroot()
    circles = root.findall("{http://www.w3.org/2000/svg}circle")
    assert len(circles) == len(zeros)
