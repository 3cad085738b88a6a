import json

import mpmath
import pytest
import sympy

from conftest import POLE1, curve
from hpsys import AlgebraicCurve, CurveError, NotSquareFree, Path, RationalExpression
from hpsys.continuation import (
    DegenerateFiber,
    clearance_radius,
    continue_branch,
    critical_values,
    fiber_roots,
    germ_branch_at,
    track_permutation,
)
from hpsys.gaussian import GaussianRational
from hpsys.monodromy import cycle_type
from hpsys.polynomial import load_curve_file

Z, W = sympy.symbols("z w")


def sympy_critical_values(c: AlgebraicCurve):
    expr = c.to_sympy()
    disc = sympy.Poly(sympy.discriminant(expr, W), Z)
    lead = sympy.Poly(expr, W).LC()
    roots = set(sympy.Poly(disc.sqf_part() if disc.degree() > 0 else disc, Z).nroots(n=60))
    if sympy.Poly(lead, Z).degree() > 0:
        roots |= set(sympy.Poly(lead, Z).nroots(n=60))
    return [mpmath.mpc(str(sympy.re(r)), str(sympy.im(r))) for r in roots]


@pytest.mark.parametrize("name", ["sqrt", "cubic", "quartic", "skew_cubic", "sqrt_sum",
                                  "fourth_root", "simple_quartic", "cyclic_quartic", "cyclic_quintic"])
def test_critical_values_match_discriminant(name):
    c = curve(name)
    with mpmath.workprec(256):
        ours = list(critical_values(c, 256).values)
        ref = sympy_critical_values(c)
        assert len(ours) == len(ref)
        for r in ref:
            assert min(abs(r - v) for v in ours) < mpmath.mpf(10) ** -50


@pytest.mark.parametrize("name,branched", [("sqrt", False), ("cubic", False), ("fourth_root", True),
                                           ("cyclic_quartic", True), ("cyclic_quintic", True)])
def test_infinity_flag(name, branched):
    assert critical_values(curve(name), 256).infinite is branched


def test_parse_and_degrees():
    c = AlgebraicCurve.from_string("w^3 - (z^3 - 1)")
    assert c.m == 2 and c.degree_w == 3 and c.degree_z == 3
    assert c.is_pure_power()
    assert not curve("skew_cubic").is_pure_power()


def test_not_square_free():
    with pytest.raises(NotSquareFree):
        AlgebraicCurve.from_string("(w^2 - z)^2")


def test_gaussian_coefficients_parse():
    c = AlgebraicCurve.from_string("w^2 - (1+2*i)/3*z")
    assert c.terms[(1, 0)] == GaussianRational(-1, -2) / 3


def test_curve_json_round_trip(tmp_path):
    c = curve("simple_quartic")
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(c.to_dict()))
    loaded, spec = load_curve_file(path)
    assert loaded == c and spec is None


def test_fixture_files_have_branches(fixtures_dir):
    _, spec = load_curve_file(fixtures_dir / "cubic.json")
    assert spec == POLE1
    _, spec = load_curve_file(fixtures_dir / "fourth_root.json")
    assert spec is None


def test_rational_expression():
    e = RationalExpression.parse("z/w - 1")
    assert complex(e(4, 2)) == 1
    assert complex(e.power(2)(4, 2)) == 1


def test_fiber_roots_polished():
    c = curve("cubic")
    with mpmath.workprec(256):
        fib = fiber_roots(c, mpmath.mpc(2, 1), 256)
        z = mpmath.mpc(2, 1)
        for w in fib.roots:
            assert abs(w ** 3 - z ** 3 + 1) < mpmath.mpf(2) ** -120


def test_fiber_at_critical_value():
    with pytest.raises(DegenerateFiber):
        fiber_roots(curve("sqrt"), 1, 256)


def square_root_loop(center, radius):
    return Path.circle(center, radius, clearance=radius / 2)


def test_loop_around_square_root_branch_point():
    # w^2 = z: one turn around 0 maps sqrt(z) to -sqrt(z)
    c = AlgebraicCurve.from_string("w^2 - z")
    with mpmath.workprec(256):
        w1 = continue_branch(c, square_root_loop(0, 1), 1, 256)
        assert abs(w1 + 1) < mpmath.mpf(2) ** -200
        w2 = continue_branch(c, Path.circle(0, 1, clearance=0.5, turns=2), 1, 256)
        assert abs(w2 - 1) < mpmath.mpf(2) ** -200


def test_loop_around_fourth_root():
    # w^4 = z: one counterclockwise turn multiplies w by i
    c = curve("fourth_root")
    with mpmath.workprec(256):
        w1 = continue_branch(c, Path.circle(0, 1, clearance=0.5), 1, 256)
        assert abs(w1 - mpmath.mpc(0, 1)) < mpmath.mpf(2) ** -200
        assert cycle_type(track_permutation(c, Path.circle(0, 1, clearance=0.5), 256)) == (4,)


def test_germ_branch_value_sqrt():
    # the branch w ~ z of w^2 = z^2 - 1, continued in from infinity
    with mpmath.workprec(256):
        for z, expected in [(2, mpmath.sqrt(3)), (-2, -mpmath.sqrt(3)),
                            (mpmath.mpc(0, 1), mpmath.mpc(0, mpmath.sqrt(2)))]:
            w = germ_branch_at(curve("sqrt"), POLE1, z, 256)
            assert abs(w - expected) < mpmath.mpf(2) ** -200


def test_round_trip_with_detour():
    # the straight line from -3 to 3 passes through both branch points
    c = curve("sqrt")
    with mpmath.workprec(256):
        cvs = list(critical_values(c, 256).values)
        r = clearance_radius(cvs, [-3, 3])
        out = Path.line(-3, 3, r, avoid=cvs)
        start = -mpmath.sqrt(8)
        w_end = continue_branch(c, out, start, 256)
        assert abs(abs(w_end) - mpmath.sqrt(8)) < mpmath.mpf(2) ** -200
        back = continue_branch(c, out.reversed(), w_end, 256)
        assert abs(back - start) < mpmath.mpf(2) ** -100


def test_big_circle_is_trivial_for_sqrt():
    c = curve("sqrt")
    perm = track_permutation(c, Path.circle(0, 4, clearance=1.0), 256)
    assert perm == [0, 1]


def test_curve_error_on_bad_input():
    with pytest.raises((CurveError, ValueError, sympy.SympifyError)):
        AlgebraicCurve.from_string("z + 1")
