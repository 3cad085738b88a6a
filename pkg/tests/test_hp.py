import json

import mpmath
import pytest

from conftest import POLE1, curve, power_germs
from hpsys import (
    GaussianRational,
    GermTuple,
    HPSolution,
    TruncatedSeries,
    TruncationTooShort,
    assemble_system,
    germ_of_expression,
    hp_polynomials,
    solve_hp,
    verify_homogeneous_conditions,
    verify_order_conditions,
)
from hpsys.hp import ksubsets, type_i_residual, type_ii_residuals
from hpsys.monodromy import binomial


@pytest.mark.parametrize("name,n,k,shape", [
    ("sqrt", 1, 1, (3, 4)),
    ("cubic", 2, 1, (14, 15)),
    ("quartic", 1, 2, (15, 18)),
])
def test_system_shape(name, n, k, shape):
    assert assemble_system(power_germs(name), n, k).shape == shape


@pytest.mark.parametrize("name,k,n", [("sqrt", 1, 3), ("cubic", 1, 4), ("cubic", 2, 4), ("quartic", 2, 2),
                                      ("quartic", 3, 2), ("quartic", 1, 3)])
def test_more_unknowns_than_equations(name, k, n):
    system = assemble_system(power_germs(name), n, k)
    m = system.m
    D = (m + 1 - k) * n
    assert system.shape == (binomial(m, k) * (k * n + D + 1), binomial(m + 1, k) * (D + 1))
    rows, cols = system.shape
    assert cols - rows == binomial(m, k - 1)


def test_hand_solution_m1_n1():
    # f = t/sqrt(1-t^2) = t + t^3/2 + ...: q0 = z, q1 = 1 gives q0 f - q1 = O(t^2)
    sol = hp_polynomials(power_germs("sqrt"), 1, 1, backend="exact")
    assert sol.poly((0,)) == [0, 1]
    assert sol.poly((1,)) == [1, 0]


def test_truncation_too_short():
    f = germ_of_expression(curve("cubic"), POLE1, "1/w", 5)
    germs = GermTuple.power_tuple(f, 2)
    with pytest.raises(TruncationTooShort):
        assemble_system(germs, 2, 1)


def test_invalid_k():
    with pytest.raises(ValueError):
        assemble_system(power_germs("cubic"), 2, 3)


def test_germ_tuple_validation():
    exact = TruncatedSeries.from_coeffs([0, 1], order=5)
    with pytest.raises(ValueError):
        GermTuple((exact, exact.to_numeric(128)))
    with pytest.raises(ValueError):
        GermTuple((TruncatedSeries.from_coeffs([1], valuation=-1, order=5),))


@pytest.mark.parametrize("name,k,n", [("sqrt", 1, 5), ("cubic", 1, 5), ("cubic", 2, 5), ("quartic", 2, 3),
                                      ("quartic", 3, 3), ("skew_cubic", 2, 5)])
def test_exact_residuals_vanish(name, k, n):
    germs = power_germs(name)
    sol = hp_polynomials(germs, n, k, backend="exact")
    assert verify_order_conditions(sol, germs).all_zero
    assert verify_homogeneous_conditions(sol, germs).all_zero
    assert sol.nullspace_dim >= binomial(germs.m, k - 1)


def test_perturbation_is_detected():
    germs = power_germs("cubic")
    sol = hp_polynomials(germs, 4, 2, backend="numeric")
    bumped = [list(p) for p in sol.polys]
    with mpmath.workprec(256):
        bumped[1][2] += mpmath.mpf("1e-3")
    bad = HPSolution(sol.n, sol.k, sol.m, sol.subsets, bumped, sol.backend, sol.prec_bits, sol.nullspace_dim)
    rep = verify_order_conditions(bad, germs)
    assert float(rep.max_residual) > 1e-4
    assert not rep.within(2.0 ** -128)


def test_type_ii_degeneration():
    germs = power_germs("cubic")
    sol = hp_polynomials(germs, 5, 1, backend="exact")
    assert all(r == 0 for r in type_ii_residuals(sol, germs))


def test_type_i_degeneration():
    germs = power_germs("quartic")
    sol = hp_polynomials(germs, 3, 3, backend="exact")
    assert type_i_residual(sol, germs) == 0
    num = hp_polynomials(germs, 3, 3, backend="numeric")
    assert type_i_residual(num, germs) < mpmath.mpf(2) ** -200


def test_exact_and_numeric_agree_on_system():
    # numeric vector satisfies the exact system to high relative accuracy
    germs = power_germs("cubic")
    system = assemble_system(germs, 5, 2)
    num = solve_hp(system, backend="numeric", prec_bits=256)
    A = system.to_dense()
    with mpmath.workprec(256):
        v = [c for p in num.polys for c in p]
        norm = max(abs(c) for c in v)
        worst = max(abs(mpmath.fsum(a.to_mpc() * x for a, x in zip(row, v))) for row in A)
        assert worst / norm < mpmath.mpf(2) ** -64


def test_exact_and_numeric_same_ratio_when_unique():
    germs = power_germs("sqrt")
    ex = hp_polynomials(germs, 6, 1, backend="exact")
    nu = hp_polynomials(germs, 6, 1, backend="numeric")
    assert ex.nullspace_dim == nu.nullspace_dim == 1
    with mpmath.workprec(256):
        a = [c.to_mpc() for p in ex.polys for c in p]
        b = [c for p in nu.polys for c in p]
        i = max(range(len(a)), key=lambda j: abs(a[j]))
        s = b[i] / a[i]
        assert max(abs(x * s - y) for x, y in zip(a, b)) < mpmath.mpf(2) ** -200


def test_scaling_keeps_residual_zero():
    germs = power_germs("cubic")
    sol = hp_polynomials(germs, 4, 2, backend="exact")
    scaled = sol.scaled(GaussianRational(3, -2))
    assert verify_order_conditions(scaled, germs).all_zero


def test_solution_json_round_trip():
    germs = power_germs("cubic")
    for backend in ("exact", "numeric"):
        sol = hp_polynomials(germs, 3, 2, backend=backend)
        back = HPSolution.from_dict(json.loads(json.dumps(sol.to_dict())))
        if backend == "exact":
            assert back.polys == sol.polys
        else:
            with mpmath.workprec(256):
                err = max(abs(a - b) for p, q in zip(sol.polys, back.polys) for a, b in zip(p, q))
                assert err < mpmath.mpf(2) ** -240


def test_germ_tuple_json_round_trip():
    germs = GermTuple.power_tuple(germ_of_expression(curve("cubic"), POLE1, "1/w", 12), 2)
    assert GermTuple.from_dict(json.loads(json.dumps(germs.to_dict()))) == germs


def test_general_tuple_matches_power_tuple():
    c = curve("cubic")
    general = GermTuple.from_expressions(c, POLE1, ["1/w", "1/w^2"], 30)
    power = GermTuple.power_tuple(germ_of_expression(c, POLE1, "1/w", 30), 2)
    for g, p in zip(general.germs, power.germs):
        assert g.coefficients(0, 30) == p.coefficients(0, 30)


def test_ksubsets_order():
    assert ksubsets(2, 2) == [(0, 1), (0, 2), (1, 2)]
