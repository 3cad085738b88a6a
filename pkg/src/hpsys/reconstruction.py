"""Ratio approximants, branch-value candidates, rate fits and zero export.

The limit of P_J / P_I is not known in advance: it is one of finitely many
candidates built from the branch values at z (minor ratios, or subset sums
when f_j = f^j).  The report matches the largest-n ratio to the nearest
candidate and follows the error against that fixed candidate.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .continuation import DEFAULT_PREC, critical_values, fiber_roots, germ_branch_at
from .gaussian import GaussianRational
from .hp import HPSolution
from .polynomial import AlgebraicCurve, RationalExpression
from .roots import aberth, canonical_order, cluster_roots


class DenominatorNearZero(ArithmeticError):
    pass


class SingularMinor(ArithmeticError):
    pass


class NoUsableN(ValueError):
    pass


def distinguished_pair(k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """J = {0..k-2, k} and I = {0..k-1}, whose ratio tends to a sum of k branch values."""
    return tuple(range(k - 1)) + (k,), tuple(range(k))


def _as_mpc(x):
    if isinstance(x, GaussianRational):
        return x.to_mpc()
    if isinstance(x, mpmath.mpc):
        return x
    return mpmath.mpc(x)


def ratio_eval(sol: HPSolution, J: Sequence[int], I: Sequence[int], z):
    """P_J(z) / P_I(z); exact when both the solution and z are exact."""
    num = sol.evaluate(J, z)
    den = sol.evaluate(I, z)
    if isinstance(den, GaussianRational):
        if not den:
            raise DenominatorNearZero(f"P_{tuple(I)} vanishes at z = {z}")
        return num / den
    prec = sol.prec_bits or DEFAULT_PREC
    with mpmath.workprec(prec):
        az = abs(_as_mpc(z))
        scale = max(abs(_as_mpc(c)) for c in sol.poly(I)) * max(1, az) ** sol.degree
        if not scale or abs(den) < mpmath.mpf(2) ** (-(prec // 2)) * scale:
            raise DenominatorNearZero(f"|P_{tuple(I)}(z)| is negligible at z = {mpmath.nstr(_as_mpc(z), 8)}")
        return num / den


# --------------------------------------------------------------------------
# candidate tables


@dataclass
class CandidateTable:
    """Candidate limits at z, one per k-subset S of branch labels (None if absent)."""

    z: object
    k: int
    subsets: list[tuple[int, ...]]
    values: list
    branches: tuple
    germ_label: int | None = None
    absent: list = field(default_factory=list)

    @property
    def separation(self):
        vals = [v for v in self.values if v is not None]
        if len(vals) < 2:
            return mpmath.inf
        return min(abs(a - b) for a, b in itertools.combinations(vals, 2))

    def nearest(self, x) -> tuple[int, object]:
        best, dist = None, mpmath.inf
        for i, v in enumerate(self.values):
            if v is None:
                continue
            d = abs(v - x)
            if d < dist:
                best, dist = i, d
        return best, dist

    def to_dict(self) -> dict:
        return {
            "z": _cstr(self.z),
            "k": self.k,
            "germ_branch": self.germ_label,
            "candidates": [{"subset": list(S), "value": None if v is None else _cstr(v)}
                           for S, v in zip(self.subsets, self.values)],
            "separation": float(self.separation) if self.separation != mpmath.inf else None,
        }


def _cstr(z, digits: int = 25) -> str:
    with mpmath.workprec(1024):
        z = _as_mpc(z)
        return f"{mpmath.nstr(z.real, digits)}{'-' if z.imag < 0 else '+'}{mpmath.nstr(abs(z.imag), digits)}i"


def _expr(e) -> RationalExpression:
    return e if isinstance(e, RationalExpression) else RationalExpression.parse(e)


def _branch_data(curve: AlgebraicCurve, spec, z, prec_bits: int):
    with mpmath.workprec(prec_bits):
        zz = _as_mpc(z)
        fiber = fiber_roots(curve, zz, prec_bits)
        label = None
        if spec is not None:
            w = germ_branch_at(curve, spec, zz, prec_bits)
            label, _ = fiber.nearest(w)
        return zz, fiber.roots, label


def subset_sum_oracle(curve: AlgebraicCurve, f, spec, k: int, z,
                      prec_bits: int = DEFAULT_PREC) -> CandidateTable:
    """Sums of f over every k-subset of the fiber at z (power-tuple mode)."""
    f = _expr(f)
    zz, roots, label = _branch_data(curve, spec, z, prec_bits)
    with mpmath.workprec(prec_bits):
        fv = [f(zz, w) for w in roots]
        subsets = list(itertools.combinations(range(len(roots)), k))
        values = [sum((fv[s] for s in S), mpmath.mpc(0)) for S in subsets]
    return CandidateTable(zz, k, subsets, values, roots, label)


def minor_ratio_candidates(curve: AlgebraicCurve, fs: Sequence, spec, J: Sequence[int], I: Sequence[int],
                           k: int, z, prec_bits: int = DEFAULT_PREC) -> CandidateTable:
    """det A_S[J] / det A_S[I] for each k-subset S of branches, A_S[s, j] = f_j(branch s).

    f_0 = 1 and ``fs`` lists f_1..f_m.  Subsets with a negligible denominator
    minor are recorded in ``absent`` and carry the value None.
    """
    exprs = [None] + [_expr(e) for e in fs]
    if len(J) != k or len(I) != k:
        raise ValueError("J and I must be k-subsets")
    zz, roots, label = _branch_data(curve, spec, z, prec_bits)
    with mpmath.workprec(prec_bits):
        table = [[mpmath.mpc(1)] + [e(zz, w) for e in exprs[1:]] for w in roots]
        subsets = list(itertools.combinations(range(len(roots)), k))
        values, absent = [], []
        for S in subsets:
            dI = mpmath.det(mpmath.matrix([[table[s][j] for j in I] for s in S]))
            dJ = mpmath.det(mpmath.matrix([[table[s][j] for j in J] for s in S]))
            scale = max(1, max(abs(table[s][j]) for s in S for j in I)) ** k
            if abs(dI) <= mpmath.mpf(2) ** (-(prec_bits // 2)) * scale:
                values.append(None)
                absent.append(S)
                continue
            values.append(dJ / dI)
    return CandidateTable(zz, k, subsets, values, roots, label, absent)


# --------------------------------------------------------------------------
# matching and rate fits


@dataclass
class ReconReport:
    z: object
    J: tuple
    I: tuple
    ns: list[int]
    ratios: list            # None where the point hit a zero of P_I
    errors: list            # against the matched candidate; None where skipped
    matched: tuple | None
    matched_value: object
    final_error: object
    rate: float | None
    r_squared: float | None
    tail: list[int]
    ambiguous: bool
    germ_in_subset: bool | None
    warning: str | None = None
    separation: object = None

    def to_dict(self) -> dict:
        return {
            "z": _cstr(self.z),
            "J": list(self.J), "I": list(self.I),
            "n": self.ns,
            "ratios": [None if r is None else _cstr(r) for r in self.ratios],
            "errors": [None if e is None else float(e) for e in self.errors],
            "matched_subset": None if self.matched is None else list(self.matched),
            "matched_value": None if self.matched_value is None else _cstr(self.matched_value),
            "final_error": float(self.final_error),
            "rate": self.rate,
            "r_squared": self.r_squared,
            "fit_tail": self.tail,
            "ambiguous": self.ambiguous,
            "germ_branch_in_subset": self.germ_in_subset,
            "separation": None if self.separation in (None, mpmath.inf) else float(self.separation),
            "warning": self.warning,
        }


def _decreasing_tail(ns: list[int], errors: list) -> tuple[list[int], list]:
    """Longest suffix of usable, strictly decreasing, positive errors."""
    pts = [(n, e) for n, e in zip(ns, errors) if e is not None]
    if not pts or not pts[-1][1]:
        return [], []
    tail = [pts[-1]]
    for n, e in reversed(pts[:-1]):
        if not e or e <= tail[0][1]:
            break
        tail.insert(0, (n, e))
    return [n for n, _ in tail], [e for _, e in tail]


def fit_rate(ns: Sequence[int], errors: Sequence) -> tuple[float, float]:
    """rho = exp(slope) of log(error) against n by least squares, and R^2."""
    x = np.asarray(ns, dtype=float)
    y = np.array([float(mpmath.log(e)) for e in errors])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return math.exp(slope), r2


def infer_limit_and_rate(solutions: Sequence[HPSolution], table: CandidateTable,
                         J: Sequence[int] | None = None, I: Sequence[int] | None = None,
                         connected: bool | None = None, min_tail: int = 4) -> ReconReport:
    """Match the largest-n ratio to a candidate and fit the geometric decay of the errors."""
    k = table.k
    if J is None or I is None:
        J, I = distinguished_pair(k)
    J, I = tuple(J), tuple(I)
    sols = sorted(solutions, key=lambda s: s.n)
    prec = max((s.prec_bits or DEFAULT_PREC) for s in sols) if sols else DEFAULT_PREC
    ns, ratios = [], []
    z = table.z
    exact_z = _exact_point(z)
    with mpmath.workprec(prec):
        for sol in sols:
            ns.append(sol.n)
            try:
                r = ratio_eval(sol, J, I, exact_z if (sol.is_exact and exact_z is not None) else z)
                ratios.append(_as_mpc(r) if isinstance(r, GaussianRational) else r)
            except DenominatorNearZero:
                ratios.append(None)
    usable = [r for r in ratios if r is not None]
    if len(usable) < 2:
        raise NoUsableN(f"only {len(usable)} usable n values at z = {_cstr(z, 10)}")
    with mpmath.workprec(prec):
        idx, _ = table.nearest(usable[-1])
        target = table.values[idx]
        errors = [None if r is None else abs(r - target) for r in ratios]
        final = [e for e in errors if e is not None][-1]
        close = [v for v in table.values if v is not None and abs(v - usable[-1]) <= 10 * final]
        ambiguous = len(close) >= 2
        if table.separation != mpmath.inf and not final < table.separation / 2:
            ambiguous = True
    tail_n, tail_e = _decreasing_tail(ns, errors)
    rate = r2 = None
    if len(tail_n) >= min_tail:
        rate, r2 = fit_rate(tail_n, tail_e)
    matched = table.subsets[idx]
    germ_in = None if table.germ_label is None else table.germ_label in matched
    warning = None
    if connected is False:
        warning = "the k-subset surface is disconnected; convergence is not guaranteed here"
    return ReconReport(z, J, I, ns, ratios, errors, matched, target, final, rate, r2, tail_n,
                       ambiguous, germ_in, warning, table.separation)


def _exact_point(z):
    """GaussianRational for points whose parts are dyadic doubles (e.g. 2, 2+i, -3)."""
    if isinstance(z, GaussianRational):
        return z
    zc = complex(_as_mpc(z))
    if _as_mpc(z) != mpmath.mpc(zc):
        return None
    from fractions import Fraction
    return GaussianRational(Fraction(zc.real), Fraction(zc.imag))


# --------------------------------------------------------------------------
# zeros


def export_zeros(sol: HPSolution, I: Sequence[int], prec_bits: int | None = None) -> list[tuple[object, int]]:
    """Zeros of P_I as (value, multiplicity); roots closer than 2^-(prec/4) are merged."""
    prec = prec_bits or sol.prec_bits or DEFAULT_PREC
    with mpmath.workprec(prec):
        coeffs = [_as_mpc(c) for c in sol.poly(I)]
        big = max((abs(c) for c in coeffs), default=0)
        if not big:
            raise ValueError(f"P_{tuple(I)} is identically zero")
        if not sol.is_exact:
            tol = big * mpmath.mpf(2) ** (-(prec // 2))
            while coeffs and abs(coeffs[-1]) <= tol:
                coeffs.pop()
        else:
            while coeffs and not coeffs[-1]:
                coeffs.pop()
        if len(coeffs) <= 1:
            return []
        roots = aberth(coeffs, prec)
        clusters = cluster_roots(roots, mpmath.mpf(2) ** (-(prec // 4)))
        order = canonical_order([c for c, _ in clusters], prec)
        return [clusters[i] for i in order]


def distance_to_segment(z, a: float = -1.0, b: float = 1.0) -> float:
    """Euclidean distance from z to the real segment [a, b]."""
    zc = complex(_as_mpc(z))
    x = min(max(zc.real, a), b)
    return abs(zc - x)


# --------------------------------------------------------------------------
# file output


def write_errors_csv(report: ReconReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "abs_error", "skipped"])
        for n, e in zip(report.ns, report.errors):
            w.writerow([n, "" if e is None else mpmath.nstr(e, 17), int(e is None)])


def write_zeros_csv(zeros: Sequence[tuple[object, int]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "multiplicity"])
        for z, mult in zeros:
            z = _as_mpc(z)
            w.writerow([mpmath.nstr(z.real, 30), mpmath.nstr(z.imag, 30), mult])


def write_zeros_svg(zeros: Sequence[tuple[object, int]], path, critical: Sequence = (),
                    viewport: tuple[float, float, float, float] = (-3.0, -3.0, 3.0, 3.0), size: int = 480) -> None:
    """Scatter of zeros (dots) and critical values (crosses) in a fixed viewport
    (xmin, ymin, xmax, ymax)."""
    x0, y0, x1, y1 = viewport
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def px(z):
        z = complex(_as_mpc(z))
        return (z.real - x0) * sx, (y1 - z.imag) * sy

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white" stroke="black"/>']
    ox, oy = px(0)
    parts.append(f'<line x1="0" y1="{oy:.2f}" x2="{size}" y2="{oy:.2f}" stroke="#ccc"/>')
    parts.append(f'<line x1="{ox:.2f}" y1="0" x2="{ox:.2f}" y2="{size}" stroke="#ccc"/>')
    for z, mult in zeros:
        x, y = px(z)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{2 + mult}" fill="steelblue"/>')
    for c in critical:
        x, y = px(c)
        parts.append(f'<path d="M{x - 4:.2f},{y - 4:.2f} L{x + 4:.2f},{y + 4:.2f} '
                     f'M{x - 4:.2f},{y + 4:.2f} L{x + 4:.2f},{y - 4:.2f}" stroke="crimson" stroke-width="1.5"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def curve_critical_points(curve: AlgebraicCurve, prec_bits: int = DEFAULT_PREC) -> list:
    return list(critical_values(curve, prec_bits).values)
