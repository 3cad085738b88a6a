"""Bivariate polynomials P(z, w) over Q(i): algebraic curves and rational expressions in (z, w)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import mpmath
import sympy

from .gaussian import GaussianRational, parse_gaussian

Z, W = sympy.symbols("z w")

Terms = Mapping[tuple[int, int], GaussianRational]


class CurveError(ValueError):
    pass


class NotSquareFree(CurveError):
    pass


def _sympy_number_to_gr(c) -> GaussianRational:
    re, im = sympy.re(c), sympy.im(c)
    if not (re.is_Rational and im.is_Rational):
        raise CurveError(f"coefficient {c} is not a Gaussian rational")
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def terms_from_sympy(expr) -> dict[tuple[int, int], GaussianRational]:
    poly = sympy.Poly(sympy.expand(expr), Z, W)
    out = {}
    for (a, b), c in poly.terms():
        g = _sympy_number_to_gr(c)
        if g:
            out[(int(a), int(b))] = g
    return out


def _clean(terms) -> dict[tuple[int, int], GaussianRational]:
    out = {}
    for (a, b), c in terms.items():
        c = GaussianRational.coerce(c)
        if a < 0 or b < 0:
            raise CurveError("negative exponent in polynomial term")
        if c:
            out[(int(a), int(b))] = out.get((int(a), int(b)), GaussianRational(0)) + c
    return {k: v for k, v in out.items() if v}


def eval_terms(terms: Terms, z, w):
    """Numeric value of sum c_ab z^a w^b (mpc or complex arithmetic, per the inputs)."""
    total = 0
    for (a, b), c in terms.items():
        total += _num(c, z) * z ** a * w ** b
    return total


def _num(c: GaussianRational, like):
    if isinstance(like, (mpmath.mpc, mpmath.mpf)):
        return c.to_mpc()
    return complex(c)


@dataclass(frozen=True)
class AlgebraicCurve:
    """The curve P(z, w) = sum c_ab z^a w^b = 0 with deg_w P = m + 1.

    ``terms`` maps ``(a, b)`` to the Gaussian-rational coefficient of
    ``z^a w^b``.  Square-freeness in ``w`` is checked at construction
    (see :meth:`check_square_free`); irreducibility is not assumed.
    """

    terms: Mapping[tuple[int, int], GaussianRational]
    m: int = field(init=False)

    def __hash__(self):
        return hash(tuple(sorted((k, v) for k, v in self.terms.items())))

    def __post_init__(self):
        terms = _clean(self.terms)
        if not terms:
            raise CurveError("zero polynomial")
        object.__setattr__(self, "terms", terms)
        deg_w = max(b for _, b in terms)
        if deg_w < 2:
            raise CurveError("need deg_w P >= 2 (m >= 1)")
        object.__setattr__(self, "m", deg_w - 1)

    # construction -----------------------------------------------------------

    @classmethod
    def from_string(cls, text: str, check: bool = True) -> "AlgebraicCurve":
        """Parse a polynomial such as ``"w**2 - (z**2 - 1)"`` (``I`` is the imaginary unit)."""
        expr = sympy.sympify(text.replace("^", "**"), locals={"z": Z, "w": W, "i": sympy.I})
        curve = cls(terms_from_sympy(expr))
        if check:
            curve.check_square_free()
        return curve

    @classmethod
    def from_sympy(cls, expr, check: bool = True) -> "AlgebraicCurve":
        curve = cls(terms_from_sympy(expr))
        if check:
            curve.check_square_free()
        return curve

    def to_sympy(self):
        return sum(sympy.Rational(c.re.numerator, c.re.denominator) * Z ** a * W ** b
                   + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator) * Z ** a * W ** b
                   for (a, b), c in self.terms.items())

    def scaled(self, c) -> "AlgebraicCurve":
        c = GaussianRational.coerce(c)
        if not c:
            raise CurveError("scaling by zero")
        return AlgebraicCurve({k: v * c for k, v in self.terms.items()})

    # structure --------------------------------------------------------------

    @property
    def degree_w(self) -> int:
        return self.m + 1

    @property
    def degree_z(self) -> int:
        return max(a for a, _ in self.terms)

    def w_coefficients(self) -> list[list[GaussianRational]]:
        """Coefficient of w^b as an ascending list of z-coefficients, for b = 0..m+1."""
        dz = self.degree_z
        out = [[GaussianRational(0)] * (dz + 1) for _ in range(self.m + 2)]
        for (a, b), c in self.terms.items():
            out[b][a] = c
        return out

    def leading_coefficient(self) -> list[GaussianRational]:
        """Leading-in-w coefficient as an ascending list in z (trailing zeros trimmed)."""
        lead = self.w_coefficients()[-1]
        while len(lead) > 1 and not lead[-1]:
            lead.pop()
        return lead

    def is_pure_power(self) -> bool:
        """True iff only w^{m+1} and w^0 terms occur."""
        return all(b in (0, self.m + 1) for _, b in self.terms)

    def d_dw(self) -> dict[tuple[int, int], GaussianRational]:
        return {(a, b - 1): c * b for (a, b), c in self.terms.items() if b}

    def d_dz(self) -> dict[tuple[int, int], GaussianRational]:
        return {(a - 1, b): c * a for (a, b), c in self.terms.items() if a}

    # evaluation -------------------------------------------------------------

    def w_poly_exact(self, z: GaussianRational) -> list[GaussianRational]:
        """Coefficients (ascending in w) of P(z, .) at an exact point z."""
        z = GaussianRational.coerce(z)
        out = [GaussianRational(0)] * (self.m + 2)
        for (a, b), c in self.terms.items():
            out[b] = out[b] + c * z ** a
        return out

    def w_poly(self, z) -> list:
        """Coefficients (ascending in w) of P(z, .) evaluated numerically.

        ``z`` may be a Python complex (double precision) or an mpmath number
        (current working precision).
        """
        cols = self.w_coefficients()
        out = []
        mp = isinstance(z, (mpmath.mpc, mpmath.mpf))
        for col in cols:
            acc = 0
            for c in reversed(col):
                acc = acc * z + (c.to_mpc() if mp else complex(c))
            out.append(acc)
        return out

    def __call__(self, z, w):
        return eval_terms(self.terms, z, w)

    def coefficient_scale(self, z, w) -> float:
        """sum |c_ab| |z|^a |w|^b, the natural size against which residuals are judged."""
        az, aw = abs(z), abs(w)
        return sum(abs(complex(c)) * az ** a * aw ** b for (a, b), c in self.terms.items())

    # checks -----------------------------------------------------------------

    def check_square_free(self) -> None:
        """Raise :class:`NotSquareFree` if P and dP/dw share a factor over Q(i)(z).

        Res_w(P, P_w) vanishes identically iff they do.  It has degree at most
        (2m+1) deg_z P in z, so exact evaluation at one more integer point than
        that settles the question.
        """
        from .linalg import resultant_exact

        bound = (2 * self.m + 1) * max(self.degree_z, 1)
        for z0 in range(3, 3 + bound + 1):
            p = self.w_poly_exact(GaussianRational(z0))
            if not p[-1]:
                continue
            if resultant_exact(p, _derivative(p)):
                return
        raise NotSquareFree("P(z, w) has a repeated factor in w")

    # serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "terms": [{"za": a, "wb": b, "c": str(c)} for (a, b), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, data: Mapping, check: bool = True) -> "AlgebraicCurve":
        terms: dict[tuple[int, int], GaussianRational] = {}
        for t in data["terms"]:
            key = (int(t["za"]), int(t["wb"]))
            c = t["c"]
            c = parse_gaussian(c) if isinstance(c, str) else GaussianRational.coerce(c)
            terms[key] = terms.get(key, GaussianRational(0)) + c
        curve = cls(terms)
        if "m" in data and int(data["m"]) != curve.m:
            raise CurveError(f"declared m={data['m']} but deg_w P = {curve.m + 1}")
        if check:
            curve.check_square_free()
        return curve

    def __str__(self):
        return str(self.to_sympy())


def _derivative(p: list) -> list:
    return [p[i] * i for i in range(1, len(p))]


@dataclass(frozen=True)
class RationalExpression:
    """N(z, w) / D(z, w), a rational function on the curve such as ``1/w``."""

    numerator: Mapping[tuple[int, int], GaussianRational]
    denominator: Mapping[tuple[int, int], GaussianRational]
    text: str = ""

    @classmethod
    def parse(cls, text: str) -> "RationalExpression":
        expr = sympy.sympify(text.replace("^", "**"), locals={"z": Z, "w": W, "i": sympy.I})
        num, den = sympy.fraction(sympy.together(expr))
        num_t, den_t = terms_from_sympy(num), terms_from_sympy(den)
        if not den_t:
            raise CurveError("zero denominator")
        return cls(num_t, den_t, text)

    def power(self, j: int) -> "RationalExpression":
        num = sympy.expand(_terms_to_sympy(self.numerator) ** j)
        den = sympy.expand(_terms_to_sympy(self.denominator) ** j)
        return RationalExpression(terms_from_sympy(num) if j else {(0, 0): GaussianRational(1)},
                                  terms_from_sympy(den) if j else {(0, 0): GaussianRational(1)},
                                  f"({self.text})**{j}")

    def __call__(self, z, w):
        return eval_terms(self.numerator, z, w) / eval_terms(self.denominator, z, w)

    def __str__(self):
        return self.text or f"({_terms_to_sympy(self.numerator)})/({_terms_to_sympy(self.denominator)})"


def _terms_to_sympy(terms: Terms):
    return sum((sympy.Rational(c.re.numerator, c.re.denominator)
                + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)) * Z ** a * W ** b
               for (a, b), c in terms.items())


def load_curve_file(path):
    """Read the curve JSON file; returns ``(curve, germ_spec_or_None)``."""
    from .series import GermSpec

    with open(path) as fh:
        data = json.load(fh)
    curve = AlgebraicCurve.from_dict(data)
    spec = GermSpec.from_dict(data["branch"]) if "branch" in data else None
    return curve, spec
