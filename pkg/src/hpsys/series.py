"""Truncated Laurent series in t = 1/z and Newton expansion of algebraic germs at infinity.

A series is stored as ``valuation`` v, coefficients for t^v, ..., t^order, and
the truncation ``order``: coefficients past ``order`` are unknown, not zero.
Two coefficient domains exist: exact (:class:`GaussianRational`) and numeric
(mpmath ``mpc`` at ``prec_bits``).  Arithmetic tracks truncation pessimistically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import mpmath

from .gaussian import GaussianRational, parse_gaussian
from .polynomial import AlgebraicCurve, RationalExpression

DEFAULT_PREC = 256


class SeriesError(ArithmeticError):
    pass


class ZeroSeries(SeriesError):
    pass


class DomainMismatch(TypeError):
    pass


class NotSimpleBranch(ValueError):
    pass


class AnchorMismatch(ValueError):
    pass


class PoleAtInfinity(ValueError):
    pass


class DenominatorVanishes(SeriesError):
    pass


def negligible(x, prec_bits: int, scale=1) -> bool:
    """|x| < 2^(-prec_bits/2) * scale, the artifact-wide numeric zero test."""
    return abs(x) < mpmath.mpf(2) ** (-(prec_bits // 2)) * scale


def _is_zero(c) -> bool:
    return not c


@dataclass(frozen=True)
class TruncatedSeries:
    valuation: int
    coeffs: tuple
    order: int
    prec_bits: int | None = None

    def __post_init__(self):
        coeffs = list(self.coeffs)
        want = self.order - self.valuation + 1
        if len(coeffs) > want:
            coeffs = coeffs[:max(want, 0)]
        zero = self._zero()
        coeffs += [zero] * (want - len(coeffs))
        v = self.valuation
        while coeffs and _is_zero(coeffs[0]):
            coeffs.pop(0)
            v += 1
        if not coeffs:
            v = self.order + 1
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "valuation", v)

    # construction -----------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, order: int | None = None, valuation: int = 0,
                    prec_bits: int | None = None) -> "TruncatedSeries":
        """Series with ``coeffs[i]`` at t^(valuation+i); ``order`` defaults to the last stored exponent."""
        if order is None:
            order = valuation + len(coeffs) - 1
        if prec_bits is None:
            cs = tuple(GaussianRational.coerce(c) for c in coeffs)
        else:
            with mpmath.workprec(prec_bits):
                cs = tuple(_to_mpc(c) for c in coeffs)
        return cls(valuation, cs, order, prec_bits)

    @classmethod
    def constant(cls, c, order: int, prec_bits: int | None = None) -> "TruncatedSeries":
        return cls.from_coeffs([c], order=order, prec_bits=prec_bits)

    @classmethod
    def monomial(cls, e: int, order: int, c=1, prec_bits: int | None = None) -> "TruncatedSeries":
        return cls.from_coeffs([c], order=order, valuation=e, prec_bits=prec_bits)

    def _zero(self):
        return GaussianRational(0) if self.prec_bits is None else mpmath.mpc(0)

    # basic properties --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.prec_bits is None

    @property
    def domain(self) -> str:
        return "exact" if self.is_exact else "numeric"

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int):
        if e > self.order:
            raise SeriesError(f"coefficient t^{e} is beyond the truncation order {self.order}")
        if e < self.valuation:
            return self._zero()
        return self.coeffs[e - self.valuation]

    def coefficients(self, start: int, stop: int) -> list:
        """Coefficients of t^start .. t^stop inclusive."""
        return [self.coeff(e) for e in range(start, stop + 1)]

    def __len__(self):
        return len(self.coeffs)

    def to_numeric(self, prec_bits: int = DEFAULT_PREC) -> "TruncatedSeries":
        if not self.is_exact and self.prec_bits >= prec_bits:
            return self
        with mpmath.workprec(prec_bits):
            cs = tuple(_to_mpc(c) for c in self.coeffs)
        return TruncatedSeries(self.valuation, cs, self.order, prec_bits)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise SeriesError("cannot extend a series past its truncation order")
        return TruncatedSeries(self.valuation, self.coeffs, order, self.prec_bits)

    def shift(self, s: int) -> "TruncatedSeries":
        """Multiply by t^s."""
        return TruncatedSeries(self.valuation + s, self.coeffs, self.order + s, self.prec_bits)

    def scale(self, c) -> "TruncatedSeries":
        with _prec(self.prec_bits):
            c = _coerce(c, self.prec_bits)
            return TruncatedSeries(self.valuation, tuple(c * x for x in self.coeffs), self.order, self.prec_bits)

    def map(self, fn) -> "TruncatedSeries":
        with _prec(self.prec_bits):
            return TruncatedSeries(self.valuation, tuple(fn(x) for x in self.coeffs), self.order, self.prec_bits)

    def evaluate(self, t):
        """Numeric value of the stored partial sum at t."""
        total = mpmath.mpc(0)
        for i, c in enumerate(self.coeffs):
            total += (c.to_mpc() if self.is_exact else c) * mpmath.mpc(t) ** (self.valuation + i)
        return total

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.order, self.prec_bits)
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        with _prec(self.prec_bits):
            cs = tuple(-c for c in self.coeffs)
        return TruncatedSeries(self.valuation, cs, self.order, self.prec_bits)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.order, self.prec_bits)
        return series_add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, series_inv(other))
        with _prec(self.prec_bits):
            return self.scale(1 / _coerce(other, self.prec_bits))

    def __pow__(self, j: int):
        return series_pow(self, j)

    # serialization -------------------------------------------------------------

    def to_dict(self) -> dict:
        out = {"valuation": self.valuation, "order": self.order}
        if self.is_exact:
            out["coeffs"] = [str(c) for c in self.coeffs]
        else:
            digits = int(self.prec_bits * 0.30103) + 2
            out["prec_bits"] = self.prec_bits
            out["coeffs"] = [_mpc_str(c, digits) for c in self.coeffs]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "TruncatedSeries":
        prec = data.get("prec_bits")
        if prec is None:
            cs = [parse_gaussian(c) for c in data["coeffs"]]
        else:
            with mpmath.workprec(int(prec)):
                cs = [_parse_mpc(c) if isinstance(c, str) else mpmath.mpc(c) for c in data["coeffs"]]
            prec = int(prec)
        return cls(int(data["valuation"]), tuple(cs), int(data["order"]), prec)

    def __repr__(self):
        terms = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"TruncatedSeries(v={self.valuation}, order={self.order}, [{terms}{more}], {self.domain})"


def _mpc_str(c, digits: int) -> str:
    """Decimal "a+bi" form; formatting runs at high precision so nothing is rounded twice."""
    with mpmath.workprec(max(1024, 4 * digits)):
        c = mpmath.mpc(c)
        re = mpmath.nstr(c.real, digits, strip_zeros=False, min_fixed=1, max_fixed=0)
        im = mpmath.nstr(abs(c.imag), digits, strip_zeros=False, min_fixed=1, max_fixed=0)
        sign = "-" if c.imag < 0 else "+"
    return f"{re}{sign}{im}i"


def _parse_mpc(s: str):
    """Inverse of :func:`_mpc_str` (also accepts plain reals)."""
    s = s.strip()
    if not s.endswith("i"):
        return mpmath.mpc(mpmath.mpf(s))
    body = s[:-1]
    # split at the last sign that is not part of an exponent
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            return mpmath.mpc(mpmath.mpf(body[:pos]), mpmath.mpf(body[pos:]))
    return mpmath.mpc(0, mpmath.mpf(body))


def _to_mpc(c):
    if isinstance(c, GaussianRational):
        return c.to_mpc()
    if isinstance(c, str):
        return _parse_mpc(c)
    return mpmath.mpc(c)


def _coerce(c, prec_bits):
    if prec_bits is None:
        return GaussianRational.coerce(c)
    return _to_mpc(c)


class _prec:
    """``mpmath.workprec`` for numeric series, no-op for exact ones."""

    def __init__(self, prec_bits):
        self.ctx = mpmath.workprec(prec_bits) if prec_bits else None

    def __enter__(self):
        if self.ctx:
            self.ctx.__enter__()

    def __exit__(self, *exc):
        if self.ctx:
            self.ctx.__exit__(*exc)


def _common_prec(a: TruncatedSeries, b: TruncatedSeries):
    if a.is_exact != b.is_exact:
        raise DomainMismatch("mixing exact and numeric series; convert with to_numeric()")
    return None if a.is_exact else max(a.prec_bits, b.prec_bits)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    prec = _common_prec(a, b)
    order = min(a.order, b.order)
    v = min(a.valuation, b.valuation)
    with _prec(prec):
        cs = tuple(a.coeff(e) + b.coeff(e) for e in range(v, order + 1))
    return TruncatedSeries(v, cs, order, prec)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product; truncation order min(ord(a) + val(b), ord(b) + val(a))."""
    prec = _common_prec(a, b)
    if a.is_zero or b.is_zero:
        order = min(a.order + b.valuation, b.order + a.valuation)
        return TruncatedSeries(order + 1, (), order, prec)
    va, vb = a.valuation, b.valuation
    order = min(a.order + vb, b.order + va)
    n = order - va - vb + 1
    ac, bc = a.coeffs, b.coeffs
    la, lb = len(ac), len(bc)
    out = []
    with _prec(prec):
        zero = a._zero()
        for e in range(n):
            s = zero
            lo = max(0, e - lb + 1)
            hi = min(e, la - 1)
            for i in range(lo, hi + 1):
                s = s + ac[i] * bc[e - i]
            out.append(s)
    return TruncatedSeries(va + vb, tuple(out), order, prec)


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    """Reciprocal; valuation -val(a), truncation order ord(a) - 2 val(a)."""
    if not a.is_exact:
        a = _drop_negligible_lead(a)
    if a.is_zero:
        raise ZeroSeries("series vanishes to its truncation order")
    v = a.valuation
    u = a.coeffs
    L = a.order - v
    with _prec(a.prec_bits):
        inv0 = 1 / u[0]
        out = [inv0]
        for n in range(1, L + 1):
            s = a._zero()
            for i in range(1, min(n, len(u) - 1) + 1):
                s = s + u[i] * out[n - i]
            out.append(-s * inv0)
    return TruncatedSeries(-v, tuple(out), -v + L, a.prec_bits)


def _drop_negligible_lead(a: TruncatedSeries) -> TruncatedSeries:
    cs = list(a.coeffs)
    v = a.valuation
    while cs and negligible(cs[0], a.prec_bits):
        cs.pop(0)
        v += 1
    return TruncatedSeries(v, tuple(cs), a.order, a.prec_bits)


def series_pow(a: TruncatedSeries, j: int) -> TruncatedSeries:
    """a^j by repeated squaring; j = 0 gives the constant one (to a's relative order)."""
    if j < 0:
        return series_pow(series_inv(a), -j)
    if j == 0:
        one = GaussianRational(1) if a.is_exact else mpmath.mpc(1)
        return TruncatedSeries(0, (one,), a.order - a.valuation if not a.is_zero else a.order, a.prec_bits)
    result = None
    base = a
    while j:
        if j & 1:
            result = base if result is None else series_mul(result, base)
        j >>= 1
        if j:
            base = series_mul(base, base)
    return result


# --------------------------------------------------------------------------
# germs at infinity


@dataclass(frozen=True)
class GermSpec:
    """Which branch at infinity: a finite value w(inf), or w ~ leading * z^pole_order."""

    value: object = None
    pole_order: int | None = None
    leading: object = None

    def __post_init__(self):
        has_value = self.value is not None
        has_pole = self.pole_order is not None or self.leading is not None
        if has_value == has_pole:
            raise ValueError("GermSpec needs exactly one of: value, (pole_order, leading)")
        if has_pole:
            if self.pole_order is None or self.leading is None or int(self.pole_order) < 1:
                raise ValueError("pole data needs pole_order >= 1 and a leading coefficient")
            object.__setattr__(self, "leading", _anchor(self.leading))
            object.__setattr__(self, "pole_order", int(self.pole_order))
        else:
            object.__setattr__(self, "value", _anchor(self.value))

    @property
    def p(self) -> int:
        return self.pole_order or 0

    @property
    def anchor(self):
        return self.leading if self.pole_order else self.value

    @property
    def is_exact(self) -> bool:
        return isinstance(self.anchor, GaussianRational)

    def to_dict(self) -> dict:
        if self.pole_order:
            return {"pole_order": self.pole_order, "leading": _anchor_str(self.leading)}
        return {"value": _anchor_str(self.value)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "GermSpec":
        if "value" in data:
            return cls(value=data["value"])
        return cls(pole_order=int(data["pole_order"]), leading=data["leading"])


def _anchor(x):
    if isinstance(x, str):
        return parse_gaussian(x)
    if isinstance(x, (int, GaussianRational)) or type(x).__name__ == "Fraction":
        return GaussianRational.coerce(x)
    return mpmath.mpc(x)


def _anchor_str(x) -> str:
    if isinstance(x, GaussianRational):
        return str(x)
    return _mpc_str(mpmath.mpc(x), 30)


def local_equation(curve: AlgebraicCurve, p: int) -> tuple[list[dict[int, GaussianRational]], int]:
    """Q(t, v) = t^N P(1/t, v/t^p) as ``q[b] = {exponent of t: coefficient}``, with N."""
    N = max(a + p * b for (a, b) in curve.terms)
    q: list[dict[int, GaussianRational]] = [dict() for _ in range(curve.m + 2)]
    for (a, b), c in curve.terms.items():
        e = N - a - p * b
        q[b][e] = q[b].get(e, GaussianRational(0)) + c
    return q, N


def _poly_series(poly: Mapping[int, GaussianRational], order: int, prec_bits) -> TruncatedSeries:
    if not poly:
        return TruncatedSeries(order + 1, (), order, prec_bits)
    top = max(poly)
    cs = [poly.get(e, GaussianRational(0)) for e in range(0, min(top, order) + 1)]
    return TruncatedSeries.from_coeffs(cs, order=order, prec_bits=prec_bits)


def _eval_local(q, v: TruncatedSeries, order: int, prec_bits, derivative: bool = False) -> TruncatedSeries:
    """Horner evaluation of Q(t, v(t)) (or dQ/dv) as a series through t^order."""
    coeffs = [_poly_series(qb, order, prec_bits) for qb in q]
    if derivative:
        coeffs = [coeffs[b].scale(b) for b in range(1, len(coeffs))]
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = series_mul(acc, v) + c
    return acc.truncate(order) if acc.order > order else acc


def newton_germ(curve: AlgebraicCurve, spec: GermSpec, order: int,
                prec_bits: int | None = None) -> TruncatedSeries:
    """Series v(t) of the branch anchored by ``spec``, through t^order.

    For a pole of order p the branch is w = t^-p v(t); for a regular branch the
    returned series is w(t) itself.  Exact mode (``prec_bits=None`` with an exact
    anchor) yields the exact truncated germ; a non-Gaussian-rational anchor
    forces numeric mode at ``prec_bits`` (default 256).
    """
    if prec_bits is None and not spec.is_exact:
        prec_bits = DEFAULT_PREC
    p = spec.p
    q, _ = local_equation(curve, p)
    with _prec(prec_bits):
        v0 = _coerce(spec.anchor, prec_bits)
        q0 = [_coerce(qb.get(0, GaussianRational(0)), prec_bits) for qb in q]
        val = sum((q0[b] * v0 ** b for b in range(len(q0))), _coerce(0, prec_bits))
        dval = sum((b * q0[b] * v0 ** (b - 1) for b in range(1, len(q0))), _coerce(0, prec_bits))
        scale = sum((abs(complex(q0[b])) * abs(complex(v0)) ** b for b in range(len(q0))), 0.0) or 1.0
        if prec_bits is None:
            if val:
                raise AnchorMismatch(f"Q(0, {spec.anchor}) = {val} != 0")
            if not dval:
                raise NotSimpleBranch("dQ/dv vanishes at the anchor: the branch is not simple at infinity")
        else:
            if not negligible(val, prec_bits, scale):
                raise AnchorMismatch(f"|Q(0, anchor)| = {mpmath.nstr(abs(val), 5)} is not negligible")
            if negligible(dval, prec_bits, scale):
                raise NotSimpleBranch("dQ/dv vanishes at the anchor: the branch is not simple at infinity")
    v = TruncatedSeries.from_coeffs([v0], order=0, prec_bits=prec_bits)
    known = 1
    while known < order + 1:
        known = min(2 * known, order + 1)
        o = known - 1
        v = TruncatedSeries(v.valuation, v.coeffs, o, prec_bits)
        qv = _eval_local(q, v, o, prec_bits)
        dq = _eval_local(q, v, o, prec_bits, derivative=True)
        v = (v - series_mul(qv, series_inv(dq))).truncate(o)
    if v.order < order:
        v = TruncatedSeries(v.valuation, v.coeffs, order, prec_bits)
    return v


def germ_residual(curve: AlgebraicCurve, spec: GermSpec, v: TruncatedSeries) -> TruncatedSeries:
    """Q(t, v(t)) through t^ord(v); zero for a correct germ."""
    q, _ = local_equation(curve, spec.p)
    return _eval_local(q, v, v.order, v.prec_bits)


def _expression_part(terms, p: int, v: TruncatedSeries):
    """t^K * sum c_ab t^-a (t^-p v)^b as a power series, and K."""
    K = max(a + p * b for (a, b) in terms)
    by_b: dict[int, dict[int, GaussianRational]] = {}
    for (a, b), c in terms.items():
        e = K - a - p * b
        by_b.setdefault(b, {})
        by_b[b][e] = by_b[b].get(e, GaussianRational(0)) + c
    top = max(by_b)
    q = [by_b.get(b, {}) for b in range(top + 1)]
    return _eval_local(q, v, v.order, v.prec_bits), K


def germ_of_expression(curve: AlgebraicCurve, spec: GermSpec, expr, order: int,
                       prec_bits: int | None = None) -> TruncatedSeries:
    """Germ at infinity of a rational expression in (z, w) on the anchored branch.

    Returns coefficients of t^0 .. t^order.  Raises :class:`PoleAtInfinity` if
    the germ has a pole at infinity and :class:`DenominatorVanishes` if the
    denominator is zero to the available order.
    """
    if isinstance(expr, str):
        expr = RationalExpression.parse(expr)
    if prec_bits is None and not spec.is_exact:
        prec_bits = DEFAULT_PREC
    p = spec.p
    extra = 4
    for _ in range(8):
        v = newton_germ(curve, spec, order + extra, prec_bits)
        num, kn = _expression_part(expr.numerator, p, v)
        den, kd = _expression_part(expr.denominator, p, v)
        if not den.is_exact:
            den = _drop_negligible_lead(den)
        if den.is_zero:
            raise DenominatorVanishes("denominator vanishes identically along the branch")
        f = series_mul(num, series_inv(den)).shift(kd - kn)
        if not f.is_exact:
            f = _drop_negative_negligible(f)
        if f.order >= order:
            if f.valuation < 0:
                raise PoleAtInfinity(f"germ has a pole of order {-f.valuation} at infinity")
            return f.truncate(order)
        extra += (order - f.order) + 2
    raise SeriesError("could not reach the requested order")


def _drop_negative_negligible(f: TruncatedSeries) -> TruncatedSeries:
    cs = list(f.coeffs)
    v = f.valuation
    while cs and v < 0 and negligible(cs[0], f.prec_bits):
        cs.pop(0)
        v += 1
    return TruncatedSeries(v, tuple(cs), f.order, f.prec_bits)
