"""Exact Gaussian rationals (elements of Q(i)) and their string form.

Strings follow the ``"p/q+r/si"`` convention: an optional real part, an
optional imaginary part suffixed with ``i``, each an integer or a fraction.
``"3"``, ``"-1/2"``, ``"i"``, ``"-2/3i"``, ``"1+i"``, ``"3/5+6/5i"`` are all
accepted.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import mpmath


class GaussianParseError(ValueError):
    """Malformed Gaussian-rational string; ``offset`` is the 0-based column."""

    def __init__(self, text: str, offset: int, reason: str):
        self.text = text
        self.offset = offset
        super().__init__(f"{reason} at offset {offset} in {text!r}")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part given twice")
            self.re, self.im = re.re, re.im
            return
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(x)
        if isinstance(x, str):
            return parse_gaussian(x)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, float):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero Gaussian rational")
        if not o.im:
            return GaussianRational(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return (GaussianRational(1) / self) ** (-e)
        result = GaussianRational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(self.norm())

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _as_gr(other)
        if o is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_mpc(self):
        """Value as an mpmath ``mpc`` at the current working precision."""
        return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                          mpmath.mpf(self.im.numerator) / self.im.denominator)

    @property
    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __str__(self):
        if not self.im:
            return _frac_str(self.re)
        im = "" if abs(self.im) == 1 else _frac_str(abs(self.im))
        sign = "-" if self.im < 0 else "+"
        if not self.re:
            return f"{'-' if self.im < 0 else ''}{im}i"
        return f"{_frac_str(self.re)}{sign}{im}i"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _as_gr(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return NotImplemented


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"p/q+r/si"``-style strings into a :class:`GaussianRational`."""
    s = text
    pos = 0
    n = len(s)

    def skip_ws():
        nonlocal pos
        while pos < n and s[pos].isspace():
            pos += 1

    def read_uint():
        nonlocal pos
        start = pos
        while pos < n and s[pos].isdigit():
            pos += 1
        return int(s[start:pos]) if pos > start else None

    re = Fraction(0)
    im = Fraction(0)
    seen_re = seen_im = False
    terms = 0
    skip_ws()
    if pos == n:
        raise GaussianParseError(text, 0, "empty string")
    while True:
        skip_ws()
        if pos == n:
            break
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
            skip_ws()
        elif terms:
            raise GaussianParseError(text, pos, "expected '+' or '-'")
        start = pos
        num = read_uint()
        value = None
        if num is not None:
            value = Fraction(num)
            if pos < n and s[pos] == "/":
                pos += 1
                den = read_uint()
                if den is None:
                    raise GaussianParseError(text, pos, "expected denominator")
                if den == 0:
                    raise GaussianParseError(text, pos - 1, "zero denominator")
                value = Fraction(num, den)
        if pos < n and s[pos] in "iI":
            pos += 1
            if seen_im:
                raise GaussianParseError(text, start, "imaginary part given twice")
            im = sign * (value if value is not None else Fraction(1))
            seen_im = True
        else:
            if value is None:
                raise GaussianParseError(text, pos, "expected a number")
            if pos < n and not (s[pos].isspace() or s[pos] in "+-"):
                raise GaussianParseError(text, pos, f"unexpected character {s[pos]!r}")
            if seen_re or seen_im:
                raise GaussianParseError(text, start, "real part must come first")
            re = sign * value
            seen_re = True
        terms += 1
        if terms > 2:
            raise GaussianParseError(text, start, "too many terms")
    return GaussianRational(re, im)


# Gaussian integers as (re, im) pairs of Python ints -----------------------

def gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def gi_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def gi_exact_div(a, b):
    """``a / b`` in Z[i]; the caller guarantees divisibility."""
    if not b[1]:
        q0, r0 = divmod(a[0], b[0])
        q1, r1 = divmod(a[1], b[0])
        assert not r0 and not r1, "inexact Gaussian-integer division"
        return (q0, q1)
    d = b[0] * b[0] + b[1] * b[1]
    re, r0 = divmod(a[0] * b[0] + a[1] * b[1], d)
    im, r1 = divmod(a[1] * b[0] - a[0] * b[1], d)
    assert not r0 and not r1, "inexact Gaussian-integer division"
    return (re, im)


def gi_divmod(a, b):
    """Euclidean division in Z[i] (nearest-integer quotient)."""
    d = b[0] * b[0] + b[1] * b[1]
    nre = a[0] * b[0] + a[1] * b[1]
    nim = a[1] * b[0] - a[0] * b[1]
    q = (_round_div(nre, d), _round_div(nim, d))
    return q, gi_sub(a, gi_mul(q, b))


def _round_div(a: int, b: int) -> int:
    return (2 * a + b) // (2 * b)


def gi_gcd(a, b):
    while b != (0, 0):
        _, r = gi_divmod(a, b)
        a, b = b, r
    return a


def gi_normalize_unit(a):
    """Associate of ``a`` with re > 0 and im >= 0 (zero stays zero)."""
    re, im = a
    for _ in range(4):
        if re > 0 and im >= 0:
            return (re, im)
        re, im = -im, re
    return (re, im)


def to_gaussian_integers(row):
    """Scale a row of Gaussian rationals to Gaussian integers by the lcm of denominators."""
    den = 1
    for x in row:
        den = math.lcm(den, x.re.denominator, x.im.denominator)
    return [(int(x.re * den), int(x.im * den)) for x in row], den


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
