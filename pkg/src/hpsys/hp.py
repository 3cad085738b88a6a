"""k-th polynomials of a Hermite-Pade m-system at infinity.

For a tuple of germs [1, f_1, ..., f_m] in t = 1/z and 1 <= k <= m, the k-th
polynomials P_I (I a k-subset of {0..m}) have degree <= (m+1-k)n and satisfy,
for every k-subset J = {j_1 < ... < j_k} with j_1 >= 1,

    P_J + sum_s (-1)^s P_{{0} u J - {j_s}} f_{j_s} = O(t^(kn+1)).

Polynomials are stored with ascending coefficients in z.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import mpmath

from .gaussian import GaussianRational
from .linalg import exact_nullspace_vector, numeric_nullspace_vector
from .series import DEFAULT_PREC, TruncatedSeries, _mpc_str, _parse_mpc, germ_of_expression, series_mul, series_pow

Subset = tuple[int, ...]


class TruncationTooShort(ValueError):
    pass


def ksubsets(m: int, k: int) -> list[Subset]:
    return list(itertools.combinations(range(m + 1), k))


# --------------------------------------------------------------------------
# germ tuples


@dataclass(frozen=True)
class GermTuple:
    """The germs f_1..f_m at infinity (f_0 = 1 is implicit), all in one domain."""

    germs: tuple

    def __post_init__(self):
        gs = tuple(self.germs)
        if not gs:
            raise ValueError("at least one germ is required")
        domains = {g.domain for g in gs}
        if len(domains) > 1:
            raise ValueError("germs must share a coefficient domain")
        for g in gs:
            if not g.is_zero and g.valuation < 0:
                raise ValueError("germs must be holomorphic at infinity (valuation >= 0)")
        object.__setattr__(self, "germs", gs)

    @property
    def m(self) -> int:
        return len(self.germs)

    @property
    def order(self) -> int:
        return min(g.order for g in self.germs)

    @property
    def is_exact(self) -> bool:
        return self.germs[0].is_exact

    @property
    def prec_bits(self) -> int | None:
        return self.germs[0].prec_bits

    def f(self, j: int) -> TruncatedSeries:
        if j == 0:
            return TruncatedSeries.constant(1, self.order, self.prec_bits)
        return self.germs[j - 1]

    def max_n(self) -> int:
        return self.order // (self.m + 1)

    def to_numeric(self, prec_bits: int = DEFAULT_PREC) -> "GermTuple":
        return GermTuple(tuple(g.to_numeric(prec_bits) for g in self.germs))

    @classmethod
    def power_tuple(cls, f: TruncatedSeries, m: int) -> "GermTuple":
        """[f, f^2, ..., f^m]."""
        return cls(tuple(series_pow(f, j) for j in range(1, m + 1)))

    @classmethod
    def from_expressions(cls, curve, spec, exprs: Sequence, order: int,
                         prec_bits: int | None = None) -> "GermTuple":
        return cls(tuple(germ_of_expression(curve, spec, e, order, prec_bits) for e in exprs))

    def to_dict(self) -> dict:
        return {"m": self.m, "germs": [g.to_dict() for g in self.germs]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "GermTuple":
        return cls(tuple(TruncatedSeries.from_dict(g) for g in data["germs"]))


# --------------------------------------------------------------------------
# the linear system


@dataclass
class HPSystem:
    """Sparse coefficient matrix of the defining conditions.

    Column (I, d) holds the coefficient of z^d in P_I, subsets in lexicographic
    order; row (J, r) is the coefficient of t^r, r = -D..kn, of block J.
    """

    germs: GermTuple
    n: int
    k: int
    subsets: list[Subset]
    blocks: list[Subset]
    entries: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.germs.m

    @property
    def degree(self) -> int:
        return (self.m + 1 - self.k) * self.n

    @property
    def rows_per_block(self) -> int:
        return (self.m + 1) * self.n + 1

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.blocks) * self.rows_per_block, len(self.subsets) * (self.degree + 1)

    @property
    def is_exact(self) -> bool:
        return self.germs.is_exact

    def column(self, I: Subset, d: int) -> int:
        return self.subsets.index(I) * (self.degree + 1) + d

    def to_dense(self) -> list[list]:
        nr, nc = self.shape
        zero = GaussianRational(0) if self.is_exact else mpmath.mpc(0)
        M = [[zero] * nc for _ in range(nr)]
        for (i, j), v in self.entries.items():
            M[i][j] = v
        return M


def assemble_system(germs: GermTuple, n: int, k: int) -> HPSystem:
    m = germs.m
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}]")
    if n < 0:
        raise ValueError("n must be nonnegative")
    need = (m + 1) * n
    if germs.order < need:
        raise TruncationTooShort(f"germs are known through t^{germs.order}; t^{need} is required")
    subsets = ksubsets(m, k)
    blocks = [J for J in subsets if J[0] >= 1]
    sys_ = HPSystem(germs, n, k, subsets, blocks)
    D = sys_.degree
    col0 = {I: i * (D + 1) for i, I in enumerate(subsets)}
    rpb = sys_.rows_per_block
    one = GaussianRational(1) if germs.is_exact else mpmath.mpc(1)
    entries = sys_.entries
    with mpmath.workprec(germs.prec_bits or DEFAULT_PREC):
        for b, J in enumerate(blocks):
            base = b * rpb
            # P_J contributes z^d = t^-d
            for d in range(D + 1):
                entries[(base + D - d, col0[J] + d)] = one
            for s, js in enumerate(J, start=1):
                I = tuple(sorted((0,) + tuple(x for x in J if x != js)))
                f = germs.f(js)
                sign = -1 if s % 2 else 1
                for r in range(-D, k * n + 1):
                    row = base + r + D
                    for d in range(D + 1):
                        e = r + d
                        if e < 0:
                            continue
                        c = f.coeff(e)
                        if c:
                            key = (row, col0[I] + d)
                            v = entries.get(key, 0) + (c if sign > 0 else -c)
                            if v:
                                entries[key] = v
                            else:
                                entries.pop(key, None)
    nr, nc = sys_.shape
    assert nr == (n * (m + 1) + 1) * math.comb(m, k)
    assert nc == (n * (m + 1 - k) + 1) * math.comb(m + 1, k)
    return sys_


# --------------------------------------------------------------------------
# solutions


@dataclass
class HPSolution:
    n: int
    k: int
    m: int
    subsets: list[Subset]
    polys: list[list]
    backend: str
    prec_bits: int | None
    nullspace_dim: int
    max_residual: object = None
    solve_seconds: float = 0.0

    def poly(self, I: Sequence[int]) -> list:
        return self.polys[self.subsets.index(tuple(I))]

    @property
    def degree(self) -> int:
        return (self.m + 1 - self.k) * self.n

    @property
    def is_exact(self) -> bool:
        return self.backend == "exact"

    def evaluate(self, I: Sequence[int], z):
        """Horner evaluation of P_I at z (exact for Gaussian-rational z in exact mode)."""
        coeffs = self.poly(I)
        if self.is_exact and isinstance(z, (GaussianRational, int)):
            acc = GaussianRational(0)
            for c in reversed(coeffs):
                acc = acc * z + c
            return acc
        with mpmath.workprec(self.prec_bits or DEFAULT_PREC):
            z = z.to_mpc() if isinstance(z, GaussianRational) else mpmath.mpc(z)
            acc = mpmath.mpc(0)
            for c in reversed(coeffs):
                acc = acc * z + (c.to_mpc() if isinstance(c, GaussianRational) else c)
            return acc

    def scaled(self, c) -> "HPSolution":
        if self.is_exact:
            c = GaussianRational.coerce(c)
            polys = [[c * x for x in p] for p in self.polys]
        else:
            with mpmath.workprec(self.prec_bits):
                c = mpmath.mpc(c)
                polys = [[c * x for x in p] for p in self.polys]
        return HPSolution(self.n, self.k, self.m, list(self.subsets), polys, self.backend,
                          self.prec_bits, self.nullspace_dim, self.max_residual, self.solve_seconds)

    def to_dict(self) -> dict:
        if self.is_exact:
            enc = str
        else:
            digits = int(self.prec_bits * math.log10(2)) + 2
            enc = lambda c: _mpc_str(c, digits)  # noqa: E731
        return {
            "n": self.n, "k": self.k, "m": self.m,
            "backend": self.backend,
            "prec_bits": self.prec_bits,
            "nullspace_dim": self.nullspace_dim,
            "max_residual": None if self.max_residual is None else str(self.max_residual),
            "polynomials": [{"subset": list(I), "coeffs": [enc(c) for c in p]}
                            for I, p in zip(self.subsets, self.polys)],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HPSolution":
        from .gaussian import parse_gaussian
        exact = data["backend"] == "exact"
        prec = data.get("prec_bits")
        subsets, polys = [], []
        with mpmath.workprec(prec or DEFAULT_PREC):
            for entry in data["polynomials"]:
                subsets.append(tuple(entry["subset"]))
                if exact:
                    polys.append([parse_gaussian(c) for c in entry["coeffs"]])
                else:
                    polys.append([_parse_mpc(c) for c in entry["coeffs"]])
        return cls(data["n"], data["k"], data["m"], subsets, polys, data["backend"], prec,
                   data["nullspace_dim"], data.get("max_residual"))


def default_backend(germs: GermTuple, n: int) -> str:
    return "exact" if germs.is_exact and n <= 8 else "numeric"


def solve_hp(system: HPSystem, backend: str | None = None, prec_bits: int = DEFAULT_PREC) -> HPSolution:
    """One nonzero solution of the assembled system.

    ``exact``: fraction-free elimination over Q(i), last free variable set to 1,
    content-free Gaussian-integer output.  ``numeric``: pivoted QR at
    ``prec_bits``, output scaled to unit largest coefficient.
    """
    germs = system.germs
    if backend is None:
        backend = default_backend(germs, system.n)
    t0 = time.perf_counter()
    if backend == "exact":
        if not germs.is_exact:
            raise ValueError("the exact backend needs exact germs")
        vec, dim = exact_nullspace_vector(system.to_dense())
        prec = None
    elif backend == "numeric":
        if germs.is_exact or germs.prec_bits < prec_bits:
            germs = germs.to_numeric(prec_bits)
            system = assemble_system(germs, system.n, system.k)
        vec, dim = numeric_nullspace_vector(system.to_dense(), prec_bits)
        prec = prec_bits
    else:
        raise ValueError(f"unknown backend {backend!r}")
    D = system.degree
    polys = [list(vec[i * (D + 1):(i + 1) * (D + 1)]) for i in range(len(system.subsets))]
    return HPSolution(system.n, system.k, system.m, list(system.subsets), polys, backend, prec, dim,
                      solve_seconds=time.perf_counter() - t0)


def hp_polynomials(germs: GermTuple, n: int, k: int, backend: str | None = None,
                   prec_bits: int = DEFAULT_PREC, verify: bool = True) -> HPSolution:
    """Assemble, solve and (optionally) record the order-condition residual."""
    sol = solve_hp(assemble_system(germs, n, k), backend, prec_bits)
    if verify:
        sol.max_residual = verify_order_conditions(sol, germs).max_residual
    return sol


# --------------------------------------------------------------------------
# verification by independent series arithmetic


@dataclass
class ResidualReport:
    """Largest |coefficient| of t^-D..t^kn per checked combination."""

    residuals: dict
    scale: float
    exact: bool

    @property
    def max_residual(self):
        vals = list(self.residuals.values())
        if not vals:
            return 0
        return max(vals) if not self.exact else max(vals, key=abs)

    @property
    def all_zero(self) -> bool:
        return all(not v for v in self.residuals.values())

    def within(self, rel_tol) -> bool:
        return all(abs(v) <= rel_tol * self.scale for v in self.residuals.values())


def _poly_as_series(coeffs: Sequence, top: int, prec_bits) -> TruncatedSeries:
    """P(z) = sum c_d z^d as the Laurent series sum c_d t^-d, truncated at t^top."""
    D = len(coeffs) - 1
    return TruncatedSeries.from_coeffs(list(reversed(coeffs)), order=top, valuation=-D, prec_bits=prec_bits)


def _combination(sol: HPSolution, germs: GermTuple, idx: Subset, prec_bits):
    """sum_s (-1)^s P_{idx - idx_s} f_{idx_s} through t^kn."""
    top = sol.k * sol.n
    total = None
    for s, i_s in enumerate(idx):
        rest = tuple(x for x in idx if x != i_s)
        p = _poly_as_series(sol.poly(rest), top, prec_bits)
        term = series_mul(p, germs.f(i_s))
        if s % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _solution_germs(sol: HPSolution, germs: GermTuple) -> tuple[GermTuple, int | None]:
    if sol.is_exact:
        if not germs.is_exact:
            raise ValueError("exact solutions are verified against exact germs")
        return germs, None
    return germs.to_numeric(sol.prec_bits), sol.prec_bits


def _report(sol, germs, combos) -> ResidualReport:
    germs, prec = _solution_germs(sol, germs)
    D = sol.degree
    res = {}
    with mpmath.workprec(prec or DEFAULT_PREC):
        for idx in combos:
            c = _combination(sol, germs, idx, prec)
            vals = [abs(x) for x in c.coefficients(-D, sol.k * sol.n)] if not c.is_zero else [0]
            if sol.is_exact:
                res[idx] = max(vals) if any(vals) else 0
            else:
                res[idx] = float(max(vals)) if not c.is_zero else 0.0
        pmax = max((abs(complex(x)) for p in sol.polys for x in p), default=0.0)
        fmax = max((abs(complex(x)) for j in range(1, germs.m + 1) for x in germs.f(j).coeffs), default=0.0)
    return ResidualReport(res, pmax * max(1.0, fmax), sol.is_exact)


def verify_order_conditions(sol: HPSolution, germs: GermTuple) -> ResidualReport:
    """Residuals of the defining blocks J (j_1 >= 1), keyed by {0} u J."""
    blocks = [(0,) + J for J in ksubsets(sol.m, sol.k) if J[0] >= 1]
    return _report(sol, germs, blocks)


def verify_homogeneous_conditions(sol: HPSolution, germs: GermTuple) -> ResidualReport:
    """Residuals of the homogeneous form for every (k+1)-subset of {0..m}."""
    return _report(sol, germs, ksubsets(sol.m, sol.k + 1) if sol.k < sol.m else [tuple(range(sol.m + 1))])


# --------------------------------------------------------------------------
# classical degenerations


def type_ii_residuals(sol: HPSolution, germs: GermTuple) -> list:
    """k = 1: max |coeff| of q_0 f_j - q_j through t^n for each j (should vanish)."""
    if sol.k != 1:
        raise ValueError("type II form needs k = 1")
    germs, prec = _solution_germs(sol, germs)
    out = []
    with mpmath.workprec(prec or DEFAULT_PREC):
        q0 = _poly_as_series(sol.poly((0,)), sol.n, prec)
        for j in range(1, sol.m + 1):
            c = series_mul(q0, germs.f(j)) - _poly_as_series(sol.poly((j,)), sol.n, prec)
            out.append(max((abs(x) for x in c.coefficients(-sol.degree, sol.n)), default=0))
    return out


def type_i_polynomials(sol: HPSolution) -> list[list]:
    """k = m: Q_j = (-1)^j P_{{0..m} - {j}}, j = 0..m."""
    if sol.k != sol.m:
        raise ValueError("type I form needs k = m")
    full = tuple(range(sol.m + 1))
    out = []
    with mpmath.workprec(sol.prec_bits or 53):
        for j in full:
            p = sol.poly(tuple(x for x in full if x != j))
            out.append([-c for c in p] if j % 2 else list(p))
    return out


def type_i_residual(sol: HPSolution, germs: GermTuple):
    """max |coeff| of sum_j Q_j f_j through t^(mn) (should vanish)."""
    germs, prec = _solution_germs(sol, germs)
    top = sol.m * sol.n
    with mpmath.workprec(prec or DEFAULT_PREC):
        total = None
        for j, q in enumerate(type_i_polynomials(sol)):
            term = series_mul(_poly_as_series(q, top, prec), germs.f(j))
            total = term if total is None else total + term
        return max((abs(x) for x in total.coefficients(-sol.degree, top)), default=0)
