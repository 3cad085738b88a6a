"""Linear algebra and polynomial algebra underneath the solvers.

Exact side: fraction-free (Bareiss) elimination over Z or Z[i], exact nullspace
vectors, determinants, resultants, and univariate polynomial gcd /
interpolation over Q(i).  Numeric side: Householder QR with column pivoting
in mpmath for nullspace vectors at arbitrary working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .gaussian import (
    GaussianRational,
    gi_exact_div,
    gi_gcd,
    gi_mul,
    gi_normalize_unit,
    gi_sub,
    to_gaussian_integers,
)


class EmptyNullspace(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# Bareiss elimination


@dataclass
class Echelon:
    """Fraction-free row echelon form: ``rows[r]`` has its pivot at ``pivots[r]``."""

    rows: list
    pivots: list[int]
    ncols: int
    gaussian: bool
    swaps: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def free_columns(self) -> list[int]:
        piv = set(self.pivots)
        return [j for j in range(self.ncols) if j not in piv]


def _bareiss_int(M: list[list[int]], ncols: int) -> tuple[list[int], int]:
    nrows = len(M)
    prev = 1
    piv_row = 0
    pivots = []
    swaps = 0
    for col in range(ncols):
        if piv_row == nrows:
            break
        p = next((i for i in range(piv_row, nrows) if M[i][col]), None)
        if p is None:
            continue
        if p != piv_row:
            M[p], M[piv_row] = M[piv_row], M[p]
            swaps += 1
        prow = M[piv_row]
        pivot = prow[col]
        for i in range(piv_row + 1, nrows):
            row = M[i]
            a = row[col]
            if a:
                for j in range(col + 1, ncols):
                    row[j] = (pivot * row[j] - a * prow[j]) // prev
            elif pivot != prev:
                for j in range(col + 1, ncols):
                    if row[j]:
                        row[j] = (pivot * row[j]) // prev
            row[col] = 0
        prev = pivot
        pivots.append(col)
        piv_row += 1
    return pivots, swaps


def _bareiss_gauss(M: list[list[tuple]], ncols: int) -> tuple[list[int], int]:
    nrows = len(M)
    prev = (1, 0)
    piv_row = 0
    pivots = []
    swaps = 0
    zero = (0, 0)
    for col in range(ncols):
        if piv_row == nrows:
            break
        p = next((i for i in range(piv_row, nrows) if M[i][col] != zero), None)
        if p is None:
            continue
        if p != piv_row:
            M[p], M[piv_row] = M[piv_row], M[p]
            swaps += 1
        prow = M[piv_row]
        pivot = prow[col]
        for i in range(piv_row + 1, nrows):
            row = M[i]
            a = row[col]
            for j in range(col + 1, ncols):
                row[j] = gi_exact_div(gi_sub(gi_mul(pivot, row[j]), gi_mul(a, prow[j])), prev)
            row[col] = zero
        prev = pivot
        pivots.append(col)
        piv_row += 1
    return pivots, swaps


def bareiss_echelon(matrix: Sequence[Sequence[GaussianRational]]) -> Echelon:
    """Fraction-free echelon form of a matrix over Q(i).

    Each row is first scaled to Gaussian integers (row scaling does not change
    the nullspace); elimination then runs entirely in Z (real input) or Z[i].
    """
    if not matrix:
        raise ValueError("empty matrix")
    ncols = len(matrix[0])
    rows = []
    for r in matrix:
        ints, _ = to_gaussian_integers(r)
        rows.append(ints)
    gaussian = any(x[1] for r in rows for x in r)
    if gaussian:
        pivots, swaps = _bareiss_gauss(rows, ncols)
    else:
        rows = [[x[0] for x in r] for r in rows]
        pivots, swaps = _bareiss_int(rows, ncols)
    return Echelon(rows[: len(pivots)], pivots, ncols, gaussian, swaps)


def exact_nullspace_vector(matrix: Sequence[Sequence[GaussianRational]]):
    """One nullspace vector and the nullspace dimension, exactly.

    Free variables are set to zero except the last free column, which is set
    to one; pivot variables follow by back substitution.  The vector is then
    scaled to content-free Gaussian integers with a normalized leading unit.
    """
    ech = bareiss_echelon(matrix)
    free = ech.free_columns
    if not free:
        raise EmptyNullspace("matrix has full column rank")
    x = [GaussianRational(0)] * ech.ncols
    x[free[-1]] = GaussianRational(1)
    conv = (lambda v: GaussianRational(v[0], v[1])) if ech.gaussian else GaussianRational
    for r in range(ech.rank - 1, -1, -1):
        pc = ech.pivots[r]
        row = ech.rows[r]
        s = GaussianRational(0)
        for j in range(pc + 1, ech.ncols):
            if x[j] and row[j] != 0 and row[j] != (0, 0):
                s = s + conv(row[j]) * x[j]
        x[pc] = -s / conv(row[pc])
    return content_free(x), len(free)


def content_free(vec: Sequence[GaussianRational]) -> list[GaussianRational]:
    """Scale to Gaussian integers with unit content; first nonzero entry in the
    closed first quadrant (re > 0, im >= 0)."""
    ints, _ = to_gaussian_integers(vec)
    g = (0, 0)
    for v in ints:
        if v != (0, 0):
            g = gi_gcd(g, v) if g != (0, 0) else v
    if g == (0, 0):
        return [GaussianRational(0)] * len(vec)
    ints = [gi_exact_div(v, g) for v in ints]
    lead = next(v for v in ints if v != (0, 0))
    unit_target = gi_normalize_unit(lead)
    # lead * u = unit_target for a unit u
    u = gi_exact_div(unit_target, lead)
    return [GaussianRational(*gi_mul(v, u)) for v in ints]


def bareiss_det(matrix: Sequence[Sequence[GaussianRational]]) -> GaussianRational:
    n = len(matrix)
    if n == 0:
        return GaussianRational(1)
    scale = GaussianRational(1)
    rows = []
    for r in matrix:
        ints, den = to_gaussian_integers(r)
        rows.append(ints)
        scale = scale * Fraction(1, den)
    gaussian = any(x[1] for r in rows for x in r)
    if gaussian:
        pivots, swaps = _bareiss_gauss(rows, n)
        if len(pivots) < n:
            return GaussianRational(0)
        d = GaussianRational(*rows[n - 1][n - 1])
    else:
        rows = [[x[0] for x in r] for r in rows]
        pivots, swaps = _bareiss_int(rows, n)
        if len(pivots) < n:
            return GaussianRational(0)
        d = GaussianRational(rows[n - 1][n - 1])
    if swaps % 2:
        d = -d
    return d * scale


def sylvester_matrix(p: Sequence, q: Sequence) -> list[list]:
    """Sylvester matrix for ascending coefficient lists (formal degrees len-1)."""
    dp, dq = len(p) - 1, len(q) - 1
    n = dp + dq
    zero = GaussianRational(0)
    rows = []
    pd = list(reversed(p))
    qd = list(reversed(q))
    for i in range(dq):
        rows.append([zero] * i + pd + [zero] * (n - i - dp - 1))
    for i in range(dp):
        rows.append([zero] * i + qd + [zero] * (n - i - dq - 1))
    return rows


def resultant_exact(p: Sequence[GaussianRational], q: Sequence[GaussianRational]) -> GaussianRational:
    return bareiss_det(sylvester_matrix(p, q))


# --------------------------------------------------------------------------
# univariate polynomials over Q(i): ascending coefficient lists


def poly_trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def poly_divmod(a: list, b: list) -> tuple[list, list]:
    a, b = poly_trim(a), poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [GaussianRational(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and r:
        c = r[-1] / lb
        s = len(r) - len(b)
        q[s] = c
        for i, bi in enumerate(b):
            r[s + i] = r[s + i] - c * bi
        r = poly_trim(r[:-1]) if not r[-1] else poly_trim(r)
    return poly_trim(q), r


def poly_gcd(a: list, b: list) -> list:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def poly_derivative(p: list) -> list:
    return [p[i] * i for i in range(1, len(p))]


def squarefree_part(p: list) -> list:
    p = poly_trim(p)
    if len(p) <= 1:
        return p
    g = poly_gcd(p, poly_derivative(p))
    q, r = poly_divmod(p, g)
    assert not r
    return q


def interpolate_exact(xs: Sequence[GaussianRational], ys: Sequence[GaussianRational]) -> list:
    """Newton divided-difference interpolation; returns ascending coefficients."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [GaussianRational(0)] * n
    poly[0] = coef[n - 1]
    deg = 0
    for i in range(n - 2, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [GaussianRational(0)] * n
        for d in range(deg + 1):
            new[d + 1] = new[d + 1] + poly[d]
            new[d] = new[d] - poly[d] * xs[i]
        new[0] = new[0] + coef[i]
        poly = new
        deg += 1
    return poly_trim(poly)


# --------------------------------------------------------------------------
# numeric nullspace


@dataclass
class PivotedQR:
    R: list           # upper-trapezoidal rows
    perm: list[int]   # column permutation: column j of A*P is column perm[j] of A
    rank: int
    diag: list        # |R_kk|


def _abs2(x):
    return x.real * x.real + x.imag * x.imag


def pivoted_qr(A: Sequence[Sequence], threshold_bits: int) -> PivotedQR:
    """Householder QR with column pivoting at the current mpmath precision.

    Rank is the number of diagonal entries above ``|R_00| * 2**-threshold_bits``;
    ``|R_00|`` is the largest column norm, within sqrt(ncols) of the largest
    singular value.  Only R is formed; Q is never needed.
    """
    nrows = len(A)
    ncols = len(A[0])
    real = all(not x.imag for row in A for x in row)
    if real:
        M = [[mpmath.mpf(x.real) for x in row] for row in A]
    else:
        M = [[mpmath.mpc(x) for x in row] for row in A]
    perm = list(range(ncols))
    diag = []
    steps = min(nrows, ncols)
    for k in range(steps):
        norms = [mpmath.fsum(_abs2(M[i][j]) for i in range(k, nrows)) for j in range(k, ncols)]
        jmax = k + max(range(len(norms)), key=lambda t: (norms[t], -t))
        if jmax != k:
            for row in M:
                row[k], row[jmax] = row[jmax], row[k]
            perm[k], perm[jmax] = perm[jmax], perm[k]
        colnorm = mpmath.sqrt(norms[jmax - k])
        if colnorm == 0:
            diag.extend([mpmath.mpf(0)] * (steps - k))
            break
        x0 = M[k][k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 else 1
        alpha = -phase * colnorm
        v = [M[i][k] for i in range(k, nrows)]
        v[0] = v[0] - alpha
        vnorm2 = mpmath.fsum(_abs2(t) for t in v)
        if vnorm2:
            vc = [t.conjugate() for t in v] if not real else v
            for j in range(k + 1, ncols):
                s = mpmath.fsum(vc[i] * M[k + i][j] for i in range(len(v)))
                if s:
                    f = 2 * s / vnorm2
                    for i in range(len(v)):
                        M[k + i][j] -= f * v[i]
        M[k][k] = alpha
        for i in range(k + 1, nrows):
            M[i][k] = mpmath.mpf(0)
        diag.append(abs(alpha))
    top = diag[0] if diag else mpmath.mpf(0)
    tol = top * mpmath.mpf(2) ** (-threshold_bits)
    rank = sum(1 for d in diag if d > tol) if top else 0
    return PivotedQR(M[:steps], perm, rank, diag)


def numeric_nullspace_vector(A: Sequence[Sequence], prec_bits: int):
    """Unit-max-norm nullspace vector and the numerical nullspace dimension.

    Works at ``prec_bits`` with rank threshold ``2**-(prec_bits/2)``.  The
    returned vector spans the nullspace when its dimension is one; otherwise it
    is the basis vector attached to the last free column of the pivoted
    factorization.
    """
    ncols = len(A[0])
    with mpmath.workprec(prec_bits):
        qr = pivoted_qr(A, prec_bits // 2)
        rank = qr.rank
        dim = ncols - rank
        if dim <= 0:
            raise EmptyNullspace("numerical rank equals the number of unknowns")
        R = qr.R
        f = ncols - 1
        y = [mpmath.mpf(0)] * ncols
        y[f] = mpmath.mpf(1)
        for r in range(rank - 1, -1, -1):
            s = R[r][f]
            for j in range(r + 1, rank):
                s += R[r][j] * y[j]
            y[r] = -s / R[r][r]
        x = [mpmath.mpc(0)] * ncols
        for j in range(ncols):
            x[qr.perm[j]] = mpmath.mpc(y[j])
        # unit max magnitude, with the largest entry made real positive
        jbig = max(range(ncols), key=lambda j: (abs(x[j]), -j))
        scale = x[jbig]
        x = [t / scale for t in x]
    return x, dim
