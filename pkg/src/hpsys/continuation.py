"""Curve services: critical values, fibers, and analytic continuation of roots.

Continuation is predictor-corrector tracking in double precision along a
:class:`Path`; the endpoint root is then polished by Newton's method at the
requested working precision, so returned roots carry full precision even
though the path itself is followed cheaply.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .gaussian import GaussianRational
from .linalg import interpolate_exact, poly_trim, resultant_exact, squarefree_part
from .polynomial import AlgebraicCurve, _derivative
from .roots import aberth, canonical_order

DEFAULT_PREC = 256


class ContinuationError(ArithmeticError):
    pass


class StepCollapse(ContinuationError):
    pass


class SheetAmbiguity(ContinuationError):
    pass


class DegenerateFiber(ContinuationError):
    pass


def _mpc(z):
    if isinstance(z, GaussianRational):
        return z.to_mpc()
    return mpmath.mpc(z)


# --------------------------------------------------------------------------
# critical values


def discriminant_polynomial(curve: AlgebraicCurve) -> list[GaussianRational]:
    """Res_w(P, dP/dw) as an exact polynomial in z (ascending coefficients).

    Evaluated exactly at integer points and interpolated; the degree is at most
    (2m+1) deg_z P.
    """
    bound = (2 * curve.m + 1) * curve.degree_z
    xs, ys = [], []
    for k in range(bound + 1):
        z0 = GaussianRational(k)
        p = curve.w_poly_exact(z0)
        xs.append(z0)
        ys.append(resultant_exact(p, _derivative(p)))
    return interpolate_exact(xs, ys)


@dataclass(frozen=True)
class CriticalValues:
    values: tuple          # finite critical values, canonical (re, im) order, mpc
    infinite: bool         # True if infinity is a branch point
    prec_bits: int

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    @property
    def max_modulus(self):
        return max((abs(v) for v in self.values), default=mpmath.mpf(0))


def critical_values(curve: AlgebraicCurve, prec_bits: int = DEFAULT_PREC) -> CriticalValues:
    """Finite critical values of z: P(z, w) = 0, plus a flag for infinity.

    Finite values are the roots of Res_w(P, P_w), which also contains the zeros
    of the leading coefficient in w.  The resultant is assembled exactly, made
    square-free exactly, and its roots are found at ``prec_bits``.  Infinity is
    flagged when continuation of the fiber once around a circle enclosing all
    finite critical values is a nontrivial permutation.
    """
    return _critical_values_cached(curve, prec_bits)


@functools.lru_cache(maxsize=64)
def _critical_values_cached(curve: AlgebraicCurve, prec_bits: int) -> CriticalValues:
    disc = discriminant_polynomial(curve)
    sf = squarefree_part(disc) if len(poly_trim(disc)) > 1 else []
    with mpmath.workprec(prec_bits):
        vals = aberth([c.to_mpc() for c in sf], prec_bits) if len(sf) > 1 else []
        vals = [_polish_simple_root(sf, v, prec_bits) for v in vals]
        order = canonical_order(vals, prec_bits)
        vals = tuple(vals[i] for i in order)
    finite = CriticalValues(vals, False, prec_bits)
    perm = _loop_permutation_at_infinity(curve, finite)
    return CriticalValues(vals, any(i != j for i, j in enumerate(perm)), prec_bits)


def _polish_simple_root(poly, x, prec_bits):
    cs = [c.to_mpc() for c in poly]
    dcs = [cs[i] * i for i in range(1, len(cs))]
    for _ in range(10):
        p = mpmath.polyval(cs[::-1], x)
        dp = mpmath.polyval(dcs[::-1], x)
        if not dp:
            break
        dx = p / dp
        x -= dx
        if abs(dx) <= mpmath.mpf(2) ** (-prec_bits) * max(1, abs(x)):
            break
    return x


def _loop_permutation_at_infinity(curve: AlgebraicCurve, cvs: CriticalValues) -> list[int]:
    R = float(cvs.max_modulus)
    rho = 2 * R + 2
    clearance = clearance_radius(list(cvs.values), [rho])
    path = Path.circle(0, rho, clearance=clearance)
    return track_permutation(curve, path, cvs.prec_bits)


# --------------------------------------------------------------------------
# fibers


@dataclass(frozen=True)
class FiberRoots:
    z: object
    roots: tuple        # canonical (re, im) order
    separation: object  # min pairwise distance
    prec_bits: int

    def nearest(self, w) -> tuple[int, object]:
        dists = [abs(r - w) for r in self.roots]
        i = min(range(len(dists)), key=dists.__getitem__)
        return i, dists[i]

    def radius(self, i: int):
        """Half the distance from root i to its nearest neighbour."""
        return min(abs(self.roots[i] - r) for j, r in enumerate(self.roots) if j != i) / 2


def fiber_roots(curve: AlgebraicCurve, z, prec_bits: int = DEFAULT_PREC,
                critical: Sequence | None = None, clearance=None) -> FiberRoots:
    """All m+1 roots of P(z, .), polished to |P| < 2^-(prec_bits/2) * scale.

    If ``critical`` and ``clearance`` are given, a point within ``clearance`` of
    a critical value raises :class:`DegenerateFiber`.  Coincident roots or a
    vanishing leading coefficient raise it regardless.
    """
    with mpmath.workprec(prec_bits):
        zz = _mpc(z)
        if critical is not None and clearance is not None:
            for c in critical:
                if abs(zz - c) < clearance:
                    raise DegenerateFiber(f"z={mpmath.nstr(zz, 8)} is within {clearance} of critical value {mpmath.nstr(c, 8)}")
        coeffs = curve.w_poly(zz)
        if not coeffs[-1]:
            raise DegenerateFiber("leading coefficient in w vanishes at z")
        raw = aberth(coeffs, prec_bits)
        roots = [_newton_w(coeffs, r, prec_bits) for r in raw]
        order = canonical_order(roots, prec_bits)
        roots = tuple(roots[i] for i in order)
        sep = min(abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots)))
        scale = max(abs(r) for r in roots) + 1
        if sep < mpmath.mpf(2) ** (-(prec_bits // 4)) * scale:
            raise DegenerateFiber(f"fiber over z={mpmath.nstr(zz, 8)} has a repeated root")
        return FiberRoots(zz, roots, sep, prec_bits)


def _newton_w(coeffs, w, prec_bits, max_iter: int = 60):
    """Newton in w on sum coeffs[j] w^j at the current working precision."""
    cd = coeffs[::-1]
    dcd = [coeffs[j] * j for j in range(len(coeffs) - 1, 0, -1)]
    tol = mpmath.mpf(2) ** (-prec_bits)
    w = mpmath.mpc(w)
    for _ in range(max_iter):
        p = mpmath.polyval(cd, w)
        dp = mpmath.polyval(dcd, w)
        if not dp:
            break
        dw = p / dp
        w -= dw
        if abs(dw) <= tol * max(1, abs(w)):
            break
    return w


# --------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Segment:
    kind: str                 # "line" or "arc"
    start: complex
    end: complex
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    sweep: float = 0.0        # signed; positive = counterclockwise

    @property
    def length(self) -> float:
        if self.kind == "line":
            return abs(self.end - self.start)
        return abs(self.sweep) * self.radius

    def point(self, s: float) -> complex:
        L = self.length
        if L == 0:
            return self.end
        u = min(max(s / L, 0.0), 1.0)
        if u == 1.0:
            return self.end
        if self.kind == "line":
            return self.start + (self.end - self.start) * u
        return self.center + self.radius * cmath.exp(1j * (self.theta0 + self.sweep * u))

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment("line", self.end, self.start)
        return Segment("arc", self.end, self.start, self.center, self.radius,
                       self.theta0 + self.sweep, -self.sweep)


@dataclass(frozen=True)
class Path:
    """Piecewise linear / circular path in the z-plane.

    ``z_start`` and ``z_end`` hold the endpoints at full precision (the
    segments themselves are double precision); ``clearance`` is the declared
    distance kept from critical values and ``step`` the initial step length.
    """

    segments: tuple
    z_start: object
    z_end: object
    clearance: float
    step: float = field(default=0.0)

    def __post_init__(self):
        if not self.step:
            object.__setattr__(self, "step", self.clearance / 8)

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    @property
    def closed(self) -> bool:
        return self.z_start == self.z_end

    def reversed(self) -> "Path":
        return Path(tuple(s.reversed() for s in reversed(self.segments)), self.z_end, self.z_start,
                    self.clearance, self.step)

    def then(self, other: "Path") -> "Path":
        return Path(self.segments + other.segments, self.z_start, other.z_end,
                    min(self.clearance, other.clearance), min(self.step, other.step))

    @classmethod
    def line(cls, a, b, clearance: float, avoid: Sequence = ()) -> "Path":
        """Straight segment from a to b, detouring around each point of ``avoid``
        that lies within ``clearance`` of it along a semicircle of that radius.

        The detour keeps the avoided point on the side of the segment it
        already lies on (the short arc); a point exactly on the segment is
        passed counterclockwise, i.e. kept on the traveller's left.
        """
        za, zb = _mpc(a), _mpc(b)
        segs = detour_segments(complex(za), complex(zb), [complex(c) for c in avoid], clearance)
        return cls(tuple(segs), za, zb, clearance)

    @classmethod
    def circle(cls, center, radius: float, clearance: float, start_angle: float = 0.0,
               turns: int = 1) -> "Path":
        c = complex(center)
        with mpmath.workprec(DEFAULT_PREC):
            z0 = _mpc(center) + mpmath.mpf(radius) * mpmath.expjpi(mpmath.mpf(start_angle) / mpmath.pi)
        p0 = complex(z0)
        seg = Segment("arc", p0, p0, c, float(radius), start_angle, 2 * math.pi * turns)
        return cls((seg,), z0, z0, clearance)


def side_of(a: complex, b: complex, c: complex) -> float:
    """Cross product sign: > 0 when c lies left of the directed line a -> b."""
    d = b - a
    e = c - a
    return d.real * e.imag - d.imag * e.real


def detour_segments(a: complex, b: complex, avoid: Sequence[complex], r: float) -> list[Segment]:
    d = b - a
    L = abs(d)
    if L == 0:
        return []
    u = d / L
    hits = []
    for c in avoid:
        rel = (c - a) * u.conjugate()
        s, off = rel.real, rel.imag
        if abs(off) < r and -r < s < L + r:
            half = math.sqrt(r * r - off * off)
            s_in, s_out = s - half, s + half
            if s_in <= 0 or s_out >= L:
                raise DegenerateFiber("path endpoint lies inside a clearance disk")
            hits.append((s_in, s_out, c, side_of(a, b, c)))
    hits.sort(key=lambda h: h[0])
    segs = []
    cur = a
    for s_in, s_out, c, side in hits:
        p_in = a + u * s_in
        p_out = a + u * s_out
        segs.append(Segment("line", cur, p_in))
        th_in = cmath.phase(p_in - c)
        th_out = cmath.phase(p_out - c)
        if side >= 0:
            sweep = (th_out - th_in) % (2 * math.pi)
        else:
            sweep = -((th_in - th_out) % (2 * math.pi))
        segs.append(Segment("arc", p_in, p_out, c, r, th_in, sweep))
        cur = p_out
    segs.append(Segment("line", cur, b))
    return [s for s in segs if s.length > 0]


def clearance_radius(critical: Sequence, extra_points: Sequence = ()) -> float:
    """Half the minimum pairwise distance among critical values and extra points, capped at 1."""
    pts = [complex(c) for c in critical] + [complex(p) for p in extra_points]
    best = 2.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dij = abs(pts[i] - pts[j])
            if dij > 0:
                best = min(best, dij)
    return min(1.0, best / 2)


# --------------------------------------------------------------------------
# tracking


class _DoubleCurve:
    """Double-precision evaluation of P, P_w, P_z for the tracker."""

    def __init__(self, curve: AlgebraicCurve):
        cols = curve.w_coefficients()
        self.C = np.array([[complex(c) for c in col] for col in cols], dtype=complex)
        self.dz = self.C.shape[1] - 1
        self.Cz = self.C[:, 1:] * np.arange(1, self.dz + 1) if self.dz else np.zeros((self.C.shape[0], 1), complex)

    def wcoeffs(self, z: complex) -> np.ndarray:
        powers = z ** np.arange(self.dz + 1)
        return self.C @ powers

    def wcoeffs_dz(self, z: complex) -> np.ndarray:
        if not self.dz:
            return np.zeros(self.C.shape[0], complex)
        powers = z ** np.arange(self.dz)
        return self.Cz @ powers

    @staticmethod
    def horner(asc: np.ndarray, w: complex) -> complex:
        acc = 0j
        for c in asc[::-1]:
            acc = acc * w + c
        return acc

    def eval(self, z: complex, w: complex):
        a = self.wcoeffs(z)
        p = self.horner(a, w)
        dpw = self.horner(a[1:] * np.arange(1, len(a)), w)
        dpz = self.horner(self.wcoeffs_dz(z), w)
        return p, dpw, dpz, a


def _separation(a: np.ndarray, w: complex) -> float:
    roots = np.roots(a[::-1])
    if len(roots) < 2:
        return math.inf
    d = np.sort(np.abs(roots - w))
    return float(d[1])


def _track(dc: _DoubleCurve, path: Path, w: complex) -> complex:
    h = path.step
    h_max = path.clearance
    floor = path.clearance * 2.0 ** -24
    for seg in path.segments:
        L = seg.length
        s = 0.0
        z = seg.start
        accepted = 0
        while s < L:
            step = min(h, L - s)
            z_new = seg.point(s + step)
            _, dpw, dpz, _ = dc.eval(z, w)
            w_pred = w - dpz / dpw * (z_new - z) if dpw else w
            wc = w_pred
            converged = False
            for _ in range(8):
                p, dpw_new, _, a = dc.eval(z_new, wc)
                if not dpw_new:
                    break
                delta = p / dpw_new
                wc -= delta
                if abs(delta) <= 1e-13 * (1 + abs(wc)):
                    converged = True
                    break
            ok = converged and abs(wc - w_pred) < _separation(dc.wcoeffs(z_new), wc) / 3
            if ok:
                z, w = z_new, wc
                s += step
                accepted += 1
                if accepted >= 4:
                    h = min(2 * h, h_max)
                    accepted = 0
            else:
                h /= 2
                accepted = 0
                if h < floor:
                    raise StepCollapse(f"step fell below {floor:.3g} near z={z_new:.6g}")
    return w


def continue_branch(curve: AlgebraicCurve, path: Path, start_root, prec_bits: int = DEFAULT_PREC):
    """Root above the end of ``path`` reached by continuing ``start_root``.

    ``start_root`` must be within a third of the local separation of exactly
    one fiber root at the start; that root (at full precision) is what gets
    continued.  The endpoint value is Newton-polished at ``prec_bits``.
    """
    start_fiber = fiber_roots(curve, path.z_start, prec_bits)
    i, dist = start_fiber.nearest(mpmath.mpc(start_root))
    if dist >= start_fiber.radius(i) * 2 / 3:
        raise SheetAmbiguity("start value is not clearly attached to one fiber root")
    return _continue_from(curve, path, start_fiber.roots[i], prec_bits)


def _continue_from(curve: AlgebraicCurve, path: Path, root, prec_bits: int, dc: _DoubleCurve | None = None):
    dc = dc or _DoubleCurve(curve)
    w_end = _track(dc, path, complex(root))
    with mpmath.workprec(prec_bits):
        coeffs = curve.w_poly(_mpc(path.z_end))
        polished = _newton_w(coeffs, w_end, prec_bits)
        sep = _separation(dc.wcoeffs(complex(path.z_end)), complex(polished))
        if abs(complex(polished) - w_end) >= sep / 3:
            raise SheetAmbiguity("endpoint polish moved the root to another sheet")
    return polished


def track_permutation(curve: AlgebraicCurve, loop: Path, prec_bits: int = DEFAULT_PREC) -> list[int]:
    """Permutation sigma of fiber labels at the loop's base point: root i continues to root sigma[i]."""
    fiber = fiber_roots(curve, loop.z_start, prec_bits)
    dc = _DoubleCurve(curve)
    perm = []
    for r in fiber.roots:
        end = _continue_from(curve, loop, r, prec_bits, dc)
        j, dist = fiber.nearest(end)
        if dist >= fiber.radius(j):
            raise SheetAmbiguity("continued root does not land on the fiber")
        perm.append(j)
    if len(set(perm)) != len(perm):
        raise PermutationCollision("two roots continued to the same target")
    return perm


class PermutationCollision(ContinuationError):
    pass


# --------------------------------------------------------------------------
# the germ branch


def reference_point(cvs: CriticalValues, z) -> mpmath.mpc:
    """Point of modulus 4 max|cv| + 4 on the ray from 0 through z (positive axis if z = 0)."""
    with mpmath.workprec(cvs.prec_bits):
        R = 4 * cvs.max_modulus + 4
        zz = _mpc(z)
        if not zz:
            return mpmath.mpc(R)
        return zz / abs(zz) * R


def germ_value_far(curve: AlgebraicCurve, spec, z_ref, prec_bits: int, order: int = 40):
    """Numerical value of the anchored germ at a point far from all critical values."""
    from .series import newton_germ

    v = newton_germ(curve, spec, order, prec_bits=prec_bits)
    with mpmath.workprec(prec_bits):
        t = 1 / _mpc(z_ref)
        return v.evaluate(t) * (t ** -spec.p if spec.p else 1)


def germ_branch_at(curve: AlgebraicCurve, spec, z, prec_bits: int = DEFAULT_PREC,
                   cvs: CriticalValues | None = None):
    """Value at z of the branch continued from the germ at infinity.

    Continues from a reference point on the ray through z, straight to z,
    detouring around critical values as in :meth:`Path.line`.
    """
    cvs = cvs or critical_values(curve, prec_bits)
    z_ref = reference_point(cvs, z)
    r = clearance_radius(cvs.values, [z_ref, z])
    w_ref = germ_value_far(curve, spec, z_ref, prec_bits)
    fiber = fiber_roots(curve, z_ref, prec_bits)
    i, dist = fiber.nearest(w_ref)
    if dist >= fiber.radius(i) * 2 / 3:
        raise SheetAmbiguity("germ value at the reference point does not single out a root")
    path = Path.line(z_ref, z, r, avoid=cvs.values)
    if not path.segments:
        return fiber.roots[i]
    return _continue_from(curve, path, fiber.roots[i], prec_bits)
