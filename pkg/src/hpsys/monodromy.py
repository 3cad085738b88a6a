"""Monodromy of the covering z: {P(z, w) = 0} -> z and its action on k-subsets of sheets.

The sheets of the k-subset surface over a base point are the k-element subsets
of fiber labels; it is connected iff the monodromy group acts transitively on
those subsets.  Sheet labels come from the canonical root order at the base
point and are arbitrary, so only conjugation-invariant data (cycle types,
orbit sizes) carries meaning.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import mpmath

from .continuation import (
    DEFAULT_PREC,
    ContinuationError,
    Path,
    clearance_radius,
    critical_values,
    side_of,
    track_permutation,
)
from .polynomial import AlgebraicCurve

Perm = tuple[int, ...]


def compose(first: Sequence[int], second: Sequence[int]) -> Perm:
    """Permutation of following ``first`` and then ``second``: i -> second[first[i]]."""
    return tuple(second[j] for j in first)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if seen[i]:
            continue
        n = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == j for i, j in enumerate(p))


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]


@dataclass
class MonodromyAction:
    """Monodromy generators at a base point, optionally with the induced k-subset action.

    ``permutations[i]`` is the sheet permutation of the loop around
    ``critical_values[i]``; loops are listed in the order whose product is the
    loop around all finite critical values, so
    ``compose(p_1, ..., p_N, infinity_permutation)`` is the identity.
    """

    m: int
    base_point: object
    critical_values: list
    permutations: list[Perm]
    infinity_permutation: Perm
    k: int | None = None
    subsets: list[tuple[int, ...]] = field(default_factory=list)
    subset_permutations: list[Perm] = field(default_factory=list)
    orbits: list[list[tuple[int, ...]]] = field(default_factory=list)

    @property
    def all_permutations(self) -> list[Perm]:
        return list(self.permutations) + [self.infinity_permutation]

    def product(self) -> Perm:
        total = tuple(range(self.m + 1))
        for p in self.all_permutations:
            total = compose(total, p)
        return total

    @property
    def orbit_sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    @property
    def connected(self) -> bool:
        return len(self.orbits) == 1

    def profile(self) -> "BranchingProfile":
        entries = [(cv, cycle_type(p)) for cv, p in zip(self.critical_values, self.permutations)]
        entries.append(("inf", cycle_type(self.infinity_permutation)))
        return BranchingProfile(entries)

    def to_dict(self) -> dict:
        out = {
            "base_point": _cstr(self.base_point),
            "critical_values": [_cstr(c) for c in self.critical_values],
            "permutations": [list(p) for p in self.permutations],
            "infinity_permutation": list(self.infinity_permutation),
        }
        if self.k is not None:
            out["k"] = self.k
            out["orbits"] = [{"size": len(o), "subsets": [list(s) for s in o]} for o in self.orbits]
            out["connected"] = self.connected
        out["simple_branching"] = simple_branching_check(self.profile())[0]
        return out


def _cstr(z) -> str:
    with mpmath.workprec(1024):
        z = mpmath.mpc(z)
        return f"{mpmath.nstr(z.real, 30)}{'-' if z.imag < 0 else '+'}{mpmath.nstr(abs(z.imag), 30)}i"


@dataclass
class BranchingProfile:
    """(critical value, cycle type) pairs; ``"inf"`` labels the point at infinity."""

    entries: list

    @property
    def critical_points(self) -> list[tuple[object, int]]:
        """(critical value, order) for every ramification point: an l-cycle has order l - 1."""
        return [(cv, l - 1) for cv, ct in self.entries for l in ct if l > 1]


def simple_branching_check(profile: BranchingProfile) -> tuple[bool, object]:
    """True iff every nontrivial local monodromy is a single transposition.

    Returns ``(ok, witness)`` where the witness is the first offending critical
    value (None when ok).  Trivial permutations belong to points that are not
    branch points of the covering and are skipped.
    """
    for cv, ct in profile.entries:
        if all(l == 1 for l in ct):
            continue
        if ct[0] != 2 or (len(ct) > 1 and ct[1] != 1):
            return False, cv
    return True, None


def _loop_order(base: complex, cvs: Sequence[complex]) -> list[int]:
    """Order loops so their product is the counterclockwise loop around all of them.

    Every critical value lies left of the vertical line through the base point,
    so the angle of c - base is monotone in the cross-product test.  On a
    common ray the farther point comes first: its spoke passes the nearer one
    keeping it on the left (see Path.line).
    """

    def cmp(i, j):
        a, c = cvs[i], cvs[j]
        s = side_of(base, a, c)
        if s > 0:
            return -1
        if s < 0:
            return 1
        da, dc = abs(a - base), abs(c - base)
        return -1 if da > dc else (1 if da < dc else 0)

    return sorted(range(len(cvs)), key=functools.cmp_to_key(cmp))


def monodromy_generators(curve: AlgebraicCurve, prec_bits: int = DEFAULT_PREC,
                         base_scale: float = 1.0, retries: int = 2) -> MonodromyAction:
    """Sheet permutations around each finite critical value.

    Base point z* = base_scale * (2 max|cv| + 2) on the positive real axis.  The
    loop around a critical value a runs straight from z* towards a
    (with detours), once around a circle of half the clearance radius counterclockwise, and back.  The
    permutation at infinity is the inverse of the ordered product.
    """
    cvs = critical_values(curve, prec_bits)
    R = float(cvs.max_modulus)
    base = mpmath.mpf(base_scale * (2 * R + 2))
    values = list(cvs.values)
    dvals = [complex(v) for v in values]
    r = clearance_radius(dvals, [complex(base)])
    order = _loop_order(complex(base), dvals)
    perms = []
    for idx in order:
        a = dvals[idx]
        others = [c for j, c in enumerate(dvals) if j != idx]
        perms.append(_loop_permutation(curve, complex(base), a, others, r, prec_bits, retries))
    total = tuple(range(curve.m + 1))
    for p in perms:
        total = compose(total, p)
    return MonodromyAction(curve.m, base, [values[i] for i in order], perms, inverse(total))


def _loop_permutation(curve, base: complex, a: complex, others, r: float, prec_bits: int, retries: int) -> Perm:
    # the small circle has radius r/2 so that it stays clear of the other
    # values' detour arcs (radius r) even when critical values are collinear
    u = (base - a) / abs(base - a)
    p_a = a + (r / 2) * u
    spoke = Path.line(base, p_a, r, avoid=others)
    circle = Path.circle(a, r / 2, clearance=r / 2, start_angle=math.atan2(u.imag, u.real))
    loop = spoke.then(circle).then(spoke.reversed())
    last_error = None
    for attempt in range(retries + 1):
        try:
            return tuple(track_permutation(curve, loop, prec_bits * 2 ** attempt))
        except ContinuationError as exc:
            last_error = exc
            loop = replace(loop, step=loop.step / 4)
    raise last_error


def ksubset_action(gens: MonodromyAction, k: int) -> MonodromyAction:
    """Induced action S -> sigma(S) on k-subsets (lexicographic), with its orbits."""
    m = gens.m
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}]")
    subsets = list(itertools.combinations(range(m + 1), k))
    index = {s: i for i, s in enumerate(subsets)}
    induced = []
    for p in gens.all_permutations:
        induced.append(tuple(index[tuple(sorted(p[i] for i in s))] for s in subsets))
    action = replace(gens, k=k, subsets=subsets, subset_permutations=induced)
    action.orbits = connected_components(action)
    return action


def connected_components(action: MonodromyAction) -> list[list[tuple[int, ...]]]:
    """Orbits of the subset action: size descending, then by least subset."""
    uf = UnionFind(range(len(action.subsets)))
    for p in action.subset_permutations:
        for i, j in enumerate(p):
            uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(action.subsets)):
        groups.setdefault(uf.find(i), []).append(i)
    orbits = [[action.subsets[i] for i in sorted(g)] for g in groups.values()]
    orbits.sort(key=lambda o: (-len(o), o[0]))
    return orbits


def cyclic_disconnection_expected(curve: AlgebraicCurve) -> bool:
    """True for curves w^{m+1} - R(z) with m >= 3, whose k-subset surfaces are
    disconnected for every 2 <= k <= m - 1."""
    return curve.m >= 3 and curve.is_pure_power()


def surface_components(curve: AlgebraicCurve, k: int, prec_bits: int = DEFAULT_PREC) -> MonodromyAction:
    return ksubset_action(monodromy_generators(curve, prec_bits), k)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)
