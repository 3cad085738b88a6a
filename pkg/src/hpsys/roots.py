"""Simultaneous polynomial root finding (Aberth-Ehrlich) in mpmath."""

from __future__ import annotations

import cmath
import functools
import math
from typing import Sequence

import mpmath
import numpy as np


def _horner2(coeffs_desc, x):
    p = coeffs_desc[0]
    dp = 0
    for c in coeffs_desc[1:]:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _initial_guesses(coeffs_desc) -> list[complex]:
    d = len(coeffs_desc) - 1
    try:
        arr = np.array([complex(c) for c in coeffs_desc], dtype=complex)
        if np.all(np.isfinite(arr)) and arr[0] != 0:
            guesses = np.roots(arr)
            if len(guesses) == d and np.all(np.isfinite(guesses)):
                scale = max(1.0, float(np.max(np.abs(guesses))))
                # tiny rotation-dependent perturbation separates exactly repeated guesses
                return [complex(g) + 1e-9 * scale * cmath.exp(2j * math.pi * (k + 0.25) / d)
                        for k, g in enumerate(guesses)]
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    lead = abs(complex(coeffs_desc[0]))
    radius = 1 + max(abs(complex(c)) / lead for c in coeffs_desc[1:])
    return [radius * cmath.exp(2j * math.pi * (k + 0.25) / d) for k in range(d)]


def aberth(coeffs: Sequence, prec_bits: int, max_iter: int = 400) -> list:
    """All roots of sum coeffs[j] x^j (ascending order, leading coefficient nonzero).

    Iterates at ``prec_bits`` + 16 guard bits from double-precision starting
    values, stopping once every Aberth correction is below 2^-prec_bits
    relative to the root.  Clustered roots converge only linearly; they are
    returned after ``max_iter`` sweeps at whatever accuracy was reached.
    """
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    d = len(coeffs) - 1
    if d < 1:
        return []
    with mpmath.workprec(prec_bits + 16):
        cd = [mpmath.mpc(c) for c in reversed(coeffs)]
        if d == 1:
            return [-cd[1] / cd[0]]
        xs = [mpmath.mpc(g) for g in _initial_guesses(cd)]
        tol = mpmath.mpf(2) ** (-prec_bits)
        for _ in range(max_iter):
            biggest = mpmath.mpf(0)
            for i in range(d):
                p, dp = _horner2(cd, xs[i])
                if not p:
                    continue
                ratio = p / dp if dp else mpmath.mpc(1e-30)
                s = mpmath.mpc(0)
                xi = xs[i]
                for j in range(d):
                    if j != i:
                        diff = xi - xs[j]
                        if diff:
                            s += 1 / diff
                denom = 1 - ratio * s
                corr = ratio / denom if denom else ratio
                xs[i] = xi - corr
                rel = abs(corr) / max(1, abs(xs[i]))
                if rel > biggest:
                    biggest = rel
            if biggest < tol:
                break
        return [+x for x in xs]


def canonical_order(values: Sequence, prec_bits: int) -> list[int]:
    """Indices sorting complex values by (real part, imaginary part).

    Real parts closer than 2^-(prec_bits/2) (relative) count as equal so that
    conjugate-like pairs are ordered by their imaginary parts, not by noise.
    """
    vals = [complex(v) if not isinstance(v, (mpmath.mpc, mpmath.mpf)) else v for v in values]
    tol = mpmath.mpf(2) ** (-(prec_bits // 2))

    def cmp(i, j):
        a, b = vals[i], vals[j]
        scale = max(1, abs(a), abs(b))
        if abs(a.real - b.real) > tol * scale:
            return -1 if a.real < b.real else 1
        if abs(a.imag - b.imag) > tol * scale:
            return -1 if a.imag < b.imag else 1
        return 0

    return sorted(range(len(vals)), key=functools.cmp_to_key(cmp))


def cluster_roots(roots: Sequence, radius) -> list[tuple[object, int]]:
    """Merge roots closer than ``radius`` (transitively); returns (mean, multiplicity) pairs."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        mean = sum((roots[i] for i in members), mpmath.mpc(0)) / len(members)
        out.append((mean, len(members)))
    return out
