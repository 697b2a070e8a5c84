"""Exact univariate helpers: Sturm sequences and a certified sup bound on [0, inf).

Polynomials here are coefficient lists ``[a0, a1, ..., an]`` of Fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Coeffs = list[Fraction]


def trim(p: Sequence[Fraction]) -> Coeffs:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def deriv(p: Sequence[Fraction]) -> Coeffs:
    return trim([k * c for k, c in enumerate(p)][1:])


def evaluate(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def divmod_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r = trim(r[:-1]) if r[-1] == 0 else trim(r)
    return trim(q), r


def gcd_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    a, b = trim(a), trim(b)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def squarefree(p: Sequence[Fraction]) -> Coeffs:
    p = trim(p)
    g = gcd_poly(p, deriv(p))
    if len(g) <= 1:
        return p
    q, _ = divmod_poly(p, g)
    return q


def sturm_sequence(p: Sequence[Fraction]) -> list[Coeffs]:
    seq = [trim(p), deriv(p)]
    while seq[-1]:
        _, r = divmod_poly(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return [s for s in seq if s]


def sign_changes(seq: list[Coeffs], x: Fraction) -> int:
    signs = [v for v in (evaluate(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def positive_root_bound(p: Sequence[Fraction]) -> Fraction:
    """Cauchy bound: every real root has modulus below the returned value."""
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_positive_roots(p: Sequence[Fraction], width: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Intervals ``[lo, hi]`` with ``hi - lo <= width``, one per distinct root in (0, inf)."""
    p = trim(p)
    if len(p) <= 1:
        return []
    # strip the root at zero so that 0 is never a root of what we count
    while p[0] == 0:
        p = p[1:]
    f = squarefree(p)
    if len(f) <= 1:
        return []
    seq = sturm_sequence(f)
    bound = positive_root_bound(f)
    out = []
    stack = [(Fraction(0), bound)]
    while stack:
        lo, hi = stack.pop()
        count = sign_changes(seq, lo) - sign_changes(seq, hi)
        if count == 0:
            continue
        if count == 1:
            out.append(_refine(f, lo, hi, width))
            continue
        mid = _split_point(f, lo, hi)
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def _split_point(f: Coeffs, lo: Fraction, hi: Fraction) -> Fraction:
    # a split point must not be a root, otherwise the Sturm count is off
    k = 2
    while True:
        for j in range(1, k):
            x = lo + (hi - lo) * Fraction(j, k)
            if evaluate(f, x) != 0:
                return x
        k += 1


def _refine(f: Coeffs, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    # f is squarefree with exactly one root in (lo, hi] and f(lo) != 0
    fhi = evaluate(f, hi)
    if fhi == 0:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = evaluate(f, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo = mid
    return lo, hi


def interval_upper(p: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Upper bound of ``p`` on ``[lo, hi]`` with ``lo >= 0`` (monotone monomials)."""
    total = Fraction(0)
    for k, c in enumerate(p):
        if c > 0:
            total += c * hi**k
        elif c < 0:
            total += c * lo**k
    return total


def sup_on_halfline(p: Sequence[Fraction], width: Fraction = Fraction(1, 10**12)) -> Fraction | None:
    """Certified upper bound of ``sup_{s>=0} p(s)``, or ``None`` if unbounded."""
    p = trim(p)
    if not p:
        return Fraction(0)
    if len(p) > 1 and p[-1] > 0:
        return None
    best = p[0]
    for lo, hi in isolate_positive_roots(deriv(p), width):
        best = max(best, interval_upper(p, lo, hi))
    # round up onto the width grid so certificates stay readable
    return Fraction(math.ceil(best / width)) * width
