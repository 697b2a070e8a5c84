"""Polynomial Lyapunov functionals ``H`` with ``θ^{p²}`` weights and their feasibility.

``H`` of order ``p`` is the sum over chains ``0 <= p_1 <= ... <= p_{m-1} <= p``
of ``∏ C(p_{j+1}, p_j) θ_j^{p_j²} · u_1^{p_1} u_2^{p_2-p_1} ⋯ u_m^{p-p_{m-1}}``.
Feasibility of ``θ`` means every ``d_ij`` matrix is positive definite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .mesh import Mesh
from .poly import MultiPoly, as_fraction
from .solver import Trajectory

PIVOT_RTOL = Fraction(1, 10**13)
THETA_LIMIT = 2**20


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    theta: tuple[Fraction, ...]
    failures: list[dict] = field(default_factory=list)
    threshold: float | None = None  # m = 2 closed form A_12
    closed_form: bool | None = None
    matrices_checked: int = 0

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "theta": [str(t) for t in self.theta],
            "matrices_checked": self.matrices_checked,
            "failures": self.failures[:5],
            "A12": self.threshold,
            "closed_form_feasible": self.closed_form,
        }


@dataclass(frozen=True)
class HFunctional:
    m: int
    p: int
    theta: tuple[Fraction, ...]
    poly: MultiPoly
    alpha: Fraction
    beta: Fraction
    feasibility: FeasibilityReport | None = None


def _chains(m: int, p: int):
    """Nondecreasing ``(p_1, ..., p_{m-1})`` with ``p_{m-1} <= p``."""
    return itertools.combinations_with_replacement(range(p + 1), m - 1)


def _check_theta(m: int, theta) -> tuple[Fraction, ...]:
    theta = tuple(as_fraction(t) for t in theta)
    if len(theta) != m - 1:
        raise ValueError(f"theta needs {m - 1} entries for m={m}, got {len(theta)}")
    if any(t <= 0 for t in theta):
        raise ValueError("theta entries must be positive")
    return theta


def build_h(m: int, p: int, theta: Sequence) -> HFunctional:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"order must be an integer >= 2, got {p!r}")
    theta = _check_theta(m, theta)
    terms = {}
    for chain in _chains(m, p):
        full = chain + (p,)
        coef = Fraction(1)
        for j in range(m - 1):
            coef *= math.comb(full[j + 1], full[j]) * theta[j] ** (full[j] ** 2)
        exps = (full[0],) + tuple(full[j] - full[j - 1] for j in range(1, m)) if m > 1 else (p,)
        terms[exps] = coef
    poly = MultiPoly(m, terms)
    alpha = min(c / _multinomial(e) for e, c in poly.terms.items())
    beta = sum(poly.terms.values(), Fraction(0))
    return HFunctional(m, p, theta, poly, alpha, beta)


def _multinomial(e: Sequence[int]) -> int:
    out, total = 1, 0
    for k in e:
        total += k
        out *= math.comb(total, k)
    return out


def h_gradient(h: HFunctional) -> list[MultiPoly]:
    return [h.poly.partial(i + 1) for i in range(h.m)]


def h_gradient_closed_form_m2(p: int, theta) -> list[MultiPoly]:
    """Two-component gradient written as explicit sums, used as a cross-check."""
    th = as_fraction(theta)
    d1, d2 = {}, {}
    for b in range(p):
        c = p * math.comb(p - 1, b)
        d1[(b, p - 1 - b)] = c * th ** ((b + 1) ** 2)
        d2[(b, p - 1 - b)] = c * th ** (b**2)
    return [MultiPoly(2, d1), MultiPoly(2, d2)]


# -- d_ij matrices ---------------------------------------------------------------


def dij_matrices(m: int, p: int, theta: Sequence, d: Sequence) -> list[tuple[tuple[int, ...], list[list[Fraction]]]]:
    """One symmetric matrix per multi-index ``p_1 <= ... <= p_{m-1} <= p - 2``.

    For ``i <= j`` the entry is ``(d_i+d_j)/2 · ∏_k θ_k^{e_k}`` with
    ``e_k = p_k²`` for ``k < i``, ``(p_k+1)²`` for ``i <= k < j`` and
    ``(p_k+2)²`` for ``k >= j`` (1-based ``k`` over ``1..m-1``).
    """
    theta = _check_theta(m, theta)
    d = [as_fraction(v) for v in d]
    if len(d) != m or any(v <= 0 for v in d):
        raise ValueError(f"need {m} positive diffusion constants")
    out = []
    for idx in _chains(m, p - 2):
        M = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                w = (d[i] + d[j]) / 2
                for k in range(m - 1):
                    if k < i:
                        e = idx[k] ** 2
                    elif k < j:
                        e = (idx[k] + 1) ** 2
                    else:
                        e = (idx[k] + 2) ** 2
                    w *= theta[k] ** e
                M[i][j] = M[j][i] = w
        out.append((tuple(idx), M))
    return out


def ldl_pivots(M: Sequence[Sequence[Fraction]]) -> tuple[int | None, list[Fraction]]:
    """Exact symmetric elimination; returns the first failing pivot index (or None) and the pivots.

    A pivot fails unless it exceeds ``PIVOT_RTOL`` times its original diagonal entry.
    """
    A = [list(row) for row in M]
    n = len(A)
    pivots = []
    for k in range(n):
        piv = A[k][k]
        pivots.append(piv)
        if piv <= PIVOT_RTOL * M[k][k]:
            return k, pivots
        for i in range(k + 1, n):
            f = A[i][k] / piv
            for j in range(k + 1, n):
                A[i][j] -= f * A[k][j]
    return None, pivots


def a_matrix(d: Sequence) -> np.ndarray:
    d = np.array([float(as_fraction(v)) for v in d])
    return (d[:, None] + d[None, :]) / (2 * np.sqrt(np.outer(d, d)))


def theta_feasible(m: int, p: int, theta: Sequence, d: Sequence) -> FeasibilityReport:
    theta = _check_theta(m, theta)
    failures = []
    mats = dij_matrices(m, p, theta, d)
    for idx, M in mats:
        k, pivots = ldl_pivots(M)
        if k is not None:
            failures.append({"multi_index": list(idx), "pivot": k, "value": float(pivots[k])})
    feasible = not failures
    threshold = closed = None
    if m == 2:
        d1, d2 = (as_fraction(v) for v in d)
        threshold = float(a_matrix([d1, d2])[0, 1])
        closed = 4 * theta[0] ** 2 * d1 * d2 > (d1 + d2) ** 2
        if closed != feasible:
            raise AssertionError("pivot test and closed-form threshold disagree")
    return FeasibilityReport(feasible, theta, failures, threshold, closed, len(mats))


def _round_up(x: float, den: int = 1000) -> Fraction:
    return Fraction(math.ceil(x * den), den)


def search_theta(m: int, p: int, d: Sequence, start: Sequence | None = None) -> FeasibilityReport:
    """Double failing coordinates of ``θ`` until every ``d_ij`` matrix is positive definite.

    The default start is ``θ_i = 2 max_{j>i} A_ij`` rounded up to a rational.
    A failure at pivot ``l`` doubles ``θ_{l-1}`` (``θ_1`` for the first pivot).
    Gives up once a coordinate exceeds ``2^20`` times its start.
    """
    if m == 1:
        return theta_feasible(1, p, (), d)
    A = a_matrix(d)
    if start is None:
        start = [_round_up(2 * A[i, i + 1:].max()) for i in range(m - 1)]
    theta = list(_check_theta(m, start))
    limit = [t * THETA_LIMIT for t in theta]
    while True:
        rep = theta_feasible(m, p, theta, d)
        if rep.feasible:
            return rep
        bump = set()
        for f in rep.failures:
            bump.add(max(f["pivot"] - 1, 0))
        for k in bump:
            theta[k] *= 2
        if any(t > lim for t, lim in zip(theta, limit)):
            return FeasibilityReport(False, tuple(theta), rep.failures, rep.threshold, rep.closed_form,
                                     rep.matrices_checked)


def build_feasible_h(m: int, p: int, d: Sequence, theta: Sequence | str | None = "auto") -> HFunctional:
    rep = search_theta(m, p, d) if theta in (None, "auto") else theta_feasible(m, p, theta, d)
    h = build_h(m, p, rep.theta)
    return HFunctional(h.m, h.p, h.theta, h.poly, h.alpha, h.beta, rep)


# -- along trajectories ----------------------------------------------------------


@dataclass
class FunctionalSeries:
    times: np.ndarray
    L: np.ndarray
    running_max: np.ndarray
    lower: np.ndarray  # alpha * ∫(Σu)^p
    upper: np.ndarray  # beta * ∫(Σu)^p
    alpha: float
    beta: float

    def window_max(self, t0: float, t1: float) -> float:
        mask = (self.times >= t0) & (self.times <= t1)
        return float(self.L[mask].max()) if mask.any() else math.nan


def functional_series(traj: Trajectory, mesh: Mesh, h: HFunctional) -> FunctionalSeries:
    """``L(t) = Σ_cells V_k H(u_k)`` per record, with the equivalence sandwich."""
    traj.require_full()
    U = traj.states() if traj.records else np.zeros((0, h.m, mesh.n_cells))
    V = mesh.cell_volume
    if U.size:
        L = np.array([V * h.poly.eval_array(u).sum() for u in U])
        S = V * (U.sum(axis=1) ** h.p).sum(axis=1)
    else:
        L = S = np.zeros(0)
    a, b = float(h.alpha), float(h.beta)
    return FunctionalSeries(traj.times, L, np.maximum.accumulate(L) if L.size else L, a * S, b * S, a, b)
