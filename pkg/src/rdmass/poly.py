"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial in ``n`` variables is a map from exponent tuples to
:class:`fractions.Fraction` coefficients.  Zero coefficients are never
stored, and terms are kept in lexicographic order of their exponent tuples
so printing and floating evaluation are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats to an exact Fraction.

    Floats go through ``repr`` so that ``1.3`` becomes ``13/10`` rather than
    the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not np.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_fraction(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms", "_hash", "_compiled")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        if not isinstance(nvars, int) or nvars < 0:
            raise ValueError(f"nvars must be a nonnegative integer, got {nvars!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for exps, coef in items:
            e = tuple(int(k) for k in exps)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            acc[e] = acc.get(e, Fraction(0)) + as_fraction(coef)
        self.nvars = nvars
        self._terms = {e: acc[e] for e in sorted(acc) if acc[e] != 0}
        self._hash = None
        self._compiled = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        """The variable with 1-based index ``i``."""
        _check_index(nvars, i)
        e = [0] * nvars
        e[i - 1] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def _from_clean(cls, nvars: int, terms: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = {e: terms[e] for e in sorted(terms) if terms[e] != 0}
        p._hash = None
        p._compiled = None
        return p

    # -- basic protocol -----------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return MultiPoly.constant(self.nvars, as_fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly._from_clean(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._from_clean(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_fraction(other)
            return MultiPoly._from_clean(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._from_clean(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {k!r}")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- structure ----------------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 (see ``is_zero``)."""
        return max((sum(e) for e in self._terms), default=0)

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly._from_clean(self.nvars, {e: c for e, c in self._terms.items() if sum(e) == k})

    def leading_form(self) -> "MultiPoly":
        return self.homogeneous_part(self.total_degree())

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.nvars)

    def variables_used(self) -> set[int]:
        """1-based indices of the variables that occur in some term."""
        return {j + 1 for e in self._terms for j, k in enumerate(e) if k}

    def partial(self, i: int) -> "MultiPoly":
        """Exact partial derivative with respect to the variable ``i`` (1-based)."""
        _check_index(self.nvars, i)
        j = i - 1
        out = {}
        for e, c in self._terms.items():
            if e[j]:
                e2 = e[:j] + (e[j] - 1,) + e[j + 1 :]
                out[e2] = c * e[j]
        return MultiPoly._from_clean(self.nvars, out)

    def substitute_zero(self, i: int) -> "MultiPoly":
        """Restriction to the face ``u_i = 0``; the variable count is unchanged."""
        _check_index(self.nvars, i)
        return MultiPoly._from_clean(self.nvars, {e: c for e, c in self._terms.items() if e[i - 1] == 0})

    def restrict(self, support: Iterable[int]) -> "MultiPoly":
        """Set every variable whose 1-based index is not in ``support`` to zero."""
        keep = set(support)
        return MultiPoly._from_clean(
            self.nvars,
            {e: c for e, c in self._terms.items() if all(k == 0 or (j + 1) in keep for j, k in enumerate(e))},
        )

    def coefficient_abs_sum(self) -> Fraction:
        return sum((abs(c) for c in self._terms.values()), Fraction(0))

    # -- evaluation ---------------------------------------------------------

    def eval(self, z: Sequence[float]) -> float:
        """Floating value at ``z``; terms are summed in lexicographic order."""
        if len(z) != self.nvars:
            raise ValueError(f"point has dimension {len(z)}, expected {self.nvars}")
        zf = [float(v) for v in z]
        total = 0.0
        for e, c in self._terms.items():
            t = float(c)
            for v, k in zip(zf, e):
                if k:
                    t *= v**k
            total += t
        return total

    __call__ = eval

    def eval_exact(self, z: Sequence) -> Fraction:
        if len(z) != self.nvars:
            raise ValueError(f"point has dimension {len(z)}, expected {self.nvars}")
        zq = [as_fraction(v) for v in z]
        total = Fraction(0)
        for e, c in self._terms.items():
            t = c
            for v, k in zip(zq, e):
                if k:
                    t *= v**k
            total += t
        return total

    def compiled(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix ``(T, nvars)`` and float coefficients ``(T,)``."""
        if self._compiled is None:
            exps = np.array(list(self._terms.keys()), dtype=np.int64).reshape(len(self._terms), self.nvars)
            coefs = np.array([float(c) for c in self._terms.values()], dtype=float)
            self._compiled = (exps, coefs)
        return self._compiled

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorised evaluation; ``z`` has shape ``(nvars, ...)``."""
        z = np.asarray(z, dtype=float)
        if z.shape[0] != self.nvars:
            raise ValueError(f"leading dimension {z.shape[0]} does not match nvars={self.nvars}")
        exps, coefs = self.compiled()
        out = np.zeros(z.shape[1:], dtype=float)
        for e, c in zip(exps, coefs):
            t = np.full(z.shape[1:], c)
            for j, k in enumerate(e):
                if k == 1:
                    t = t * z[j]
                elif k:
                    t = t * z[j] ** k
            out = out + t
        return out

    # -- printing -----------------------------------------------------------

    def to_text(self, var_prefix: str = "u", names: Sequence[str] | None = None) -> str:
        """Render in the parser's grammar, terms in lexicographic order."""
        if not self._terms:
            return "0"
        if names is None:
            names = [f"{var_prefix}{j + 1}" for j in range(self.nvars)]
        parts = []
        for idx, (e, c) in enumerate(self._terms.items()):
            mono = "*".join(
                names[j] if k == 1 else f"{names[j]}^{k}" for j, k in enumerate(e) if k
            )
            mag = abs(c)
            if not mono:
                body = format_fraction(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_fraction(mag)}*{mono}"
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


def _check_index(nvars: int, i: int) -> None:
    if not isinstance(i, int) or not 1 <= i <= nvars:
        raise IndexError(f"variable index {i!r} out of range 1..{nvars}")


def linear_combination(coeffs: Sequence, polys: Sequence[MultiPoly]) -> MultiPoly:
    """Exact ``sum(c_k * p_k)``."""
    if len(coeffs) != len(polys):
        raise ValueError(f"{len(coeffs)} coefficients for {len(polys)} polynomials")
    if not polys:
        raise ValueError("linear_combination needs at least one polynomial")
    nvars = polys[0].nvars
    out: dict[Exponent, Fraction] = {}
    for c, p in zip(coeffs, polys):
        if p.nvars != nvars:
            raise ValueError(f"variable count mismatch: {p.nvars} vs {nvars}")
        c = as_fraction(c)
        if c == 0:
            continue
        for e, v in p.terms.items():
            out[e] = out.get(e, 0) + c * v
    return MultiPoly._from_clean(nvars, out)


def total_degree(p: MultiPoly) -> int:
    return p.total_degree()


def leading_form(p: MultiPoly) -> MultiPoly:
    return p.leading_form()
