"""Problem statement for an m-component system with boundary mass transport."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .poly import MultiPoly, as_fraction, format_fraction


@dataclass(frozen=True)
class VectorFieldModel:
    """Data of ``u_t = d Δu + F(u)`` in the domain, ``d ∂u/∂η = G(u)`` on the boundary.

    ``initial`` holds one polynomial per component in the spatial coordinates
    (``x`` or ``x, y``).
    """

    m: int
    d: tuple[Fraction, ...]
    F: tuple[MultiPoly, ...]
    G: tuple[MultiPoly, ...]
    initial: tuple[MultiPoly, ...] = ()
    constants: Mapping[str, Fraction] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(as_fraction(v) for v in self.d))
        object.__setattr__(self, "F", tuple(self.F))
        object.__setattr__(self, "G", tuple(self.G))
        object.__setattr__(self, "initial", tuple(self.initial))
        object.__setattr__(self, "constants", dict(self.constants))
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        for label, seq in (("d", self.d), ("F", self.F), ("G", self.G)):
            if len(seq) != self.m:
                raise ValueError(f"{label} has {len(seq)} entries, expected m={self.m}")
        if self.initial and len(self.initial) != self.m:
            raise ValueError(f"initial has {len(self.initial)} entries, expected m={self.m}")
        if any(v <= 0 for v in self.d):
            raise ValueError("all diffusion constants must be positive")
        for p in self.F + self.G:
            if p.nvars != self.m:
                raise ValueError(f"field polynomial has {p.nvars} variables, expected {self.m}")
        dims = {p.nvars for p in self.initial}
        if len(dims) > 1:
            raise ValueError("initial data polynomials use different spatial dimensions")

    @property
    def spatial_dim(self) -> int | None:
        return self.initial[0].nvars if self.initial else None

    @property
    def d_float(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.d)

    def canonical_text(self) -> str:
        names = ("x", "y")[: self.spatial_dim or 0]
        lines = [f"m={self.m}", "d=" + ",".join(format_fraction(v) for v in self.d)]
        lines += [f"F{i + 1}={p}" for i, p in enumerate(self.F)]
        lines += [f"G{i + 1}={p}" for i, p in enumerate(self.G)]
        lines += [f"w{i + 1}={p.to_text(names=names)}" for i, p in enumerate(self.initial)]
        lines += [f"{k}={format_fraction(v)}" for k, v in sorted(self.constants.items())]
        return "\n".join(lines)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def with_initial(self, initial: Sequence[MultiPoly]) -> "VectorFieldModel":
        return VectorFieldModel(self.m, self.d, self.F, self.G, tuple(initial), self.constants, self.name)
