"""Finite-volume semidiscretization and IMEX backward-Euler time stepping.

Diffusion is implicit; interior reactions ``F`` and boundary fluxes ``G``
are explicit by default.  The boundary value of ``u`` is taken from the
owning cell, which keeps pointwise cancellations of ``sum b_i G_i`` exact
in the discrete mass balance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import cg, spsolve

from .mesh import Mesh, build_interval
from .model import VectorFieldModel
from .poly import MultiPoly

log = logging.getLogger(__name__)

BLOWUP = "BlowUp"
CLAMP = "NegativityClamp"
REJECT = "StepReject"
COMPLETED = "Completed"

_RESTORE_AFTER = 10


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    u_max: float = 1e8
    dt_min: float = 1e-12
    linear_tol: float = 1e-10
    clamp_tol: float = 1e-12
    output_stride: int = 1
    reaction: str = "explicit"
    record: str = "full"

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if not 0 < self.dt_min < self.dt:
            raise ValueError(f"need 0 < dt_min < dt, got dt_min={self.dt_min}, dt={self.dt}")
        if not self.u_max > 0:
            raise ValueError("u_max must be positive")
        if self.linear_tol <= 0 or self.clamp_tol < 0:
            raise ValueError("tolerances must be positive")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ValueError("output_stride must be a positive integer")
        if self.reaction not in ("explicit", "linearized"):
            raise ValueError(f"reaction must be 'explicit' or 'linearized', got {self.reaction!r}")
        if self.record not in ("full", "light"):
            raise ValueError(f"record must be 'full' or 'light', got {self.record!r}")


@dataclass
class State:
    t: float
    u: np.ndarray  # (m, n_cells)


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    payload: dict = field(default_factory=dict)


@dataclass
class Record:
    """One output sample.

    ``norms[i]`` holds ``(L1_omega, L2_omega, Linf_omega, L1_M)`` of component
    ``i``; ``source_F[i]`` and ``source_G[i]`` are ``∫_Ω F_i`` and ``∫_M G_i``.
    ``u`` is ``None`` in light mode.
    """

    t: float
    norms: np.ndarray
    source_F: np.ndarray
    source_G: np.ndarray
    u: np.ndarray | None = None


@dataclass
class Trajectory:
    mode: str
    records: list[Record] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    max_u: np.ndarray | None = None
    min_u: float = math.inf
    zeroed_roundoff: int = 0
    steps: int = 0
    rejects: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def outcome(self) -> str | None:
        for e in reversed(self.events):
            if e.kind in (BLOWUP, COMPLETED):
                return e.kind
        return None

    @property
    def blowup_time(self) -> float | None:
        for e in self.events:
            if e.kind == BLOWUP:
                return e.t
        return None

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)

    def require_full(self) -> None:
        if self.mode != "full":
            raise ValueError("this needs a full-mode trajectory (per-cell records)")

    def states(self) -> np.ndarray:
        self.require_full()
        return np.array([r.u for r in self.records])


class StepReject(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


# -- spatial operators ----------------------------------------------------------


def boundary_flux(G: Sequence[MultiPoly], u_b: np.ndarray) -> np.ndarray:
    """Inflow flux densities ``G_i`` at boundary faces, shape ``(m, n_bfaces)``."""
    return np.array([g.eval_array(u_b) for g in G])


def reaction_rates(F: Sequence[MultiPoly], u: np.ndarray) -> np.ndarray:
    return np.array([f.eval_array(u) for f in F])


def boundary_source(model: VectorFieldModel, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Per-cell rate contributed by boundary fluxes, ``(1/V) Σ area·G(u_cell)``."""
    flux = boundary_flux(model.G, u[:, mesh.bface_cell]) * mesh.bface_area
    out = np.zeros_like(u)
    for i in range(model.m):
        np.add.at(out[i], mesh.bface_cell, flux[i])
    return out / mesh.cell_volume


def laplacian(mesh: Mesh) -> sp.csr_matrix:
    """Discrete ``V⁻¹ Σ_faces area/δ (u_nb − u)``: the Neumann Laplacian per unit volume."""
    n = mesh.n_cells
    w = mesh.face_area / mesh.face_dist / mesh.cell_volume
    l, r = mesh.face_left, mesh.face_right
    rows = np.concatenate([l, r, l, r])
    cols = np.concatenate([r, l, l, r])
    vals = np.concatenate([w, w, -w, -w])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def semidiscrete_rhs(model: VectorFieldModel, mesh: Mesh, u: np.ndarray, lap: sp.csr_matrix | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (model.m, mesh.n_cells):
        raise ValueError(f"state shape {u.shape} does not match (m, n_cells) = {(model.m, mesh.n_cells)}")
    lap = laplacian(mesh) if lap is None else lap
    diff = np.array([float(model.d[i]) * (lap @ u[i]) for i in range(model.m)])
    return diff + reaction_rates(model.F, u) + boundary_source(model, mesh, u)


# -- time stepping --------------------------------------------------------------


class Stepper:
    """Holds the per-model operators and the factorizations cached per ``dt``."""

    def __init__(self, model: VectorFieldModel, mesh: Mesh, config: SolverConfig):
        self.model, self.mesh, self.config = model, mesh, config
        self.lap = laplacian(mesh)
        self.d = model.d_float
        self._banded: dict[tuple[int, float], np.ndarray] = {}
        if config.reaction == "linearized":
            self.jac_F = [[f.partial(j + 1) for j in range(model.m)] for f in model.F]
            self.jac_G = [[g.partial(j + 1) for j in range(model.m)] for g in model.G]

    def _band(self, i: int, dt: float) -> np.ndarray:
        key = (i, dt)
        if key not in self._banded:
            A = (sp.identity(self.mesh.n_cells) - dt * self.d[i] * self.lap).todia()
            ab = np.zeros((3, self.mesh.n_cells))
            for off, diag in zip(A.offsets, A.data):
                ab[1 - off] = diag
            self._banded[key] = ab
        return self._banded[key]

    def _diffuse(self, i: int, rhs: np.ndarray, dt: float) -> np.ndarray:
        if self.mesh.dim == 1:
            return solve_banded((1, 1), self._band(i, dt), rhs)
        A = sp.identity(self.mesh.n_cells, format="csr") - dt * self.d[i] * self.lap
        x, info = cg(A, rhs, x0=rhs, rtol=self.config.linear_tol, atol=0.0, maxiter=10 * self.mesh.n_cells)
        if info != 0:
            raise StepReject(f"conjugate gradient did not converge (info={info})")
        return x

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        model = self.model
        explicit = reaction_rates(model.F, u) + boundary_source(model, self.mesh, u)
        if not np.all(np.isfinite(explicit)):
            raise StepReject("non-finite reaction rate")
        if self.config.reaction == "linearized":
            new = self._linearized(u, explicit, dt)
        else:
            rhs = u + dt * explicit
            new = np.array([self._diffuse(i, rhs[i], dt) for i in range(model.m)])
        if not np.all(np.isfinite(new)):
            raise StepReject("non-finite state")
        return new

    def _linearized(self, u: np.ndarray, explicit: np.ndarray, dt: float) -> np.ndarray:
        """Linearly implicit Euler: diffusion plus the cell-local reaction Jacobian."""
        m, n, mesh = self.model.m, self.mesh.n_cells, self.mesh
        u_b = u[:, mesh.bface_cell]
        w_b = mesh.bface_area / mesh.cell_volume
        J = np.zeros((m, m, n))
        for i in range(m):
            for j in range(m):
                J[i, j] = self.jac_F[i][j].eval_array(u)
                np.add.at(J[i, j], mesh.bface_cell, w_b * self.jac_G[i][j].eval_array(u_b))
        diag = 1.0 - dt * np.array([J[i, i] for i in range(m)])
        if np.any(diag <= 0):
            raise StepReject("reaction Jacobian too stiff for the step")
        blocks = [[sp.diags(-dt * J[i, j]) for j in range(m)] for i in range(m)]
        for i in range(m):
            blocks[i][i] = blocks[i][i] + sp.identity(n) - dt * self.d[i] * self.lap
        A = sp.bmat(blocks, format="csc")
        Ju = np.einsum("ijk,jk->ik", J, u)
        rhs = u + dt * (explicit - Ju)
        return spsolve(A, rhs.ravel()).reshape(m, n)


def step_imex(model: VectorFieldModel, mesh: Mesh, state: State, dt: float,
              config: SolverConfig | None = None) -> State:
    """One step; raises :class:`StepReject` on failure or on entries below ``-clamp_tol``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    config = config or SolverConfig(dt=dt, t_end=dt, dt_min=dt / 2)
    new = Stepper(model, mesh, config).step(state.u, dt)
    if new.min() < -config.clamp_tol:
        raise StepReject(f"negative entry {new.min():.3e}")
    return State(state.t + dt, np.maximum(new, 0.0))


# -- driver ---------------------------------------------------------------------


def initial_state(model: VectorFieldModel, mesh: Mesh) -> np.ndarray:
    if not model.initial:
        raise ValueError("model has no initial data")
    if model.spatial_dim != mesh.dim:
        raise ValueError(f"initial data is {model.spatial_dim}-dimensional, mesh is {mesh.dim}-dimensional")
    return np.array([w.eval_array(mesh.centers.T) for w in model.initial], dtype=float)


def _record(model, mesh, u, t, full) -> Record:
    V = mesh.cell_volume
    ub = u[:, mesh.bface_cell]
    norms = np.column_stack([
        V * np.abs(u).sum(axis=1),
        np.sqrt(V * (u**2).sum(axis=1)),
        np.abs(u).max(axis=1),
        (np.abs(ub) * mesh.bface_area).sum(axis=1),
    ])
    src_F = V * reaction_rates(model.F, u).sum(axis=1)
    src_G = (boundary_flux(model.G, ub) * mesh.bface_area).sum(axis=1)
    return Record(t, norms, src_F, src_G, u.copy() if full else None)


def integrate(model: VectorFieldModel, mesh: Mesh, config: SolverConfig, u0: np.ndarray | None = None) -> Trajectory:
    """Advance from the initial data to ``t_end`` or to blow-up.

    On a rejected step ``dt`` is halved down to ``dt_min``; at the floor,
    negative entries are clamped and logged.  ``dt`` returns to its base
    value after ten accepted steps.
    """
    u = initial_state(model, mesh) if u0 is None else np.array(u0, dtype=float)
    if u.shape != (model.m, mesh.n_cells):
        raise ValueError(f"initial state shape {u.shape} does not match {(model.m, mesh.n_cells)}")
    full = config.record == "full"
    stepper = Stepper(model, mesh, config)
    traj = Trajectory(config.record)
    traj.max_u = u.max(axis=1).copy()
    traj.min_u = float(u.min())
    t, dt, since_cut = 0.0, config.dt, 0
    traj.records.append(_record(model, mesh, u, t, full))
    if u.max() >= config.u_max:
        traj.events.append(Event(t, BLOWUP, {"max_u": float(u.max())}))
        return traj
    eps = 1e-12 * config.t_end
    while config.t_end - t > eps:
        h = min(dt, config.t_end - t)
        at_floor = dt <= config.dt_min
        try:
            new = stepper.step(u, h)
            low = float(new.min())
            if low < -config.clamp_tol and not at_floor:
                raise StepReject(f"negative entry {low:.3e}")
        except StepReject as exc:
            if at_floor:
                traj.events.append(Event(t, BLOWUP, {"reason": exc.reason, "dt": h, "max_u": float(u.max())}))
                log.warning("t=%g: step failed at dt_min (%s); stopping", t, exc.reason)
                return traj
            traj.rejects += 1
            traj.events.append(Event(t, REJECT, {"reason": exc.reason, "dt": h}))
            dt = max(dt / 2, config.dt_min)
            since_cut = 0
            continue
        traj.min_u = min(traj.min_u, low)
        negative = new < 0
        if low < -config.clamp_tol:
            traj.events.append(Event(t + h, CLAMP, {"count": int(negative.sum()), "min": low}))
            log.warning("t=%g: clamped %d negative entries (min %.3e)", t + h, negative.sum(), low)
        else:
            traj.zeroed_roundoff += int(negative.sum())
        u = np.where(negative, 0.0, new)
        t += h
        traj.steps += 1
        np.maximum(traj.max_u, u.max(axis=1), out=traj.max_u)
        if dt < config.dt:
            since_cut += 1
            if since_cut >= _RESTORE_AFTER:
                dt, since_cut = config.dt, 0
        finished = config.t_end - t <= eps
        if finished:
            t = config.t_end
        if u.max() >= config.u_max:
            traj.records.append(_record(model, mesh, u, t, full))
            traj.events.append(Event(t, BLOWUP, {"max_u": float(u.max())}))
            return traj
        if finished or traj.steps % config.output_stride == 0:
            traj.records.append(_record(model, mesh, u, t, full))
    traj.events.append(Event(t, COMPLETED, {"steps": traj.steps, "rejects": traj.rejects}))
    return traj


# -- convergence checks -----------------------------------------------------------

CONVERGENCE_CASES = ("neumann_heat_1d", "robin_linear_1d")


def _linear_model(d: float, boundary: str) -> VectorFieldModel:
    zero = MultiPoly.zero(1)
    G = -MultiPoly.variable(1, 1) if boundary == "robin" else zero
    return VectorFieldModel(1, (d,), (zero,), (G,))


def verify_convergence(case: str, cells: Sequence[int] = (25, 50, 100, 200), d: float = 1.0,
                       length: float = 1.0, t_end: float = 0.1, dt_factor: float = 1.0) -> dict:
    """L∞ errors at ``t_end`` on a sequence of meshes with ``dt = dt_factor·h²``.

    ``neumann_heat_1d`` compares with ``1 + cos(πx/L) exp(−dπ²t/L²)`` at cell
    centres; ``robin_linear_1d`` (boundary flux ``G = −u``) compares with a
    run on a 4x refined mesh with a 16x smaller step, averaged onto the
    coarse cells.
    """
    if case not in CONVERGENCE_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(CONVERGENCE_CASES)}")
    if not d > 0:
        raise ValueError("diffusion constant must be positive")
    model = _linear_model(d, "robin" if case == "robin_linear_1d" else "neumann")

    def run(n, dt):
        mesh = build_interval(length, n)
        x = mesh.centers[:, 0]
        u0 = (1.0 + np.cos(np.pi * x / length))[None, :]
        steps = max(1, round(t_end / dt))
        cfg = SolverConfig(dt=t_end / steps, t_end=t_end, dt_min=1e-6 * t_end / steps,
                           output_stride=steps, record="full")
        traj = integrate(model, mesh, cfg, u0=u0)
        return mesh, traj.records[-1].u[0]

    errors = []
    for n in cells:
        h = length / n
        dt = dt_factor * h * h
        mesh, u = run(n, dt)
        if case == "neumann_heat_1d":
            x = mesh.centers[:, 0]
            exact = 1.0 + np.cos(np.pi * x / length) * np.exp(-d * np.pi**2 * t_end / length**2)
        else:
            _, fine = run(4 * n, dt / 16)
            exact = fine.reshape(n, 4).mean(axis=1)
        errors.append(float(np.abs(u - exact).max()))
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    return {"case": case, "cells": list(cells), "errors": errors, "orders": orders}
