"""Mass budgets, discrete norms, windowed bounds and the run report files."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .mesh import Mesh
from .model import VectorFieldModel
from .poly import as_fraction
from .solver import CLAMP, SolverConfig, Trajectory

SCHEMA = 1
NORM_NAMES = ("L1_omega", "L2_omega", "Linf_omega", "L1_M")


@dataclass
class MassBudget:
    b: tuple[float, ...]
    times: np.ndarray
    total: np.ndarray
    interior: np.ndarray  # cumulative ∫∫ Σ b_i F_i
    boundary: np.ndarray  # cumulative ∫∫_M Σ b_i G_i
    residual: np.ndarray

    def relative_residual(self) -> float:
        if not len(self.total):
            return 0.0
        scale = abs(self.total[0]) or 1.0
        return float(np.abs(self.residual).max() / scale)

    def relative_drift(self) -> float:
        """``max_t |m(t) - m(0)| / m(0)``, ignoring sources."""
        if not len(self.total):
            return 0.0
        scale = abs(self.total[0]) or 1.0
        return float(np.abs(self.total - self.total[0]).max() / scale)


def _cumtrapz(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    if len(y) > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def component_masses(traj: Trajectory, mesh: Mesh) -> np.ndarray:
    """``Σ_k V_k u_{i,k}`` per record, shape ``(R, m)``."""
    if traj.mode == "full":
        return np.array([mesh.cell_volume * r.u.sum(axis=1) for r in traj.records])
    # light records store L1 norms, which equal masses for nonnegative states
    return np.array([r.norms[:, 0] for r in traj.records])


def mass_budget(traj: Trajectory, mesh: Mesh, model: VectorFieldModel, b: Sequence | None = None) -> MassBudget:
    b = np.array([float(as_fraction(v)) for v in (b if b is not None else [1] * model.m)])
    if len(b) != model.m or np.any(b <= 0):
        raise ValueError(f"b needs {model.m} positive weights")
    t = traj.times
    if not len(t):
        empty = np.zeros(0)
        return MassBudget(tuple(b), t, empty, empty, empty, empty)
    total = component_masses(traj, mesh) @ b
    interior = _cumtrapz(t, np.array([r.source_F @ b for r in traj.records]))
    boundary = _cumtrapz(t, np.array([r.source_G @ b for r in traj.records]))
    return MassBudget(tuple(b), t, total, interior, boundary, total - total[0] - interior - boundary)


@dataclass
class NormSeries:
    p_list: tuple[float, ...]
    times: np.ndarray
    omega: dict  # p -> (R, m)
    boundary: dict  # p -> (R, m)
    sup: np.ndarray  # (R, m)
    window_tau: np.ndarray
    window_sup: np.ndarray  # (W, m): sup over records in [τ, τ+1]
    window_L1: np.ndarray  # (W, m): ‖u_i‖_{1, Ω×(τ,τ+1)} by the trapezoid rule

    def window_spread(self, tau_min: float = 0.0) -> float:
        """``(max - min) / max`` of the windowed sup of ``max_i u_i`` over ``τ >= tau_min``."""
        w = self.window_sup[self.window_tau >= tau_min].max(axis=1, initial=0.0) if len(self.window_tau) else np.zeros(0)
        if not len(w) or w.max() == 0:
            return 0.0
        return float((w.max() - w.min()) / w.max())


def _pnorm(values: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=-1)
    return ((a**p) @ weights) ** (1.0 / p)


def windowed_sup(times: np.ndarray, sup: np.ndarray, window: float = 1.0):
    """Sup over closed windows ``[τ, τ+window]`` for integer ``τ`` that fit in the run."""
    if not len(times):
        return np.zeros(0), np.zeros((0,) + sup.shape[1:])
    taus = np.arange(0, math.floor(times[-1] - window + 1e-9) + 1, dtype=float)
    out = []
    for tau in taus:
        mask = (times >= tau - 1e-12) & (times <= tau + window + 1e-12)
        out.append(sup[mask].max(axis=0))
    return taus, np.array(out).reshape((len(taus),) + sup.shape[1:])


def norm_series(traj: Trajectory, mesh: Mesh, p_list: Sequence[float]) -> NormSeries:
    traj.require_full()
    p_list = tuple(float(p) for p in p_list)
    if not p_list:
        raise ValueError("p_list is empty")
    if any(p < 1 for p in p_list):
        raise ValueError("norm exponents must be >= 1")
    t = traj.times
    U = traj.states() if traj.records else np.zeros((0, 1, mesh.n_cells))
    vol = mesh.volumes
    omega = {p: _pnorm(U, vol, p) for p in p_list}
    # boundary quadrature uses owning-cell values, as the solver does
    boundary = {p: _pnorm(U[:, :, mesh.bface_cell], mesh.bface_area, p) for p in p_list}
    sup = np.abs(U).max(axis=2) if len(U) else np.zeros((0, 1))
    taus, wsup = windowed_sup(t, sup)
    L1 = _pnorm(U, vol, 1.0) if len(U) else np.zeros((0, 1))
    wl1 = []
    for tau in taus:
        mask = (t >= tau - 1e-12) & (t <= tau + 1 + 1e-12)
        tt, yy = t[mask], L1[mask]
        wl1.append(0.5 * ((yy[1:] + yy[:-1]) * np.diff(tt)[:, None]).sum(axis=0))
    return NormSeries(p_list, t, omega, boundary, sup, taus, wsup, np.array(wl1).reshape(len(taus), sup.shape[1]))


# -- report files ----------------------------------------------------------------


def _open(path: Path, mode: str = "w"):
    try:
        return open(path, mode, newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    with _open(path) as fh:
        w = csv.writer(fh)
        if traj.mode == "full":
            n = traj.records[0].u.shape[1] if traj.records else 0
            w.writerow(["time", "component"] + [f"cell{k}" for k in range(n)])
            for r in traj.records:
                for i, row in enumerate(r.u):
                    w.writerow([repr(r.t), i + 1] + [repr(float(v)) for v in row])
        else:
            w.writerow(["time", "component", *NORM_NAMES])
            for r in traj.records:
                for i, row in enumerate(r.norms):
                    w.writerow([repr(r.t), i + 1] + [repr(float(v)) for v in row])


def write_events_jsonl(path: Path, traj: Trajectory) -> None:
    with _open(path) as fh:
        for e in traj.events:
            fh.write(json.dumps({"t": e.t, "kind": e.kind, "payload": e.payload}, sort_keys=True) + "\n")


def diagnostics_header(m: int, lyapunov: bool) -> list[str]:
    cols = ["time"]
    for i in range(m):
        cols += [f"u{i + 1}_{name}" for name in NORM_NAMES]
    cols += ["mass_total", "mass_interior", "mass_boundary", "mass_residual"]
    if lyapunov:
        cols += ["L", "alpha_pm", "beta_pm"]
    return cols


def write_diagnostics_csv(path: Path, traj: Trajectory, budget: MassBudget, lyap=None) -> None:
    m = traj.records[0].norms.shape[0] if traj.records else len(budget.b)
    with _open(path) as fh:
        w = csv.writer(fh)
        w.writerow(diagnostics_header(m, lyap is not None))
        for k, r in enumerate(traj.records):
            row = [repr(r.t)] + [repr(float(v)) for v in r.norms.ravel()]
            row += [repr(float(x[k])) for x in (budget.total, budget.interior, budget.boundary, budget.residual)]
            if lyap is not None:
                row += [repr(float(lyap.L[k])), repr(lyap.alpha), repr(lyap.beta)]
            w.writerow(row)


def read_diagnostics_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[j]) for r in body]) for j, name in enumerate(header)}


def build_summary(model: VectorFieldModel, config: SolverConfig, traj: Trajectory, budget: MassBudget,
                  verdicts: dict | None = None, mesh: Mesh | None = None, lyap=None) -> dict:
    m = model.m
    summary = {
        "schema": SCHEMA,
        "model": model.name,
        "model_hash": model.digest(),
        "mesh": mesh.describe() if mesh is not None else None,
        "config": asdict(config),
        "verdicts": dict(verdicts or {}),
        "outcome": traj.outcome,
        "blowup_time": traj.blowup_time,
        "records": len(traj.records),
        "steps": traj.steps,
        "step_rejects": traj.rejects,
        "negativity_clamps": traj.count(CLAMP),
        "roundoff_zeroed": traj.zeroed_roundoff,
        "min_u": traj.min_u if traj.records else None,
        "final_time": traj.records[-1].t if traj.records else None,
        "final_mass": float(component_masses(traj, mesh).sum(axis=1)[-1]) if traj.records and mesh is not None else None,
        "mass_residual_relative": budget.relative_residual(),
        "mass_drift_relative": budget.relative_drift(),
        "max_sup_norm": float(traj.max_u.max()) if traj.max_u is not None else None,
        "events": [{"t": e.t, "kind": e.kind} for e in traj.events if e.kind != "StepReject"],
    }
    for i in range(m):
        summary[f"max_u{i + 1}"] = float(traj.max_u[i]) if traj.max_u is not None else None
    if lyap is not None:
        summary["lyapunov"] = {"alpha_pm": lyap.alpha, "beta_pm": lyap.beta,
                               "max_L": float(lyap.L.max()) if len(lyap.L) else None}
    return summary


def emit_report(out_dir, model: VectorFieldModel, config: SolverConfig, traj: Trajectory, mesh: Mesh,
                b: Sequence | None = None, verdicts: dict | None = None, lyap=None) -> dict:
    """Write trajectory.csv, events.jsonl, diagnostics.csv and summary.json under ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror}") from exc
    budget = mass_budget(traj, mesh, model, b)
    write_trajectory_csv(out / "trajectory.csv", traj)
    write_events_jsonl(out / "events.jsonl", traj)
    write_diagnostics_csv(out / "diagnostics.csv", traj, budget, lyap)
    summary = build_summary(model, config, traj, budget, verdicts, mesh, lyap)
    with _open(out / "summary.json") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
