import json
import math

import numpy as np
import pytest

from rdmass.diagnostics import (MassBudget, emit_report, mass_budget, norm_series, read_diagnostics_csv,
                                windowed_sup)
from rdmass.mesh import build_interval, build_rectangle
from rdmass.model import VectorFieldModel
from rdmass.parser import parse
from rdmass.poly import MultiPoly
from rdmass.solver import SolverConfig, Trajectory, integrate


def model(F, G, w, d=None, dim=1):
    m = len(F)
    names = ("x", "y")[:dim]
    return VectorFieldModel(m, d or (1,) * m, [parse(f, m) for f in F], [parse(g, m) for g in G],
                            [parse(t, dim, names=names) for t in w])


def test_constant_state_norms():
    mod = model(["0"], ["0"], ["3/2"])
    mesh = build_interval(1, 16)
    traj = integrate(mod, mesh, SolverConfig(dt=0.01, t_end=0.03))
    ns = norm_series(traj, mesh, [1, 2, 4, math.inf])
    for p in ns.p_list:
        assert np.allclose(ns.omega[p], 1.5, rtol=1e-12)


def test_boundary_l1_is_end_cells_in_1d():
    mod = model(["0"], ["0"], ["1 + x"])
    mesh = build_interval(1, 10)
    traj = integrate(mod, mesh, SolverConfig(dt=0.01, t_end=0.02))
    ns = norm_series(traj, mesh, [1])
    for r, val in zip(traj.records, ns.boundary[1.0][:, 0]):
        assert val == pytest.approx(r.u[0, 0] + r.u[0, -1], rel=1e-15)
        assert r.norms[0, 3] == pytest.approx(val, rel=1e-15)


def test_l1_norm_equals_solver_mass_exactly():
    mod = model(["0", "0"], ["-u1", "u1"], ["1 + x*y", "2"], dim=2)
    mesh = build_rectangle(1, 1, 5, 5)
    traj = integrate(mod, mesh, SolverConfig(dt=0.01, t_end=0.05))
    ns = norm_series(traj, mesh, [1])
    for k, r in enumerate(traj.records):
        assert np.array_equal(ns.omega[1.0][k], r.u @ mesh.volumes)


def test_budget_closes_for_constant_sources():
    mod = model(["3", "1/2"], ["0", "0"], ["1", "x"])
    mesh = build_interval(1, 20)
    traj = integrate(mod, mesh, SolverConfig(dt=0.01, t_end=1.0, output_stride=3))
    budget = mass_budget(traj, mesh, mod, [1, 2])
    assert budget.relative_residual() <= 1e-10
    assert budget.interior[-1] == pytest.approx((3 + 2 * 0.5) * 1.0, rel=1e-12)


def test_budget_zero_fields():
    mod = model(["0"], ["0"], ["1 + x^2"])
    mesh = build_interval(1, 20)
    budget = mass_budget(integrate(mod, mesh, SolverConfig(dt=0.01, t_end=0.2)), mesh, mod)
    assert np.all(budget.interior == 0) and np.all(budget.boundary == 0)
    assert budget.relative_drift() < 1e-12


def test_budget_example2_boundary_source(presets):
    mf = presets["example2"]
    mod = mf.model().with_initial([parse(w, 1, names=("x",)) for w in ("1/2 + x^2", "2 - x")])
    mesh = build_interval(1, 50)
    # the trapezoid source quadrature is first order in dt against the stepper's update
    res = []
    for dt in (2e-3, 1e-3):
        traj = integrate(mod, mesh, mf.solver_config(t_end=1.0, dt=dt, output_stride=1))
        res.append(mass_budget(traj, mesh, mod, [1, 1]).relative_residual())
    assert res[1] < 3e-4
    assert 1.6 < res[0] / res[1] < 2.4
    # sum of the two boundary fluxes is beta - u2 at each end cell
    beta = 2.0
    for r in traj.records:
        expect = sum(beta - r.u[1, c] for c in mesh.bface_cell)
        assert r.source_G.sum() == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_budget_rejects_bad_weights():
    mod = model(["0"], ["0"], ["1"])
    mesh = build_interval(1, 4)
    traj = integrate(mod, mesh, SolverConfig(dt=0.1, t_end=0.1))
    with pytest.raises(ValueError):
        mass_budget(traj, mesh, mod, [0])


def test_windowed_sup_covers_global_sup():
    t = np.linspace(0, 5, 51)
    sup = np.abs(np.sin(3 * t))[:, None]
    taus, w = windowed_sup(t, sup)
    assert taus.tolist() == [0, 1, 2, 3, 4]
    assert w.max() == sup.max()


def test_norm_series_errors():
    traj = Trajectory("light")
    with pytest.raises(ValueError):
        norm_series(traj, build_interval(1, 4), [1])
    full = Trajectory("full")
    with pytest.raises(ValueError):
        norm_series(full, build_interval(1, 4), [])


def test_emit_report_empty_trajectory(tmp_path):
    mod = model(["0"], ["0"], ["1"])
    mesh = build_interval(1, 4)
    cfg = SolverConfig(dt=0.1, t_end=1.0)
    summary = emit_report(tmp_path, mod, cfg, Trajectory("full"), mesh)
    lines = (tmp_path / "diagnostics.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("time,u1_L1_omega")
    assert summary["records"] == 0 and summary["schema"] == 1


def test_diagnostics_csv_round_trip(tmp_path, presets):
    mf = presets["example1"]
    mod, mesh = mf.model(), mf.mesh()
    cfg = mf.solver_config(t_end=0.5)
    traj = integrate(mod, mesh, cfg)
    summary = emit_report(tmp_path, mod, cfg, traj, mesh)
    data = read_diagnostics_csv(tmp_path / "diagnostics.csv")
    assert np.array_equal(data["time"], traj.times)
    for i in range(2):
        for j, name in enumerate(("L1_omega", "L2_omega", "Linf_omega", "L1_M")):
            ref = np.array([r.norms[i, j] for r in traj.records])
            assert np.allclose(data[f"u{i + 1}_{name}"], ref, rtol=1e-12, atol=0)
    assert summary["max_u1"] <= max(0.5, 1.0) + 1e-8
    assert json.loads((tmp_path / "summary.json").read_text()) == summary
    events = [json.loads(line) for line in (tmp_path / "events.jsonl").read_text().splitlines()]
    assert events[-1]["kind"] == "Completed"


def test_emit_report_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    mod = model(["0"], ["0"], ["1"])
    with pytest.raises(OSError, match="file"):
        emit_report(blocker / "sub", mod, SolverConfig(dt=0.1, t_end=1), Trajectory("full"), build_interval(1, 4))


def test_example4_moving_data_stays_bounded(presets):
    from rdmass.lyapunov import build_feasible_h, functional_series

    mf = presets["example4"]
    mod = mf.model().with_initial([parse(w, 1, names=("x",)) for w in ("1 + x/2", "1 - x/4")])
    mesh = mf.mesh([100])
    traj = integrate(mod, mesh, mf.solver_config(t_end=30.0))
    assert traj.outcome == "Completed"
    ns = norm_series(traj, mesh, [math.inf])
    assert ns.window_sup[0, 0] > ns.window_sup[-1, 0] + 0.1  # the data actually moves
    assert ns.window_spread(10) < 0.2
    lyap = functional_series(traj, mesh, build_feasible_h(2, 2, mod.d))
    assert lyap.window_max(15, 30) <= 1.2 * lyap.window_max(0, 15)
