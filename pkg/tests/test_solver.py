import numpy as np
import pytest

from rdmass.mesh import build_interval, build_rectangle
from rdmass.model import VectorFieldModel
from rdmass.parser import parse
from rdmass.poly import MultiPoly
from rdmass.solver import (BLOWUP, boundary_source, CLAMP, COMPLETED, REJECT, SolverConfig, State, StepReject, integrate,
                           semidiscrete_rhs, step_imex, verify_convergence)


def model(F, G, w=None, d=None, dim=1):
    m = len(F)
    names = ("x", "y")[:dim]
    init = [parse(t, dim, names=names) for t in w] if w else ()
    return VectorFieldModel(m, d or (1,) * m, [parse(f, m) for f in F], [parse(g, m) for g in G], init)


def test_rhs_constant_state_is_equilibrium():
    mod = model(["0", "0"], ["0", "0"])
    mesh = build_rectangle(1, 1, 3, 4)
    assert np.all(semidiscrete_rhs(mod, mesh, np.full((2, 12), 3.0)) == 0)


def test_rhs_two_cells_hand_stencil():
    # flux (1 - 0)/0.5 through a face of area 1, divided by the cell volume 0.5
    mod = model(["0"], ["0"])
    rate = semidiscrete_rhs(mod, build_interval(1, 2), np.array([[0.0, 1.0]]))
    assert rate.tolist() == [[4.0, -4.0]]


def test_rhs_example3_weighted_sum_vanishes(presets):
    mf = presets["example3"]
    mod, mesh = mf.model(), mf.mesh()
    rng = np.random.default_rng(1)
    u = rng.uniform(0, 3, size=(3, mesh.n_cells))
    rate = semidiscrete_rhs(mod, mesh, u)
    b = np.array([0.5, 0.5, 1.0])
    scale = float(b @ np.abs(mesh.volumes * rate).sum(axis=1))
    assert abs(float(b @ (mesh.volumes * rate).sum(axis=1))) < 1e-14 * scale
    # the boundary contributions cancel pointwise, without roundoff
    assert np.all(b @ boundary_source(mod, mesh, u) == 0)


def test_rhs_shape_mismatch():
    with pytest.raises(ValueError):
        semidiscrete_rhs(model(["0"], ["0"]), build_interval(1, 4), np.zeros((1, 5)))


def test_discrete_conservation_with_sources():
    # d/dt sum b_i V u_i = sum b_i (int F_i + int_M G_i) at the discrete level
    mod = model(["u2 - u1", "u1*u2"], ["1 - u1", "u1^2"])
    mesh = build_rectangle(1, 2, 4, 3)
    u = np.random.default_rng(2).uniform(0, 2, size=(2, mesh.n_cells))
    rate = semidiscrete_rhs(mod, mesh, u)
    lhs = (mesh.volumes * rate).sum(axis=1)
    src_F = np.array([mesh.volumes @ f.eval_array(u) for f in mod.F])
    src_G = np.array([mesh.bface_area @ g.eval_array(u[:, mesh.bface_cell]) for g in mod.G])
    assert np.allclose(lhs, src_F + src_G, rtol=1e-12, atol=1e-12)


def test_step_equilibrium_unchanged():
    mod = model(["0", "0"], ["0", "0"])
    mesh = build_interval(1, 10)
    s = step_imex(mod, mesh, State(0.0, np.full((2, 10), 1.5)), 0.1)
    assert np.allclose(s.u, 1.5, atol=1e-10) and s.t == 0.1


def test_step_pure_diffusion_conserves_mass():
    mod = model(["0"], ["0"])
    mesh = build_interval(1, 50)
    u = (1 + np.cos(np.pi * mesh.centers[:, 0]))[None, :]
    s = step_imex(mod, mesh, State(0.0, u), 1e-3)
    assert abs(mesh.volumes @ s.u[0] - mesh.volumes @ u[0]) < 1e-12


def test_step_explicit_reaction_update():
    mod = model(["u1^2"], ["0"])
    mesh = build_interval(1, 10)
    s = step_imex(mod, mesh, State(0.0, np.full((1, 10), 2.0)), 0.01)
    assert np.allclose(s.u, 2.04, rtol=1e-14)


def test_step_rejects_negative_and_bad_dt():
    mod = model(["-10*u1"], ["0"])
    mesh = build_interval(1, 4)
    with pytest.raises(StepReject):
        step_imex(mod, mesh, State(0.0, np.ones((1, 4))), 0.5)
    with pytest.raises(ValueError):
        step_imex(mod, mesh, State(0.0, np.ones((1, 4))), 0.0)


def test_two_dimensional_cg_conserves_mass():
    mod = model(["0"], ["0"], w=["1 + x*y"], dim=2)
    mesh = build_rectangle(1, 1, 8, 8)
    traj = integrate(mod, mesh, SolverConfig(dt=1e-2, t_end=0.2))
    masses = [mesh.volumes @ r.u[0] for r in traj.records]
    assert traj.outcome == COMPLETED
    assert max(abs(mm - masses[0]) for mm in masses) < 1e-9
    # diffusion flattens the profile
    assert np.ptp(traj.records[-1].u) < np.ptp(traj.records[0].u)


def test_integrate_zero_fields_conserves_and_records():
    mod = model(["0"], ["0"], w=["1 + x^2"])
    mesh = build_interval(1, 40)
    traj = integrate(mod, mesh, SolverConfig(dt=1e-3, t_end=0.05, output_stride=7))
    t = traj.times
    assert np.all(np.diff(t) > 0) and t[0] == 0 and t[-1] == 0.05
    masses = np.array([mesh.volumes @ r.u[0] for r in traj.records])
    assert np.abs(masses - masses[0]).max() < 1e-10
    terminal = [e for e in traj.events if e.kind in (BLOWUP, COMPLETED)]
    assert len(terminal) == 1 and terminal[0].kind == COMPLETED


def test_blowup_linearized_in_window():
    mod = model(["u1^2"], ["0"], w=["2"])
    cfg = SolverConfig(dt=1e-3, t_end=1.0, output_stride=10, reaction="linearized")
    traj = integrate(mod, build_interval(1, 20), cfg)
    assert traj.outcome == BLOWUP and 0.45 <= traj.blowup_time <= 0.5


def test_blowup_explicit_lags_exact_time():
    # any explicit update under-predicts growth of u' = u^2, so the crossing comes after t* = 1/2
    mod = model(["u1^2"], ["0"], w=["2"])
    traj = integrate(mod, build_interval(1, 20), SolverConfig(dt=1e-3, t_end=1.0))
    assert traj.outcome == BLOWUP and traj.blowup_time > 0.5


def test_linearized_preserves_linear_invariant(presets):
    mf = presets["example3"]
    mod = mf.model().with_initial([parse(w, 1, names=("x",)) for w in ("1 + x", "2 - x", "x^2")])
    mesh = build_interval(1, 50)
    traj = integrate(mod, mesh, SolverConfig(dt=1e-3, t_end=0.5, output_stride=50, reaction="linearized"))
    b = np.array([0.5, 0.5, 1.0])
    mass = [b @ (r.u @ mesh.volumes) for r in traj.records]
    assert max(abs(x - mass[0]) for x in mass) < 1e-10 * mass[0]


def test_step_reject_halves_dt_and_recovers():
    # strong explicit decay: dt = 0.5 overshoots below zero, smaller steps do not
    mod = model(["-5*u1"], ["0"], w=["1"])
    traj = integrate(mod, build_interval(1, 4), SolverConfig(dt=0.5, t_end=2.0))
    assert traj.outcome == COMPLETED and traj.rejects > 0 and traj.count(CLAMP) == 0
    assert any(e.kind == REJECT for e in traj.events)
    assert traj.states().min() >= 0


def test_clamp_at_dt_floor():
    mod = model(["-5*u1"], ["0"], w=["1"])
    cfg = SolverConfig(dt=0.5, t_end=1.0, dt_min=0.4)
    traj = integrate(mod, build_interval(1, 4), cfg)
    assert traj.count(CLAMP) > 0 and traj.states().min() >= 0


def test_determinism(presets):
    mf = presets["example1"]
    a = integrate(mf.model(), mf.mesh(), mf.solver_config(t_end=0.2))
    b = integrate(mf.model(), mf.mesh(), mf.solver_config(t_end=0.2))
    assert all(np.array_equal(x.u, y.u) for x, y in zip(a.records, b.records))


@pytest.mark.parametrize("kw", [dict(dt=0), dict(t_end=-1), dict(dt=1e-3, dt_min=1e-2), dict(u_max=0),
                                dict(output_stride=0), dict(reaction="rk4"), dict(record="none")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_convergence_neumann_order():
    res = verify_convergence("neumann_heat_1d", cells=(25, 50, 100, 200))
    assert res["orders"][-1] >= 1.9


def test_convergence_robin_order():
    res = verify_convergence("robin_linear_1d", cells=(25, 50, 100, 200))
    assert res["orders"][-1] >= 0.9


def test_convergence_errors():
    with pytest.raises(ValueError):
        verify_convergence("neumann_heat_1d", d=0.0)
    with pytest.raises(ValueError):
        verify_convergence("advection")
