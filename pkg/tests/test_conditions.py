import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdmass import conditions as cond
from rdmass.conditions import Verdict
from rdmass.mesh import build_interval, build_rectangle
from rdmass.model import VectorFieldModel
from rdmass.parser import parse
from rdmass.poly import MultiPoly, linear_combination

F = Fraction


def P(text, m, **kw):
    return parse(text, m, **kw)


def ones_slack(q: MultiPoly, L) -> MultiPoly:
    m = q.nvars
    lin = MultiPoly.constant(m, 1)
    for i in range(m):
        lin = lin + MultiPoly.variable(m, i + 1)
    return lin * L - q


def example2_G(alpha, beta):
    c = {"alpha": alpha, "beta": beta}
    return [P("alpha*u2 - u2^2*u1", 2, constants=c), P("beta - (alpha+1)*u2 + u2^2*u1", 2, constants=c)]


def example3_G(kf=1, kr=1):
    c = {"kf": kf, "kr": kr}
    return [P("-kf*u1*u2 + kr*u3", 3, constants=c), P("-kf*u1*u2 + kr*u3", 3, constants=c),
            P("kf*u1*u2 - kr*u3", 3, constants=c)]


# -- quasi-positivity ------------------------------------------------------------


def test_qp_example3_certified():
    r = cond.check_quasi_positive(example3_G())
    assert r.verdict is Verdict.CERTIFIED
    assert r.certificate["faces"]["u1=0"] == P("u3", 3)


def test_qp_eq5_certified(eq5_F):
    assert cond.check_quasi_positive(eq5_F).verdict is Verdict.CERTIFIED


def test_qp_falsified_with_witness_on_face():
    r = cond.check_quasi_positive([P("-u2", 2), P("0", 2)])
    assert r.verdict is Verdict.FALSIFIED
    z = [F(v) for v in r.witness]
    assert z[0] == 0 and P("-u2", 2).eval_exact(z) < -1e-9


def test_qp_unknown_when_negative_coefficients_never_bite():
    # (u2 - 1)^2 >= 0 on the face, but has a negative coefficient
    r = cond.check_quasi_positive([P("(u2-1)^2", 2), P("0", 2)])
    assert r.verdict is Verdict.UNKNOWN


def test_qp_dimension_mismatch():
    with pytest.raises(ValueError):
        cond.check_quasi_positive([P("u1", 3), P("u2", 3)])


# -- linear control --------------------------------------------------------------


def test_linear_control_example3_zero():
    r = cond.check_linear_control(example3_G(), [F(1, 2), F(1, 2), 1])
    assert r.verdict is Verdict.CERTIFIED and r.constants["L"] == 0


@pytest.mark.parametrize("alpha,beta", [(1, 2), (3, F(1, 2))])
def test_linear_control_example2(alpha, beta):
    G = example2_G(alpha, beta)
    q = linear_combination([1, 1], G)
    assert q == MultiPoly.constant(2, beta) - MultiPoly.variable(2, 2)  # beta - u2
    r = cond.check_linear_control(G, [1, 1])
    assert r.verdict is Verdict.CERTIFIED and r.constants["L"] == beta


def test_linear_control_eq5_falsified(eq5_F):
    r = cond.check_linear_control(eq5_F, [1, 3, 1])
    assert r.verdict is Verdict.FALSIFIED
    assert [F(v) for v in r.witness] == [F(1, 3)] * 3
    lead = r.certificate["violation"]["poly"]
    assert lead == P("3*u1*u2*u3", 3) and lead.eval_exact([F(1, 3)] * 3) > 1e-9


def test_linear_control_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        cond.check_linear_control([P("u1", 2), P("u2", 2)], [1, 0])


def test_certificate_rechecks_exactly():
    G = example2_G(2, 5)
    r = cond.check_linear_control(G, [3, 1])
    slack = r.certificate["slack"]
    assert all(c >= 0 for c in slack.terms.values())
    assert slack == ones_slack(linear_combination([3, 1], G), r.constants["L"])


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=20),
       st.fractions(min_value=0, max_value=5, max_denominator=7))
def test_scaling_and_monotonicity(c, extra):
    G = example2_G(2, 3)
    base = cond.check_linear_control(G, [2, 1])
    scaled = cond.check_linear_control([g * c for g in G], [2, 1])
    assert scaled.constants["L"] == c * base.constants["L"]
    q = linear_combination([2, 1], G)
    assert all(v >= 0 for v in ones_slack(q, base.constants["L"] + extra).terms.values())


# -- V_L grid checks ----------------------------------------------------------------


def test_vl_example2_certified_and_reference_constant_suffices():
    alpha, beta = F(1), F(2)
    G = example2_G(alpha, beta)
    zero = [MultiPoly.zero(2)] * 2
    r = cond.check_VL(zero, G, 1)
    assert r.verdict is Verdict.CERTIFIED and r.notes == cond.GRID_CAVEAT
    for row in r.certificate["grid"]:
        a1 = row["a"][0]
        reference_L = max(beta, alpha * a1)
        assert row["L_G"] <= reference_L
        q = linear_combination(row["a"], G)
        assert all(v >= 0 for v in ones_slack(q, reference_L).terms.values())


def test_vl_example4_no_falsified():
    c = {"alpha": 1, "beta": 1}
    G = [P("alpha*u1*u2^3 - u1*u2^2", 2, constants=c), P("u1*u2^2 - beta*u1*u2^6", 2, constants=c)]
    r = cond.check_VL([MultiPoly.zero(2)] * 2, G, 1)
    assert r.verdict is not Verdict.FALSIFIED
    for row in r.certificate["grid"]:
        assert row["L_G"] is not None and row["method_G"] == "univariate reduction"
        # a G1 + G2 = u1 (a u2^3 - a u2^2... ) : sample check that L bounds the combination on a ray
        a = row["a"]
        q = linear_combination(a, G)
        for s in (F(1, 2), F(4, 5), F(1), F(6, 5)):
            z = [F(10), s]
            assert q.eval_exact(z) <= row["L_G"] * (sum(z) + 1)


def test_vl_eq5_falsified_at_reference_weights(eq5_F):
    zero = [MultiPoly.zero(3)] * 3
    r = cond.check_VL(eq5_F, zero, 1, grid=[[1], [3]])
    assert r.verdict is Verdict.FALSIFIED
    assert r.constants["a"] == [1, 3, 1]
    # default grid falsifies too (first at a = (1, 1, 1))
    assert cond.check_VL(eq5_F, zero, 1).verdict is Verdict.FALSIFIED


def test_vl_errors(eq5_F):
    zero = [MultiPoly.zero(3)] * 3
    with pytest.raises(ValueError):
        cond.check_VL(eq5_F, zero, 1, grid=[[], [1]])
    with pytest.raises(ValueError):
        cond.check_VL(eq5_F, zero, 0)


# -- polynomial bounds and intermediate sums -----------------------------------------


def test_poly_bounded_example1():
    F1 = [P("u2^4*(1-u1)^3", 2), P("u2^4*(u1-1)^3", 2)]
    G1 = [P("-u1^2*u2^2", 2), P("u1^2*u2^2", 2)]
    r = cond.check_poly_bounded(F1 + G1)
    assert r.constants == {"l": 7, "M": 8}


def test_poly_bounded_zero_and_eq5(eq5_F):
    r = cond.check_poly_bounded([MultiPoly.zero(2)] * 2)
    assert r.constants == {"l": 0, "M": 0} and "trivially" in r.notes
    # oracle: max over components of the sum of |coefficients|
    oracle = max(sum(abs(c) for c in p.terms.values()) for p in eq5_F)
    assert cond.check_poly_bounded(eq5_F).constants == {"l": 3, "M": oracle}


def test_intermediate_sum_eq5(eq5_F):
    r = cond.check_intermediate_sum(eq5_F, [[1, 0, 0], [1, 1, 0], [1, 0, 1]])
    assert r.verdict is Verdict.CERTIFIED and r.constants["K"] == 1
    rows = [row["combination"] for row in r.certificate["rows"]]
    assert rows == [P("u1 - u1*u2*u3", 3), P("u1 - u2", 3), P("u1 - u3", 3)]


def test_intermediate_sum_identity_and_falsified():
    zero = [MultiPoly.zero(3)] * 3
    r = cond.check_intermediate_sum(zero, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert r.verdict is Verdict.CERTIFIED and r.constants["K"] == 0
    r = cond.check_intermediate_sum([P("u1^2", 2), P("0", 2)], [[1, 0], [0, 1]])
    assert r.verdict is Verdict.FALSIFIED


def test_intermediate_sum_shape_errors(eq5_F):
    with pytest.raises(ValueError):
        cond.check_intermediate_sum(eq5_F, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        cond.check_intermediate_sum(eq5_F, [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        cond.check_intermediate_sum(eq5_F, [[0, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_eq2_two_component():
    r = cond.check_eq2([P("-u1*u2", 2), P("u1*u2", 2)])
    assert r.verdict is Verdict.CERTIFIED and "K_eq2" in r.constants
    with pytest.raises(ValueError):
        cond.check_eq2([P("0", 3)] * 3)


# -- compatibility ---------------------------------------------------------------------


def _model(G, w, d=(1, 1), dim=1):
    names = ("x", "y")[:dim]
    m = len(G)
    return VectorFieldModel(m, d, [MultiPoly.zero(m)] * m, G, [parse(t, dim, names=names) for t in w])


def test_compatibility_example2_equilibrium():
    alpha, beta = F(1), F(2)
    model = _model(example2_G(alpha, beta), [str(alpha / beta), str(beta)])
    assert cond.check_compatibility(model, build_interval(1, 20)).verdict is Verdict.CERTIFIED


def test_compatibility_example1_falsified():
    G = [P("-u1^2*u2^2", 2), P("u1^2*u2^2", 2)]
    r = cond.check_compatibility(_model(G, ["0.5", "1"]), build_interval(1, 20))
    assert r.verdict is Verdict.FALSIFIED
    assert r.constants["max_residual"] == pytest.approx(0.25)
    assert r.witness in ([0.0], [1.0])


def test_compatibility_normal_derivative_2d():
    # w1 = 1 + x(x-1)/2 has d w1/dn = 1/2 on both x-faces and 0 on y-faces; G1 = 1/2 only matches on x-faces
    model = _model([P("1/2", 1)], ["1 + x*(x-1)/2"], d=(1,), dim=2)
    r = cond.check_compatibility(model, build_rectangle(1, 1, 4, 4))
    assert r.verdict is Verdict.FALSIFIED
    assert r.witness[1] in (0.0, 1.0)  # worst faces are the y-faces


def test_compatibility_zero_flux_constant_data():
    model = _model([MultiPoly.zero(2)] * 2, ["3", "1/7"], dim=2)
    assert cond.check_compatibility(model, build_rectangle(1, 2, 3, 3)).verdict is Verdict.CERTIFIED
    with pytest.raises(ValueError):
        cond.check_compatibility(model, build_interval(1, 4))


def test_negative_initial_data_falsified():
    model = _model([MultiPoly.zero(1)], ["x - 1/2"], d=(1,))
    r = cond.check_compatibility(model, build_interval(1, 4))
    assert r.verdict is Verdict.FALSIFIED and r.witness == [0.0] and r.constants["min_initial"] == -0.5


# -- model-level ------------------------------------------------------------------------


def test_reports_are_deterministic_and_serializable(presets):
    mf = presets["example4"]
    a = cond.check_model(mf.model(), mf.mesh())
    b = cond.check_model(mf.model(), mf.mesh())
    ja = json.dumps({k: r.to_json() for k, r in a.items()}, sort_keys=True)
    jb = json.dumps({k: r.to_json() for k, r in b.items()}, sort_keys=True)
    assert ja == jb


def test_falsified_reports_reverify(presets):
    for name in ("eq5", "example1"):
        mf = presets[name]
        for rep in cond.check_model(mf.model(), mf.mesh()).values():
            if rep.verdict is Verdict.FALSIFIED and rep.certificate and "violation" in rep.certificate:
                poly = rep.certificate["violation"]["poly"]
                val = poly.eval_exact([F(v) for v in rep.witness])
                assert (val > 1e-9) if rep.certificate["violation"]["must_be"] == "<=0" else (val < -1e-9)
