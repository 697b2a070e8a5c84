"""Certify or falsify structural hypotheses on polynomial reaction fields.

Every check returns a :class:`ConditionReport` with a three-valued verdict.
``Certified`` always carries a re-checkable certificate, ``Falsified`` a
witness point; anything the sufficient tests cannot settle is ``Unknown``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from . import univariate
from .mesh import Mesh
from .model import VectorFieldModel
from .poly import MultiPoly, as_fraction, format_fraction, linear_combination


class Verdict(str, Enum):
    CERTIFIED = "Certified"
    FALSIFIED = "Falsified"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CheckerConfig:
    falsify_margin: float = 1e-9
    compat_tol: float = 1e-10
    simplex_depth: int = 12
    samples: int = 10_000
    boxes: tuple[float, ...] = (1.0, 10.0, 100.0)
    seed: int = 20_240_517
    root_width: Fraction = Fraction(1, 10**12)


DEFAULT_CONFIG = CheckerConfig()

GRID_CAVEAT = (
    "grid-relative: certified only for the weight vectors listed; "
    "the hypothesis quantifies over every a >= K, which a finite grid cannot certify"
)


@dataclass
class ConditionReport:
    condition: str
    verdict: Verdict
    constants: dict = field(default_factory=dict)
    witness: list | None = None
    certificate: dict | None = None
    notes: str = ""
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": str(self.verdict),
            "constants": _jsonable(self.constants),
            "witness": _jsonable(self.witness) if self.witness is not None else [],
            "certificate": _jsonable(self.certificate) if self.certificate is not None else {},
            "notes": self.notes,
            "seed": self.seed,
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, MultiPoly):
        return obj.to_text()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _fraction_point(z) -> list[Fraction]:
    # floats convert exactly; the witness is re-evaluated at exactly this point
    return [v if isinstance(v, Fraction) else Fraction(float(v)) for v in z]


def _point_out(z: Sequence[Fraction]) -> list:
    return [float(v) if v.denominator != 1 and v.denominator & (v.denominator - 1) == 0 else v for v in z]


# -- quasi-positivity ---------------------------------------------------------


def _sample_box(dim: int, R: float, n: int, seed: int) -> np.ndarray:
    """Box corners followed by ``n`` scrambled Halton points in ``[0, R]^dim``."""
    if dim == 0:
        return np.zeros((1, 0))
    corners = np.array(list(itertools.product((0.0, R), repeat=dim))) if dim <= 10 else np.zeros((0, dim))
    pts = qmc.Halton(d=dim, scramble=True, seed=seed).random(n) * R
    return np.vstack([corners, pts])


def check_quasi_positive(fields: Sequence[MultiPoly], config: CheckerConfig = DEFAULT_CONFIG,
                         condition: str = "V_QP") -> ConditionReport:
    """Each ``field_i`` restricted to the face ``u_i = 0`` must be nonnegative."""
    m = len(fields)
    if any(p.nvars != m for p in fields):
        raise ValueError(f"quasi-positivity needs {m} fields in {m} variables")
    restricted = [fields[i].substitute_zero(i + 1) for i in range(m)]
    if all(c >= 0 for r in restricted for c in r.terms.values()):
        return ConditionReport(
            condition, Verdict.CERTIFIED,
            certificate={"method": "face coefficients nonnegative",
                         "faces": {f"u{i + 1}=0": r for i, r in enumerate(restricted)}},
            seed=config.seed,
        )
    for i, r in enumerate(restricted):
        if all(c >= 0 for c in r.terms.values()):
            continue
        others = [j for j in range(m) if j != i]
        for R in config.boxes:
            face = _sample_box(m - 1, R, config.samples, config.seed + i)
            z = np.zeros((m, face.shape[0]))
            z[others] = face.T
            vals = r.eval_array(z)
            k = int(np.argmin(vals))
            if vals[k] < -config.falsify_margin:
                point = _fraction_point(z[:, k])
                exact = r.eval_exact(point)
                if exact < -config.falsify_margin:
                    return ConditionReport(
                        condition, Verdict.FALSIFIED,
                        constants={"component": i + 1, "value": float(exact)},
                        witness=_point_out(point),
                        certificate={"violation": {"poly": r, "must_be": ">=0"}},
                        notes=f"field {i + 1} is negative on the face u{i + 1}=0",
                        seed=config.seed,
                    )
    return ConditionReport(condition, Verdict.UNKNOWN,
                           notes="negative face coefficients but no violating sample found",
                           seed=config.seed)


# -- linear control -----------------------------------------------------------


@dataclass
class _Control:
    verdict: Verdict
    L: Fraction | None = None
    certificate: dict | None = None
    witness: list | None = None
    notes: str = ""


def _coefficient_certificate(q: MultiPoly) -> _Control | None:
    m = q.nvars
    if all(c <= 0 for e, c in q.terms.items() if sum(e) >= 2):
        L = max([Fraction(0), q.constant_term()] + [c for e, c in q.terms.items() if sum(e) == 1])
        ones = MultiPoly(m, {(0,) * m: 1, **{tuple(int(j == k) for j in range(m)): 1 for k in range(m)}})
        slack = ones * L - q
        return _Control(Verdict.CERTIFIED, L, {"method": "coefficients", "slack": slack,
                                                "must_be": "all coefficients >= 0"})
    return None


def _univariate_certificate(q: MultiPoly, width: Fraction) -> _Control | None:
    """Bound ``q`` by ``z_k * p(z_l) + rest`` with ``sup p`` certified by root isolation."""
    m = q.nvars
    best = None
    for k, l in itertools.permutations(range(m), 2):
        p_coeffs: dict[int, Fraction] = {}
        rest = {}
        for e, c in q.terms.items():
            if e[k] == 1 and all(v == 0 for j, v in enumerate(e) if j not in (k, l)):
                p_coeffs[e[l]] = c
            else:
                rest[e] = c
        if not p_coeffs or max(p_coeffs) < 2:
            continue
        rest_poly = MultiPoly(m, rest)
        rest_ctl = _coefficient_certificate(rest_poly)
        if rest_ctl is None:
            continue
        p = [p_coeffs.get(j, Fraction(0)) for j in range(max(p_coeffs) + 1)]
        sup = univariate.sup_on_halfline(p, width)
        if sup is None:
            continue
        L = max(sup, Fraction(0)) + rest_ctl.L
        if best is None or L < best.L:
            p_text = MultiPoly(1, {(j,): c for j, c in enumerate(p)}).to_text(names=("s",))
            best = _Control(Verdict.CERTIFIED, L, {
                "method": "univariate reduction",
                "factor": f"u{k + 1}", "variable": f"u{l + 1}", "p(s)": p_text,
                "sup_p_bound": max(sup, Fraction(0)), "remainder_L": rest_ctl.L,
            }, notes=f"q <= u{k + 1}*p(u{l + 1}) + remainder with sup p(s) over s>=0 bounded")
    return best


def _simplex_positive_point(h: MultiPoly, support: Sequence[int], margin: float, depth: int):
    """Search the simplex spanned by ``e_j, j in support`` for a point with ``h > margin``."""
    m = h.nvars
    exps, coefs = h.compiled()
    verts0 = []
    for j in support:
        v = [Fraction(0)] * m
        v[j] = Fraction(1)
        verts0.append(tuple(v))
    queue = [(tuple(verts0), 0)]
    while queue:
        nxt = []
        for verts, level in queue:
            cands = [tuple(sum(v[j] for v in verts) / len(verts) for j in range(m))] + list(verts)
            vals = h.eval_array(np.array([[float(c[j]) for c in cands] for j in range(m)]))
            for c, val in zip(cands, vals):
                if val > margin:
                    exact = h.eval_exact(c)
                    if exact > margin:
                        return list(c), exact
            arr = np.array([[float(x) for x in v] for v in verts])
            lo, hi = arr.min(axis=0), arr.max(axis=0)
            mono_hi = np.prod(hi ** exps, axis=1)
            mono_lo = np.prod(lo ** exps, axis=1)
            upper = np.sum(np.where(coefs > 0, coefs * mono_hi, coefs * mono_lo))
            if upper <= margin or level >= depth or len(verts) == 1:
                continue
            a, b = max(itertools.combinations(range(len(verts)), 2),
                       key=lambda ab: sum(float(verts[ab[0]][j] - verts[ab[1]][j]) ** 2 for j in range(m)))
            mid = tuple((x + y) / 2 for x, y in zip(verts[a], verts[b]))
            nxt.append((verts[:a] + (mid,) + verts[a + 1:], level + 1))
            nxt.append((verts[:b] + (mid,) + verts[b + 1:], level + 1))
        queue = nxt
    return None


def _falsify_growth(q: MultiPoly, config: CheckerConfig) -> _Control | None:
    """Find a ray in the orthant along which ``q / (sum z + 1)`` is unbounded above.

    The leading form of ``q`` (or of its restriction to a coordinate face) of
    degree >= 2 being positive at a simplex point is such a ray.
    """
    m = q.nvars
    seen = set()
    for size in range(m, 0, -1):
        for support in itertools.combinations(range(m), size):
            r = q.restrict(j + 1 for j in support)
            if r in seen or r.is_zero:
                continue
            seen.add(r)
            h = r.leading_form()
            if h.total_degree() < 2 or all(c <= 0 for c in h.terms.values()):
                continue
            found = _simplex_positive_point(h, support, config.falsify_margin, config.simplex_depth)
            if found is not None:
                point, value = found
                return _Control(
                    Verdict.FALSIFIED, witness=point,
                    certificate={"violation": {"poly": h, "must_be": "<=0"}, "degree": h.total_degree(),
                                 "leading_value": value},
                    notes=(f"degree-{h.total_degree()} leading form is positive at the witness direction, "
                           "so the combination grows faster than sum(z)+1 along that ray"),
                )
    return None


def _control(q: MultiPoly, config: CheckerConfig) -> _Control:
    if q.is_zero:
        return _Control(Verdict.CERTIFIED, Fraction(0), {"method": "identically zero"})
    ctl = _coefficient_certificate(q)
    if ctl is not None:
        return ctl
    ctl = _falsify_growth(q, config)
    if ctl is not None:
        return ctl
    ctl = _univariate_certificate(q, config.root_width)
    if ctl is not None:
        return ctl
    return _Control(Verdict.UNKNOWN, notes="no coefficient or univariate certificate, no growth witness")


def check_linear_control(fields: Sequence[MultiPoly], coeffs: Sequence, config: CheckerConfig = DEFAULT_CONFIG,
                         condition: str = "linear_control") -> ConditionReport:
    """Test ``sum c_j field_j <= L (sum z + 1)`` on the orthant and fit ``L``."""
    coeffs = [as_fraction(c) for c in coeffs]
    if len(coeffs) != len(fields):
        raise ValueError(f"{len(coeffs)} coefficients for {len(fields)} fields")
    if any(c <= 0 for c in coeffs):
        raise ValueError("linear control coefficients must be strictly positive")
    return _report_control(condition, linear_combination(coeffs, fields), config, {"b": coeffs})


def _report_control(condition, q, config, constants) -> ConditionReport:
    ctl = _control(q, config)
    consts = dict(constants)
    if ctl.L is not None:
        consts["L"] = ctl.L
    cert = {"combination": q, **(ctl.certificate or {})}
    return ConditionReport(condition, ctl.verdict, consts,
                           witness=_point_out(ctl.witness) if ctl.witness else None,
                           certificate=cert, notes=ctl.notes)


def _grid_vectors(m: int, K: Fraction, grid) -> list[tuple[Fraction, ...]]:
    if grid is None:
        grid = [[K, 2 * K, 10 * K, 100 * K]] * (m - 1)
    grid = [[as_fraction(v) for v in axis] for axis in grid]
    if len(grid) != m - 1:
        raise ValueError(f"grid needs {m - 1} axes, got {len(grid)}")
    if m > 1 and any(not axis for axis in grid):
        raise ValueError("empty weight grid")
    return [tuple(a) + (Fraction(1),) for a in itertools.product(*grid)]


def check_VL(F: Sequence[MultiPoly], G: Sequence[MultiPoly], K=1, grid=None,
             config: CheckerConfig = DEFAULT_CONFIG, condition: str = "V_L") -> ConditionReport:
    """Linear control of ``sum a_j F_j`` and ``sum a_j G_j`` for every ``a`` on a grid with ``a_m = 1``."""
    K = as_fraction(K)
    if K <= 0:
        raise ValueError("K must be positive")
    m = len(F)
    if len(G) != m:
        raise ValueError("F and G must have the same length")
    vectors = _grid_vectors(m, K, grid)
    table = []
    unknown = False
    L_max = Fraction(0)
    for a in vectors:
        row = {"a": list(a)}
        for label, fields in (("F", F), ("G", G)):
            ctl = _control(linear_combination(a, fields), config)
            if ctl.verdict is Verdict.FALSIFIED:
                return ConditionReport(
                    condition, Verdict.FALSIFIED,
                    constants={"K_VL": K, "a": list(a), "field": label},
                    witness=_point_out(ctl.witness),
                    certificate={"combination": linear_combination(a, fields), **ctl.certificate},
                    notes=f"{label} combination with a={[format_fraction(v) for v in a]} is not linearly "
                          f"controlled; {ctl.notes}",
                    seed=config.seed,
                )
            if ctl.verdict is Verdict.UNKNOWN:
                unknown = True
                row[f"L_{label}"] = None
            else:
                row[f"L_{label}"] = ctl.L
                L_max = max(L_max, ctl.L)
            row[f"method_{label}"] = (ctl.certificate or {}).get("method")
        table.append(row)
    verdict = Verdict.UNKNOWN if unknown else Verdict.CERTIFIED
    consts = {"K_VL": K}
    if not unknown:
        consts["L_a_max"] = L_max
    return ConditionReport(condition, verdict, consts, certificate={"grid": table},
                           notes=GRID_CAVEAT, seed=config.seed)


def check_poly_bounded(fields: Sequence[MultiPoly], condition: str = "V_Poly") -> ConditionReport:
    """``|field_i(z)| <= M (sum z + 1)^l`` with ``l`` the max degree and ``M`` the max coefficient mass."""
    l = max((p.total_degree() for p in fields), default=0)
    M = max((p.coefficient_abs_sum() for p in fields), default=Fraction(0))
    return ConditionReport(
        condition, Verdict.CERTIFIED, {"l": l, "M": M},
        certificate={"method": "termwise", "inequality": "|c z^e| <= |c| (sum z + 1)^|e| <= |c| (sum z + 1)^l"},
        notes="trivially bounded (all fields zero)" if M == 0 else "",
    )


def check_intermediate_sum(F: Sequence[MultiPoly], A, config: CheckerConfig = DEFAULT_CONFIG,
                           condition: str = "Eq3") -> ConditionReport:
    """Row-wise linear control of ``A F`` for lower-triangular ``A`` with positive diagonal."""
    m = len(F)
    A = [[as_fraction(v) for v in row] for row in A]
    if len(A) != m or any(len(row) != m for row in A):
        raise ValueError(f"A must be {m}x{m}")
    for i in range(m):
        if A[i][i] <= 0:
            raise ValueError("A must have a positive diagonal")
        if any(A[i][j] != 0 for j in range(i + 1, m)):
            raise ValueError("A must be lower triangular")
    rows = []
    K = Fraction(0)
    unknown = False
    for i in range(m):
        q = linear_combination(A[i], F)
        ctl = _control(q, config)
        if ctl.verdict is Verdict.FALSIFIED:
            return ConditionReport(condition, Verdict.FALSIFIED, {"row": i + 1, "A": A},
                                   witness=_point_out(ctl.witness),
                                   certificate={"combination": q, **ctl.certificate},
                                   notes=f"row {i + 1}: {ctl.notes}")
        if ctl.verdict is Verdict.UNKNOWN:
            unknown = True
        else:
            K = max(K, ctl.L)
        rows.append({"row": i + 1, "combination": q, "L": ctl.L, **(ctl.certificate or {})})
    if unknown:
        return ConditionReport(condition, Verdict.UNKNOWN, {"A": A}, certificate={"rows": rows})
    return ConditionReport(condition, Verdict.CERTIFIED, {"K": K, "A": A}, certificate={"rows": rows})


def check_eq2(F: Sequence[MultiPoly], a_values=None, config: CheckerConfig = DEFAULT_CONFIG) -> ConditionReport:
    """Two-component condition ``a F_1 + F_2 <= K (u1 + u2 + 1)`` for some ``a > 0`` among ``a_values``."""
    if len(F) != 2:
        raise ValueError("Eq2 is a two-component condition")
    if a_values is None:
        a_values = [Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), 1, 2, 10, 100]
    tried = []
    for a in (as_fraction(v) for v in a_values):
        ctl = _control(linear_combination([a, 1], F), config)
        tried.append({"a": a, "verdict": str(ctl.verdict), "L": ctl.L})
        if ctl.verdict is Verdict.CERTIFIED:
            return ConditionReport("Eq2", Verdict.CERTIFIED, {"a": a, "K_eq2": ctl.L},
                                   certificate={"combination": linear_combination([a, 1], F), **ctl.certificate})
    return ConditionReport("Eq2", Verdict.UNKNOWN, certificate={"tried": tried},
                           notes="no tried a certifies; the condition is existential in a > 0")


def check_linear_control_zero(fields: Sequence[MultiPoly], coeffs: Sequence, config: CheckerConfig = DEFAULT_CONFIG,
                              condition: str = "V_L1_zero") -> ConditionReport:
    """``sum b_j field_j <= 0`` on the orthant (the ``L_1 = 0`` case)."""
    q = linear_combination([as_fraction(c) for c in coeffs], fields)
    if all(c <= 0 for c in q.terms.values()):
        return ConditionReport(condition, Verdict.CERTIFIED, {"L": Fraction(0)},
                               certificate={"combination": q, "method": "coefficients", "must_be": "all <= 0"})
    ctl = _control(q, config)
    if ctl.verdict is Verdict.CERTIFIED and ctl.L == 0:
        return ConditionReport(condition, Verdict.CERTIFIED, {"L": Fraction(0)},
                               certificate={"combination": q, **ctl.certificate})
    m = q.nvars
    for R in config.boxes:
        pts = _sample_box(m, R, config.samples, config.seed)
        vals = q.eval_array(pts.T)
        k = int(np.argmax(vals))
        if vals[k] > config.falsify_margin:
            point = _fraction_point(pts[k])
            if q.eval_exact(point) > config.falsify_margin:
                return ConditionReport(condition, Verdict.FALSIFIED, {"value": float(q.eval_exact(point))},
                                       witness=_point_out(point),
                                       certificate={"violation": {"poly": q, "must_be": "<=0"}},
                                       seed=config.seed)
    return ConditionReport(condition, Verdict.UNKNOWN, seed=config.seed)


# -- initial data --------------------------------------------------------------


def check_compatibility(model: VectorFieldModel, mesh: Mesh, config: CheckerConfig = DEFAULT_CONFIG) -> ConditionReport:
    """``d_i ∂w_i/∂η = G_i(w)`` at boundary face midpoints, and ``w >= 0``."""
    if not model.initial:
        raise ValueError("model has no initial data")
    if model.spatial_dim != mesh.dim:
        raise ValueError(f"initial data is {model.spatial_dim}-dimensional, mesh is {mesh.dim}-dimensional")
    mids = mesh.bface_mid.T
    w_b = np.array([w.eval_array(mids) for w in model.initial])
    w_c = np.array([w.eval_array(mesh.centers.T) for w in model.initial])
    pts = np.vstack([mesh.centers, mesh.bface_mid])
    w_all = np.hstack([w_c, w_b])
    if w_all.min() < 0:
        k = np.unravel_index(np.argmin(w_all), w_all.shape)
        return ConditionReport("V_N", Verdict.FALSIFIED, {"component": int(k[0]) + 1, "min_initial": float(w_all[k])},
                               witness=[float(v) for v in pts[k[1]]],
                               notes="initial data is negative somewhere")
    G_w = np.array([g.eval_array(w_b) for g in model.G])
    residual = np.empty_like(G_w)
    for i, w in enumerate(model.initial):
        grads = np.array([w.partial(a + 1).eval_array(mids) for a in range(mesh.dim)])
        dn = grads[mesh.bface_axis, np.arange(mesh.n_boundary_faces)] * mesh.bface_sign
        residual[i] = float(model.d[i]) * dn - G_w[i]
    worst = np.unravel_index(np.argmax(np.abs(residual)), residual.shape)
    max_res = float(np.abs(residual).max())
    tol = config.compat_tol * (1.0 + float(np.abs(G_w).max()))
    consts = {"max_residual": max_res, "tolerance": tol}
    if max_res <= tol:
        return ConditionReport("V_N", Verdict.CERTIFIED, consts,
                               certificate={"method": "boundary face midpoints", "faces": mesh.n_boundary_faces})
    return ConditionReport(
        "V_N", Verdict.FALSIFIED, {**consts, "component": int(worst[0]) + 1},
        witness=[float(v) for v in mesh.bface_mid[worst[1]]],
        notes=f"component {worst[0] + 1}: d*dw/dn - G(w) = {residual[worst]:.6g} at the witness face",
    )


# -- model-level ---------------------------------------------------------------


def merge_reports(condition: str, reports: Sequence[ConditionReport], constant_key: str | None = None) -> ConditionReport:
    """Conjunction of several reports: Falsified dominates, then Unknown."""
    for r in reports:
        if r.verdict is Verdict.FALSIFIED:
            return ConditionReport(condition, r.verdict, r.constants, r.witness, r.certificate,
                                   (r.condition + ": " + r.notes).strip(), r.seed)
    parts = {r.condition: r.to_json() for r in reports}
    verdict = Verdict.UNKNOWN if any(r.verdict is Verdict.UNKNOWN for r in reports) else Verdict.CERTIFIED
    consts = {}
    if constant_key and verdict is Verdict.CERTIFIED:
        consts[constant_key] = max(r.constants["L"] for r in reports)
    return ConditionReport(condition, verdict, consts, certificate={"parts": parts},
                           seed=reports[0].seed if reports else None)


def check_model(model: VectorFieldModel, mesh: Mesh | None = None, b=None, K=1, A=None, grid=None,
                config: CheckerConfig = DEFAULT_CONFIG) -> dict[str, ConditionReport]:
    m = model.m
    b = [Fraction(1)] * m if b is None else [as_fraction(v) for v in b]
    zero = tuple(MultiPoly.zero(m) for _ in range(m))
    out: dict[str, ConditionReport] = {}
    if mesh is not None and model.initial:
        out["V_N"] = check_compatibility(model, mesh, config)
    out["V_F"] = ConditionReport("V_F", Verdict.CERTIFIED,
                                 certificate={"method": "polynomial fields are locally Lipschitz"})
    out["V_QP"] = merge_reports("V_QP", [check_quasi_positive(model.F, config, "V_QP[F]"),
                                         check_quasi_positive(model.G, config, "V_QP[G]")])
    out["V_L1"] = merge_reports("V_L1", [check_linear_control(model.F, b, config, "V_L1[F]"),
                                         check_linear_control(model.G, b, config, "V_L1[G]")], "L_1")
    out["V_L1_zero"] = merge_reports("V_L1_zero", [check_linear_control_zero(model.F, b, config, "V_L1_zero[F]"),
                                                   check_linear_control_zero(model.G, b, config, "V_L1_zero[G]")])
    out["V_L"] = check_VL(model.F, model.G, K, grid, config)
    out["V_Poly"] = check_poly_bounded(model.F + model.G)
    out["Eq3"] = check_intermediate_sum(model.F, A if A is not None else np.eye(m, dtype=int).tolist(), config)
    out["Eq4"] = check_VL(model.F, zero, K, grid, config, condition="Eq4")
    if m == 2:
        out["Eq2"] = check_eq2(model.F, config=config)
        out["boundary_control"] = check_VL(zero, model.G, K, grid, config, condition="boundary_control")
    return out


PROFILES = {
    "thm2.3": ("V_N", "V_F", "V_QP", "V_L1", "V_Poly", "boundary_control"),
    "thm2.5": ("V_N", "V_F", "V_QP", "V_L", "V_Poly"),
    "thm2.6": ("V_N", "V_F", "V_QP", "V_L", "V_Poly"),
    "cor2.7": ("V_N", "V_F", "V_QP", "V_L", "V_Poly", "V_L1_zero"),
}

PROFILE_NOTES = {
    "thm2.3": "needs m=2; the a priori sup bound h(t) on one component is an analytic input and is not checked",
    "thm2.6": "the windowed L1 bound on u is a property of the solution and is not checked here",
}
