"""INI-style model files and the built-in presets.

Sections::

    [model]       name, m, d (comma list), F1..Fm, G1..Gm
    [constants]   name = rational expression
    [domain]      kind = interval | rectangle, extents, cells
    [initial]     w1..wm as polynomials in x (and y)
    [solver]      dt, t_end, u_max, dt_min, linear_tol, clamp_tol,
                  output_stride, reaction
    [diagnostics] p_list, b, lyapunov_p, lyapunov_theta, vl_K, vl_grid, A

Matrix-valued keys (``vl_grid``, ``A``) separate rows with ``;``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .mesh import Mesh, build_interval, build_rectangle
from .model import VectorFieldModel
from .parser import ParseError, parse
from .poly import format_fraction
from .solver import SolverConfig

SECTIONS = ("model", "constants", "domain", "initial", "solver", "diagnostics")
_SOLVER_FLOATS = ("dt", "t_end", "u_max", "dt_min", "linear_tol", "clamp_tol")


class ModelFileError(ValueError):
    """Invalid model file; the message names the section and key."""


def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    return cp


@dataclass
class ModelFile:
    sections: dict[str, dict[str, str]] = field(default_factory=dict)

    # -- raw access -----------------------------------------------------------

    def get(self, section: str, key: str, default: str | None = None) -> str | None:
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str) -> str:
        value = self.get(section, key)
        if value is None or not value.strip():
            raise ModelFileError(f"[{section}] is missing '{key}'")
        return value

    def dumps(self) -> str:
        buf = io.StringIO()
        for sec in SECTIONS:
            if sec not in self.sections:
                continue
            buf.write(f"[{sec}]\n")
            for k, v in self.sections[sec].items():
                buf.write(f"{k} = {v}\n")
            buf.write("\n")
        return buf.getvalue()

    def with_constants(self, updates: Mapping[str, object]) -> "ModelFile":
        consts = dict(self.sections.get("constants", {}))
        for k, v in updates.items():
            if k not in consts:
                raise ModelFileError(f"unknown constant {k!r}; defined: {', '.join(sorted(consts)) or 'none'}")
            consts[k] = str(v)
        return ModelFile({**{s: dict(v) for s, v in self.sections.items()}, "constants": consts})

    # -- typed views ------------------------------------------------------------

    def constants(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for k, v in self.sections.get("constants", {}).items():
            out[k] = self._scalar("constants", k, v, out)
        return out

    def _scalar(self, section, key, text, constants) -> Fraction:
        try:
            p = parse(text, 1, constants=constants)
        except ParseError as exc:
            raise ModelFileError(f"[{section}] {key}: {exc}") from exc
        if p.total_degree() > 0:
            raise ModelFileError(f"[{section}] {key}: expected a constant, got {text!r}")
        return p.constant_term()

    def _list(self, section, key, text, constants) -> list[Fraction]:
        return [self._scalar(section, key, part.strip(), constants) for part in text.split(",") if part.strip()]

    def _matrix(self, section, key, constants):
        text = self.get(section, key)
        if text is None or not text.strip():
            return None
        return [self._list(section, key, row, constants) for row in text.split(";")]

    def _int(self, section, key, text) -> int:
        try:
            return int(text)
        except ValueError:
            raise ModelFileError(f"[{section}] {key}: expected an integer, got {text!r}") from None

    def model(self) -> VectorFieldModel:
        consts = self.constants()
        m = self._int("model", "m", self.require("model", "m"))
        if m < 1:
            raise ModelFileError("[model] m must be >= 1")
        d = self._list("model", "d", self.require("model", "d"), consts)

        def field_poly(section, key, nvars, names=None):
            text = self.require(section, key)
            try:
                return parse(text, nvars, constants=consts, names=names)
            except ParseError as exc:
                raise ModelFileError(f"[{section}] {key}: {exc}") from exc

        F = [field_poly("model", f"F{i + 1}", m) for i in range(m)]
        G = [field_poly("model", f"G{i + 1}", m) for i in range(m)]
        initial = []
        if "initial" in self.sections:
            names = ("x", "y")[: self.spatial_dim()]
            initial = [field_poly("initial", f"w{i + 1}", len(names), names) for i in range(m)]
        try:
            return VectorFieldModel(m, tuple(d), tuple(F), tuple(G), tuple(initial), consts,
                                    self.get("model", "name", "") or "")
        except ValueError as exc:
            raise ModelFileError(f"[model] {exc}") from exc

    def spatial_dim(self) -> int:
        kind = (self.get("domain", "kind", "interval") or "interval").strip()
        if kind not in ("interval", "rectangle"):
            raise ModelFileError(f"[domain] kind must be interval or rectangle, got {kind!r}")
        return 1 if kind == "interval" else 2

    def mesh(self, cells: list[int] | None = None) -> Mesh:
        dim = self.spatial_dim()
        extents = [float(v) for v in self._list("domain", "extents", self.get("domain", "extents", "1"), {})]
        if cells is None:
            cells = [self._int("domain", "cells", c.strip()) for c in self.get("domain", "cells", "200").split(",")]
        if len(cells) == 1 and dim == 2:
            cells = cells * 2
        if len(extents) == 1 and dim == 2:
            extents = extents * 2
        if len(cells) != dim or len(extents) != dim:
            raise ModelFileError(f"[domain] needs {dim} extents and cell counts")
        try:
            if dim == 1:
                return build_interval(extents[0], cells[0])
            return build_rectangle(extents[0], extents[1], cells[0], cells[1])
        except ValueError as exc:
            raise ModelFileError(f"[domain] {exc}") from exc

    def solver_config(self, **overrides) -> SolverConfig:
        sec = self.sections.get("solver", {})
        kw = {}
        for k in _SOLVER_FLOATS:
            if k in sec:
                try:
                    kw[k] = float(sec[k])
                except ValueError:
                    raise ModelFileError(f"[solver] {k}: expected a number, got {sec[k]!r}") from None
        if "output_stride" in sec:
            kw["output_stride"] = self._int("solver", "output_stride", sec["output_stride"])
        if "reaction" in sec:
            kw["reaction"] = sec["reaction"].strip()
        kw.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return SolverConfig(**kw)
        except ValueError as exc:
            raise ModelFileError(f"[solver] {exc}") from exc

    def diagnostics(self) -> dict:
        consts = self.constants()
        m = self._int("model", "m", self.require("model", "m"))
        sec = self.sections.get("diagnostics", {})
        p_list = []
        for part in sec.get("p_list", "1, 2, inf").split(","):
            part = part.strip().lower()
            p_list.append(float("inf") if part in ("inf", "infinity") else float(self._scalar("diagnostics", "p_list", part, {})))
        b = self._list("diagnostics", "b", sec["b"], consts) if "b" in sec else [Fraction(1)] * m
        if len(b) != m or any(v <= 0 for v in b):
            raise ModelFileError(f"[diagnostics] b needs {m} positive weights")
        theta = sec.get("lyapunov_theta", "auto").strip()
        return {
            "p_list": p_list,
            "b": b,
            "lyapunov_p": self._int("diagnostics", "lyapunov_p", sec.get("lyapunov_p", "2")),
            "lyapunov_theta": "auto" if theta == "auto" else self._list("diagnostics", "lyapunov_theta", theta, consts),
            "vl_K": self._scalar("diagnostics", "vl_K", sec.get("vl_K", "1"), consts),
            "vl_grid": self._matrix("diagnostics", "vl_grid", consts),
            "A": self._matrix("diagnostics", "A", consts),
        }


def loads(text: str) -> ModelFile:
    cp = _new_parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ModelFileError(f"unknown section(s): {', '.join(unknown)}")
    mf = ModelFile({s: dict(cp[s]) for s in cp.sections()})
    mf.model()  # validate eagerly
    return mf


def load(path) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)


def model_to_file(model: VectorFieldModel, **sections) -> ModelFile:
    """Serialize a model built in code (fields are written fully numeric)."""
    names = ("x", "y")[: model.spatial_dim or 0]
    sec = {"model": {"name": model.name, "m": str(model.m), "d": ", ".join(format_fraction(v) for v in model.d)}}
    for i, p in enumerate(model.F):
        sec["model"][f"F{i + 1}"] = p.to_text()
    for i, p in enumerate(model.G):
        sec["model"][f"G{i + 1}"] = p.to_text()
    if model.initial:
        sec["domain"] = {"kind": "interval" if len(names) == 1 else "rectangle"}
        sec["initial"] = {f"w{i + 1}": w.to_text(names=names) for i, w in enumerate(model.initial)}
    for k, v in sections.items():
        sec.setdefault(k, {}).update({kk: str(vv) for kk, vv in v.items()})
    return ModelFile(sec)


# -- presets -----------------------------------------------------------------------

_SOLVER_DEFAULT = """[solver]
dt = 1e-3
t_end = {t_end}
output_stride = 10
"""

PRESETS: dict[str, str] = {
    "example1": """# two species exchanging mass in the interior and on the boundary;
# u1 stays below max(sup w1, 1)
[model]
name = example1
m = 2
d = 1, 2
F1 = u2^4*(1-u1)^3
F2 = u2^4*(u1-1)^3
G1 = -u1^2*u2^2
G2 = u1^2*u2^2

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = 1/2
w2 = 1

""" + _SOLVER_DEFAULT.format(t_end=10) + """
[diagnostics]
p_list = 1, 2, inf
b = 1, 1
lyapunov_p = 2
""",
    "example2": """# Brusselator-type boundary kinetics, equilibrium initial data (alpha/beta, beta)
[model]
name = example2
m = 2
d = 1, 1
F1 = 0
F2 = 0
G1 = alpha*u2 - u2^2*u1
G2 = beta - (alpha+1)*u2 + u2^2*u1

[constants]
alpha = 1
beta = 2

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = alpha/beta
w2 = beta

""" + _SOLVER_DEFAULT.format(t_end=10) + """
[diagnostics]
p_list = 1, 2, inf
b = 1, 1
lyapunov_p = 2
""",
    "example3": """# reversible binding R1 + R2 <-> P1 acting on the boundary only
[model]
name = example3
m = 3
d = 1, 2, 3
F1 = 0
F2 = 0
F3 = 0
G1 = -kf*u1*u2 + kr*u3
G2 = -kf*u1*u2 + kr*u3
G3 = kf*u1*u2 - kr*u3

[constants]
kf = 1
kr = 1

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = 1
w2 = 1
w3 = 1

""" + _SOLVER_DEFAULT.format(t_end=10) + """
[diagnostics]
p_list = 1, 2, inf
b = 1/2, 1/2, 1
lyapunov_p = 2
""",
    "example4": """# boundary field without a linear intermediate sums structure
[model]
name = example4
m = 2
d = 1, 2
F1 = 0
F2 = 0
G1 = alpha*u1*u2^3 - u1*u2^2
G2 = u1*u2^2 - beta*u1*u2^6

[constants]
alpha = 1
beta = 1

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = 1
w2 = 1

""" + _SOLVER_DEFAULT.format(t_end=50) + """
[diagnostics]
p_list = 1, 2, inf
b = 1, 1
lyapunov_p = 2
lyapunov_theta = auto
""",
    "blowup": """# u' = u^2 from u = 2: blows up at t = 1/2.  The reaction is treated
# linearly implicitly so the discrete solution cannot lag the true blow-up.
[model]
name = blowup
m = 1
d = 1
F1 = u1^2
G1 = 0

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = 2

[solver]
dt = 1e-3
t_end = 1
output_stride = 10
reaction = linearized
""",
    "eq5": """# cubic interior kinetics with an intermediate sums structure but no
# linear control of every weighted sum
[model]
name = eq5
m = 3
d = 1, 1, 1
F1 = u1 - u1*u2*u3
F2 = u1*u2*u3 - u2
F3 = u1*u2*u3 - u3
G1 = 0
G2 = 0
G3 = 0

[domain]
kind = interval
extents = 1
cells = 200

[initial]
w1 = 1
w2 = 1
w3 = 1

""" + _SOLVER_DEFAULT.format(t_end=1) + """
[diagnostics]
A = 1, 0, 0; 1, 1, 0; 1, 0, 1
""",
}

EXAMPLE_PRESETS = ("example1", "example2", "example3", "example4")


def preset(name: str) -> ModelFile:
    if name not in PRESETS:
        raise ModelFileError(f"unknown preset {name!r}; valid names: {', '.join(PRESETS)}")
    return loads(PRESETS[name])


def resolve(source: str) -> ModelFile:
    """A model file path, or a preset name when no such file exists."""
    if Path(source).exists() or source not in PRESETS:
        return load(source)
    return preset(source)
