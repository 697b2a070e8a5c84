"""Command line: ``rdmass presets|check|run|sweep|verify``.

Exit codes: 0 ok, 1 input error, 2 falsified, 3 unknown with --strict,
4 blow-up, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import conditions as cond
from .diagnostics import emit_report
from .lyapunov import build_feasible_h, functional_series
from .modelfile import PRESETS, ModelFile, ModelFileError, preset, resolve
from .parser import ParseError
from .poly import format_fraction
from .solver import BLOWUP, integrate

EXIT_OK, EXIT_INPUT, EXIT_FALSIFIED, EXIT_UNKNOWN, EXIT_BLOWUP, EXIT_VERIFY = range(6)

log = logging.getLogger("rdmass")


class InputError(Exception):
    pass


# -- shared helpers ------------------------------------------------------------------


def _load(source: str) -> ModelFile:
    try:
        return resolve(source)
    except (ModelFileError, ParseError) as exc:
        raise InputError(str(exc)) from exc


def _parse_cells(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--cells expects integers, got {text!r}") from None


def run_checks(mf: ModelFile) -> dict[str, cond.ConditionReport]:
    model = mf.model()
    diag = mf.diagnostics()
    mesh = mf.mesh() if model.initial else None
    return cond.check_model(model, mesh, b=diag["b"], K=diag["vl_K"], A=diag["A"], grid=diag["vl_grid"])


def profile_status(reports: dict[str, cond.ConditionReport], profile: str) -> tuple[str, list[str]]:
    """Worst verdict over the profile's conditions and the ids considered."""
    ids = [c for c in cond.PROFILES[profile] if c in reports]
    verdicts = [reports[c].verdict for c in ids]
    if cond.Verdict.FALSIFIED in verdicts:
        return "Falsified", ids
    if cond.Verdict.UNKNOWN in verdicts:
        return "Unknown", ids
    return "Certified", ids


def _fmt_constants(consts: dict) -> str:
    parts = []
    for k, v in consts.items():
        if isinstance(v, list):
            v = "(" + ", ".join(format_fraction(x) if not isinstance(x, list) else "..." for x in v) + ")"
        elif not isinstance(v, str):
            v = format_fraction(v) if not isinstance(v, float) else f"{v:.3g}"
        parts.append(f"{k}={v}")
    return " ".join(parts)


# -- subcommands ----------------------------------------------------------------------


def cmd_presets(args) -> int:
    if args.name is None:
        for name in PRESETS:
            print(name)
        return EXIT_OK
    try:
        preset(args.name)
    except ModelFileError as exc:
        raise InputError(str(exc)) from exc
    text = PRESETS[args.name]
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    mf = _load(args.model)
    model = mf.model()
    if args.profile == "thm2.3" and model.m != 2:
        raise InputError("profile thm2.3 applies to two-component systems only")
    reports = run_checks(mf)
    status, ids = profile_status(reports, args.profile)
    print(f"model {model.name or args.model}  profile {args.profile}")
    for cid, rep in reports.items():
        mark = "*" if cid in ids else " "
        print(f"{mark} {cid:<17} {str(rep.verdict):<10} {_fmt_constants(rep.constants)}")
    note = cond.PROFILE_NOTES.get(args.profile)
    if note:
        print(f"note: {note}")
    print(f"profile verdict: {status}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        doc = {"model": model.name, "model_hash": model.digest(), "profile": args.profile,
               "profile_conditions": ids, "profile_verdict": status,
               "reports": {cid: r.to_json() for cid, r in reports.items()}}
        (out / "conditions.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if status == "Falsified":
        return EXIT_FALSIFIED
    if status == "Unknown" and args.strict:
        return EXIT_UNKNOWN
    return EXIT_OK


def simulate(mf: ModelFile, out_dir, t_end=None, dt=None, cells=None, record="full", lyapunov=False,
             with_checks=True) -> dict:
    """Integrate one model and write its run directory; returns the summary."""
    model = mf.model()
    if not model.initial:
        raise InputError("model has no [initial] section")
    try:
        mesh = mf.mesh(cells)
        config = mf.solver_config(t_end=t_end, dt=dt, record=record)
    except ModelFileError as exc:
        raise InputError(str(exc)) from exc
    diag = mf.diagnostics()
    verdicts = {}
    if with_checks:
        reports = run_checks(mf)
        verdicts = {k: str(r.verdict) for k, r in reports.items()}
        if reports["V_N"].verdict is not cond.Verdict.CERTIFIED:
            log.warning("initial data violates the compatibility condition (%s); continuing",
                        reports["V_N"].notes or "see conditions")
    traj = integrate(model, mesh, config)
    lyap = None
    if lyapunov:
        h = build_feasible_h(model.m, diag["lyapunov_p"], model.d, diag["lyapunov_theta"])
        if h.feasibility is not None and not h.feasibility.feasible:
            log.warning("theta %s is not feasible", [str(t) for t in h.theta])
        lyap = functional_series(traj, mesh, h)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "model.ini").write_text(mf.dumps())
    return emit_report(out, model, config, traj, mesh, b=diag["b"], verdicts=verdicts, lyap=lyap)


def cmd_run(args) -> int:
    mf = _load(args.model)
    if args.lyapunov and args.record == "light":
        raise InputError("--lyapunov needs --full records")
    summary = simulate(mf, args.out, args.t_end, args.dt, _parse_cells(args.cells), args.record, args.lyapunov)
    if summary["outcome"] == BLOWUP:
        print(f"BlowUp at t={summary['blowup_time']:.6g} (max u {summary['max_sup_norm']:.3g}); outputs in {args.out}")
        return EXIT_BLOWUP
    print(f"Completed t={summary['final_time']:.6g} steps={summary['steps']} "
          f"max sup norm={summary['max_sup_norm']:.6g}; outputs in {args.out}")
    return EXIT_OK


def _parse_grid(items: list[str]) -> list[tuple[str, list[str]]]:
    grid = []
    for item in items or []:
        name, sep, values = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--grid expects name=v1,v2,..., got {item!r}")
        grid.append((name.strip(), [v.strip() for v in values.split(",") if v.strip()]))
    return grid


def _sweep_one(job):
    text, params, out_dir, t_end, dt, cells = job
    from .modelfile import loads

    mf = loads(text).with_constants(params)
    summary = simulate(mf, out_dir, t_end, dt, cells, record="light", with_checks=False)
    return summary


def cmd_sweep(args) -> int:
    mf = _load(args.model)
    grid = _parse_grid(args.grid)
    try:
        for name, values in grid:
            mf.with_constants({name: values[0] if values else "0"}).model()
    except (ModelFileError, ParseError) as exc:
        raise InputError(str(exc)) from exc
    names = [g[0] for g in grid]
    combos = list(itertools.product(*(g[1] for g in grid))) if grid else []
    if any(not g[1] for g in grid):
        combos = []
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cells = _parse_cells(args.cells)
    jobs = [(mf.dumps(), dict(zip(names, combo)), out / f"run{k:03d}", args.t_end, args.dt, cells)
            for k, combo in enumerate(combos)]
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                summaries = list(pool.map(_sweep_one, jobs))
        else:
            summaries = [_sweep_one(j) for j in jobs]
    except (ModelFileError, ParseError) as exc:
        raise InputError(str(exc)) from exc
    header = names + ["outcome", "blowup_time", "max_sup_norm", "final_mass"]
    rows = []
    for combo, s in zip(combos, summaries):
        rows.append(list(combo) + [s["outcome"], "" if s["blowup_time"] is None else repr(s["blowup_time"]),
                                   repr(s["max_sup_norm"]), repr(s["final_mass"])])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(",".join(header))
    for row in rows:
        print(",".join(str(v) for v in row))
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import acceptance

    names = args.only or list(acceptance.CRITERIA)
    unknown = [n for n in names if n not in acceptance.CRITERIA]
    if unknown:
        raise InputError(f"unknown criterion {', '.join(unknown)}; choose from {', '.join(acceptance.CRITERIA)}")
    ok = True
    for name in names:
        res = acceptance.run_criterion(name)
        ok &= res.passed
        print(res.line(), flush=True)
    return EXIT_OK if ok else EXIT_VERIFY


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdmass", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver events")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("presets", help="list or print the built-in model files")
    p.add_argument("name", nargs="?")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("check", help="certify or falsify the structural conditions")
    p.add_argument("model", help="model file or preset name")
    p.add_argument("--profile", choices=sorted(cond.PROFILES), default="thm2.5")
    p.add_argument("--strict", action="store_true", help="exit 3 if a profile condition is Unknown")
    p.add_argument("--out", help="directory for conditions.json")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="integrate a model and write diagnostics")
    p.add_argument("model", help="model file or preset name")
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--cells", help="cell count, or nx,ny for rectangles")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", dest="record", action="store_const", const="full", help="per-cell records (default)")
    mode.add_argument("--light", dest="record", action="store_const", const="light", help="norm summaries only")
    p.set_defaults(record="full")
    p.add_argument("--lyapunov", action="store_true", help="append L(t) to the diagnostics")
    p.add_argument("--out", default="rdmass-out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a Cartesian grid over model constants")
    p.add_argument("model", help="model file or preset name")
    p.add_argument("--grid", action="append", metavar="NAME=V1,V2", help="repeatable")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--cells")
    p.add_argument("--out", default="rdmass-sweep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", action="append", metavar="CRITERION")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelFileError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
