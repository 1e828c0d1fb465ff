"""Command-line front end.

Exit status: 0 when everything passes, 1 when a reported property fails,
2 for usage, missing-file, parse or compile errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from ._textfmt import ParseError
from .actuation import load_action_table, serialize_action_table, synthesize
from .analysis import behavior_properties, table_regression
from .circuits import load_circuit, serialize_circuit, validate_circuit
from .perception import load_templates
from .pipeline import CompileError, compile_spec, default_config, load_spec, trace_report
from .sim import SCENARIO_NAMES, TrajectoryLog, get_scenario, load_scenario, run
from .svg import log_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

EPILOG = """\
subcommands and their flags:
  compile SPEC [--out DIR]
  simulate SCENARIO [--spec SPEC] [--out DIR] [--plot] [--dt F] [--delta F] [--duration N]
  regress CIRCUIT [--templates FILE] [--lines]
  synth TABLE [--ascii]
  analyze LOG SCENARIO [--lines]

SCENARIO is a library name (suspicious, following, wandering) or a .scenario path.
exit status: 0 pass, 1 property failure, 2 usage, missing file, parse or compile error.
"""


class UsageError(Exception):
    pass


def write_atomic(files: dict[Path, str]) -> None:
    """Write every file to a temporary sibling first, then rename them all into place."""
    mask = os.umask(0)
    os.umask(mask)
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.chmod(tmp, 0o666 & ~mask)
    except BaseException:
        for tmp, _ in staged:
            Path(tmp).unlink(missing_ok=True)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    return p


def cmd_compile(args) -> int:
    spec = load_spec(_existing(args.spec))
    for w in spec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    config = compile_spec(spec)
    out = Path(args.out)
    files = {
        out / f"{config.name}.circuit": serialize_circuit(config.circuit),
        out / f"{config.name}.actions": serialize_action_table(config.law),
        out / f"{config.name}.trace": trace_report(config),
    }
    write_atomic(files)
    for path in files:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenario = get_scenario(args.scenario)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    config = compile_spec(load_spec(_existing(args.spec))) if args.spec else default_config()
    if args.dt is not None:
        scenario = replace(scenario, dt=args.dt)
    if args.duration is not None:
        scenario = replace(scenario, duration=args.duration)
    if args.delta is not None:
        scenario = replace(scenario, constants=replace(scenario.constants or config.constants, delta=args.delta))
    log = run(scenario, config)
    out = Path(args.out)
    files = {out / f"{scenario.name}.csv": log.to_csv()}
    if args.plot:
        files[out / f"{scenario.name}.svg"] = log_svg(log, title=scenario.name)
    write_atomic(files)
    for path in files:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_regress(args) -> int:
    circuit = load_circuit(_existing(args.circuit))
    problems = validate_circuit(circuit)
    if problems:
        for p in problems:
            print(f"{args.circuit}: {p}", file=sys.stderr)
        return EXIT_USAGE
    templates = load_templates(_existing(args.templates)) if args.templates else None
    report = table_regression(circuit, templates)
    print(report.lines() if args.lines else report.render(), end="")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_synth(args) -> int:
    table = load_action_table(_existing(args.table))
    try:
        sop = synthesize(table)
    except ValueError as exc:
        raise CompileError(str(exc)) from None
    for d in sop.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    print(sop.render(ascii_only=args.ascii))
    return EXIT_OK


def cmd_analyze(args) -> int:
    text = _existing(args.log).read_text(encoding="utf-8")
    try:
        log = TrajectoryLog.from_csv(text)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1, args.log) from None
    scenario = load_scenario(_existing(args.scenario))
    report = behavior_properties(log, scenario)
    print(report.lines() if args.lines else report.render(), end="")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="braitenberg", description="Spiking-circuit vehicle toolkit.",
                                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="{compile,simulate,regress,synth,analyze}")
    sub.required = True

    p = sub.add_parser("compile", help="compile a behavior file into circuit, action and trace files")
    p.add_argument("spec", help="behavior file (.behavior)")
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: .)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run a scenario and write its CSV log (and SVG plot)")
    p.add_argument("scenario", help=f"library name ({', '.join(SCENARIO_NAMES)}) or .scenario path")
    p.add_argument("--spec", metavar="SPEC", help="behavior file to compile instead of the shipped vehicle")
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: .)")
    p.add_argument("--plot", action="store_true", help="also write an SVG trajectory plot")
    p.add_argument("--dt", type=float, metavar="F", help="integration step override")
    p.add_argument("--delta", type=float, metavar="F", help="wheel-speed increment override")
    p.add_argument("--duration", type=int, metavar="N", help="number of ticks override")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("regress", help="check a circuit against the golden activation table")
    p.add_argument("circuit", help="circuit file (.circuit)")
    p.add_argument("--templates", metavar="FILE", help="stimulus templates (default: shipped set)")
    p.add_argument("--lines", action="store_true", help="machine-readable report lines")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("synth", help="minimize an action table into sum-of-products form")
    p.add_argument("table", help="action table (.actions)")
    p.add_argument("--ascii", action="store_true", help="write complements as X' instead of an overbar")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="evaluate behavioral properties of a logged run")
    p.add_argument("log", help="trajectory CSV written by simulate")
    p.add_argument("scenario", help="scenario file the log was produced from")
    p.add_argument("--lines", action="store_true", help="machine-readable report lines")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (FileNotFoundError, UsageError, ValueError) as exc:
        # ParseError and CompileError are ValueErrors and carry file:line locations
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
