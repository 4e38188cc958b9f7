"""Command-line front end.

Subcommands::

    mincenter run <config> [--seed N] [--threads N] [--out-dir DIR]
    mincenter corpus [--filter KIND] [--update-golden] [--out-dir DIR]
    mincenter describe <family>

Exit status: 0 pass, 1 acceptance or corpus failure, 2 config error,
3 budget or runtime error, 4 orbit left the state space.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time
from pathlib import Path

from . import corpus
from .config import load_config_file
from .errors import (
    BudgetExceededError,
    ConfigError,
    DegenerateEstimateError,
    InvalidArgumentError,
    MinCenterError,
    NotLagrangeStableError,
    OrbitExhaustedError,
)
from .io import dumps
from .runner import run
from .systems import FAMILIES, make_system

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME, EXIT_UNSTABLE = 0, 1, 2, 3, 4


def exit_code(exc: Exception) -> int:
    if isinstance(exc, NotLagrangeStableError):
        return EXIT_UNSTABLE
    if isinstance(exc, (ConfigError, InvalidArgumentError)):
        return EXIT_CONFIG
    return EXIT_RUNTIME


def _error(exc: Exception) -> str:
    kind = {
        ConfigError: "config error",
        BudgetExceededError: "budget exceeded",
        NotLagrangeStableError: "not Lagrange stable",
        OrbitExhaustedError: "orbit exhausted",
        DegenerateEstimateError: "degenerate estimate",
    }.get(type(exc), "error")
    return f"mincenter: {kind}: {exc}"


def _write_outputs(out_dir, name, report, artifacts):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.json").write_text(dumps(report))
    for suffix, text in sorted(artifacts.items()):
        (out / f"{name}.{suffix}").write_text(text)


def cmd_run(args) -> int:
    try:
        cfg = load_config_file(args.config, args.seed)
        report, artifacts = run(cfg, args.threads)
    except MinCenterError as exc:
        print(_error(exc), file=sys.stderr)
        return exit_code(exc)
    if args.out_dir:
        _write_outputs(args.out_dir, cfg.name, report, artifacts)
    else:
        sys.stdout.write(dumps(report))
    for c in report["acceptance"]:
        if not c["pass"]:
            print(f"FAIL {c['path']} {c['predicate']} (actual {c['actual']!r})", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _golden_view(report):
    return {k: v for k, v in json.loads(dumps(report)).items() if k != "artifact_version"}


def run_corpus(kind=None, seed=None, threads=1, out_dir=None, update_golden=False, golden_dir=None, stream=None):
    """Run the built-in corpus; returns ``(rows, exit status)``.

    Each row is ``(criterion, name, kind, status, seconds, detail)`` with
    status ``PASS``, ``FAIL`` (acceptance), ``DIFF`` (golden mismatch) or
    ``ERROR``.
    """
    stream = stream or sys.stdout
    gdir = Path(golden_dir) if golden_dir else corpus.golden_dir()
    cases = corpus.select(kind)
    rows = []
    print(f"{'crit':>4}  {'case':<34} {'kind':<12} {'status':<6} {'seconds':>8}", file=stream)
    for case in cases:
        t0 = time.perf_counter()
        detail = []
        try:
            cfg = case.config(seed)
            report, artifacts = run(cfg, threads)
        except MinCenterError as exc:
            status, detail = "ERROR", [_error(exc)]
        else:
            status = "PASS" if report["passed"] else "FAIL"
            detail = [f"{c['path']} {c['predicate']} (actual {c['actual']!r})" for c in report["acceptance"] if not c["pass"]]
            if out_dir:
                _write_outputs(out_dir, case.name, report, artifacts)
            gfile = gdir / f"{case.name}.json"
            if update_golden:
                gdir.mkdir(parents=True, exist_ok=True)
                gfile.write_text(dumps(_golden_view(report)))
            elif gfile.exists():
                try:
                    expected = json.loads(gfile.read_text())
                except ValueError as exc:
                    diffs = [f"unreadable golden file: {exc}"]
                else:
                    diffs = corpus.compare(expected, _golden_view(report))
                if diffs:
                    detail += [f"golden {gfile.name}: {d}" for d in diffs]
                    if status == "PASS":
                        status = "DIFF"
            else:
                detail.append(f"no golden file {gfile.name}")
                if status == "PASS":
                    status = "DIFF"
        dt = time.perf_counter() - t0
        rows.append((case.criterion, case.name, case.config().kind, status, dt, detail))
        print(f"{case.criterion:>4}  {case.name:<34} {rows[-1][2]:<12} {status:<6} {dt:8.2f}", file=stream)
        for d in detail:
            print(f"{'':>6}{d}", file=stream)
    n_bad = sum(r[3] != "PASS" for r in rows)
    print(f"{len(rows) - n_bad}/{len(rows)} passed", file=stream)
    return rows, EXIT_OK if n_bad == 0 else EXIT_FAIL


def cmd_corpus(args) -> int:
    _, code = run_corpus(args.filter, args.seed, args.threads, args.out_dir, args.update_golden)
    return code


def describe(family: str) -> str:
    """A short text description of a built-in family."""
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    factory = FAMILIES[family]
    s = make_system(family)
    lines = [f"family: {family}", f"kind: {s.kind}", f"dimension: {s.dimension}", f"metric: {s.metric}"]
    doc = inspect.getdoc(factory)
    if doc:
        lines.append("about: " + doc.splitlines()[0])
    for name, p in inspect.signature(factory).parameters.items():
        lines.append(f"parameter {name} = {p.default!r}")
    if not s.is_symbolic:
        lines.append(f"time step delta = {s.delta!r}")
        lines.append("bounds: " + ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in s.bounds))
    else:
        lines.append("states: prefix(word) such as 110(01), a finite word, sturmian:<alpha>, shadowing, sparse-ones")
    return "\n".join(lines) + "\n"


def cmd_describe(args) -> int:
    try:
        sys.stdout.write(describe(args.family))
    except MinCenterError as exc:
        print(_error(exc), file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads for ensembles")
    common.add_argument("--out-dir", help="write reports and plot data here")
    p = argparse.ArgumentParser(prog="mincenter", description="Estimate minimal centers of attraction.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run one experiment config")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("corpus", parents=[common], help="run the built-in regression corpus")
    c.add_argument("--filter", metavar="KIND", help="only cases of this experiment kind")
    c.add_argument("--update-golden", action="store_true", help="rewrite the golden reports")
    c.set_defaults(func=cmd_corpus)
    d = sub.add_parser("describe", help="describe a built-in system family")
    d.add_argument("family")
    d.set_defaults(func=cmd_describe)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
