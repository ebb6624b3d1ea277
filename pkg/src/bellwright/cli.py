"""Command-line front end.

Exit codes: 0 affirmative/satisfied/feasible, 2 violated/infeasible/not
proven, 3 indeterminate or inconclusive, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .derivation import bell_check, run_derivation
from .feasibility import FEASIBLE, INFEASIBLE, encode, solve
from .models import (
    BUILTIN_MODELS,
    PAIRS,
    HiddenVariableModel,
    TargetStatistics,
    pair_label,
    parse_pair,
    predicted_conditionals,
)
from .quantum import DirectionConfig, joint_prob, quantum_targets
from .simulate import DEFAULT_SEED, RunConfig, empirical_bell, empirical_no_cons, run

SCENARIO_FIELDS = {
    "version", "angles", "model", "trials", "seed", "substreams", "pairs",
    "denominator", "theta", "confidence", "format", "out", "blind",
}

QUANTUM_NOT_SIMULABLE = (
    "the quantum source cannot be simulated: only hidden-variable models are "
    "simulable, and no model satisfying the locality, common-cause and "
    "no-conspiracy assumptions reproduces the violating quantum statistics"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """Locale-independent fixed decimal, trailing zeros trimmed."""
    x = float(x)
    if x == 0:
        return "0.0"
    s = f"{x:.6f}".rstrip("0")
    return s + "0" if s.endswith(".") else s


def fmt_exact(x) -> str:
    if isinstance(x, Fraction):
        return f"{fmt(x)} ({x.numerator}/{x.denominator})"
    return fmt(x)


# ---------------------------------------------------------------------------
# Scenario resolution
# ---------------------------------------------------------------------------


@dataclass
class Source:
    kind: str  # "quantum" | "model"
    cfg: DirectionConfig | None = None
    model: HiddenVariableModel | None = None

    def targets(self, denominator: int = 10**6) -> TargetStatistics:
        if self.kind == "quantum":
            return quantum_targets(self.cfg, denominator=denominator)
        return predicted_conditionals(self.model)


def load_model(ref) -> HiddenVariableModel:
    if isinstance(ref, dict):
        return HiddenVariableModel.from_json(ref)
    ref = str(ref).strip()
    if ref in BUILTIN_MODELS:
        return BUILTIN_MODELS[ref]()
    if ref.startswith("{"):
        return HiddenVariableModel.loads(ref)
    path = Path(ref)
    if not path.exists():
        raise UsageError(f"model {ref!r} is neither a file, inline JSON, nor a builtin ({', '.join(BUILTIN_MODELS)})")
    return HiddenVariableModel.loads(path.read_text())


def load_scenario(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("scenario must be a JSON object")
    unknown = set(doc) - SCENARIO_FIELDS
    if unknown:
        raise UsageError(f"unknown scenario fields: {', '.join(sorted(unknown))}")
    if doc.get("version") != 1:
        raise UsageError("scenario needs \"version\": 1")
    return doc


def merge(args) -> dict:
    """Scenario file values, overridden by explicit command-line flags."""
    opts = load_scenario(args.scenario) if args.scenario else {}
    for key in ("angles", "model", "trials", "seed", "substreams", "pairs", "denominator",
                "confidence", "format", "out"):
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    if getattr(args, "blind", False):
        opts["blind"] = True
    theta = dict(opts.get("theta", {}))
    for key in ("min", "max", "step"):
        v = getattr(args, f"theta_{key}", None)
        if v is not None:
            theta[key] = v
    opts["theta"] = theta
    return opts


def parse_angles(value) -> DirectionConfig:
    try:
        if isinstance(value, str):
            return DirectionConfig.parse(value)
        return DirectionConfig(tuple(value))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad angles {value!r}: {exc}") from exc


def resolve_source(opts: dict) -> Source:
    model, angles = opts.get("model"), opts.get("angles")
    if model is not None and model != "quantum":
        if angles is not None:
            raise UsageError("give either --angles (quantum targets) or --model, not both")
        return Source("model", model=load_model(model))
    if angles is None:
        raise UsageError("a statistics source is required: --angles a,b,c or --model")
    return Source("quantum", cfg=parse_angles(angles))


def parse_pairs(value) -> list[tuple[int, int]] | None:
    if value is None:
        return None
    items = value.split(",") if isinstance(value, str) else list(value)
    try:
        return [parse_pair(str(p)) for p in items if str(p).strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_predict(opts: dict) -> int:
    if opts.get("angles") is None:
        raise UsageError("predict needs --angles")
    cfg = parse_angles(opts["angles"])
    exact = cfg.is_exact()
    outcomes = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))
    names = ("pp", "pm", "mp", "mm")
    rows = []
    for i, j in PAIRS:
        cells = [joint_prob(cfg, i, j, a, b) for a, b in outcomes]
        row = {"pair": pair_label((i, j)), "phi_deg": fmt(cfg.phi_deg(i, j)),
               **{n: fmt(c) for n, c in zip(names, cells)},
               "left_plus": fmt(cells[0] + cells[1]), "right_plus": fmt(cells[0] + cells[2])}
        if exact:
            row.update({f"{n}_exact": str(joint_prob(cfg, i, j, a, b, exact=True)) for n, (a, b) in zip(names, outcomes)})
        rows.append(row)
    if opts.get("format") == "json":
        emit(json.dumps({"angles": [str(a) for a in cfg.angles], "rows": rows}, indent=1) + "\n", opts.get("out"))
        return 0
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    emit(buf.getvalue(), opts.get("out"))
    return 0


def bell_values(source: Source):
    if source.kind == "quantum":
        exact = source.cfg.is_exact()
        return tuple(joint_prob(source.cfg, i, j, "+", "+", exact=exact) for i, j in ((1, 3), (1, 2), (2, 3)))
    t = predicted_conditionals(source.model)
    return t.p(1, 3), t.p(1, 2), t.p(2, 3)


def cmd_bell(opts: dict) -> int:
    p13, p12, p23 = bell_values(resolve_source(opts))
    satisfied, slack = bell_check(p13, p12, p23)
    print(f"p13={fmt_exact(p13)}")
    print(f"p12={fmt_exact(p12)}")
    print(f"p23={fmt_exact(p23)}")
    tail = f" ({slack.numerator}/{slack.denominator})" if isinstance(slack, Fraction) else ""
    print(f"{'SATISFIED' if satisfied else 'VIOLATED'} slack={fmt(slack)}{tail}")
    return 0 if satisfied else 2


def theta_grid(lo: float, hi: float, step: float) -> list[float]:
    if not (0 < lo <= hi < 180) or step <= 0:
        raise UsageError("theta grid must satisfy 0 < min <= max < 180 and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 10) for k in range(n + 1)]


def scan_rows(thetas) -> list[tuple[float, float, float, float, float]]:
    """(theta, p13, p12, p23, slack) for directions (0, theta, 2 theta)."""
    rows = []
    for th in thetas:
        cfg = DirectionConfig.equally_spaced(th)
        p13, p12, p23 = (joint_prob(cfg, i, j, "+", "+") for i, j in ((1, 3), (1, 2), (2, 3)))
        rows.append((th, p13, p12, p23, p12 + p23 - p13))
    return rows


def cmd_scan(opts: dict) -> int:
    theta = opts.get("theta", {})
    grid = theta_grid(float(theta.get("min", 1)), float(theta.get("max", 179)), float(theta.get("step", 1)))
    rows = scan_rows(grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "p13", "p12", "p23", "slack"])
    for r in rows:
        w.writerow([fmt(r[0])] + [f"{x:.9f}" for x in r[1:]])
    emit(buf.getvalue(), opts.get("out"))
    best = min(rows, key=lambda r: r[4])
    print(f"min slack={fmt(best[4])} at theta={fmt(best[0])}", file=sys.stderr)
    return 0


def cmd_feasibility(opts: dict) -> int:
    source = resolve_source(opts)
    targets = source.targets(int(opts.get("denominator", 10**6)))
    problem = encode(targets, parse_pairs(opts.get("pairs")))
    result = solve(problem)
    print(result.describe())
    if result.certificate_name:
        print(f"certificate: {result.certificate_name}")
    if result.model is not None:
        print("witness: " + " ".join(f"{a.label}={w}" for a, w in result.model.cause_dist.items()))
    doc = result.dumps() + "\n"
    if opts.get("out"):
        Path(opts["out"]).write_text(doc)
    else:
        sys.stdout.write(doc)
    if result.verdict == FEASIBLE:
        return 0
    return 2 if result.verdict == INFEASIBLE else 3


def cmd_simulate(opts: dict) -> int:
    if opts.get("model") in (None, "quantum"):
        raise UsageError(QUANTUM_NOT_SIMULABLE if opts.get("model") == "quantum" or opts.get("angles") else
                         "simulate needs --model")
    source = resolve_source(opts)
    cfg = RunConfig(int(opts.get("trials", 10**6)), int(opts.get("seed", DEFAULT_SEED)),
                    int(opts.get("substreams", 1)), bool(opts.get("blind", False)))
    conf = float(opts.get("confidence", 0.99))
    table = run(source.model, cfg)
    if opts.get("format", "csv") == "json":
        emit(json.dumps(table.to_json(conf), indent=1) + "\n", opts.get("out"))
    else:
        emit(table.to_csv(conf), opts.get("out"))
    bell = empirical_bell(table, conf)
    err = sys.stderr
    print(f"bell {bell.verdict.upper()} slack={fmt(bell.slack)} interval=[{fmt(bell.low)}, {fmt(bell.high)}]", file=err)
    if table.causes is None:
        print("no-cons: blind run, cause assignments not recorded", file=err)
    else:
        nc = empirical_no_cons(table, conf)
        if nc.flagged:
            for c in nc.flagged:
                print(f"no-cons FLAGGED {c.event} | pair {pair_label(c.pair)} "
                      f"delta={fmt(c.delta)} (half-width {fmt(c.half_width)})", file=err)
        elif nc.all_inconclusive:
            print("no-cons: inconclusive (too few trials)", file=err)
        else:
            print("no-cons: no flags", file=err)
    return {"satisfied": 0, "violated": 2}.get(bell.verdict, 3)


def cmd_derive(opts: dict) -> int:
    if opts.get("model") in (None, "quantum"):
        raise UsageError("derive needs a hidden-variable --model")
    source = resolve_source(opts)
    report = run_derivation(source.model)
    if opts.get("format") == "json":
        emit(report.dumps() + "\n", opts.get("out"))
    else:
        lines = [f"{s.key:<8} {s.status:<8} {s.title}" for s in report.steps]
        if report.p13 is not None:
            lines.append(f"p13={fmt_exact(report.p13)} p12={fmt_exact(report.p12)} p23={fmt_exact(report.p23)}")
        emit("\n".join(lines) + "\n", opts.get("out"))
    return 0 if report.all_proven else 2


COMMANDS = {
    "predict": cmd_predict,
    "bell": cmd_bell,
    "scan": cmd_scan,
    "feasibility": cmd_feasibility,
    "simulate": cmd_simulate,
    "derive": cmd_derive,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellwright", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", help="versioned scenario JSON file")
        p.add_argument("--angles", help="three directions in degrees, e.g. 0,60,120")
        p.add_argument("--model", help="model file, inline JSON, builtin name, or 'quantum'")
        p.add_argument("--out", help="write the table/document here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"))
        if name == "scan":
            p.add_argument("--theta-min", type=float)
            p.add_argument("--theta-max", type=float)
            p.add_argument("--theta-step", type=float)
        if name == "feasibility":
            p.add_argument("--pairs", help="setting pairs, e.g. 12,23,13")
            p.add_argument("--denominator", type=int, help="rounding denominator for irrational targets")
        if name == "simulate":
            p.add_argument("--trials", type=int)
            p.add_argument("--seed", type=int)
            p.add_argument("--substreams", type=int)
            p.add_argument("--confidence", type=float)
            p.add_argument("--blind", action="store_true", help="do not record cause assignments")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](merge(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
