"""Command-line interface: ``prokrast <subcommand> ...``.

Every subcommand writes a table (CSV by default, JSON with ``--format
json``) to standard output or ``--output``. Exit codes: 0 on success, 1 when
a checked bound is violated, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import bounds, scenarios, worstcase
from .agent import exact_ratio, simulate
from .distributions import BiasDistribution, from_dict, z_value
from .errors import PropertyViolation, ValidationError
from .graph import TaskGraph, build_graph, distances, is_bounded_distance, is_monotone_distance, save_graph
from .pricing import LinearObjective, optimal_posted_price

Row = dict[str, Any]


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def _json_safe(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def render(rows: list[Row], fmt: str) -> str:
    if fmt == "json":
        data = [{k: _json_safe(v) for k, v in r.items()} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for r in rows:
        writer.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def _load_json(arg: str) -> Any:
    """Inline JSON if the argument starts with ``{``, otherwise a file path."""
    try:
        if arg.lstrip().startswith("{"):
            return json.loads(arg)
        with open(arg, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {arg!r}: {exc}") from exc


def _dist(arg: str | None) -> BiasDistribution:
    return scenarios.EXAMPLE_DIST if arg is None else from_dict(_load_json(arg))


def _graph(arg: str) -> TaskGraph:
    return build_graph(_load_json(arg))


def cmd_ratio(a: argparse.Namespace) -> list[Row]:
    rep = exact_ratio(_graph(a.graph), _dist(a.dist))
    return [{"method": rep.method, "ratio": rep.ratio, "expected_cost": rep.expected_cost, "d_start": rep.d_start}]


def cmd_simulate(a: argparse.Namespace) -> list[Row]:
    g = _graph(a.graph)
    sim = simulate(g, _dist(a.dist), seed=a.seed, trials=a.trials, workers=a.workers)
    if a.trace:
        with open(a.trace, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "step", "node", "bias", "step_cost"])
            for k, traj in enumerate(sim.trajectories()):
                for i, (v, b, c) in enumerate(zip(traj.path, traj.biases, traj.step_costs), 1):
                    w.writerow([k, i, v, _fmt(b), _fmt(c)])
    r = sim.report
    return [{
        "method": r.method, "ratio": r.ratio, "std_error": r.std_error, "trials": r.trials,
        "seed": a.seed, "expected_cost": r.expected_cost, "d_start": r.d_start,
    }]


def cmd_zvalue(a: argparse.Namespace) -> list[Row]:
    zv = z_value(_dist(a.dist))
    return [{"z": zv.z, "argmax": zv.argmax, "exact": zv.exact}]


def cmd_worstcase(a: argparse.Namespace) -> list[Row]:
    spec, g = worstcase.synthesize(_dist(a.dist), a.n)
    if a.emit_graph:
        save_graph(g, a.emit_graph)
    return spec.rows()


def _check_thm3(a: argparse.Namespace, dist: BiasDistribution) -> Row:
    spec, _ = worstcase.synthesize(dist, a.n)
    bound = worstcase.theorem3_bound(z_value(dist).z, a.n)
    return {"check": "thm3", "n": a.n, "ratio": spec.ratio, "bound": bound,
            "passed": spec.ratio <= bound * (1 + 1e-9)}


def _check_thm4(a: argparse.Namespace, dist: BiasDistribution) -> Row:
    b0 = a.b0 if a.b0 is not None else z_value(dist).argmax
    rep = worstcase.theorem4_graph(dist, b0, a.n)
    return {"check": "thm4", "n": a.n, "b0": rep.b0, "z0": rep.z0, "paper_value": rep.paper_value,
            "closed_form": rep.closed_form, "derived_value": rep.derived_value, "gap": rep.gap,
            "flagged": rep.flagged}


def _check_claim1(a: argparse.Namespace, dist: BiasDistribution) -> Row:
    g = _graph(a.graph) if a.graph else scenarios.marathon_graph(a.n, scenarios.default_levels(a.n))
    rep = bounds.check_claim1(g, dist, trials=a.trials, seed=a.seed, workers=a.workers)
    return {"check": "claim1", "n": rep.n, "trials": rep.trials, "max_ratio": rep.max_ratio,
            "mean_ratio": rep.mean_ratio, "bound": float(rep.n), "passed": rep.passed}


def _check_thm5(a: argparse.Namespace, dist: BiasDistribution) -> Row:
    p = bounds.theorem5_params(dist)
    g = bounds.theorem5_graph(p, a.n)
    rep = simulate(g, dist, seed=a.seed, trials=a.trials, workers=a.workers).report
    return {"check": "thm5", "n": a.n, "b_star": p.b_star, "alpha": p.alpha, "beta": p.beta,
            "delta": p.delta, "H": p.H(), "gamma": p.gamma, "ratio": rep.ratio,
            "std_error": rep.std_error, "passed": True}


def _check_thm6(a: argparse.Namespace, dist: BiasDistribution) -> Row:
    g = _graph(a.graph) if a.graph else scenarios.ski_graph(a.n, 0.5)
    rep = bounds.check_theorem6(g, dist)
    return {"check": "thm6", "n": g.n, "ratio": rep.ratio, "bound": rep.bound,
            "beta_m": rep.condition.beta_m, "delta_m": rep.condition.delta_m, "passed": rep.passed}


CHECKS = {"claim1": _check_claim1, "thm3": _check_thm3, "thm4": _check_thm4,
          "thm5": _check_thm5, "thm6": _check_thm6}


def cmd_bounds(a: argparse.Namespace) -> list[Row]:
    return [CHECKS[a.check](a, _dist(a.dist))]


def cmd_examples(a: argparse.Namespace) -> list[Row]:
    dist = _dist(a.dist)
    params = {k: v for k, v in (("m", a.m), ("epsilon", a.epsilon), ("delta", a.delta)) if v is not None}
    rows = []
    for n in a.n:
        g = scenarios.ExampleSpec(a.scenario, n, params).build()
        rep = exact_ratio(g, dist)
        rows.append({
            "scenario": a.scenario, "n": n, "d_start": distances(g)[g.start], "ratio": rep.ratio,
            "expected_cost": rep.expected_cost, "bounded_distance": is_bounded_distance(g),
            "monotone_distance": is_monotone_distance(g),
        })
    if a.emit_graph:
        save_graph(g, a.emit_graph)
    return rows


def cmd_pricing(a: argparse.Namespace) -> list[Row]:
    res = optimal_posted_price(_dist(a.dist), LinearObjective(a.alpha, a.beta), cap=a.cap)
    return [{"capped": res.capped, "x": res.x, "price": res.price, "threshold": res.threshold, "value": res.value}]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prokrast", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", help="write the table here instead of standard output")
        return sp

    dist_help = "distribution JSON file or inline JSON (default: b=1 w.p. 1/3, b=3 w.p. 2/3)"

    sp = add("ratio", cmd_ratio, "exact procrastination ratio")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--dist", help=dist_help)

    sp = add("simulate", cmd_simulate, "Monte Carlo procrastination ratio")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--dist", help=dist_help)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, help="worker processes (default: PROKRAST_THREADS or 1)")
    sp.add_argument("--trace", metavar="PATH", help="write every trajectory step as CSV")

    sp = add("zvalue", cmd_zvalue, "z(F) = sup_{b>1} b Pr[B >= b]")
    sp.add_argument("--dist", help=dist_help)

    sp = add("worstcase", cmd_worstcase, "synthesize the worst-case graph")
    sp.add_argument("--dist", help=dist_help)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--emit-graph", metavar="PATH")

    sp = add("bounds", cmd_bounds, "check one of the bound regimes")
    sp.add_argument("--dist", help=dist_help)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--check", choices=sorted(CHECKS), required=True)
    sp.add_argument("--graph", help="graph for claim1/thm6 (defaults: marathon / ski with delta 0.5)")
    sp.add_argument("--b0", type=float, help="threshold for thm4 (default: argmax of b Pr[B >= b])")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int)

    sp = add("examples", cmd_examples, "worked scenarios with exact cost tables")
    sp.add_argument("--scenario", choices=("homework", "marathon", "ski"), required=True)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--dist", help=dist_help)
    sp.add_argument("--m", type=int, help="marathon fitness levels (default ceil(log2 n))")
    sp.add_argument("--epsilon", type=float, help="marathon cost of staying at level 0")
    sp.add_argument("--delta", type=float, help="ski daily rent (default 0.5)")
    sp.add_argument("--emit-graph", metavar="PATH", help="write the graph for the last n")

    sp = add("pricing", cmd_pricing, "optimal posted price for alpha E[x] + beta E[p]")
    sp.add_argument("--dist", help=dist_help)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--cap", action="store_true", help="restrict to menus {(0,0), (x, 1)}")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        print("prokrast: error: seed must be a 64-bit unsigned integer", file=sys.stderr)
        return 2
    try:
        text = render(args.fn(args), args.format)
    except ValidationError as exc:
        print(f"prokrast: error: {exc}", file=sys.stderr)
        return 2
    except PropertyViolation as exc:
        print(f"prokrast: property violated: {exc}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
