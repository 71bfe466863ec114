"""Command-line entry point binding graphs and scenarios to experiment reports.

Every subcommand runs with zero downloads: a bundled 50-node synthetic graph
is the default topology and a 347-node fixture ships for Facebook-scale
runs. Outputs land under --out as metrics CSV, SVG plots, an optional
trace log, and a deterministic summary.json; wall-clock timings print to
stdout only so repeated invocations stay byte-identical on disk.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from importlib import resources
from pathlib import Path

from .domain import Scenario, ScenarioError, load_scenario
from .experiments import (
    AGGREGATE,
    EXPERIMENTS,
    ExperimentSpec,
    MetricsRow,
    run_experiment_rows,
)
from .graph import GraphFormatError, compute_stats, load_edge_list, load_features, stats_csv
from .report import Series, write_metrics, write_plot, write_summary, write_trace_log

BUILTIN_GRAPHS = {
    "synthetic-50": "synthetic_50.edges",
    "facebook-like": "facebook_like.edges",
}
BUILTIN_FEATURES = {
    "synthetic-50": "synthetic_50.feat",
    "facebook-like": "facebook_like.feat",
}
DEFAULT_GRAPH = "synthetic-50"


def _read_data(filename: str) -> str:
    return resources.files("siotrust.data").joinpath(filename).read_text(encoding="utf-8")


def _load_graph(graph_arg: str, features_arg):
    if graph_arg in BUILTIN_GRAPHS:
        graph = load_edge_list(_read_data(BUILTIN_GRAPHS[graph_arg]))
    else:
        graph = load_edge_list(Path(graph_arg).read_text(encoding="utf-8"))
    if features_arg:
        if features_arg in BUILTIN_FEATURES:
            text = _read_data(BUILTIN_FEATURES[features_arg])
        else:
            text = Path(features_arg).read_text(encoding="utf-8")
        graph = load_features(text, graph)
    return graph


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ScenarioError(f"expected comma-separated numbers, got {text!r}") from None


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ScenarioError(f"expected comma-separated integers, got {text!r}") from None


def _scenario_from_args(args) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    overrides = {}
    if args.theta is not None:
        overrides["theta_grid"] = _csv_floats(args.theta)
    if args.beta is not None:
        overrides["beta"] = args.beta
    if args.omega1 is not None:
        overrides["omega1"] = args.omega1
    if args.omega2 is not None:
        overrides["omega2"] = args.omega2
    if args.method is not None:
        overrides["methods"] = (args.method,)
    if args.characteristics is not None:
        overrides["char_counts"] = _csv_ints(args.characteristics)
    if args.iterations is not None:
        n = args.iterations
        if n < 1:
            raise ScenarioError("--iterations must be >= 1")
        overrides.update(
            mutuality_rounds=n,
            profit_iterations=n,
            attack_tasks=n,
            env_epoch_length=n,
        )
    if getattr(args, "features", None):
        overrides["use_features"] = True
    if overrides:
        scenario = scenario.replace(**overrides)
    return scenario


def _aggregates(rows) -> dict:
    out: dict[str, dict[str, float]] = {}
    for row in rows:
        if row.run == AGGREGATE:
            out.setdefault(row.param, {})[row.metric] = row.value
    return out


def _series_from_agg(rows, param: str, metric: str, name: str) -> Series:
    points = []
    for row in rows:
        if row.param == param and row.run == AGGREGATE and row.metric.startswith(metric + "["):
            if row.metric.endswith("]"):
                idx = int(row.metric[len(metric) + 1:-1])
                points.append((idx, row.value))
    points.sort()
    return Series(name=name, xs=tuple(float(i) for i, _ in points), ys=tuple(v for _, v in points))


def _plots_for(which: str, rows: list[MetricsRow], scenario: Scenario) -> list[tuple]:
    """(filename stem, title, x label, y label, series list) per plot."""
    agg = _aggregates(rows)
    if which == "mutuality":
        thetas = scenario.theta_grid
        series = [
            Series(metric, tuple(float(t) for t in thetas),
                   tuple(agg[f"theta={t:g}"][metric] for t in thetas))
            for metric in ("success_rate", "unavailable_rate", "abuse_rate")
        ]
        return [("mutuality", "Delegation rates vs reverse threshold", "theta", "rate", series)]
    if which == "inference":
        reps = sorted(row.run for row in rows if isinstance(row.run, int))
        reps = sorted(set(reps))
        series = []
        for metric, name in (("with_inference", "with inference"),
                             ("without_inference", "without inference")):
            values = {row.run: row.value for row in rows
                      if isinstance(row.run, int) and row.metric == metric}
            series.append(Series(name, tuple(float(r) for r in reps),
                                 tuple(values[r] for r in reps)))
        return [("inference", "Honest-trustee selection per repetition", "repetition",
                 "honest fraction", series)]
    if which == "transitivity":
        counts = sorted({int(p.split(",")[0].split("=")[1]) for p in agg})
        plots = []
        for metric, ylabel, suffix in (
            ("success_rate", "success rate", ""),
            ("unavailable_rate", "unavailable rate", "_unavailable"),
            ("mean_interrogated", "interrogated nodes", "_overhead"),
        ):
            series = [
                Series(method, tuple(float(c) for c in counts),
                       tuple(agg[f"chars={c},method={method}"][metric] for c in counts))
                for method in scenario.methods
            ]
            plots.append((f"transitivity{suffix}", f"Transitivity methods: {ylabel}",
                          "characteristic count", ylabel, series))
        return plots
    if which == "profit":
        plots = []
        series = [
            _series_from_agg(rows, f"variant=random,strategy={s}", "net_profit", s)
            for s in ("success_only", "full_profit")
        ]
        plots.append(("profit", "Net profit per iteration", "iteration", "net profit", series))
        attack = [
            _series_from_agg(rows, f"variant=attack,strategy={s}", "cost", s)
            for s in ("success_only", "full_profit")
        ]
        plots.append(("profit_attack", "Realized cost under cost inflation", "task", "cost", attack))
        return plots
    if which == "environment":
        series = [
            _series_from_agg(rows, f"regime={regime}", "s_hat", regime)
            for regime in ("baseline", "uncorrected", "corrected")
        ]
        return [("environment", "Expected success rate through environment epochs",
                 "iteration", "expected success rate", series)]
    return []


def _headline(which: str, rows) -> str:
    agg = _aggregates(rows)
    try:
        if which == "mutuality":
            pieces = [f"abuse[{p.split('=')[1]}]={m['abuse_rate']:.3f}"
                      for p, m in sorted(agg.items())]
            return " ".join(pieces)
        if which == "inference":
            m = agg["selection"]
            return (f"wins={m['wins']:.0f}/{m['reps']:.0f} "
                    f"improvement={m['improvement_pp']:.1f}pp")
        if which == "transitivity":
            first = sorted(agg)[0].split(",")[0]
            trad = agg[f"{first},method=traditional"]["success_rate"]
            aggr = agg[f"{first},method=aggressive"]["success_rate"]
            return f"success {first}: traditional={trad:.3f} aggressive={aggr:.3f}"
        if which == "profit":
            keys = [k for k in agg if k.startswith("variant=random")]
            last = sorted(m for m in agg[keys[0]] if not m.endswith("_std"))[-1]
            vals = [f"{k.split('strategy=')[1]}={agg[k][last]:.3f}" for k in sorted(keys)]
            return f"final net profit: {' '.join(vals)}"
        if which == "environment":
            last = sorted(m for m in agg["regime=corrected"] if not m.endswith("_std"))[-1]
            return " ".join(f"{r}={agg[f'regime={r}'][last]:.3f}"
                            for r in ("baseline", "uncorrected", "corrected"))
    except (KeyError, IndexError):
        pass
    return ""


def _run_experiments(names, args) -> int:
    graph = _load_graph(args.graph, args.features)
    scenario = _scenario_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {
        "graph": args.graph,
        "seed": args.seed if args.seed is not None else scenario.master_seed,
        "scenario": scenario.to_dict(),
        "experiments": {},
    }
    for which in names:
        spec = ExperimentSpec(which=which, scenario=scenario, runs=args.runs, master_seed=args.seed)
        trace_sink = [] if (args.trace and which == "mutuality") else None
        started = time.perf_counter()
        rows = run_experiment_rows(spec, graph, jobs=args.jobs, trace_sink=trace_sink)
        elapsed = time.perf_counter() - started

        metrics_path = out_dir / f"metrics_{which}.csv"
        write_metrics(rows, metrics_path)
        plot_files = []
        for stem, title, xlabel, ylabel, series in _plots_for(which, rows, scenario):
            plot_path = out_dir / f"plot_{stem}.svg"
            write_plot(series, plot_path, title=title, x_label=xlabel, y_label=ylabel)
            plot_files.append(plot_path.name)
        if trace_sink is not None:
            write_trace_log(trace_sink, out_dir / f"trace_{which}.ndjson")
        summary["experiments"][which] = {
            "runs": spec.effective_runs,
            "metrics": metrics_path.name,
            "plots": plot_files,
            "aggregates": _aggregates(rows),
        }
        line = _headline(which, rows)
        print(f"{which}: runs={spec.effective_runs} {line} -> {metrics_path} ({elapsed:.1f}s)")
    write_summary(summary, out_dir / "summary.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siotrust",
        description="Trust-aware task delegation simulator for social IoT networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_experiment_flags=True):
        p.add_argument("--graph", default=DEFAULT_GRAPH,
                       help="edge-list path or builtin name (synthetic-50, facebook-like)")
        p.add_argument("--features", default=None,
                       help="feature file path or builtin name; enables feature-driven tasks")
        if with_experiment_flags:
            p.add_argument("--scenario", default=None, help="JSON scenario file")
            p.add_argument("--out", default="out", help="output directory (default: out)")
            p.add_argument("--seed", type=int, default=None, help="master seed (default 1)")
            p.add_argument("--runs", type=int, default=None, help="override run count")
            p.add_argument("--jobs", type=int, default=1, help="parallel run workers")
            p.add_argument("--iterations", type=int, default=None,
                           help="main loop length override (rounds / iterations / epoch length)")
            p.add_argument("--theta", default=None, help="comma list of reverse thresholds")
            p.add_argument("--beta", type=float, default=None, help="forgetting factor")
            p.add_argument("--omega1", type=float, default=None, help="recommendation gate")
            p.add_argument("--omega2", type=float, default=None, help="service gate")
            p.add_argument("--method", default=None,
                           choices=["traditional", "conservative", "aggressive"],
                           help="restrict transitivity to one method")
            p.add_argument("--characteristics", default=None,
                           help="comma list of characteristic counts")
            p.add_argument("--trace", action="store_true", help="write a delegation trace log")
            p.add_argument("-v", "--verbose", action="count", default=0)

    stats_p = sub.add_parser("stats", help="print connectivity statistics for a graph")
    add_common(stats_p, with_experiment_flags=False)

    for which in EXPERIMENTS:
        add_common(sub.add_parser(which, help=f"run the {which} experiment"))
    add_common(sub.add_parser("all", help="run all five experiments"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    verbosity = getattr(args, "verbose", 0)
    if verbosity:
        logging.basicConfig(level=logging.DEBUG if verbosity > 1 else logging.INFO)
    try:
        if args.command == "stats":
            graph = _load_graph(args.graph, args.features)
            sys.stdout.write(stats_csv(compute_stats(graph)))
            return 0
        names = list(EXPERIMENTS) if args.command == "all" else [args.command]
        return _run_experiments(names, args)
    except (GraphFormatError, ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
