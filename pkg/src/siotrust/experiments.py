"""Desk-scale, seeded reproductions of the five evaluation scenarios.

Each experiment is a pure function of (graph, scenario, runs, master_seed):
per-run seeds derive from the master seed and stable labels, so adding runs
never changes earlier runs' results and runs may execute in parallel. Every
experiment shares its per-run world state (roles, hidden ground truth,
pre-seeded records) across the parameter grid it compares, so that grid
points differ only in the parameter under study.
"""

from __future__ import annotations

import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from . import trust_engine as eng
from .delegation import (
    DelegationRequest,
    PathEvaluator,
    find_potential_trustees,
    run_delegation,
    sample_outcome,
)
from .domain import (
    RECOMMENDATION,
    SERVICE,
    AgentProfile,
    Environment,
    Scenario,
    Task,
    TrustRecord,
    TrustStore,
    UsageLog,
    initial_record,
    make_task,
)
from .graph import SocialGraph, sample_roles
from .seeds import derive_seed

EXPERIMENTS = ("mutuality", "inference", "transitivity", "profit", "environment")

DEFAULT_RUNS = {
    "mutuality": 100,
    "inference": 50,
    "transitivity": 20,
    "profit": 100,
    "environment": 100,
}

AGGREGATE = "aggregate"


@dataclass(frozen=True)
class MetricsRow:
    experiment: str
    param: str
    run: object  # run index (int) or "aggregate"
    metric: str
    value: float


@dataclass
class ExperimentSpec:
    """Which experiment to run and with what overrides."""

    which: str
    scenario: Scenario = field(default_factory=Scenario)
    runs: Optional[int] = None
    master_seed: Optional[int] = None

    def __post_init__(self):
        if self.which not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.which!r}, expected one of {EXPERIMENTS}")
        if self.runs is not None and self.runs < 1:
            raise ValueError("runs must be >= 1")

    @property
    def effective_runs(self) -> int:
        if self.runs is not None:
            return self.runs
        if self.scenario.runs is not None:
            return self.scenario.runs
        return DEFAULT_RUNS[self.which]

    @property
    def effective_seed(self) -> int:
        return self.master_seed if self.master_seed is not None else self.scenario.master_seed


def _map_units(worker: Callable, units: list, jobs: int) -> list:
    """Run unit jobs, optionally on a process pool; result order is unit order."""
    if jobs <= 1 or len(units) <= 1:
        return [worker(u) for u in units]
    chunk = max(1, len(units) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, units, chunksize=chunk))


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _aggregate_rows(
    experiment: str,
    param: str,
    per_run: Sequence[Mapping[str, float]],
) -> list[MetricsRow]:
    """Mean plus population-std rows over runs, one pair per metric."""
    rows = []
    metrics = sorted(per_run[0])
    for metric in metrics:
        values = [run[metric] for run in per_run]
        rows.append(MetricsRow(experiment, param, AGGREGATE, metric, statistics.fmean(values)))
        rows.append(MetricsRow(experiment, param, AGGREGATE, metric + "_std", statistics.pstdev(values)))
    return rows


# ---------------------------------------------------------------------------
# Mutual evaluation: success / unavailable / abuse rates across theta
# ---------------------------------------------------------------------------

def _mutuality_unit(args):
    graph, sc, theta, run_idx, master, want_traces = args
    rng_state = random.Random(derive_seed(master, "mutuality-state", run_idx))
    roles = sample_roles(graph, sc.role_fraction, rng_state, sc.disjoint_roles)
    trustee_set = set(roles.trustees)
    explicit = sc.task_objects()
    task = explicit[min(explicit)] if explicit else make_task(0, [(0, 1.0)])
    tasks = {task.id: task}

    integrity = {x: rng_state.random() for x in roles.trustors}
    competence = {t: rng_state.random() for t in roles.trustees}
    candidates = {
        x: tuple(n for n in graph.neighbors(x) if n in trustee_set)
        for x in roles.trustors
    }
    preseed = {}
    for x in roles.trustors:
        for t in candidates[x]:
            responsive = sum(1 for _ in range(sc.preseed_uses) if rng_state.random() < integrity[x])
            preseed[(t, x)] = responsive

    profiles = {}
    for node in graph.nodes():
        profiles[node] = AgentProfile(
            node=node,
            is_trustor=node in integrity,
            is_trustee=node in trustee_set,
            competence={c: competence.get(node, 0.0) for c in task.char_ids},
            integrity=integrity.get(node, 1.0),
            default_threshold=theta,
        )

    usage = UsageLog()
    for (t, x), responsive in preseed.items():
        usage.seed(t, x, responsive, sc.preseed_uses)
    store = TrustStore()
    for x in roles.trustors:
        for t in candidates[x]:
            store.put(x, t, ("task", task.id), SERVICE,
                      initial_record(sc.initial_estimates, SERVICE))

    env = Environment()
    params = eng.TransitivityParams(omega1=0.0, omega2=0.0, max_hops=1, method=eng.TRADITIONAL)
    update = eng.UpdateParams.uniform(sc.beta)
    rng_play = random.Random(derive_seed(master, "mutuality-play", run_idx, f"{theta:.6g}"))
    evaluator = PathEvaluator(store, tasks)

    requests = successes = unavailable = uses = abusive = 0
    traces = []
    for _ in range(sc.mutuality_rounds):
        for x in roles.trustors:
            request = DelegationRequest(
                trustor=x, task=task, transitivity=params, update=update,
                initial_estimates=sc.initial_estimates,
            )
            trace = run_delegation(graph, profiles, store, usage, env, request, rng_play, tasks,
                                   evaluator=evaluator)
            requests += 1
            if trace.chosen is None:
                unavailable += 1
            else:
                uses += 1
                if trace.outcome.success:
                    successes += 1
                if trace.outcome.abusive:
                    abusive += 1
            if want_traces:
                traces.append(trace.to_dict())

    metrics = {
        "success_rate": successes / requests,
        "unavailable_rate": unavailable / requests,
        "abuse_rate": abusive / uses if uses else 0.0,
        "zero_uses": 0.0 if uses else 1.0,
        "uses": float(uses),
        "requests": float(requests),
    }
    return theta, run_idx, metrics, traces


def exp_mutuality(
    graph: SocialGraph,
    scenario: Scenario,
    runs: Optional[int] = None,
    master_seed: Optional[int] = None,
    jobs: int = 1,
    trace_sink: Optional[list] = None,
) -> list[MetricsRow]:
    """Success, unavailable, and abuse rates under reverse-evaluation thresholds.

    Every trustor repeatedly delegates a common task to trustee neighbors;
    trustees gate requests on the smoothed responsive-use history at each
    theta in the grid. World state is shared across theta points per run.
    """
    runs = runs or scenario.runs or DEFAULT_RUNS["mutuality"]
    master = master_seed if master_seed is not None else scenario.master_seed
    want_traces = trace_sink is not None
    units = [
        (graph, scenario, theta, run, master, want_traces)
        for theta in scenario.theta_grid
        for run in range(runs)
    ]
    results = _map_units(_mutuality_unit, units, jobs)

    rows: list[MetricsRow] = []
    by_theta: dict[float, list[Mapping[str, float]]] = {t: [] for t in scenario.theta_grid}
    for theta, run_idx, metrics, traces in results:
        param = f"theta={theta:g}"
        for metric in sorted(metrics):
            rows.append(MetricsRow("mutuality", param, run_idx, metric, metrics[metric]))
        by_theta[theta].append(metrics)
        if want_traces:
            trace_sink.extend(traces)
    for theta in scenario.theta_grid:
        rows.extend(_aggregate_rows("mutuality", f"theta={theta:g}", by_theta[theta]))
    return rows


# ---------------------------------------------------------------------------
# Characteristic inference: honest-trustee selection with and without it
# ---------------------------------------------------------------------------

TAINTED_TASK = 1
CLEAN_TASK = 2
TARGET_TASK = 3


def _inference_unit(args):
    graph, sc, rep, master = args
    rng = random.Random(derive_seed(master, "inference-state", rep))
    roles = sample_roles(graph, sc.role_fraction, rng, sc.disjoint_roles)
    trustee_set = set(roles.trustees)

    prev_a = make_task(TAINTED_TASK, [(0, 1.0)])
    prev_b = make_task(CLEAN_TASK, [(1, 1.0)])
    target = make_task(TARGET_TASK, [(0, 0.5), (1, 0.5)])
    tasks = {t.id: t for t in (prev_a, prev_b, target)}

    dishonest_count = round(sc.dishonest_fraction * len(roles.trustees))
    dishonest = set(rng.sample(roles.trustees, dishonest_count))
    competence = {
        t: {0: 0.5 + 0.5 * rng.random(), 1: 0.5 + 0.5 * rng.random()}
        for t in roles.trustees
    }

    store = TrustStore()
    for x in roles.trustors:
        for t in graph.neighbors(x):
            if t not in trustee_set:
                continue
            s_a = competence[t][0] * (sc.taint_penalty if t in dishonest else 1.0)
            s_b = competence[t][1]
            store.put(x, t, ("task", TAINTED_TASK), SERVICE,
                      TrustRecord(s_a, 1.0, 1.0, 0.0, 1, SERVICE))
            store.put(x, t, ("task", CLEAN_TASK), SERVICE,
                      TrustRecord(s_b, 1.0, 1.0, 0.0, 1, SERVICE))

    rng_pick = random.Random(derive_seed(master, "inference-pick", rep))
    with_honest = without_honest = participants = 0
    for x in roles.trustors:
        cands = [t for t in graph.neighbors(x) if t in trustee_set]
        if not cands:
            continue
        participants += 1
        scored = []
        for t in cands:
            tw = eng.task_trust(store, x, t, target, SERVICE, tasks)
            if tw is not None:
                scored.append((t, tw))
        if scored:
            best = min(scored, key=lambda pair: (-pair[1], pair[0]))[0]
        else:
            best = cands[0]
        if best not in dishonest:
            with_honest += 1
        blind = rng_pick.choice(cands)
        if blind not in dishonest:
            without_honest += 1

    if participants == 0:
        return rep, {"with_inference": 0.0, "without_inference": 0.0, "improvement_pp": 0.0}
    w = with_honest / participants
    wo = without_honest / participants
    return rep, {
        "with_inference": w,
        "without_inference": wo,
        "improvement_pp": 100.0 * (w - wo),
    }


def exp_inference(
    graph: SocialGraph,
    scenario: Scenario,
    runs: Optional[int] = None,
    master_seed: Optional[int] = None,
    jobs: int = 1,
) -> list[MetricsRow]:
    """Fraction of trustors picking honest trustees, with vs without inference.

    Dishonest trustees performed badly on a previous task sharing one
    characteristic with the requested one; inference propagates the taint,
    the no-inference baseline picks blindly among candidates.
    """
    reps = runs or scenario.runs or scenario.inference_reps
    master = master_seed if master_seed is not None else scenario.master_seed
    units = [(graph, scenario, rep, master) for rep in range(reps)]
    results = _map_units(_inference_unit, units, jobs)

    rows: list[MetricsRow] = []
    per_rep = []
    wins = 0
    for rep, metrics in results:
        per_rep.append(metrics)
        if metrics["with_inference"] > metrics["without_inference"]:
            wins += 1
        for metric in sorted(metrics):
            rows.append(MetricsRow("inference", "selection", rep, metric, metrics[metric]))
    rows.extend(_aggregate_rows("inference", "selection", per_rep))
    rows.append(MetricsRow("inference", "selection", AGGREGATE, "wins", float(wins)))
    rows.append(MetricsRow("inference", "selection", AGGREGATE, "reps", float(reps)))
    return rows


# ---------------------------------------------------------------------------
# Transitivity: traditional vs conservative vs aggressive discovery
# ---------------------------------------------------------------------------

def _char_pool(count: int) -> list[Task]:
    """All single- and two-characteristic tasks over `count` characteristics."""
    tasks = []
    task_id = 0
    for c in range(count):
        tasks.append(make_task(task_id, [(c, 1.0)]))
        task_id += 1
    for a in range(count):
        for b in range(a + 1, count):
            tasks.append(make_task(task_id, [(a, 0.5), (b, 0.5)]))
            task_id += 1
    return tasks


def _experienced_tasks(node: int, pool: Sequence[Task], features, per_node: int, rng) -> list[int]:
    if features is not None:
        bits = features[node]
        compatible = [
            t.id for t in pool
            if all(c < len(bits) and bits[c] == 1 for c in t.char_ids)
        ]
        if len(compatible) >= per_node:
            return sorted(rng.sample(compatible, per_node))
    return sorted(rng.sample([t.id for t in pool], per_node))


def _transitivity_unit(args):
    graph, sc, char_count, run_idx, master = args
    rng = random.Random(derive_seed(master, "transitivity-state", char_count, run_idx))
    explicit = sc.task_objects()
    if explicit:
        pool = [explicit[tid] for tid in sorted(explicit)]
        char_ids = sorted({c for t in pool for c in t.char_ids})
    else:
        pool = _char_pool(char_count)
        char_ids = list(range(char_count))
    tasks = {t.id: t for t in pool}
    roles = sample_roles(graph, sc.role_fraction, rng, sc.disjoint_roles)
    trustee_set = set(roles.trustees)
    features = graph.features if sc.use_features else None

    competence = {
        n: {c: rng.random() for c in char_ids}
        for n in graph.nodes()
    }
    per_node = min(sc.tasks_per_node, len(pool))
    experienced = {
        n: _experienced_tasks(n, pool, features, per_node, rng)
        for n in graph.nodes()
    }

    profiles = {
        n: AgentProfile(
            node=n,
            is_trustor=n in set(roles.trustors),
            is_trustee=n in trustee_set,
            competence=competence[n],
        )
        for n in graph.nodes()
    }

    store = TrustStore()
    for n in graph.nodes():
        task_objs = [tasks[tid] for tid in experienced[n]]
        for m in graph.neighbors(n):
            for task in task_objs:
                if rng.random() < sc.service_density:
                    s_hat = profiles[n].task_competence(task)
                    store.put(m, n, ("task", task.id), SERVICE,
                              TrustRecord(s_hat, 1.0, 1.0, 0.0, 1, SERVICE))
    for n in graph.nodes():
        known = sorted({tid for k in graph.neighbors(n) for tid in experienced[k]})
        for m in graph.neighbors(n):
            for tid in known:
                if rng.random() < sc.rec_density:
                    store.put(m, n, ("task", tid), RECOMMENDATION,
                              TrustRecord(rng.random(), 1.0, 1.0, 0.0, 1, RECOMMENDATION))

    requests = [
        (x, pool[rng.randrange(len(pool))], rng.random())
        for x in roles.trustors
    ]

    evaluator = PathEvaluator(store, tasks)
    out = {}
    for method in sc.methods:
        params = eng.TransitivityParams(sc.omega1, sc.omega2, sc.max_hops, method)
        successes = unavailable = 0
        candidate_total = interrogated_total = 0
        for x, target, u_success in requests:
            request = DelegationRequest(trustor=x, task=target, transitivity=params)
            disc = find_potential_trustees(graph, store, profiles, request, tasks, evaluator)
            candidate_total += len(disc.candidates)
            interrogated_total += disc.nodes_interrogated
            if not disc.candidates:
                unavailable += 1
                continue
            chosen = min(disc.candidates, key=lambda c: (-c.trust, c.node))
            if u_success < profiles[chosen.node].task_competence(target):
                successes += 1
        n_req = len(requests)
        out[method] = {
            "success_rate": successes / n_req,
            "unavailable_rate": unavailable / n_req,
            "mean_candidates": candidate_total / n_req,
            "mean_interrogated": interrogated_total / n_req,
        }
    return char_count, run_idx, out


def exp_transitivity(
    graph: SocialGraph,
    scenario: Scenario,
    runs: Optional[int] = None,
    master_seed: Optional[int] = None,
    jobs: int = 1,
) -> list[MetricsRow]:
    """Delegation reach and success for the three transitivity methods.

    Nodes pre-seed service records for two experienced tasks and
    recommendation records mirroring their neighbors' tasks; each trustor
    then requests one random task per run. The three methods evaluate the
    identical world, including a common success draw per request.
    """
    runs = runs or scenario.runs or DEFAULT_RUNS["transitivity"]
    master = master_seed if master_seed is not None else scenario.master_seed
    if scenario.tasks:
        # explicit task pool: a single grid point labeled by its alphabet size
        counts = (len({c for _, parts in scenario.tasks for c, _ in parts}),)
    else:
        counts = scenario.char_counts
    units = [
        (graph, scenario, char_count, run, master)
        for char_count in counts
        for run in range(runs)
    ]
    results = _map_units(_transitivity_unit, units, jobs)

    rows: list[MetricsRow] = []
    grouped: dict[tuple[int, str], list[Mapping[str, float]]] = {}
    for char_count, run_idx, out in results:
        for method, metrics in out.items():
            param = f"chars={char_count},method={method}"
            for metric in sorted(metrics):
                rows.append(MetricsRow("transitivity", param, run_idx, metric, metrics[metric]))
            grouped.setdefault((char_count, method), []).append(metrics)
    for char_count in counts:
        for method in scenario.methods:
            key = (char_count, method)
            if key in grouped:
                rows.extend(_aggregate_rows(
                    "transitivity", f"chars={char_count},method={method}", grouped[key]))
    return rows


# ---------------------------------------------------------------------------
# Net profit: success-only vs full-profit selection, plus cost inflation
# ---------------------------------------------------------------------------

VARIANT_RANDOM = "random"
VARIANT_ATTACK = "attack"


def _profit_unit(args):
    sc, variant, run_idx, master = args
    rng = random.Random(derive_seed(master, "profit-truth", variant, run_idx))
    task = make_task(0, [(0, 1.0)])
    env = Environment()
    iterations = sc.attack_tasks if variant == VARIANT_ATTACK else sc.profit_iterations

    count = sc.profit_candidates
    dishonest = set()
    if variant == VARIANT_ATTACK:
        dishonest = set(rng.sample(range(count), round(sc.dishonest_fraction * count)))
    profiles = {}
    for i in range(count):
        if i in dishonest:
            s_true = 0.7 + 0.3 * rng.random()
        elif variant == VARIANT_ATTACK:
            s_true = 0.3 + 0.6 * rng.random()
        else:
            s_true = rng.random()
        profiles[i] = AgentProfile(
            node=i,
            is_trustee=True,
            competence={0: s_true},
            gain=rng.random(),
            damage=rng.random(),
            cost=rng.random(),
            honest=i not in dishonest,
            cost_multiplier=sc.cost_multiplier,
        )
    trustor = AgentProfile(node=count, is_trustor=True, integrity=1.0)
    update = eng.UpdateParams.uniform(sc.beta)

    out = {}
    for strategy in (eng.SUCCESS_ONLY, eng.FULL_PROFIT):
        records = {i: initial_record(sc.initial_estimates, SERVICE) for i in range(count)}
        # common random numbers: both strategies face the identical draw
        # sequence, so their curves differ only through candidate choice
        rng_play = random.Random(derive_seed(master, "profit-play", variant, run_idx))
        profits = []
        costs = []
        for _ in range(iterations):
            ranked = eng.select_trustee(sorted(records.items()), strategy)
            node = ranked[0][0]
            outcome = sample_outcome(trustor, profiles[node], task, env, (), rng_play)
            records[node] = eng.update_estimates(records[node], outcome, update)
            profits.append(outcome.gain - outcome.damage - outcome.cost)
            costs.append(outcome.cost)
        out[strategy] = {"profits": profits, "costs": costs}
    return variant, run_idx, out


def exp_profit(
    graph: Optional[SocialGraph],
    scenario: Scenario,
    runs: Optional[int] = None,
    master_seed: Optional[int] = None,
    jobs: int = 1,
) -> list[MetricsRow]:
    """Realized net profit per iteration for the two selection strategies.

    Candidates carry random hidden success/gain/damage/cost; the attack
    variant adds cost-inflating dishonest candidates and tracks realized
    cost per task. The graph is not used: candidate pools are synthetic.
    """
    runs = runs or scenario.runs or DEFAULT_RUNS["profit"]
    master = master_seed if master_seed is not None else scenario.master_seed
    units = [
        (scenario, variant, run, master)
        for variant in (VARIANT_RANDOM, VARIANT_ATTACK)
        for run in range(runs)
    ]
    results = _map_units(_profit_unit, units, jobs)

    series: dict[tuple[str, str, str], list[list[float]]] = {}
    rows: list[MetricsRow] = []
    window_runs: dict[str, list[dict[str, float]]] = {}
    for variant, run_idx, out in results:
        for strategy, data in out.items():
            metric = "net_profit" if variant == VARIANT_RANDOM else "cost"
            key = (variant, strategy, metric)
            values = data["profits"] if metric == "net_profit" else data["costs"]
            series.setdefault(key, []).append(values)
            if variant == VARIANT_ATTACK and len(values) >= 50:
                # realized cost early (tasks 1-10) vs late (tasks 40-50)
                windows = {
                    "cost_tasks_1_10": statistics.fmean(values[0:10]),
                    "cost_tasks_40_50": statistics.fmean(values[39:50]),
                }
                param = f"variant={variant},strategy={strategy}"
                for name in sorted(windows):
                    rows.append(MetricsRow("profit", param, run_idx, name, windows[name]))
                window_runs.setdefault(param, []).append(windows)

    for param in sorted(window_runs):
        rows.extend(_aggregate_rows("profit", param, window_runs[param]))
    for (variant, strategy, metric) in sorted(series):
        param = f"variant={variant},strategy={strategy}"
        runs_data = series[(variant, strategy, metric)]
        length = len(runs_data[0])
        for i in range(length):
            values = [run_values[i] for run_values in runs_data]
            rows.append(MetricsRow("profit", param, AGGREGATE, f"{metric}[{i:03d}]",
                                   statistics.fmean(values)))
            rows.append(MetricsRow("profit", param, AGGREGATE, f"{metric}[{i:03d}]_std",
                                   statistics.pstdev(values)))
    return rows


# ---------------------------------------------------------------------------
# Dynamic environment: baseline vs uncorrected vs corrected updates
# ---------------------------------------------------------------------------

REGIMES = ("baseline", "uncorrected", "corrected")


def _environment_unit(args):
    sc, run_idx, master = args
    rng = random.Random(derive_seed(master, "environment", run_idx))
    beta = sc.beta
    comp = sc.env_competence
    series = {regime: [] for regime in REGIMES}
    s_hat = {regime: sc.env_initial_s for regime in REGIMES}
    for value in sc.env_values:
        for _ in range(sc.env_epoch_length):
            noise = rng.uniform(-sc.env_noise, sc.env_noise)
            perf_ideal = _clamp01(comp + noise)
            perf_env = _clamp01(comp * value + noise)
            s_hat["baseline"] = eng.blend(s_hat["baseline"], perf_ideal, beta)
            s_hat["uncorrected"] = eng.blend(s_hat["uncorrected"], perf_env, beta)
            s_hat["corrected"] = eng.blend(
                s_hat["corrected"], eng.correct_realized(perf_env, value), beta)
            for regime in REGIMES:
                series[regime].append(s_hat[regime])
    return run_idx, series


def exp_environment(
    graph: Optional[SocialGraph],
    scenario: Scenario,
    runs: Optional[int] = None,
    master_seed: Optional[int] = None,
    jobs: int = 1,
) -> list[MetricsRow]:
    """Expected-success tracking through environment epochs for one pair.

    The trustee performs at its competence scaled by the epoch environment
    (plus small noise); three update regimes run on the same draws: an
    environment-free baseline, uncorrected blending, and the corrected rule
    that divides out the worst environment.
    """
    runs = runs or scenario.runs or DEFAULT_RUNS["environment"]
    master = master_seed if master_seed is not None else scenario.master_seed
    units = [(scenario, run, master) for run in range(runs)]
    results = _map_units(_environment_unit, units, jobs)

    total = len(scenario.env_values) * scenario.env_epoch_length
    rows: list[MetricsRow] = []
    for regime in REGIMES:
        param = f"regime={regime}"
        for i in range(total):
            values = [series[regime][i] for _, series in results]
            rows.append(MetricsRow("environment", param, AGGREGATE, f"s_hat[{i:03d}]",
                                   statistics.fmean(values)))
            rows.append(MetricsRow("environment", param, AGGREGATE, f"s_hat[{i:03d}]_std",
                                   statistics.pstdev(values)))
    return rows


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_RUNNERS = {
    "mutuality": exp_mutuality,
    "inference": exp_inference,
    "transitivity": exp_transitivity,
    "profit": exp_profit,
    "environment": exp_environment,
}


def run_experiment_rows(
    spec: ExperimentSpec,
    graph: Optional[SocialGraph],
    jobs: int = 1,
    trace_sink: Optional[list] = None,
) -> list[MetricsRow]:
    """Run one experiment and return its metric rows."""
    runner = _RUNNERS[spec.which]
    kwargs = dict(runs=spec.effective_runs, master_seed=spec.effective_seed, jobs=jobs)
    if spec.which == "mutuality":
        kwargs["trace_sink"] = trace_sink
    if spec.which in ("mutuality", "inference", "transitivity") and graph is None:
        raise ValueError(f"experiment {spec.which!r} needs a graph")
    return runner(graph, spec.scenario, **kwargs)
