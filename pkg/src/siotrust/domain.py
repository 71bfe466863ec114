"""Core vocabulary shared by all modules: tasks, trust records, agents, environments.

Types here are plain values. Behavioural rules (evaluation, updates,
transitivity, the delegation protocol) live in `trust_engine` and
`delegation`. The stateful exceptions are `TrustStore` and `UsageLog`,
each owned and mutated by a single simulation run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional, Sequence

SERVICE = "service"
RECOMMENDATION = "recommendation"
KINDS = (SERVICE, RECOMMENDATION)

WEIGHT_TOLERANCE = 1e-9


class ScenarioError(ValueError):
    """Malformed scenario file or invalid parameter value."""


@dataclass(frozen=True)
class Characteristic:
    """Atomic capability component of a task."""

    id: int
    name: str = ""


@dataclass(frozen=True)
class Task:
    """A weighted bag of characteristics; weights sum to one.

    Use `make_task` to construct: it validates parts and renormalizes
    weights so that any Task observable by other modules satisfies the
    sum-to-one invariant.
    """

    id: int
    parts: tuple[tuple[int, float], ...]

    @property
    def char_ids(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.parts)

    def weight_of(self, char_id: int) -> Optional[float]:
        for c, w in self.parts:
            if c == char_id:
                return w
        return None


def make_task(task_id: int, parts: Sequence[tuple[int, float]]) -> Task:
    """Build a task from (characteristic id, weight) pairs.

    Weights must be strictly positive and are renormalized to sum to one.
    Rejects empty part lists and duplicate characteristics.
    """
    if not parts:
        raise ValueError("task needs at least one characteristic")
    seen = set()
    total = 0.0
    for char_id, weight in parts:
        if char_id < 0:
            raise ValueError(f"characteristic ids must be non-negative, got {char_id}")
        if weight <= 0:
            raise ValueError(f"characteristic {char_id}: weight must be positive, got {weight}")
        if char_id in seen:
            raise ValueError(f"duplicate characteristic {char_id} in task {task_id}")
        seen.add(char_id)
        total += weight
    norm = tuple((int(c), w / total) for c, w in parts)
    return Task(id=int(task_id), parts=norm)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class TrustRecord:
    """One observer's estimates about one subject in one task context.

    `s_hat` is the expected success rate; `g_hat`, `d_hat`, `c_hat` the
    expected gain, damage, and cost, all in [0, 1]. A record with
    interaction_count 0 holds the configured initial estimates.
    """

    s_hat: float
    g_hat: float
    d_hat: float
    c_hat: float
    interaction_count: int = 0
    kind: str = SERVICE

    def __post_init__(self):
        _check_unit("s_hat", self.s_hat)
        _check_unit("g_hat", self.g_hat)
        _check_unit("d_hat", self.d_hat)
        _check_unit("c_hat", self.c_hat)
        if self.interaction_count < 0:
            raise ValueError("interaction_count must be >= 0")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


def initial_record(estimates: Sequence[float] = (0.5, 0.5, 0.5, 0.5), kind: str = SERVICE) -> TrustRecord:
    s, g, d, c = estimates
    return TrustRecord(s_hat=s, g_hat=g, d_hat=d, c_hat=c, interaction_count=0, kind=kind)


class TrustStore:
    """Map from (observer, subject, context, kind) to TrustRecord.

    Context is ("task", id) or ("char", id). Lookups for absent keys
    return None, which is distinct from any stored record: strangers and
    distrusted nodes must stay distinguishable for the unavailable-rate
    metric.
    """

    def __init__(self):
        self._by_pair: dict[tuple[int, int, str], dict[tuple[str, int], TrustRecord]] = {}

    def put(self, observer: int, subject: int, context: tuple[str, int], kind: str, record: TrustRecord) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if record.kind != kind:
            record = TrustRecord(record.s_hat, record.g_hat, record.d_hat, record.c_hat,
                                 record.interaction_count, kind)
        self._by_pair.setdefault((observer, subject, kind), {})[context] = record

    def get(self, observer: int, subject: int, context: tuple[str, int], kind: str) -> Optional[TrustRecord]:
        return self._by_pair.get((observer, subject, kind), {}).get(context)

    def task_records(self, observer: int, subject: int, kind: str) -> list[tuple[int, TrustRecord]]:
        """All task-context records the observer holds about the subject, by task id."""
        bucket = self._by_pair.get((observer, subject, kind), {})
        out = [(ctx[1], rec) for ctx, rec in bucket.items() if ctx[0] == "task"]
        out.sort(key=lambda pair: pair[0])
        return out

    def __len__(self) -> int:
        return sum(len(bucket) for bucket in self._by_pair.values())


@dataclass(frozen=True)
class AgentProfile:
    """A node's roles and hidden ground truth.

    `competence` maps characteristic id to the true success probability,
    hidden from other agents; a task's ground-truth competence is the
    task-weighted mean. `integrity` is the probability that a given use of
    a trustee's resource is responsive rather than abusive. Dishonest
    trustees enact scripted attacks (cost inflation via `cost_multiplier`,
    characteristic tainting handled by the scenario builders).
    """

    node: int
    is_trustor: bool = False
    is_trustee: bool = False
    competence: Mapping[int, float] = field(default_factory=dict)
    integrity: float = 1.0
    reverse_threshold: Mapping[int, float] = field(default_factory=dict)
    default_threshold: float = 0.0
    honest: bool = True
    gain: float = 1.0
    damage: float = 1.0
    cost: float = 0.0
    cost_multiplier: float = 1.0

    def __post_init__(self):
        _check_unit("integrity", self.integrity)
        _check_unit("default_threshold", self.default_threshold)
        for c, v in self.competence.items():
            _check_unit(f"competence[{c}]", v)
        for t, v in self.reverse_threshold.items():
            _check_unit(f"reverse_threshold[{t}]", v)
        _check_unit("gain", self.gain)
        _check_unit("damage", self.damage)
        _check_unit("cost", self.cost)

    def threshold_for(self, task_id: int) -> float:
        return self.reverse_threshold.get(task_id, self.default_threshold)

    def task_competence(self, task: Task) -> float:
        total = 0.0
        for char_id, weight in task.parts:
            if char_id not in self.competence:
                raise KeyError(f"node {self.node} has no competence for characteristic {char_id}")
            total += weight * self.competence[char_id]
        return total


class UsageLog:
    """Per (trustee, trustor) counts of responsive versus total resource uses."""

    def __init__(self):
        self._counts: dict[tuple[int, int], list[int]] = {}

    def record(self, trustee: int, trustor: int, responsive: bool) -> None:
        entry = self._counts.setdefault((trustee, trustor), [0, 0])
        entry[0] += 1 if responsive else 0
        entry[1] += 1

    def seed(self, trustee: int, trustor: int, responsive: int, total: int) -> None:
        if responsive > total or responsive < 0:
            raise ValueError("responsive count out of range")
        self._counts[(trustee, trustor)] = [responsive, total]

    def counts(self, trustee: int, trustor: int) -> tuple[int, int]:
        entry = self._counts.get((trustee, trustor))
        if entry is None:
            return (0, 0)
        return (entry[0], entry[1])

    def copy(self) -> "UsageLog":
        clone = UsageLog()
        clone._counts = {k: list(v) for k, v in self._counts.items()}
        return clone


@dataclass(frozen=True)
class Environment:
    """Instantaneous per-node environment; 1 means ideal, values stay in (0, 1]."""

    values: Mapping[int, float] = field(default_factory=dict)
    default: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.default <= 1.0:
            raise ValueError(f"environment default must be in (0, 1], got {self.default}")
        for node, v in self.values.items():
            if not 0.0 < v <= 1.0:
                raise ValueError(f"environment value for node {node} must be in (0, 1], got {v}")

    def at(self, node: int) -> float:
        return self.values.get(node, self.default)


@dataclass(frozen=True)
class EnvironmentSchedule:
    """Piecewise-constant environment over simulation epochs."""

    epochs: tuple[tuple[int, Environment], ...]

    def __post_init__(self):
        if not self.epochs:
            raise ValueError("schedule needs at least one epoch")
        for length, _ in self.epochs:
            if length <= 0:
                raise ValueError("epoch length must be positive")

    @classmethod
    def uniform(cls, values: Sequence[float], length: int) -> "EnvironmentSchedule":
        return cls(tuple((length, Environment(default=v)) for v in values))

    @property
    def total_iterations(self) -> int:
        return sum(length for length, _ in self.epochs)

    def epoch_index(self, iteration: int) -> int:
        """Epoch containing the given zero-based iteration; clamps past the end."""
        remaining = iteration
        for idx, (length, _) in enumerate(self.epochs):
            if remaining < length:
                return idx
            remaining -= length
        return len(self.epochs) - 1

    def at_iteration(self, iteration: int) -> Environment:
        return self.epochs[self.epoch_index(iteration)][1]

    def epoch_env(self, index: int) -> Environment:
        """Environment of the index-th epoch; clamps past the end."""
        if index < 0:
            raise ValueError("epoch index must be >= 0")
        return self.epochs[min(index, len(self.epochs) - 1)][1]


@dataclass(frozen=True)
class DelegationOutcome:
    """Realized result of one delegation.

    Success zeroes damage, failure zeroes gain, cost applies either way.
    `env_snapshot` carries the environment values under which the
    delegation ran: (trustor E, trustee E, then each intermediate's E).
    """

    success: bool
    gain: float
    damage: float
    cost: float
    abusive: bool = False
    env_snapshot: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        _check_unit("gain", self.gain)
        _check_unit("damage", self.damage)
        _check_unit("cost", self.cost)
        if self.success and self.damage != 0.0:
            raise ValueError("successful delegation must have zero damage")
        if not self.success and self.gain != 0.0:
            raise ValueError("failed delegation must have zero gain")
        if len(self.env_snapshot) < 2:
            raise ValueError("env_snapshot needs trustor and trustee entries")
        for v in self.env_snapshot:
            if not 0.0 < v <= 1.0:
                raise ValueError(f"env snapshot values must be in (0, 1], got {v}")


@dataclass
class Scenario:
    """Tunable parameters for the five experiments, JSON-compatible.

    Defaults reproduce the reference setups at desk scale; the CLI and
    scenario files may override any field.
    """

    # shared
    role_fraction: float = 0.4
    disjoint_roles: bool = False
    omega1: float = 0.6
    omega2: float = 0.6
    max_hops: int = 3
    beta: float = 0.1
    initial_estimates: tuple[float, float, float, float] = (0.5, 0.5, 0.5, 0.5)
    master_seed: int = 1
    runs: Optional[int] = None

    # optional explicit vocabulary; when tasks are given they replace the
    # experiments' generated pools
    characteristics: tuple[str, ...] = ()
    tasks: tuple = ()

    # mutual evaluation
    theta_grid: tuple[float, ...] = (0.0, 0.3, 0.6)
    mutuality_rounds: int = 6
    preseed_uses: int = 5

    # characteristic inference
    inference_reps: int = 50
    dishonest_fraction: float = 0.5
    taint_penalty: float = 0.5

    # transitivity
    char_counts: tuple[int, ...] = (4, 5, 6, 7)
    methods: tuple[str, ...] = ("traditional", "conservative", "aggressive")
    tasks_per_node: int = 2
    service_density: float = 0.25
    rec_density: float = 0.08
    use_features: bool = False

    # net profit
    profit_candidates: int = 20
    profit_iterations: int = 250
    attack_tasks: int = 50
    cost_multiplier: float = 3.0

    # dynamic environment
    env_values: tuple[float, ...] = (1.0, 0.4, 0.7)
    env_epoch_length: int = 100
    env_competence: float = 0.8
    env_noise: float = 0.05
    env_initial_s: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.role_fraction <= 1.0:
            raise ScenarioError(f"role_fraction must be in (0, 1], got {self.role_fraction}")
        if not 0.0 <= self.beta < 1.0:
            raise ScenarioError(f"beta must be in [0, 1), got {self.beta}")
        for name in ("omega1", "omega2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ScenarioError(f"{name} must be in [0, 1], got {v}")
        if self.max_hops < 1:
            raise ScenarioError("max_hops must be >= 1")
        if len(self.initial_estimates) != 4:
            raise ScenarioError("initial_estimates needs exactly four values")
        for v in self.initial_estimates:
            if not 0.0 <= v <= 1.0:
                raise ScenarioError(f"initial estimates must be in [0, 1], got {v}")
        for m in self.methods:
            if m not in ("traditional", "conservative", "aggressive"):
                raise ScenarioError(f"unknown transitivity method {m!r}")
        if self.runs is not None and self.runs < 1:
            raise ScenarioError("runs must be >= 1")
        for v in self.env_values:
            if not 0.0 < v <= 1.0:
                raise ScenarioError(f"environment values must be in (0, 1], got {v}")
        try:
            self.tasks = tuple(
                (int(tid), tuple((int(c), float(w)) for c, w in parts))
                for tid, parts in self.tasks
            )
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"bad task definitions: {exc}") from exc
        self.characteristics = tuple(str(name) for name in self.characteristics)
        self.task_objects()

    def task_objects(self) -> dict[int, Task]:
        """Validated Task objects for the explicit definitions, by id."""
        out: dict[int, Task] = {}
        for task_id, parts in self.tasks:
            try:
                task = make_task(task_id, list(parts))
            except ValueError as exc:
                raise ScenarioError(f"bad task definition {task_id}: {exc}") from exc
            if task.id in out:
                raise ScenarioError(f"duplicate task id {task.id}")
            out[task.id] = task
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "Scenario":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
        kwargs = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            value = data[f.name]
            if isinstance(value, list):
                value = tuple(value)
            kwargs[f.name] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from exc

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def replace(self, **overrides) -> "Scenario":
        data = self.to_dict()
        data.update(overrides)
        return Scenario.from_dict(data)


def load_scenario(path) -> Scenario:
    """Load a scenario file (JSON object of Scenario fields)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: scenario file must hold a JSON object")
    return Scenario.from_dict(data)
