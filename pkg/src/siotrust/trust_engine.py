"""Trust mathematics: evaluation, updates, inference, transitivity, selection.

Every function here is pure: the TrustStore is read but never written, and
updates return new records for the caller to apply. Trust values ("TW")
are scalars in [0, 1]; a record maps to its TW through `post_evaluate`.

Chain trust combines pairwise as a*b + (1-a)*(1-b). This includes the
counterintuitive regime where two low trusts combine to a high value (a
mistrusted recommender judged wrong about a mistrusted subject); it is
kept as designed. Transit gates omega1 (recommendation hops) and omega2
(the final service hop) apply uniformly to all three transitivity methods
so that candidate sets nest: traditional within conservative within
aggressive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .domain import (
    RECOMMENDATION,
    SERVICE,
    AgentProfile,
    DelegationOutcome,
    Environment,
    Task,
    TrustRecord,
    TrustStore,
    UsageLog,
)

log = logging.getLogger(__name__)

TRADITIONAL = "traditional"
CONSERVATIVE = "conservative"
AGGRESSIVE = "aggressive"
METHODS = (TRADITIONAL, CONSERVATIVE, AGGRESSIVE)

SUCCESS_ONLY = "success_only"
FULL_PROFIT = "full_profit"
STRATEGIES = (SUCCESS_ONLY, FULL_PROFIT)


@dataclass(frozen=True)
class TransitivityParams:
    """Gate thresholds and search bounds for trust transitivity."""

    omega1: float = 0.6
    omega2: float = 0.6
    max_hops: int = 3
    method: str = AGGRESSIVE

    def __post_init__(self):
        if not 0.0 <= self.omega1 <= 1.0 or not 0.0 <= self.omega2 <= 1.0:
            raise ValueError("omega gates must be in [0, 1]")
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True)
class UpdateParams:
    """Forgetting factors for the four estimate updates; 0 forgets everything."""

    beta_s: float = 0.1
    beta_g: float = 0.1
    beta_d: float = 0.1
    beta_c: float = 0.1

    def __post_init__(self):
        for name in ("beta_s", "beta_g", "beta_d", "beta_c"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {v}")

    @classmethod
    def uniform(cls, beta: float) -> "UpdateParams":
        return cls(beta, beta, beta, beta)


def normalize(raw: float) -> float:
    """Affine map of the raw profit range [-2, 1] onto [0, 1], clamped."""
    if raw < -2.0 or raw > 1.0:
        log.debug("normalize input %.6g outside [-2, 1]; clamping", raw)
    value = (raw + 2.0) / 3.0
    return min(1.0, max(0.0, value))


def net_profit(record: TrustRecord) -> float:
    """Expected net profit of delegating to the record's subject."""
    return record.s_hat * record.g_hat - (1.0 - record.s_hat) * record.d_hat - record.c_hat


def post_evaluate(record: TrustRecord) -> float:
    """Normalized trustworthiness of a record: profit mapped into [0, 1]."""
    return normalize(net_profit(record))


def blend(old: float, new: float, beta: float) -> float:
    """Convex combination keeping `beta` of history."""
    return beta * old + (1.0 - beta) * new


def update_from_realized(
    record: TrustRecord,
    s: float,
    g: float,
    d: float,
    c: float,
    params: UpdateParams,
) -> TrustRecord:
    """Blend realized quantities into the record's estimates."""
    return TrustRecord(
        s_hat=blend(record.s_hat, s, params.beta_s),
        g_hat=blend(record.g_hat, g, params.beta_g),
        d_hat=blend(record.d_hat, d, params.beta_d),
        c_hat=blend(record.c_hat, c, params.beta_c),
        interaction_count=record.interaction_count + 1,
        kind=record.kind,
    )


def update_estimates(record: TrustRecord, outcome: DelegationOutcome, params: UpdateParams) -> TrustRecord:
    """Update estimates from a delegation outcome (realized S is 1 or 0)."""
    realized_s = 1.0 if outcome.success else 0.0
    return update_from_realized(record, realized_s, outcome.gain, outcome.damage, outcome.cost, params)


def correct_realized(realized: float, min_env: float) -> float:
    """Divide out the worst environment along the path, clamped to [0, 1].

    A result above 1 after correction means the subject over-performed its
    environment; the clamp flags that case by saturating.
    """
    if not 0.0 < min_env <= 1.0:
        raise ValueError(f"environment values must be in (0, 1], got {min_env}")
    corrected = realized / min_env
    if corrected > 1.0:
        log.debug("environment correction %.6g / %.6g over-performs; clamping", realized, min_env)
    return min(1.0, max(0.0, corrected))


def env_correct(
    env: Environment,
    trustor: int,
    trustee: int,
    intermediates: Sequence[int],
    realized: float,
) -> float:
    """Correct a realized value by the worst environment along the path."""
    min_env = min(env.at(trustor), env.at(trustee), *(env.at(i) for i in intermediates)) \
        if intermediates else min(env.at(trustor), env.at(trustee))
    return correct_realized(realized, min_env)


def update_estimates_env(record: TrustRecord, outcome: DelegationOutcome, params: UpdateParams) -> TrustRecord:
    """As update_estimates, but each realized quantity is environment-corrected.

    The correction uses the environment snapshot carried by the outcome
    (trustor, trustee, intermediates). Damage and cost divide by the same
    minimum as success and gain. With an all-ones snapshot this reduces
    bit-for-bit to the plain update.
    """
    min_env = min(outcome.env_snapshot)
    realized_s = 1.0 if outcome.success else 0.0
    return update_from_realized(
        record,
        correct_realized(realized_s, min_env),
        correct_realized(outcome.gain, min_env),
        correct_realized(outcome.damage, min_env),
        correct_realized(outcome.cost, min_env),
        params,
    )


def infer_characteristic_tw(
    history: Sequence[tuple[Task, float]],
    char_id: int,
) -> Optional[float]:
    """Weighted average of past task trust over tasks containing the characteristic.

    Each history task contributes its trust weighted by the characteristic's
    weight within that task. Returns None when no past task contains it.
    """
    num = 0.0
    den = 0.0
    for task, tw in history:
        w = task.weight_of(char_id)
        if w is None:
            continue
        num += w * tw
        den += w
    if den == 0.0:
        return None
    return num / den


def infer_task_tw(history: Sequence[tuple[Task, float]], target: Task) -> Optional[float]:
    """Infer trust for an unexperienced task from characteristic-level history.

    Requires full coverage: every characteristic of the target must appear
    in at least one history task, otherwise None.
    """
    total = 0.0
    for char_id, weight in target.parts:
        char_tw = infer_characteristic_tw(history, char_id)
        if char_tw is None:
            return None
        total += weight * char_tw
    return total


def infer_subset_tw(
    history: Sequence[tuple[Task, float]],
    parts: Sequence[tuple[int, float]],
) -> Optional[float]:
    """Inferred trust over a sub-bag of characteristics, weights renormalized."""
    total_w = sum(w for _, w in parts)
    if total_w <= 0.0:
        return None
    value = 0.0
    for char_id, weight in parts:
        char_tw = infer_characteristic_tw(history, char_id)
        if char_tw is None:
            return None
        value += (weight / total_w) * char_tw
    return value


def record_history(
    store: TrustStore,
    observer: int,
    subject: int,
    kind: str,
    tasks: Mapping[int, Task],
) -> list[tuple[Task, float]]:
    """(task, trust) pairs for everything the observer knows about the subject."""
    return [
        (tasks[task_id], post_evaluate(rec))
        for task_id, rec in store.task_records(observer, subject, kind)
        if task_id in tasks
    ]


def task_trust(
    store: TrustStore,
    observer: int,
    subject: int,
    task: Task,
    kind: str,
    tasks: Mapping[int, Task],
) -> Optional[float]:
    """Trust of observer in subject for a task: direct record first, else inference.

    A direct record for the exact task wins; inference over analogous
    tasks applies only when the task is unexperienced.
    """
    direct = store.get(observer, subject, ("task", task.id), kind)
    if direct is not None:
        return post_evaluate(direct)
    history = record_history(store, observer, subject, kind, tasks)
    if not history:
        return None
    return infer_task_tw(history, task)


def subset_trust(
    store: TrustStore,
    observer: int,
    subject: int,
    parts: Sequence[tuple[int, float]],
    kind: str,
    tasks: Mapping[int, Task],
) -> Optional[float]:
    """Inferred trust over a sub-bag of characteristics, weights renormalized."""
    history = record_history(store, observer, subject, kind, tasks)
    if not history:
        return None
    return infer_subset_tw(history, parts)


def transit_pair(tw_rec: float, tw_task: float) -> float:
    """Two-hop trust combination: agreement plus double-mistrust term."""
    return tw_rec * tw_task + (1.0 - tw_rec) * (1.0 - tw_task)


def transit_traditional(path_tws: Sequence[float]) -> float:
    """Product of trust values along a path; the pre-existing transfer rule."""
    if not path_tws:
        raise ValueError("path needs at least one trust value")
    value = 1.0
    for tw in path_tws:
        value *= tw
    return value


def transit_chain(tws: Sequence[float], params: TransitivityParams) -> Optional[float]:
    """Fold a chain of recommendation trusts ending in one task trust.

    All entries but the last are recommendation trusts gated at omega1;
    the last is the task trust gated at omega2. Returns None when any
    gate fails (the blocked case).
    """
    if not tws:
        raise ValueError("chain needs at least one trust value")
    for tw in tws[:-1]:
        if tw < params.omega1:
            return None
    if tws[-1] < params.omega2:
        return None
    value = tws[0]
    for tw in tws[1:]:
        value = transit_pair(value, tw)
    return value


def _hop_kinds(path: Sequence[int]):
    """Yield (observer, subject, kind) per edge; the final edge is service."""
    for i in range(len(path) - 1):
        kind = SERVICE if i == len(path) - 2 else RECOMMENDATION
        yield path[i], path[i + 1], kind


def transit_conservative(
    store: TrustStore,
    path: Sequence[int],
    target: Task,
    params: TransitivityParams,
    tasks: Mapping[int, Task],
) -> Optional[float]:
    """Chain trust requiring full target coverage at every hop of one path.

    Each hop's trust is the full-task trust (direct record first, else
    characteristic inference over everything the observer knows about the
    subject). Missing coverage or a failed gate blocks the chain.
    """
    if len(path) < 2:
        raise ValueError("path needs a trustor and a trustee")
    if len(path) - 1 > params.max_hops:
        return None
    tws = []
    for observer, subject, kind in _hop_kinds(path):
        tw = task_trust(store, observer, subject, target, kind, tasks)
        if tw is None:
            return None
        tws.append(tw)
    return transit_chain(tws, params)


def hop_coverage(
    store: TrustStore,
    observer: int,
    subject: int,
    kind: str,
    target: Task,
    tasks: Mapping[int, Task],
) -> frozenset[int]:
    """Target characteristics covered by the observer's records about the subject."""
    covered = set()
    target_chars = set(target.char_ids)
    for task_id, _ in store.task_records(observer, subject, kind):
        task = tasks.get(task_id)
        if task is None:
            continue
        covered.update(target_chars.intersection(task.char_ids))
    return frozenset(covered)


def hop_subset_value(
    store: TrustStore,
    observer: int,
    subject: int,
    kind: str,
    target: Task,
    tasks: Mapping[int, Task],
) -> tuple[frozenset[int], Optional[float]]:
    """Coverage and trust of one hop over everything it can vouch for.

    A hop covering the full target evaluates exactly as in the
    conservative method (direct record first); partial coverage falls back
    to renormalized inference over the covered sub-bag.
    """
    covered = hop_coverage(store, observer, subject, kind, target, tasks)
    if not covered:
        return covered, None
    if len(covered) == len(target.parts):
        return covered, task_trust(store, observer, subject, target, kind, tasks)
    parts = [(c, w) for c, w in target.parts if c in covered]
    return covered, subset_trust(store, observer, subject, parts, kind, tasks)


def transit_aggressive(
    store: TrustStore,
    char_paths: Mapping[int, Sequence[int]],
    target: Task,
    params: TransitivityParams,
    tasks: Mapping[int, Task],
) -> Optional[float]:
    """Combine per-characteristic chain values along possibly different paths.

    Every characteristic of the target needs a gated path whose hops all
    cover it; the chain folds each hop's covered-subset trust. The final
    value is the target-weighted sum of per-characteristic chain values.
    Blocked when any characteristic lacks a usable path.
    """
    chain_cache: dict[tuple[int, ...], Optional[tuple[frozenset[int], float]]] = {}

    def eval_path(path: tuple[int, ...]) -> Optional[tuple[frozenset[int], float]]:
        if path in chain_cache:
            return chain_cache[path]
        result = None
        if 1 <= len(path) - 1 <= params.max_hops:
            carried: Optional[frozenset[int]] = None
            tws = []
            for observer, subject, kind in _hop_kinds(path):
                covered, tw = hop_subset_value(store, observer, subject, kind, target, tasks)
                if tw is None:
                    carried = frozenset()
                    break
                carried = covered if carried is None else carried & covered
                if not carried:
                    break
                tws.append(tw)
            if carried:
                value = transit_chain(tws, params)
                if value is not None:
                    result = (carried, value)
        chain_cache[path] = result
        return result

    total = 0.0
    for char_id, weight in target.parts:
        path = char_paths.get(char_id)
        if path is None:
            return None
        evaluated = eval_path(tuple(path))
        if evaluated is None:
            return None
        carried, value = evaluated
        if char_id not in carried:
            return None
        total += weight * value
    return total


def reverse_trust(usage_log: UsageLog, trustee: int, trustor: int) -> float:
    """Laplace-smoothed responsive-use rate from the trustee's usage log."""
    responsive, total = usage_log.counts(trustee, trustor)
    return (responsive + 1) / (total + 2)


def reverse_evaluate(
    trustee: AgentProfile,
    trustor: int,
    usage_log: UsageLog,
    task: Task,
) -> tuple[bool, float]:
    """Trustee-side gate: accept when the trustor's reverse trust meets the threshold."""
    value = reverse_trust(usage_log, trustee.node, trustor)
    return value >= trustee.threshold_for(task.id), value


def select_trustee(
    candidates: Sequence[tuple[int, TrustRecord]],
    strategy: str = SUCCESS_ONLY,
) -> list[tuple[int, TrustRecord]]:
    """Rank candidates for delegation; an empty result signals "unavailable".

    success_only ranks by expected success rate, full_profit by expected
    net profit; ties break toward the lower node id. The ranked order
    drives the retry-on-rejection loop.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if strategy == SUCCESS_ONLY:
        key = lambda pair: (-pair[1].s_hat, pair[0])
    else:
        key = lambda pair: (-net_profit(pair[1]), pair[0])
    return sorted(candidates, key=key)


def should_self_execute(self_record: TrustRecord, best_other: Optional[TrustRecord]) -> bool:
    """Keep the task when no alternative strictly improves the expected profit."""
    if best_other is None:
        return True
    return net_profit(self_record) >= net_profit(best_other)
