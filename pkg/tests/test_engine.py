import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import siotrust.trust_engine as eng
from siotrust.domain import (
    RECOMMENDATION,
    SERVICE,
    AgentProfile,
    DelegationOutcome,
    Environment,
    TrustRecord,
    TrustStore,
    UsageLog,
    make_task,
)

unit = st.floats(0.0, 1.0)


def record(s, g=0.5, d=0.5, c=0.5, kind=SERVICE, count=0):
    return TrustRecord(s, g, d, c, count, kind)


class TestNormalize:
    def test_best_case_maps_to_one(self):
        assert eng.normalize(1.0) == 1.0

    def test_worst_case_maps_to_zero(self):
        assert eng.normalize(-2.0) == 0.0

    def test_midpoint(self):
        assert eng.normalize(-0.5) == 0.5

    def test_clamps_out_of_range(self):
        assert eng.normalize(5.0) == 1.0
        assert eng.normalize(-5.0) == 0.0

    @given(st.floats(-2.0, 1.0), st.floats(-2.0, 1.0))
    def test_monotone(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert eng.normalize(lo) <= eng.normalize(hi)


class TestPostEvaluate:
    def test_guaranteed_full_gain(self):
        assert eng.post_evaluate(record(1.0, 1.0, 0.7, 0.0)) == 1.0

    def test_guaranteed_full_loss(self):
        assert eng.post_evaluate(record(0.0, 0.3, 1.0, 1.0)) == 0.0

    def test_mixed_case(self):
        value = eng.post_evaluate(record(0.8, 1.0, 0.5, 0.1))
        assert abs(value - 0.8667) < 5e-5

    @given(unit, unit, unit, unit)
    def test_range(self, s, g, d, c):
        assert 0.0 <= eng.post_evaluate(record(s, g, d, c)) <= 1.0


class TestNetProfit:
    def test_sure_success_no_cost(self):
        assert eng.net_profit(record(1.0, 0.7, 0.5, 0.0)) == 0.7

    def test_symmetric_gamble(self):
        assert eng.net_profit(record(0.5, 1.0, 1.0, 0.0)) == 0.0

    def test_arithmetic(self):
        assert abs(eng.net_profit(record(0.8, 0.6, 0.4, 0.2)) - 0.2) < 1e-12


class TestUpdateEstimates:
    def outcome(self, success=True, gain=0.6, damage=0.4, cost=0.2):
        return DelegationOutcome(
            success=success,
            gain=gain if success else 0.0,
            damage=0.0 if success else damage,
            cost=cost,
        )

    def test_beta_zero_jumps_to_realized(self):
        params = eng.UpdateParams.uniform(0.0)
        updated = eng.update_estimates(record(0.3, 0.3, 0.3, 0.3), self.outcome(True), params)
        assert (updated.s_hat, updated.g_hat, updated.d_hat, updated.c_hat) == (1.0, 0.6, 0.0, 0.2)

    def test_beta_one_rejected(self):
        with pytest.raises(ValueError):
            eng.UpdateParams.uniform(1.0)

    def test_failure_blend(self):
        params = eng.UpdateParams.uniform(0.1)
        updated = eng.update_estimates(record(1.0), self.outcome(False), params)
        assert abs(updated.s_hat - 0.1) < 1e-12

    def test_count_increments_and_kind_kept(self):
        params = eng.UpdateParams.uniform(0.5)
        updated = eng.update_estimates(record(0.5, kind=RECOMMENDATION, count=4),
                                       self.outcome(True), params)
        assert updated.interaction_count == 5
        assert updated.kind == RECOMMENDATION

    @settings(max_examples=200)
    @given(st.floats(0.0, 0.99), unit, unit, st.integers(1, 60))
    def test_geometric_convergence(self, beta, c, s0, n):
        params = eng.UpdateParams.uniform(beta)
        rec = record(s0)
        for _ in range(n):
            rec = eng.update_from_realized(rec, c, c, c, c, params)
        assert abs(abs(rec.s_hat - c) - beta ** n * abs(s0 - c)) < 1e-12


class TestEnvCorrect:
    def test_inverts_environment_scaling(self):
        assert abs(eng.correct_realized(0.32, 0.4) - 0.8) < 1e-12

    def test_ideal_environment_identity(self):
        env = Environment()
        assert eng.env_correct(env, 0, 1, [2, 3], 0.73) == 0.73

    def test_overperformance_clamped(self):
        assert eng.correct_realized(0.9, 0.5) == 1.0

    def test_min_rule_uses_worst_node(self):
        env = Environment(values={0: 1.0, 1: 0.8, 2: 0.4})
        assert abs(eng.env_correct(env, 0, 1, [2], 0.2) - 0.5) < 1e-12

    def test_rejects_bad_environment(self):
        with pytest.raises(ValueError):
            eng.correct_realized(0.5, 0.0)


class TestUpdateEstimatesEnv:
    @given(unit, unit, unit, unit, st.booleans(), unit, unit, unit, st.floats(0.0, 0.99))
    def test_all_ones_reduces_bit_for_bit(self, s, g, d, c, success, gain, damage, cost, beta):
        params = eng.UpdateParams.uniform(beta)
        outcome = DelegationOutcome(
            success=success,
            gain=gain if success else 0.0,
            damage=0.0 if success else damage,
            cost=cost,
            env_snapshot=(1.0, 1.0, 1.0),
        )
        rec = record(s, g, d, c)
        assert eng.update_estimates_env(rec, outcome, params) == eng.update_estimates(rec, outcome, params)

    def test_block_rate_stays_at_history(self):
        # realized success rate 0.32 under min-E 0.4 corrects to 0.8
        corrected = eng.correct_realized(0.32, 0.4)
        assert abs(eng.blend(0.8, corrected, 0.1) - 0.8) < 1e-12

    def test_success_under_low_env_clamps(self):
        params = eng.UpdateParams.uniform(0.0)
        outcome = DelegationOutcome(success=True, gain=1.0, damage=0.0, cost=0.0,
                                    env_snapshot=(0.5, 0.5))
        updated = eng.update_estimates_env(record(0.2), outcome, params)
        assert updated.s_hat == 1.0


class TestInference:
    def test_single_source_average(self):
        task = make_task(1, [(0, 0.5), (1, 0.5)])
        assert eng.infer_characteristic_tw([(task, 0.7)], 0) == 0.7

    def test_weighted_mean(self):
        t1 = make_task(1, [(0, 0.5), (1, 0.5)])
        t2 = make_task(2, [(0, 0.5), (2, 0.5)])
        value = eng.infer_characteristic_tw([(t1, 0.6), (t2, 0.8)], 0)
        assert abs(value - 0.7) < 1e-12

    def test_no_data(self):
        task = make_task(1, [(0, 1.0)])
        assert eng.infer_characteristic_tw([(task, 0.9)], 5) is None

    def test_fig3_style_split(self):
        # target's two characteristics learned from two different prior tasks
        t2 = make_task(2, [(0, 0.5), (2, 0.5)])
        t3 = make_task(3, [(1, 0.5), (3, 0.5)])
        target = make_task(4, [(0, 0.5), (1, 0.5)])
        value = eng.infer_task_tw([(t2, 0.9), (t3, 0.5)], target)
        assert abs(value - 0.7) < 1e-12

    def test_uncovered_characteristic_blocks(self):
        t1 = make_task(1, [(0, 1.0)])
        target = make_task(2, [(0, 0.5), (1, 0.5)])
        assert eng.infer_task_tw([(t1, 0.9)], target) is None

    @settings(max_examples=100)
    @given(unit, st.integers(1, 5))
    def test_all_equal_history_fixed_point(self, t, n_chars):
        history = [(make_task(i, [(c, 1.0 + c) for c in range(n_chars)]), t) for i in range(3)]
        target = make_task(99, [(c, 2.0 + c) for c in range(n_chars)])
        value = eng.infer_task_tw(history, target)
        assert abs(value - t) < 1e-9

    def test_subset_renormalizes(self):
        t1 = make_task(1, [(0, 1.0)])
        value = eng.infer_subset_tw([(t1, 0.8)], [(0, 0.25)])
        assert value == 0.8

    def test_unrelated_characteristics_do_not_leak(self):
        # a terrible record on a disjoint task leaves the inferred value alone
        clean = [(make_task(1, [(0, 1.0)]), 0.9), (make_task(2, [(1, 1.0)]), 0.8)]
        tainted = clean + [(make_task(3, [(7, 1.0)]), 0.05)]
        target = make_task(9, [(0, 0.5), (1, 0.5)])
        assert eng.infer_task_tw(clean, target) == eng.infer_task_tw(tainted, target)


class TestTaskTrust:
    def test_direct_record_wins_over_inference(self):
        store = TrustStore()
        target = make_task(1, [(0, 1.0)])
        other = make_task(2, [(0, 1.0)])
        tasks = {1: target, 2: other}
        store.put(0, 1, ("task", 1), SERVICE, record(1.0, 1.0, 0.0, 0.0))
        store.put(0, 1, ("task", 2), SERVICE, record(0.0, 0.0, 1.0, 1.0))
        assert eng.task_trust(store, 0, 1, target, SERVICE, tasks) == 1.0

    def test_falls_back_to_inference(self):
        store = TrustStore()
        other = make_task(2, [(0, 1.0)])
        target = make_task(1, [(0, 1.0)])
        tasks = {1: target, 2: other}
        store.put(0, 1, ("task", 2), SERVICE, record(1.0, 1.0, 0.0, 0.0))
        assert eng.task_trust(store, 0, 1, target, SERVICE, tasks) == 1.0

    def test_no_records_is_none(self):
        store = TrustStore()
        target = make_task(1, [(0, 1.0)])
        assert eng.task_trust(store, 0, 1, target, SERVICE, {1: target}) is None


class TestTransitPair:
    def test_fully_trusted_recommender(self):
        for t in (0.0, 0.3, 1.0):
            assert eng.transit_pair(1.0, t) == t

    def test_fully_distrusted_recommender(self):
        assert eng.transit_pair(0.0, 0.3) == 0.7

    def test_half_collapses(self):
        for t in (0.0, 0.25, 0.9):
            assert eng.transit_pair(0.5, t) == 0.5

    def test_arithmetic(self):
        assert abs(eng.transit_pair(0.8, 0.9) - 0.74) < 1e-12

    @settings(max_examples=500)
    @given(unit, unit)
    def test_symmetry_and_range(self, a, b):
        assert eng.transit_pair(a, b) == eng.transit_pair(b, a)
        assert 0.0 <= eng.transit_pair(a, b) <= 1.0


class TestTransitTraditional:
    def test_single_hop_is_direct_trust(self):
        assert eng.transit_traditional([0.37]) == 0.37

    def test_all_ones(self):
        assert eng.transit_traditional([1.0] * 5) == 1.0

    def test_product(self):
        assert abs(eng.transit_traditional([0.9, 0.8]) - 0.72) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            eng.transit_traditional([])


class TestTransitChain:
    def params(self, w1=0.6, w2=0.6):
        return eng.TransitivityParams(omega1=w1, omega2=w2)

    def test_two_hop_value(self):
        assert abs(eng.transit_chain([0.9, 0.8], self.params()) - 0.74) < 1e-12

    def test_blocked_on_low_recommendation(self):
        assert eng.transit_chain([0.5, 0.8], self.params()) is None

    def test_blocked_on_low_task_trust(self):
        assert eng.transit_chain([0.9, 0.5], self.params()) is None

    def test_perfect_chain(self):
        assert eng.transit_chain([1.0, 1.0], self.params()) == 1.0

    def test_fold_order(self):
        value = eng.transit_chain([0.9, 0.8, 0.7], self.params())
        assert abs(value - eng.transit_pair(eng.transit_pair(0.9, 0.8), 0.7)) < 1e-15


class TestReverseEvaluation:
    def test_theta_zero_accepts_everyone(self):
        log = UsageLog()
        log.seed(1, 2, 0, 50)
        trustee = AgentProfile(node=1, is_trustee=True, default_threshold=0.0)
        accepted, _ = eng.reverse_evaluate(trustee, 2, log, make_task(0, [(0, 1.0)]))
        assert accepted

    def test_stranger_prior_is_half(self):
        log = UsageLog()
        trustee = AgentProfile(node=1, is_trustee=True, default_threshold=0.3)
        accepted, value = eng.reverse_evaluate(trustee, 2, log, make_task(0, [(0, 1.0)]))
        assert value == 0.5
        assert accepted

    def test_smoothed_estimate_rejects(self):
        log = UsageLog()
        log.seed(1, 2, 0, 8)
        trustee = AgentProfile(node=1, is_trustee=True, default_threshold=0.3)
        accepted, value = eng.reverse_evaluate(trustee, 2, log, make_task(0, [(0, 1.0)]))
        assert abs(value - 0.1) < 1e-12
        assert not accepted

    def test_per_task_threshold(self):
        log = UsageLog()
        trustee = AgentProfile(node=1, is_trustee=True,
                               reverse_threshold={7: 0.9}, default_threshold=0.0)
        accepted, _ = eng.reverse_evaluate(trustee, 2, log, make_task(7, [(0, 1.0)]))
        assert not accepted


class TestSelectTrustee:
    def test_single_candidate(self):
        ranked = eng.select_trustee([(3, record(0.5))])
        assert ranked[0][0] == 3

    def test_success_ranking(self):
        ranked = eng.select_trustee([(1, record(0.7)), (2, record(0.9))], eng.SUCCESS_ONLY)
        assert [n for n, _ in ranked] == [2, 1]

    def test_full_profit_overrides_success(self):
        a = record(0.9, 0.1, 0.9, 0.1)
        b = record(0.7, 0.8, 0.1, 0.1)
        ranked = eng.select_trustee([(1, a), (2, b)], eng.FULL_PROFIT)
        assert [n for n, _ in ranked] == [2, 1]
        assert abs(eng.net_profit(a) - (-0.1)) < 1e-12
        assert abs(eng.net_profit(b) - 0.43) < 1e-12

    def test_tie_breaks_to_lower_id(self):
        ranked = eng.select_trustee([(5, record(0.5)), (2, record(0.5))])
        assert [n for n, _ in ranked] == [2, 5]

    def test_empty_is_unavailable(self):
        assert eng.select_trustee([]) == []

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            eng.select_trustee([(1, record(0.5))], "both")

    @settings(max_examples=100)
    @given(st.lists(st.tuples(unit, unit, unit, unit), min_size=2, max_size=6),
           st.floats(0.01, 1.0))
    def test_scaling_invariance(self, specs, k):
        base = [(i, record(s, g, d, c)) for i, (s, g, d, c) in enumerate(specs)]
        scaled = [(i, record(s, g * k, d * k, c * k)) for i, (s, g, d, c) in enumerate(specs)]
        rank_base = [n for n, _ in eng.select_trustee(base, eng.FULL_PROFIT)]
        rank_scaled = [n for n, _ in eng.select_trustee(scaled, eng.FULL_PROFIT)]
        assert rank_base == rank_scaled


class TestShouldSelfExecute:
    def test_identical_records_keep_task(self):
        rec = record(0.5, 0.5, 0.5, 0.5)
        assert eng.should_self_execute(rec, rec)

    def test_better_other_delegates(self):
        selfish = record(0.5, 0.5, 0.5, 0.2)
        other = record(0.9, 0.9, 0.1, 0.0)
        assert not eng.should_self_execute(selfish, other)

    def test_no_alternative_keeps_task(self):
        assert eng.should_self_execute(record(0.1, 0.1, 0.9, 0.9), None)
