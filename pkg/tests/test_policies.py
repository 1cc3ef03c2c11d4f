import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icnsim import (
    CacheEntry,
    ContentStore,
    FrequencyTable,
    PolicyKind,
    UcWeights,
    content_metric,
    make_policy,
)
from icnsim.errors import InvalidParameterError
from icnsim.policies import FifoPolicy, LruPolicy, UcPolicy

from reference import RefFifo, RefLru, ref_uc_decision


def entry(name, hops=0):
    return CacheEntry(name, hops_from_source=hops)


def force_counts(policy: UcPolicy, counts: dict[int, int]):
    policy.frequencies.counts.clear()
    for name, c in counts.items():
        policy.frequencies.counts[name] = c
    policy._scan_cache = None


class TestContentMetric:
    def test_all_components_saturate(self):
        w = UcWeights()
        assert content_metric(4, 4, 7, 7, 3, 3, w) == pytest.approx(1.0, abs=1e-12)

    def test_zero_distance_component(self):
        w = UcWeights()
        assert content_metric(4, 4, 0, 7, 3, 3, w) == pytest.approx(2 / 3, abs=1e-12)

    def test_mixed_example(self):
        w = UcWeights()
        got = content_metric(2, 4, 1, 4, 2, 4, w)
        assert got == pytest.approx(5 / 12, abs=1e-12)  # (0.5 + 0.25 + 0.5) / 3

    def test_zero_denominators_rejected(self):
        w = UcWeights()
        for args in [(1, 0, 1, 4, 1, 2), (1, 2, 1, 0, 1, 2), (1, 2, 1, 4, 1, 0)]:
            with pytest.raises(InvalidParameterError):
                content_metric(*args, w)

    def test_saturation_clamps(self):
        w = UcWeights()
        # candidate more frequent than every stored entry, farther than the diameter
        assert content_metric(10, 4, 9, 4, 3, 3, w) == pytest.approx(1.0, abs=1e-12)

    @given(
        freq=st.integers(1, 50),
        bump=st.integers(0, 10),
        hops=st.integers(0, 20),
        dh=st.integers(0, 5),
        degree=st.integers(1, 10),
        dd=st.integers(0, 4),
    )
    @settings(max_examples=80, deadline=None)
    def test_monotone_in_each_argument(self, freq, bump, hops, dh, degree, dd):
        w = UcWeights()
        max_freq, diameter, max_degree = 60, 25, 16
        base = content_metric(freq, max_freq, hops, diameter, degree, max_degree, w)
        assert content_metric(freq + bump, max_freq, hops, diameter, degree, max_degree, w) >= base
        assert content_metric(freq, max_freq, hops + dh, diameter, degree, max_degree, w) >= base
        assert (
            content_metric(freq, max_freq, hops, diameter, min(degree + dd, max_degree), max_degree, w)
            >= base
        )


class TestUcWeights:
    def test_defaults_sum_to_one(self):
        w = UcWeights()
        assert math.isclose(w.w_f + w.w_d + w.w_r, 1.0, abs_tol=1e-9)

    def test_bad_sum_rejected(self):
        with pytest.raises(InvalidParameterError):
            UcWeights(0.5, 0.5, 0.5)

    def test_negative_rejected(self):
        with pytest.raises(InvalidParameterError):
            UcWeights(1.2, -0.1, -0.1)


class TestFifo:
    def test_evicts_in_insertion_order(self):
        store = ContentStore(3)
        policy = FifoPolicy()
        for name in (1, 2, 3):
            policy.admit(store, entry(name), 1, 1, 1)
        decision = policy.admit(store, entry(4), 1, 1, 1)
        assert decision == (True, 1)
        assert set(store.entries) == {2, 3, 4}

    def test_access_does_not_change_order(self):
        store = ContentStore(3)
        policy = FifoPolicy()
        for name in (1, 2, 3):
            policy.admit(store, entry(name), 1, 1, 1)
        policy.on_access(store, 1)
        policy.on_access(store, 1)
        decision = policy.admit(store, entry(4), 1, 1, 1)
        assert decision.victim == 1

    def test_no_victim_below_capacity(self):
        store = ContentStore(2)
        policy = FifoPolicy()
        assert policy.admit(store, entry(9), 1, 1, 1) == (True, None)
        assert len(store) == 1


class TestLru:
    def test_access_refreshes_recency(self):
        store = ContentStore(3)
        policy = LruPolicy()
        for name in (1, 2, 3):
            policy.admit(store, entry(name), 1, 1, 1)
        policy.on_access(store, 1)  # access order now 2, 3, 1
        decision = policy.admit(store, entry(4), 1, 1, 1)
        assert decision.victim == 2
        assert set(store.entries) == {1, 3, 4}

    def test_matches_reference_on_random_traces(self):
        rng = random.Random(42)
        for _ in range(20):
            capacity = rng.randrange(1, 9)
            store = ContentStore(capacity)
            policy = LruPolicy()
            ref = RefLru(capacity)
            for _ in range(500):
                name = rng.randrange(16)
                policy.on_access(store, name)
                ref.access(name)
                if name not in store:
                    got = policy.admit(store, entry(name), 1, 1, 1)
                    want = ref.admit(name)
                    assert (got.admitted, got.victim) == want
                assert set(store.entries) == ref.contents()


class TestFrequencyTable:
    def test_counts_accumulate(self):
        table = FrequencyTable(8)
        for _ in range(3):
            table.record(5)
        assert table.count(5) == 3

    def test_missing_counts_as_one(self):
        assert FrequencyTable(8).count(123) == 1

    def test_bounded_with_lru_of_updates(self):
        table = FrequencyTable(2)
        table.record(1)
        table.record(2)
        table.record(1)  # 2 is now the least recently updated
        evicted = table.record(3)
        assert evicted == 2
        assert set(table.counts) == {1, 3}
        assert len(table.counts) <= 2

    def test_zero_capacity_records_nothing(self):
        table = FrequencyTable(0)
        table.record(1)
        assert not table.counts


class TestUc:
    def test_spec_admission_example(self):
        # capacity 2 at a node with degree == max_degree, diameter 4;
        # stored X(freq 5, dist 1), Y(freq 1, dist 1); candidate Z(freq 1, dist 4).
        X, Y, Z = 10, 11, 12
        store = ContentStore(2)
        policy = UcPolicy(cs_capacity=2)
        policy.admit(store, entry(X, hops=1), 3, 3, 4)
        policy.admit(store, entry(Y, hops=1), 3, 3, 4)
        force_counts(policy, {X: 5, Y: 1, Z: 1})
        decision = policy.admit(store, entry(Z, hops=4), 3, 3, 4)
        assert decision == (True, Y)
        assert set(store.entries) == {X, Z}
        # CM values that drove the decision
        assert store.entries[Z].content_metric == pytest.approx(2.2 / 3, abs=1e-12)
        assert store.entries[X].content_metric == pytest.approx(2.25 / 3, abs=1e-12)

    def test_gate_rejects_weak_candidate(self):
        A, B, C = 1, 2, 3
        store = ContentStore(2)
        policy = UcPolicy(cs_capacity=2)
        policy.admit(store, entry(A, hops=3), 2, 4, 8)
        policy.admit(store, entry(B, hops=3), 2, 4, 8)
        force_counts(policy, {A: 6, B: 6, C: 1})
        decision = policy.admit(store, entry(C, hops=1), 2, 4, 8)
        assert decision == (False, None)
        assert set(store.entries) == {A, B}

    def test_access_increments_frequency(self):
        store = ContentStore(4)
        policy = UcPolicy(cs_capacity=4)
        for _ in range(3):
            policy.on_access(store, 5)
        assert policy.frequencies.count(5) == 3

    def test_tie_breaks_by_last_used_then_name(self):
        store = ContentStore(2)
        policy = UcPolicy(cs_capacity=2)
        policy.admit(store, entry(7, hops=2), 1, 1, 4)   # inserted first: lower tick
        policy.admit(store, entry(3, hops=2), 1, 1, 4)
        force_counts(policy, {7: 2, 3: 2, 9: 2})
        decision = policy.admit(store, entry(9, hops=4), 1, 1, 4)
        assert decision == (True, 7)  # equal CM; 7 has the smaller last_used_at

    def test_frequency_scaling_leaves_victim_unchanged(self):
        rng = random.Random(7)
        for scale in (2, 3, 7):
            names = list(range(1, 9))
            hops = {n: rng.randrange(0, 6) for n in names}
            base_counts = {n: rng.randrange(1, 30) for n in names}
            cand = 99
            cand_hops = rng.randrange(0, 6)
            base_counts[cand] = rng.randrange(1, 30)
            decisions = []
            for factor in (1, scale):
                store = ContentStore(len(names))
                policy = UcPolicy(cs_capacity=len(names))
                for n in names:
                    policy.admit(store, entry(n, hops=hops[n]), 2, 3, 5)
                force_counts(policy, {n: c * factor for n, c in base_counts.items()})
                decisions.append(policy.admit(store, entry(cand, hops=cand_hops), 2, 3, 5))
            assert decisions[0] == decisions[1]

    def test_matches_straight_line_reference(self):
        rng = random.Random(123)
        w = UcWeights()
        for _ in range(300):
            capacity = rng.randrange(1, 12)
            diameter = rng.randrange(1, 12)
            max_degree = rng.randrange(1, 8)
            degree = rng.randrange(1, max_degree + 1)
            store = ContentStore(capacity)
            policy = UcPolicy(cs_capacity=capacity)
            stored = []
            for name in rng.sample(range(100), capacity):
                hops = rng.randrange(0, diameter + 3)
                policy.admit(store, entry(name, hops=hops), degree, max_degree, diameter)
                stored.append((name, hops, store.entries[name].last_used_at))
            counts = {name: rng.randrange(1, 40) for name, _, _ in stored}
            cand = 100 + rng.randrange(50)
            if rng.random() < 0.7:
                counts[cand] = rng.randrange(1, 40)
            force_counts(policy, counts)
            cand_hops = rng.randrange(0, diameter + 3)
            got = policy.admit(store, entry(cand, hops=cand_hops), degree, max_degree, diameter)
            want = ref_uc_decision(
                stored,
                (cand, cand_hops),
                lambda n: counts.get(n, 1),
                diameter,
                degree,
                max_degree,
                (w.w_f, w.w_d, w.w_r),
            )
            assert (got.admitted, got.victim) == want

    def test_scan_cache_is_pure_speedup(self):
        # Same trace through a normal policy and through one whose cached scan
        # is discarded before every decision: identical stores and decisions.
        def drive(disable_cache):
            rng = random.Random(99)
            store = ContentStore(6)
            policy = UcPolicy(cs_capacity=6)
            log = []
            for _ in range(4000):
                name = rng.randrange(24)
                if disable_cache:
                    policy._scan_cache = None
                policy.on_access(store, name)
                if rng.random() < 0.5 and name not in store:
                    if disable_cache:
                        policy._scan_cache = None
                    decision = policy.admit(store, entry(name, hops=rng.randrange(0, 6)), 2, 4, 7)
                    log.append((name, decision.admitted, decision.victim))
            return log, list(store.entries)

        assert drive(False) == drive(True)

    def test_zero_capacity_rejects(self):
        store = ContentStore(0)
        policy = UcPolicy(cs_capacity=0)
        assert policy.admit(store, entry(1), 1, 1, 1) == (False, None)


class TestPolicyCommon:
    @pytest.mark.parametrize("kind", list(PolicyKind))
    def test_occupancy_never_exceeds_capacity(self, kind):
        rng = random.Random(kind.value)
        for capacity in (0, 1, 3, 8):
            store = ContentStore(capacity)
            policy = make_policy(kind, capacity)
            for _ in range(2000):
                name = rng.randrange(30)
                policy.on_access(store, name)
                if name not in store:
                    policy.admit(store, entry(name, hops=rng.randrange(5)), 2, 4, 6)
                assert len(store) <= capacity

    @pytest.mark.parametrize("kind", list(PolicyKind))
    def test_deterministic_replay(self, kind):
        def run_trace():
            rng = random.Random(314)
            store = ContentStore(4)
            policy = make_policy(kind, 4)
            log = []
            for _ in range(1500):
                name = rng.randrange(20)
                policy.on_access(store, name)
                if name not in store:
                    log.append(policy.admit(store, entry(name, hops=rng.randrange(4)), 2, 3, 5))
            return log, list(store.entries)

        assert run_trace() == run_trace()

    @pytest.mark.parametrize("kind", list(PolicyKind))
    def test_duplicate_offer_is_noop(self, kind):
        store = ContentStore(2)
        policy = make_policy(kind, 2)
        policy.admit(store, entry(1), 1, 2, 3)
        before = list(store.entries)
        assert policy.admit(store, entry(1), 1, 2, 3) == (False, None)
        assert list(store.entries) == before

    def test_policy_kind_from_string(self):
        assert PolicyKind.from_string("lru") is PolicyKind.LRU
        assert PolicyKind.from_string("UC") is PolicyKind.UC
        with pytest.raises(InvalidParameterError):
            PolicyKind.from_string("LFU")
