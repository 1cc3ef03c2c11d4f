import csv
import io
import math

import pytest

from icnsim import (
    MetricsReport,
    MZipfParams,
    PolicyKind,
    RequestStream,
    RunCounters,
    aggregate_hit_ratio,
    avg_hop_count,
    build_instance,
    confidence_interval,
    per_router_normalized_hits,
    run,
    summarize,
    write_csv,
    write_runs_csv,
)
from icnsim.errors import (
    InsufficientSamplesError,
    NoCompletedRequestsError,
)
from icnsim.metrics import CSV_COLUMNS, RUNS_CSV_COLUMNS
from icnsim.topology import Graph


def counters(node_count=3, **overrides):
    c = RunCounters(node_count=node_count)
    for key, value in overrides.items():
        setattr(c, key, value)
    return c


class TestHitRatio:
    def test_basic_ratio(self):
        c = counters(
            cache_hits=[30, 10, 0],
            completions_window=100,
            requests_issued_window=100,
        )
        assert aggregate_hit_ratio(c) == pytest.approx(0.40)

    def test_zero_capacity_means_zero(self):
        c = counters(cache_hits=[0, 0, 0], completions_window=50)
        assert aggregate_hit_ratio(c) == 0.0

    def test_no_completions_is_an_error(self):
        with pytest.raises(NoCompletedRequestsError):
            aggregate_hit_ratio(counters())

    def test_timeouts_count_as_resolved(self):
        c = counters(cache_hits=[10, 0, 0], completions_window=40, timeouts_window=10)
        assert aggregate_hit_ratio(c) == pytest.approx(0.20)

    def test_producer_serves_excluded_single_node(self):
        # one router hosting the producer: repeat requests never become cache
        # hits because the producer application answers before the store
        graph = Graph(1, frozenset())
        stream = RequestStream(
            MZipfParams(1.0, 0.0, 1), consumer_count=1, aggregate_rate=100.0
        )
        inst = build_instance(
            graph, PolicyKind.LRU, 1, stream, workload_seed=3, producer_of=[-1, 0]
        )
        report = run(inst, duration=0.5, warmup=0.0)
        assert inst.counters.requests_issued_total >= 10
        assert report.hit_ratio == 0.0
        assert report.producer_serves == inst.counters.completions_window
        assert report.avg_hops == 0.0


class TestHopCount:
    def test_all_local(self):
        c = counters(completions_window=10, sum_hop_counts=0)
        assert avg_hop_count(c) == 0.0

    def test_no_caching_path_distance(self):
        c = counters(completions_window=5, sum_hop_counts=10)
        assert avg_hop_count(c) == pytest.approx(2.0)

    def test_mean_of_two_and_zero(self):
        c = counters(completions_window=2, sum_hop_counts=2)
        assert avg_hop_count(c) == pytest.approx(1.0)

    def test_requires_completions(self):
        with pytest.raises(NoCompletedRequestsError):
            avg_hop_count(counters())


class TestPerRouterHits:
    def test_mean_over_active_routers(self):
        c = counters(
            cache_hits=[4, 0, 6],
            unique_names=[{1, 2}, set(), {1, 2, 3}],
        )
        assert per_router_normalized_hits(c) == pytest.approx((4 / 2 + 6 / 3) / 2)

    def test_no_active_routers(self):
        assert per_router_normalized_hits(counters()) == 0.0


class TestConfidenceInterval:
    def test_equal_samples_zero_width(self):
        mean, half = confidence_interval([2.5] * 6)
        assert mean == pytest.approx(2.5)
        assert half == 0.0

    def test_known_value(self):
        mean, half = confidence_interval([1, 2, 3, 4, 5])
        assert mean == pytest.approx(3.0)
        assert half == pytest.approx(2.776445 * math.sqrt(2.5) / math.sqrt(5), abs=1e-4)
        assert half == pytest.approx(1.9634, abs=1e-3)

    def test_single_sample_rejected(self):
        with pytest.raises(InsufficientSamplesError):
            confidence_interval([1.0])

    def test_level_changes_width(self):
        _, h95 = confidence_interval([1, 2, 3, 4, 5], level=0.95)
        _, h99 = confidence_interval([1, 2, 3, 4, 5], level=0.99)
        assert h99 > h95


def report(seed=1, policy="LRU", cache_pct=10.0, hit=0.5, hops=3.0, **kw):
    return MetricsReport(
        topology=kw.get("topology", "ws_n100_k2_p0.1"),
        policy=policy,
        cache_pct=cache_pct,
        alpha=kw.get("alpha", 0.7),
        q=kw.get("q", 0.7),
        catalog_size=kw.get("catalog_size", 1000),
        seed=seed,
        hit_ratio=hit,
        per_router_hit=kw.get("per_router_hit", 1.1),
        avg_hops=hops,
        timeouts=kw.get("timeouts", 0),
        completions=kw.get("completions", 1000),
        requests_issued=kw.get("requests_issued", 1000),
        producer_serves=kw.get("producer_serves", 10),
    )


class TestCsvOutput:
    def test_single_report_single_row(self):
        buf = io.StringIO()
        write_csv([report()], buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2

    def test_replications_collapse_to_one_row(self):
        reports = [report(seed=s, hit=0.5 + 0.01 * s) for s in range(5)]
        buf = io.StringIO()
        write_csv(reports, buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert len(rows) == 1
        assert rows[0]["replications"] == "5"
        assert float(rows[0]["hit_ratio_mean"]) == pytest.approx(0.52)
        assert float(rows[0]["hit_ratio_ci"]) > 0

    def test_empty_reports_rejected(self):
        with pytest.raises(NoCompletedRequestsError):
            write_csv([], io.StringIO())

    def test_round_trip_recovers_values(self):
        reports = [
            report(seed=s, policy=p, hit=0.123456789 + s / 97)
            for p in ("FIFO", "UC")
            for s in range(3)
        ]
        buf = io.StringIO()
        write_csv(reports, buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        summaries = {s.policy: s for s in summarize(reports)}
        for row in rows:
            want = summaries[row["policy"]]
            assert float(row["hit_ratio_mean"]) == float(f"{want.hit_ratio_mean:.6g}")
            assert float(row["hop_mean"]) == float(f"{want.hop_mean:.6g}")
            assert int(row["catalog_size"]) == want.catalog_size

    def test_rows_sorted_by_cell_key(self):
        reports = [
            report(policy="UC", cache_pct=5.0),
            report(policy="FIFO", cache_pct=10.0),
            report(policy="FIFO", cache_pct=2.0),
        ]
        buf = io.StringIO()
        write_csv(reports, buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        keys = [(r["policy"], float(r["cache_pct"])) for r in rows]
        assert keys == sorted(keys)

    def test_lf_line_endings(self):
        buf = io.StringIO()
        write_csv([report()], buf)
        assert "\r" not in buf.getvalue()

    def test_runs_csv_one_row_per_replication(self):
        reports = [report(seed=s) for s in range(4)]
        buf = io.StringIO()
        write_runs_csv(reports, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(RUNS_CSV_COLUMNS)
        assert len(lines) == 5

    def test_writes_to_path(self, tmp_path):
        dest = tmp_path / "out.csv"
        write_csv([report()], str(dest))
        assert dest.read_text().startswith("topology,")


class TestSummarize:
    def test_groups_by_cell(self):
        reports = [report(seed=s, policy=p) for p in ("FIFO", "LRU") for s in range(3)]
        cells = summarize(reports)
        assert [c.policy for c in cells] == ["FIFO", "LRU"]
        assert all(c.replications == 3 for c in cells)

    def test_single_replication_has_zero_ci(self):
        (cell,) = summarize([report()])
        assert cell.hit_ratio_ci == 0.0
        assert cell.replications == 1
