"""Run counters, headline metrics, confidence intervals, CSV output.

Two hit metrics are reported side by side because request-volume
normalizations differ in the literature: the network aggregate (total cache
hits over resolved requests) and the per-router form (each router's hits
over the distinct names it saw, averaged across routers). Producer serves
never count as cache hits. Hop count of a locally served request is 0.
"""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from scipy import stats as _scipy_stats

from .errors import InsufficientSamplesError, NoCompletedRequestsError


@dataclass
class RunCounters:
    """Raw per-run accounting.

    Window counters cover requests issued at or after the warmup cutoff;
    ``*_total`` counters cover the whole run and feed the conservation check
    requests = completions + timeouts + in-flight.
    """

    node_count: int
    interests_received: list[int] = field(default_factory=list)
    cache_hits: list[int] = field(default_factory=list)
    unique_names: list[set[int]] = field(default_factory=list)
    requests_issued_total: int = 0
    requests_issued_window: int = 0
    completions_total: int = 0
    completions_window: int = 0
    timeouts_total: int = 0
    timeouts_window: int = 0
    producer_serves: int = 0
    sum_hop_counts: int = 0
    unsolicited: int = 0
    pit_expired: int = 0

    def __post_init__(self) -> None:
        if not self.interests_received:
            self.interests_received = [0] * self.node_count
            self.cache_hits = [0] * self.node_count
            self.unique_names = [set() for _ in range(self.node_count)]

    @property
    def in_flight_total(self) -> int:
        return self.requests_issued_total - self.completions_total - self.timeouts_total

    @property
    def resolved_window(self) -> int:
        return self.completions_window + self.timeouts_window


def aggregate_hit_ratio(c: RunCounters) -> float:
    """Network-wide cache hits over resolved in-window requests.

    Requests still in flight at the cutoff are excluded from the denominator;
    producer serves are not hits.
    """
    if c.completions_window <= 0:
        raise NoCompletedRequestsError("no completed requests in the metrics window")
    return sum(c.cache_hits) / c.resolved_window


def per_router_normalized_hits(c: RunCounters) -> float:
    """Mean over routers of cache hits per distinct name requested there.

    Routers that saw no request in the window are skipped; repeat hits on one
    popular name can push a router's value above 1.
    """
    values = [
        hits / len(names)
        for hits, names in zip(c.cache_hits, c.unique_names)
        if names
    ]
    return statistics.fmean(values) if values else 0.0


def avg_hop_count(c: RunCounters) -> float:
    """Mean hops from the consumer's router to the node that served it."""
    if c.completions_window <= 0:
        raise NoCompletedRequestsError("no completed requests in the metrics window")
    return c.sum_hop_counts / c.completions_window


def confidence_interval(
    samples: Iterable[float], level: float = 0.95
) -> tuple[float, float]:
    """Student-t interval: (mean, half_width) at the given two-sided level."""
    xs = list(samples)
    n = len(xs)
    if n < 2:
        raise InsufficientSamplesError(f"need >= 2 samples, got {n}")
    mean = statistics.fmean(xs)
    s = statistics.stdev(xs)
    t = float(_scipy_stats.t.ppf(0.5 + level / 2.0, n - 1))
    return mean, t * s / math.sqrt(n)


@dataclass(frozen=True)
class MetricsReport:
    """Metrics of one replication plus the configuration that produced it."""

    topology: str
    policy: str
    cache_pct: float
    alpha: float
    q: float
    catalog_size: int
    seed: int
    hit_ratio: float
    per_router_hit: float
    avg_hops: float
    timeouts: int
    completions: int
    requests_issued: int
    producer_serves: int

    def cell_key(self) -> tuple:
        return (self.topology, self.policy, self.cache_pct, self.alpha, self.q, self.catalog_size)


@dataclass(frozen=True)
class CellSummary:
    """Replication statistics for one sweep cell (mean and 95% CI half-width)."""

    topology: str
    policy: str
    cache_pct: float
    alpha: float
    q: float
    catalog_size: int
    replications: int
    hit_ratio_mean: float
    hit_ratio_ci: float
    per_router_hit_mean: float
    per_router_hit_ci: float
    hop_mean: float
    hop_ci: float
    timeouts_mean: float


def _mean_ci(values: list[float]) -> tuple[float, float]:
    # A single replication has no spread information; report half-width 0.
    if len(values) == 1:
        return values[0], 0.0
    return confidence_interval(values)


def summarize(reports: Iterable[MetricsReport]) -> list[CellSummary]:
    """Collapse per-replication reports into one summary per sweep cell."""
    groups: dict[tuple, list[MetricsReport]] = {}
    for r in reports:
        groups.setdefault(r.cell_key(), []).append(r)
    out = []
    for key in sorted(groups):
        rs = groups[key]
        hit_m, hit_c = _mean_ci([r.hit_ratio for r in rs])
        prh_m, prh_c = _mean_ci([r.per_router_hit for r in rs])
        hop_m, hop_c = _mean_ci([r.avg_hops for r in rs])
        out.append(
            CellSummary(
                topology=key[0],
                policy=key[1],
                cache_pct=key[2],
                alpha=key[3],
                q=key[4],
                catalog_size=key[5],
                replications=len(rs),
                hit_ratio_mean=hit_m,
                hit_ratio_ci=hit_c,
                per_router_hit_mean=prh_m,
                per_router_hit_ci=prh_c,
                hop_mean=hop_m,
                hop_ci=hop_c,
                timeouts_mean=statistics.fmean([r.timeouts for r in rs]),
            )
        )
    return out


CSV_COLUMNS = [
    "topology",
    "policy",
    "cache_pct",
    "alpha",
    "q",
    "catalog_size",
    "replications",
    "hit_ratio_mean",
    "hit_ratio_ci",
    "per_router_hit_mean",
    "per_router_hit_ci",
    "hop_mean",
    "hop_ci",
    "timeouts_mean",
]

RUNS_CSV_COLUMNS = [
    "topology",
    "policy",
    "cache_pct",
    "alpha",
    "q",
    "catalog_size",
    "seed",
    "hit_ratio",
    "per_router_hit",
    "avg_hops",
    "timeouts",
    "completions",
    "requests_issued",
    "producer_serves",
]


def _fmt(value) -> str:
    if isinstance(value, bool):
        raise TypeError("unexpected bool in CSV payload")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _open_dest(destination) -> tuple[TextIO, bool]:
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", encoding="utf-8", newline=""), True


def write_csv(reports: list[MetricsReport], destination) -> None:
    """Write one aggregated row per sweep cell to a path or file object.

    Rows are sorted by cell key; numbers use up to 6 significant digits so a
    parsed file reproduces the written values exactly. LF line endings.
    """
    if not reports:
        raise NoCompletedRequestsError("write_csv needs at least one report")
    fh, should_close = _open_dest(destination)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in summarize(reports):
            writer.writerow(_fmt(getattr(s, col)) for col in CSV_COLUMNS)
    finally:
        if should_close:
            fh.close()


def write_runs_csv(reports: list[MetricsReport], destination) -> None:
    """Long-format companion file: one row per replication, plot-ready."""
    if not reports:
        raise NoCompletedRequestsError("write_runs_csv needs at least one report")
    fh, should_close = _open_dest(destination)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_CSV_COLUMNS)
        for r in sorted(reports, key=lambda r: (r.cell_key(), r.seed)):
            writer.writerow(_fmt(getattr(r, col)) for col in RUNS_CSV_COLUMNS)
    finally:
        if should_close:
            fh.close()


def csv_text(reports: list[MetricsReport]) -> str:
    """The aggregated CSV as a string (used for byte-determinism checks)."""
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()
