"""Sweep expansion and execution.

Seed discipline: replication i always uses workload seed base_seed + i, so
every policy / cache-size / popularity cell of one replication sees the
identical request sequence (paired comparison). Topology generation and
producer placement draw from seeds hashed out of (base_seed, purpose,
realization) so their streams never alias the workload stream.

Cells may execute in parallel; results are merged in cell order, so output
never depends on completion order.
"""
from __future__ import annotations

import hashlib
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import ExperimentConfig, TopologySpec, capacity_for
from .engine import assign_producers, build_instance, run
from .errors import ConfigError, SimError
from .metrics import MetricsReport
from .policies import PolicyKind
from .topology import Graph, compute_routing, generate_ws, load_topology
from .workload import MZipfParams, RequestStream

log = logging.getLogger(__name__)


class SweepExecutionError(SimError):
    """One or more sweep cells failed; carries (cell label, message) pairs."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        lines = "; ".join(f"{label}: {message}" for label, message in failures)
        super().__init__(f"{len(failures)} cell(s) failed: {lines}")


def derive_seed(base_seed: int, purpose: str, index: int = 0) -> int:
    """Stable 64-bit sub-seed for a named stream."""
    digest = hashlib.blake2b(
        f"{base_seed}/{purpose}/{index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class Cell:
    """One sweep point: everything but the replication seed."""

    topology_label: str
    realization: int  # 0-based topology realization index
    policy: PolicyKind
    cache_pct: float
    q: float
    alpha: float

    def label(self) -> str:
        return (
            f"{self.topology_label}/{self.policy.value}"
            f"/cache{self.cache_pct:g}%/q{self.q:g}a{self.alpha:g}"
        )


def _build_graph(cfg: ExperimentConfig, realization: int) -> Graph:
    spec: TopologySpec = cfg.topology
    if spec.kind == "ws":
        seed = derive_seed(cfg.base_seed, "topology", realization)
        graph = generate_ws(spec.n, spec.k, spec.p, seed)
    else:
        with open(spec.path, "r", encoding="utf-8") as fh:
            graph = load_topology(fh.read())
    if graph.link_delay != cfg.link_delay:
        graph = Graph(graph.node_count, graph.edges, cfg.link_delay)
    return graph


def expand_cells(cfg: ExperimentConfig, topology_realizations: int = 1) -> list[Cell]:
    if topology_realizations < 1:
        raise ConfigError("topology realizations must be >= 1")
    if topology_realizations > 1 and cfg.topology.kind != "ws":
        raise ConfigError("multiple topology realizations need a generated (ws) topology")
    base = cfg.topology.label()
    cells = []
    for j in range(topology_realizations):
        label = base if topology_realizations == 1 else f"{base}_topo{j + 1}"
        for q, alpha in cfg.mzipf_sets:
            for pct in cfg.cache_pct_sweep:
                for policy in cfg.policies:
                    cells.append(
                        Cell(
                            topology_label=label,
                            realization=j,
                            policy=policy,
                            cache_pct=pct,
                            q=q,
                            alpha=alpha,
                        )
                    )
    return cells


def run_cell(cfg: ExperimentConfig, cell: Cell) -> list[MetricsReport]:
    """All replications of one cell, in replication order."""
    graph = _build_graph(cfg, cell.realization)
    placement_rng = random.Random(derive_seed(cfg.base_seed, "placement", cell.realization))
    single = cfg.producer_node if cfg.producer_placement == "single" else None
    producer_of = assign_producers(
        graph.node_count, cfg.catalog_size, placement_rng, single_node=single
    )
    routing = compute_routing(graph, set(producer_of[1:]))
    capacity = capacity_for(cell.cache_pct, cfg.catalog_size)
    params = MZipfParams(alpha=cell.alpha, q=cell.q, catalog_size=cfg.catalog_size)
    stream = RequestStream(
        params=params,
        consumer_count=graph.node_count,
        aggregate_rate=cfg.aggregate_rate,
    )

    reports = []
    for i in range(cfg.replications):
        seed = cfg.base_seed + i
        instance = build_instance(
            graph=graph,
            policy_kind=cell.policy,
            cs_capacity=capacity,
            stream=stream,
            workload_seed=seed,
            producer_of=producer_of,
            routing=routing,
            pit_lifetime=cfg.pit_lifetime,
            uc_weights=cfg.uc_weights,
            echo={
                "topology": cell.topology_label,
                "policy": cell.policy.value,
                "cache_pct": cell.cache_pct,
                "alpha": cell.alpha,
                "q": cell.q,
                "catalog_size": cfg.catalog_size,
                "seed": seed,
            },
        )
        reports.append(run(instance, cfg.duration, cfg.warmup))
    return reports


def expand_and_run(
    cfg: ExperimentConfig,
    parallel: int = 1,
    topology_realizations: int = 1,
) -> list[MetricsReport]:
    """Execute the full sweep; returns per-replication reports in cell order.

    Raises :class:`SweepExecutionError` enumerating every failed cell if any
    cell raises.
    """
    cells = expand_cells(cfg, topology_realizations)
    results: list[list[MetricsReport] | None] = [None] * len(cells)
    failures: list[tuple[str, str]] = []

    if parallel <= 1:
        for idx, cell in enumerate(cells):
            try:
                results[idx] = run_cell(cfg, cell)
                log.info("cell %s done (%d/%d)", cell.label(), idx + 1, len(cells))
            except Exception as exc:  # noqa: BLE001 - every cell gets reported
                failures.append((cell.label(), str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = {
                pool.submit(run_cell, cfg, cell): idx for idx, cell in enumerate(cells)
            }
            for future, idx in futures.items():
                try:
                    results[idx] = future.result()
                    log.info("cell %s done", cells[idx].label())
                except Exception as exc:  # noqa: BLE001
                    failures.append((cells[idx].label(), str(exc)))
        failures.sort(key=lambda f: f[0])

    if failures:
        raise SweepExecutionError(failures)
    return [report for cell_reports in results for report in cell_reports]  # type: ignore[union-attr]
