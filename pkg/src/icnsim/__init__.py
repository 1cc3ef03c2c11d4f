"""icnsim: deterministic cache-policy experiments on NDN-style networks.

Build a topology (generated small-world or loaded from a file), attach a
replacement policy (FIFO, LRU, or the content-metric UC policy) to every
router's Content Store, replay a Mandelbrot-Zipf request workload through
the Interest/Data forwarding pipeline, and report normalized cache hits and
average hop counts with confidence intervals across replications.
"""

from . import errors
from .config import ExperimentConfig, TopologySpec, capacity_for, parse_config
from .engine import (
    SimulationInstance,
    assign_producers,
    build_instance,
    run,
    transmit,
)
from .metrics import (
    CellSummary,
    MetricsReport,
    RunCounters,
    aggregate_hit_ratio,
    avg_hop_count,
    confidence_interval,
    per_router_normalized_hits,
    summarize,
    write_csv,
    write_runs_csv,
)
from .node import (
    LOCAL,
    Actions,
    Completion,
    Data,
    Interest,
    NodeState,
    PitEntry,
    expire_pit,
    on_data,
    on_interest,
)
from .policies import (
    AdmissionDecision,
    CacheEntry,
    CachePolicy,
    ContentStore,
    FifoPolicy,
    FrequencyTable,
    LruPolicy,
    PolicyKind,
    UcPolicy,
    UcWeights,
    content_metric,
    make_policy,
)
from .runner import Cell, derive_seed, expand_and_run, expand_cells, run_cell
from .topology import (
    Graph,
    RoutingTables,
    compute_routing,
    generate_ws,
    load_topology,
    serialize_topology,
)
from .workload import (
    MZipfParams,
    RequestStream,
    mzipf_pmf,
    mzipf_pmf_array,
    next_request,
    sample_rank,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "ExperimentConfig",
    "TopologySpec",
    "capacity_for",
    "parse_config",
    "SimulationInstance",
    "assign_producers",
    "build_instance",
    "run",
    "transmit",
    "CellSummary",
    "MetricsReport",
    "RunCounters",
    "aggregate_hit_ratio",
    "avg_hop_count",
    "confidence_interval",
    "per_router_normalized_hits",
    "summarize",
    "write_csv",
    "write_runs_csv",
    "LOCAL",
    "Actions",
    "Completion",
    "Data",
    "Interest",
    "NodeState",
    "PitEntry",
    "expire_pit",
    "on_data",
    "on_interest",
    "AdmissionDecision",
    "CacheEntry",
    "CachePolicy",
    "ContentStore",
    "FifoPolicy",
    "FrequencyTable",
    "LruPolicy",
    "PolicyKind",
    "UcPolicy",
    "UcWeights",
    "content_metric",
    "make_policy",
    "Cell",
    "derive_seed",
    "expand_and_run",
    "expand_cells",
    "run_cell",
    "Graph",
    "RoutingTables",
    "compute_routing",
    "generate_ws",
    "load_topology",
    "serialize_topology",
    "MZipfParams",
    "RequestStream",
    "mzipf_pmf",
    "mzipf_pmf_array",
    "next_request",
    "sample_rank",
]
