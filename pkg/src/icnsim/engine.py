"""Deterministic discrete-event core driving all routers of one simulation.

A single seeded RNG feeds request generation in a fixed draw order, and all
events are processed in (fire_time, sequence) order, so a run is a pure
function of its configuration and seed. One instance is strictly
single-threaded; replications parallelize across instances.

Store-and-forward with a uniform per-link delay, no loss, no bandwidth
model: hop count doubles as the latency measure.
"""
from __future__ import annotations

import itertools
import random
from heapq import heappop, heappush

from . import metrics as _metrics
from .errors import EventQueueOverflowError, InvalidParameterError, NoSuchLinkError
from .metrics import MetricsReport, RunCounters
from .node import (
    LOCAL,
    Completion,
    Data,
    Interest,
    NodeState,
    expire_pit,
    on_data,
    on_interest,
)
from .policies import ContentStore, PolicyKind, UcWeights, make_policy
from .topology import Graph, RoutingTables, compute_routing
from .workload import RequestStream, next_request

# Event kinds; queue entries are (fire_time, sequence, kind, node, payload, ingress).
REQUEST_GENERATION = 0
INTEREST_ARRIVAL = 1
DATA_ARRIVAL = 2
PIT_SWEEP = 3

PIT_SWEEP_INTERVAL = 1.0  # seconds between batch PIT expiry passes
DEFAULT_PIT_LIFETIME = 2.0
DEFAULT_QUEUE_LIMIT = 5_000_000


class SimulationInstance:
    """Everything one run owns: topology, routers, workload, queue, counters."""

    __slots__ = (
        "graph",
        "routing",
        "nodes",
        "stream",
        "rng",
        "producer_of",
        "clock",
        "heap",
        "seq",
        "counters",
        "link_set",
        "echo",
        "queue_limit",
        "record_completions",
        "completion_log",
    )

    def __init__(
        self,
        graph: Graph,
        routing: RoutingTables,
        nodes: list[NodeState],
        stream: RequestStream,
        rng: random.Random,
        producer_of: list[int],
        echo: dict,
        queue_limit: int = DEFAULT_QUEUE_LIMIT,
        record_completions: bool = False,
    ):
        self.graph = graph
        self.routing = routing
        self.nodes = nodes
        self.stream = stream
        self.rng = rng
        self.producer_of = producer_of
        self.clock = 0.0
        self.heap: list = []
        self.seq = itertools.count()
        self.counters = RunCounters(node_count=graph.node_count)
        self.link_set = graph.edges
        self.echo = echo
        self.queue_limit = queue_limit
        self.record_completions = record_completions
        self.completion_log: list[Completion] = []


def assign_producers(
    node_count: int, catalog_size: int, rng: random.Random, single_node: int | None = None
) -> list[int]:
    """Map each content rank to its producer router (index 0 unused).

    Default placement draws one uniform router per content; ``single_node``
    pins every content to that router instead.
    """
    if single_node is not None:
        if not 0 <= single_node < node_count:
            raise InvalidParameterError(f"producer node {single_node} out of range")
        return [-1] + [single_node] * catalog_size
    return [-1] + [rng.randrange(node_count) for _ in range(catalog_size)]


def build_instance(
    graph: Graph,
    policy_kind: PolicyKind,
    cs_capacity: int,
    stream: RequestStream,
    workload_seed: int,
    producer_of: list[int],
    routing: RoutingTables | None = None,
    pit_lifetime: float = DEFAULT_PIT_LIFETIME,
    uc_weights: UcWeights | None = None,
    echo: dict | None = None,
    record_completions: bool = False,
) -> SimulationInstance:
    """Wire routers, routing tables, and workload into a runnable instance.

    ``cs_capacity`` is the per-router Content Store size in entries;
    0 disables caching entirely (a test hook, not reachable from configs).
    """
    if routing is None:
        routing = compute_routing(graph, set(producer_of[1:]))
    adjacency = graph.adjacency()
    degrees = [len(a) for a in adjacency]
    max_degree = max(degrees) if degrees else 0
    nodes = [
        NodeState(
            node_id=v,
            store=ContentStore(cs_capacity),
            policy=make_policy(policy_kind, cs_capacity, uc_weights),
            routing=routing,
            producer_of=producer_of,
            pit_lifetime=pit_lifetime,
            degree=degrees[v],
            max_degree=max_degree,
            diameter=routing.diameter,
        )
        for v in range(graph.node_count)
    ]
    base_echo = {
        "topology": "custom",
        "policy": policy_kind.value,
        "cache_pct": 0.0,
        "alpha": stream.params.alpha,
        "q": stream.params.q,
        "catalog_size": stream.params.catalog_size,
        "seed": workload_seed,
    }
    if echo:
        base_echo.update(echo)
    return SimulationInstance(
        graph=graph,
        routing=routing,
        nodes=nodes,
        stream=stream,
        rng=random.Random(workload_seed),
        producer_of=producer_of,
        echo=base_echo,
        record_completions=record_completions,
    )


def transmit(instance: SimulationInstance, from_node: int, to_node: int, packet) -> tuple:
    """Schedule a packet's arrival event; from_node == to_node is the
    zero-delay local application interface."""
    if from_node == to_node:
        delay = 0.0
        ingress = LOCAL
    else:
        edge = (from_node, to_node) if from_node < to_node else (to_node, from_node)
        if edge not in instance.link_set:
            raise NoSuchLinkError(f"no link between {from_node} and {to_node}")
        delay = instance.graph.link_delay
        ingress = from_node
    kind = INTEREST_ARRIVAL if isinstance(packet, Interest) else DATA_ARRIVAL
    event = (instance.clock + delay, next(instance.seq), kind, to_node, packet, ingress)
    heappush(instance.heap, event)
    return event


def run(instance: SimulationInstance, duration: float, warmup: float = 0.0) -> MetricsReport:
    """Drive the instance until the clock passes ``duration``.

    Metrics cover requests issued at or after ``warmup``; requests unresolved
    at the cutoff stay out of the ratio and hop statistics. Identical
    (configuration, seed) yields an identical report.
    """
    if not duration > warmup >= 0.0:
        raise InvalidParameterError(
            f"need duration > warmup >= 0, got duration={duration}, warmup={warmup}"
        )

    heap = instance.heap
    seq = instance.seq
    nodes = instance.nodes
    counters = instance.counters
    rng = instance.rng
    stream = instance.stream
    link_delay = instance.graph.link_delay
    queue_limit = instance.queue_limit
    log = instance.completion_log if instance.record_completions else None

    t0, consumer0, rank0 = next_request(stream, rng, 0.0)
    if t0 <= duration:
        heappush(heap, (t0, next(seq), REQUEST_GENERATION, consumer0, rank0, 0))
    if PIT_SWEEP_INTERVAL <= duration:
        heappush(heap, (PIT_SWEEP_INTERVAL, next(seq), PIT_SWEEP, 0, None, 0))

    while heap and heap[0][0] <= duration:
        t, _, kind, node, payload, ingress = heappop(heap)
        instance.clock = t

        if kind == INTEREST_ARRIVAL:
            in_window = payload.issue_time >= warmup
            if in_window:
                counters.interests_received[node] += 1
                counters.unique_names[node].add(payload.name)
            acts = on_interest(nodes[node], payload, ingress, t)
            if in_window:
                if acts.cache_hit:
                    counters.cache_hits[node] += 1
                elif acts.producer_serve:
                    counters.producer_serves += 1
        elif kind == DATA_ARRIVAL:
            acts = on_data(nodes[node], payload, ingress)
            if acts.unsolicited:
                counters.unsolicited += 1
        elif kind == REQUEST_GENERATION:
            counters.requests_issued_total += 1
            if t >= warmup:
                counters.requests_issued_window += 1
            pkt = Interest(payload, rng.getrandbits(64), 0, node, t)
            heappush(heap, (t, next(seq), INTEREST_ARRIVAL, node, pkt, LOCAL))
            nt, nc, nr = next_request(stream, rng, t)
            if nt <= duration:
                heappush(heap, (nt, next(seq), REQUEST_GENERATION, nc, nr, 0))
            if len(heap) > queue_limit:
                raise EventQueueOverflowError(f"event queue exceeded {queue_limit} entries")
            continue
        else:  # PIT_SWEEP
            for st in nodes:
                if st.pit:
                    expired = expire_pit(st, t)
                    counters.pit_expired += expired.removed_entries
                    for tout in expired.timeouts:
                        counters.timeouts_total += 1
                        if tout.issue_time >= warmup:
                            counters.timeouts_window += 1
            nt = t + PIT_SWEEP_INTERVAL
            if nt <= duration:
                heappush(heap, (nt, next(seq), PIT_SWEEP, 0, None, 0))
            continue

        for to, ipkt in acts.interest_sends:
            heappush(heap, (t + link_delay, next(seq), INTEREST_ARRIVAL, to, ipkt, node))
        for to, dpkt in acts.data_sends:
            heappush(heap, (t + link_delay, next(seq), DATA_ARRIVAL, to, dpkt, node))
        for comp in acts.completions:
            counters.completions_total += 1
            if comp.issue_time >= warmup:
                counters.completions_window += 1
                counters.sum_hop_counts += comp.hop_count
            if log is not None:
                log.append(comp)
        if len(heap) > queue_limit:
            raise EventQueueOverflowError(f"event queue exceeded {queue_limit} entries")

    echo = instance.echo
    return MetricsReport(
        topology=echo["topology"],
        policy=echo["policy"],
        cache_pct=echo["cache_pct"],
        alpha=echo["alpha"],
        q=echo["q"],
        catalog_size=echo["catalog_size"],
        seed=echo["seed"],
        hit_ratio=_metrics.aggregate_hit_ratio(counters),
        per_router_hit=_metrics.per_router_normalized_hits(counters),
        avg_hops=_metrics.avg_hop_count(counters),
        timeouts=counters.timeouts_window,
        completions=counters.completions_window,
        requests_issued=counters.requests_issued_window,
        producer_serves=counters.producer_serves,
    )
