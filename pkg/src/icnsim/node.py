"""One router's forwarding state machine: Content Store, PIT, FIB.

An arriving Interest is resolved against the Content Store first (a hit
serves Data immediately), then against the Pending Interest Table (a
duplicate is aggregated and dropped), and finally forwarded toward the
content's producer via the FIB; a router hosting the producer serves
directly instead of forwarding. Returning Data is copied to every interface
recorded in the matching PIT entry, the entry is consumed, and the content
is offered to the cache policy (every on-path router gets the offer).

Hop counters are incremented at send time, so a packet always carries the
value it will have on arrival at its destination. Data served locally (by
the consumer's own router) therefore reports hop count 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import NoRouteError
from .policies import CacheEntry, CachePolicy, ContentStore
from .topology import RoutingTables

CHUNK_SIZE = 1024  # bytes; every content is a single fixed-size chunk

LOCAL = -1  # ingress marker for the router's own consumer/producer application


@dataclass(slots=True)
class Interest:
    name: int
    nonce: int
    hops_traveled: int
    origin_consumer: int
    issue_time: float


@dataclass(slots=True)
class Data:
    name: int
    hops_from_source: int
    chunk_size: int = CHUNK_SIZE


@dataclass(slots=True)
class PitEntry:
    """Aggregation record for one pending name.

    ``neighbor_ifaces`` are the neighbor routers awaiting the Data (no
    duplicates); ``local_issue_times`` carries one entry per locally pending
    consumer request so each request completes or times out exactly once.
    """

    name: int
    created_at: float
    expires_at: float
    neighbor_ifaces: list[int] = field(default_factory=list)
    local_issue_times: list[float] = field(default_factory=list)


class Completion(NamedTuple):
    node: int
    name: int
    hop_count: int
    issue_time: float


class Timeout(NamedTuple):
    node: int
    name: int
    issue_time: float


@dataclass(slots=True)
class Actions:
    """What the engine must do after a node processed one packet."""

    interest_sends: list[tuple[int, Interest]] = field(default_factory=list)
    data_sends: list[tuple[int, Data]] = field(default_factory=list)
    completions: list[Completion] = field(default_factory=list)
    cache_hit: bool = False
    producer_serve: bool = False
    aggregated: bool = False
    unsolicited: bool = False


@dataclass(slots=True)
class ExpiredPit:
    removed_entries: int
    timeouts: list[Timeout]


class NodeState:
    """Mutable per-router state; owned and driven by one simulation instance."""

    __slots__ = (
        "node_id",
        "store",
        "policy",
        "pit",
        "routing",
        "producer_of",
        "pit_lifetime",
        "degree",
        "max_degree",
        "diameter",
    )

    def __init__(
        self,
        node_id: int,
        store: ContentStore,
        policy: CachePolicy,
        routing: RoutingTables,
        producer_of: list[int],
        pit_lifetime: float,
        degree: int,
        max_degree: int,
        diameter: int,
    ):
        self.node_id = node_id
        self.store = store
        self.policy = policy
        self.pit: dict[int, PitEntry] = {}
        self.routing = routing
        self.producer_of = producer_of
        self.pit_lifetime = pit_lifetime
        self.degree = degree
        # CM denominators must stay positive even on degenerate one-node graphs.
        self.max_degree = max(1, max_degree)
        self.diameter = max(1, diameter)

    def fib_next_hop(self, name: int) -> int:
        producer = self.producer_of[name]
        try:
            return self.routing.next_hop(self.node_id, producer)
        except KeyError:
            raise NoRouteError(
                f"node {self.node_id}: no route toward producer {producer} of {name}"
            ) from None


def on_interest(state: NodeState, pkt: Interest, ingress: int, now: float) -> Actions:
    """Process one Interest: CS lookup, PIT aggregation, or FIB forwarding.

    ``ingress`` is the neighbor the packet came from, or LOCAL for a request
    injected by this router's own consumer.
    """
    actions = Actions()
    name = pkt.name
    state.policy.on_access(state.store, name)

    if name in state.store:
        actions.cache_hit = True
        if ingress == LOCAL:
            actions.completions.append(Completion(state.node_id, name, 0, pkt.issue_time))
        else:
            actions.data_sends.append((ingress, Data(name, 1)))
        return actions

    entry = state.pit.get(name)
    if entry is not None:
        actions.aggregated = True
        if ingress == LOCAL:
            entry.local_issue_times.append(pkt.issue_time)
        elif ingress not in entry.neighbor_ifaces:
            entry.neighbor_ifaces.append(ingress)
        return actions

    if state.producer_of[name] == state.node_id:
        actions.producer_serve = True
        if ingress == LOCAL:
            actions.completions.append(Completion(state.node_id, name, 0, pkt.issue_time))
        else:
            actions.data_sends.append((ingress, Data(name, 1)))
        return actions

    entry = PitEntry(name, created_at=now, expires_at=now + state.pit_lifetime)
    if ingress == LOCAL:
        entry.local_issue_times.append(pkt.issue_time)
    else:
        entry.neighbor_ifaces.append(ingress)
    state.pit[name] = entry
    actions.interest_sends.append(
        (
            state.fib_next_hop(name),
            Interest(name, pkt.nonce, pkt.hops_traveled + 1, pkt.origin_consumer, pkt.issue_time),
        )
    )
    return actions


def on_data(state: NodeState, pkt: Data, ingress: int) -> Actions:
    """Satisfy the matching PIT entry and offer the content to the cache.

    Data without a PIT entry is unsolicited and dropped. The cache offer uses
    the hop distance from the serving node to this router; an offer for a
    name already resident is a no-op.
    """
    actions = Actions()
    name = pkt.name
    entry = state.pit.pop(name, None)
    if entry is None:
        actions.unsolicited = True
        return actions

    hops = pkt.hops_from_source
    for neighbor in entry.neighbor_ifaces:
        actions.data_sends.append((neighbor, Data(name, hops + 1)))
    for issue_time in entry.local_issue_times:
        actions.completions.append(Completion(state.node_id, name, hops, issue_time))

    if name not in state.store:
        state.policy.admit(
            state.store,
            CacheEntry(name, hops_from_source=hops),
            state.degree,
            state.max_degree,
            state.diameter,
        )
    return actions


def expire_pit(state: NodeState, now: float) -> ExpiredPit:
    """Drop every PIT entry with expires_at <= now; pending local requests time out."""
    expired_names = [n for n, e in state.pit.items() if e.expires_at <= now]
    timeouts: list[Timeout] = []
    for name in expired_names:
        entry = state.pit.pop(name)
        timeouts.extend(
            Timeout(state.node_id, name, t) for t in entry.local_issue_times
        )
    return ExpiredPit(removed_entries=len(expired_names), timeouts=timeouts)
