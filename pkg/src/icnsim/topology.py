"""Router-level topologies: small-world generation, file loading, routing tables.

Graphs are undirected, unweighted (uniform link delay) and must be connected
before they can drive a simulation. Routing tables are minimum-hop next-hop
maps with deterministic smallest-id tie-breaking, computed by BFS from each
destination.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    EmptyProducerSetError,
    GenerationFailureError,
    InvalidParameterError,
    SelfLoopError,
    TopologyParseError,
)

DEFAULT_LINK_DELAY = 0.010  # seconds, uniform across links

# How many times generate_ws perturbs the seed (+1 each try) looking for a
# connected rewiring before giving up.
MAX_CONNECTIVITY_RETRIES = 16


@dataclass(frozen=True)
class Graph:
    """Immutable router-level topology.

    Nodes are 0..node_count-1; edges are unordered pairs stored as sorted
    tuples. All links share one propagation delay.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]
    link_delay: float = DEFAULT_LINK_DELAY

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists, each sorted ascending."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for lst in adj:
            lst.sort()
        return adj

    def degree(self, node: int) -> int:
        return sum(1 for e in self.edges if node in e)

    def is_connected(self) -> bool:
        return _is_connected(self.node_count, self.adjacency())


@dataclass(frozen=True)
class RoutingTables:
    """Minimum-hop forwarding state for a set of producer destinations.

    ``distance`` is defined for every node pair (it also yields the graph
    diameter); ``next_hop`` columns exist only for producer destinations.
    """

    producers: frozenset[int]
    diameter: int
    _dist: list[list[int]] = field(repr=False)
    _next: dict[int, list[int]] = field(repr=False)

    def distance(self, node: int, target: int) -> int:
        return self._dist[node][target]

    def next_hop(self, node: int, producer: int) -> int:
        """Neighbor of ``node`` on a shortest path toward ``producer``."""
        return self._next[producer][node]

    def next_hop_column(self, producer: int) -> list[int]:
        return self._next[producer]


def _is_connected(n: int, adj: list[list[int]]) -> bool:
    if n <= 1:
        return True
    seen = bytearray(n)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                queue.append(v)
    return count == n


def _ring_lattice_edges(n: int, k: int) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            edges.add((i, j) if i < j else (j, i))
    return edges


def _rewire_once(n: int, k: int, p: float, seed: int) -> set[tuple[int, int]]:
    rng = random.Random(seed)
    edges = _ring_lattice_edges(n, k)
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    # Lattice edges are visited in ascending (i, j) order; the far (larger-id)
    # endpoint is the one replaced. Rewired-in edges are not revisited.
    for i, j in sorted(edges):
        if rng.random() >= p:
            continue
        candidates = [m for m in range(n) if m != i and m not in adj[i]]
        if not candidates:
            continue  # node already adjacent to everyone; keep the edge
        m = candidates[rng.randrange(len(candidates))]
        edges.remove((i, j))
        adj[i].discard(j)
        adj[j].discard(i)
        edges.add((i, m) if i < m else (m, i))
        adj[i].add(m)
        adj[m].add(i)
    return edges


def generate_ws(n: int, k: int, p: float, seed: int) -> Graph:
    """Generate a Watts-Strogatz small-world graph WS(n, k, p).

    Starts from the ring lattice where each node links to its k/2 nearest
    neighbors per side (odd k behaves like k-1), then replaces each lattice
    edge with probability ``p`` by an edge to a uniformly drawn non-neighbor.
    Rewiring preserves the edge count. If the rewired graph is disconnected
    the seed is perturbed (+1) and generation retried a bounded number of
    times; persistent disconnection raises :class:`GenerationFailureError`.
    """
    if not (isinstance(n, int) and isinstance(k, int)):
        raise InvalidParameterError("n and k must be integers")
    if n < 3:
        raise InvalidParameterError(f"n must be >= 3, got {n}")
    if not 1 <= k < n:
        raise InvalidParameterError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must be in [0, 1], got {p}")

    for attempt in range(MAX_CONNECTIVITY_RETRIES + 1):
        edges = _rewire_once(n, k, p, seed + attempt)
        graph = Graph(node_count=n, edges=frozenset(edges))
        if graph.is_connected():
            return graph
    raise GenerationFailureError(
        f"WS({n},{k},{p}) disconnected for seeds {seed}..{seed + MAX_CONNECTIVITY_RETRIES}"
    )


def load_topology(text: str, link_delay: float = DEFAULT_LINK_DELAY) -> Graph:
    """Parse the line-oriented topology format.

    Comment lines start with '#'. The first payload line is ``nodes <N>``;
    every following payload line is ``link <a> <b>``. Self-loops, duplicate
    links (in either order) and disconnected results are rejected.
    """
    node_count: int | None = None
    edges: set[tuple[int, int]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if node_count is None:
            if tokens[0] != "nodes" or len(tokens) != 2:
                raise TopologyParseError("expected 'nodes <N>'", lineno)
            try:
                node_count = int(tokens[1])
            except ValueError:
                raise TopologyParseError(f"bad node count {tokens[1]!r}", lineno) from None
            if node_count < 1:
                raise TopologyParseError("node count must be >= 1", lineno)
            continue
        if tokens[0] != "link" or len(tokens) != 3:
            raise TopologyParseError(f"expected 'link <a> <b>', got {line!r}", lineno)
        try:
            a, b = int(tokens[1]), int(tokens[2])
        except ValueError:
            raise TopologyParseError(f"bad link endpoints in {line!r}", lineno) from None
        if not (0 <= a < node_count and 0 <= b < node_count):
            raise TopologyParseError(
                f"endpoint out of range 0..{node_count - 1}: {line!r}", lineno
            )
        if a == b:
            raise SelfLoopError(f"self-loop at node {a}", lineno)
        edge = (a, b) if a < b else (b, a)
        if edge in edges:
            raise DuplicateEdgeError(f"duplicate link {edge[0]} {edge[1]}", lineno)
        edges.add(edge)

    if node_count is None:
        raise TopologyParseError("missing 'nodes <N>' line")
    graph = Graph(node_count=node_count, edges=frozenset(edges), link_delay=link_delay)
    if not graph.is_connected():
        raise DisconnectedGraphError(f"topology with {node_count} nodes is not connected")
    return graph


def serialize_topology(g: Graph) -> str:
    """Inverse of :func:`load_topology` on the edge set."""
    lines = [f"nodes {g.node_count}"]
    lines.extend(f"link {a} {b}" for a, b in sorted(g.edges))
    return "\n".join(lines) + "\n"


def compute_routing(g: Graph, producers: set[int] | frozenset[int]) -> RoutingTables:
    """Build next-hop and distance tables toward every producer.

    next_hop(v, t) is the smallest-id neighbor of v on a minimum-hop path to
    t. Distances (and the diameter) are computed for all node pairs by BFS.
    """
    if not producers:
        raise EmptyProducerSetError("producer set must be nonempty")
    n = g.node_count
    for t in producers:
        if not 0 <= t < n:
            raise InvalidParameterError(f"producer id {t} out of range")
    adj = g.adjacency()

    dist: list[list[int]] = []
    for s in range(n):
        row = [-1] * n
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = row[u]
            for v in adj[u]:
                if row[v] < 0:
                    row[v] = du + 1
                    queue.append(v)
        if any(d < 0 for d in row):
            raise DisconnectedGraphError("graph must be connected for routing")
        dist.append(row)

    diameter = max(max(row) for row in dist) if n > 1 else 0

    next_hop: dict[int, list[int]] = {}
    for t in sorted(producers):
        col = [t] * n
        for v in range(n):
            if v == t:
                continue
            # BFS guarantees some neighbor is one hop closer; ties break by id.
            col[v] = min(adj[v], key=lambda u: (dist[u][t], u))
        next_hop[t] = col

    return RoutingTables(
        producers=frozenset(producers), diameter=diameter, _dist=dist, _next=next_hop
    )
