"""Content Store replacement policies: FIFO, LRU, and Universal Caching (UC).

A policy decides three things for a router's Content Store: what to update
when a name is requested (``on_access``), whether an arriving content is
admitted, and which resident entry it displaces (``admit``).

FIFO and LRU are the classic order-based schemes. UC scores every content
with a Content Metric (CM), a convex combination of three signals:

* access frequency at this router, normalized by the largest frequency among
  the resident entries and the candidate;
* distance (hops) from the node that served the content, normalized by the
  graph diameter;
* reachability of the router, taken as node degree normalized by the maximum
  degree in the graph.

Higher CM means more valuable. When the store is full, a candidate is
admitted only if its CM strictly exceeds the smallest resident CM, and that
minimum-CM entry is the victim. Frequency state is per-router and bounded
(a small multiple of the store capacity, least-recently-updated counters
evicted first) so router memory stays realistic.
"""
from __future__ import annotations

import enum
from collections import OrderedDict
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidParameterError

FREQ_TABLE_FACTOR = 4  # frequency-table slots per Content Store slot


class PolicyKind(enum.Enum):
    FIFO = "FIFO"
    LRU = "LRU"
    UC = "UC"

    @classmethod
    def from_string(cls, value: str) -> "PolicyKind":
        try:
            return cls[value.strip().upper()]
        except KeyError:
            raise InvalidParameterError(f"unknown policy {value!r}") from None


@dataclass(frozen=True)
class UcWeights:
    """Convex weights for the UC Content Metric (frequency, distance, reachability)."""

    w_f: float = 1.0 / 3.0
    w_d: float = 1.0 / 3.0
    w_r: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        if min(self.w_f, self.w_d, self.w_r) < 0:
            raise InvalidParameterError("UC weights must be non-negative")
        total = self.w_f + self.w_d + self.w_r
        if abs(total - 1.0) > 1e-9:
            raise InvalidParameterError(f"UC weights must sum to 1, got {total}")


@dataclass(slots=True)
class CacheEntry:
    """One cached content plus the metadata the policies key on.

    ``inserted_at`` / ``last_used_at`` are store sequence numbers, not
    timestamps. ``content_metric`` holds the CM from the most recent UC scan.
    """

    name: int
    hops_from_source: int = 0
    inserted_at: int = 0
    last_used_at: int = 0
    content_metric: float = 0.0


class ContentStore:
    """Capacity-bounded name -> CacheEntry map.

    Entry order tracks insertion; LRU refreshes order on access so the first
    entry is always the eviction-order head for the order-based policies.
    """

    __slots__ = ("capacity", "entries", "_tick")

    def __init__(self, capacity: int):
        if capacity < 0:
            raise InvalidParameterError(f"capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self.entries: OrderedDict[int, CacheEntry] = OrderedDict()
        self._tick = 0

    def __contains__(self, name: int) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, name: int) -> CacheEntry | None:
        return self.entries.get(name)

    def next_tick(self) -> int:
        self._tick += 1
        return self._tick

    def insert(self, entry: CacheEntry) -> None:
        tick = self.next_tick()
        entry.inserted_at = tick
        entry.last_used_at = tick
        self.entries[entry.name] = entry

    def remove(self, name: int) -> None:
        del self.entries[name]


class AdmissionDecision(NamedTuple):
    admitted: bool
    victim: int | None  # name of the evicted entry, if any


def content_metric(
    freq: int,
    max_freq_in_store: int,
    hops_from_source: int,
    diameter: int,
    node_degree: int,
    max_degree: int,
    w: UcWeights,
) -> float:
    """UC Content Metric in [0, 1] under convex weights.

    Monotone non-decreasing in each of freq, hops_from_source, node_degree.
    The frequency and distance terms saturate at 1.
    """
    if max_freq_in_store <= 0 or diameter <= 0 or max_degree <= 0:
        raise InvalidParameterError("content_metric denominators must be positive")
    freq_term = min(freq / max_freq_in_store, 1.0)
    dist_term = min(hops_from_source / diameter, 1.0)
    reach_term = node_degree / max_degree
    return w.w_f * freq_term + w.w_d * dist_term + w.w_r * reach_term


class FrequencyTable:
    """Bounded per-router access counters, least-recently-updated out first."""

    __slots__ = ("capacity", "counts")

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.counts: OrderedDict[int, int] = OrderedDict()

    def record(self, name: int) -> int | None:
        """Count one access; returns the name whose counter was evicted, if any."""
        counts = self.counts
        if name in counts:
            counts[name] += 1
            counts.move_to_end(name)
        elif self.capacity > 0:
            evicted = None
            if len(counts) >= self.capacity:
                evicted, _ = counts.popitem(last=False)
            counts[name] = 1
            return evicted
        return None

    def count(self, name: int) -> int:
        # Names whose counter was evicted (or never seen) count as 1: the
        # candidate being offered was necessarily requested at least once.
        return self.counts.get(name, 1)


class CachePolicy:
    """Shared interface; concrete policies override both hooks."""

    kind: PolicyKind

    def on_access(self, store: ContentStore, name: int) -> None:
        raise NotImplementedError

    def admit(
        self,
        store: ContentStore,
        candidate: CacheEntry,
        node_degree: int,
        max_degree: int,
        diameter: int,
    ) -> AdmissionDecision:
        raise NotImplementedError


class FifoPolicy(CachePolicy):
    """Evict in insertion order; accesses never change the order."""

    kind = PolicyKind.FIFO

    def on_access(self, store: ContentStore, name: int) -> None:
        pass

    def admit(self, store, candidate, node_degree, max_degree, diameter):
        if candidate.name in store.entries or store.capacity == 0:
            return AdmissionDecision(False, None)
        if len(store.entries) < store.capacity:
            store.insert(candidate)
            return AdmissionDecision(True, None)
        victim, _ = store.entries.popitem(last=False)
        store.insert(candidate)
        return AdmissionDecision(True, victim)


class LruPolicy(CachePolicy):
    """Evict the least recently used entry; hits refresh recency."""

    kind = PolicyKind.LRU

    def on_access(self, store: ContentStore, name: int) -> None:
        entry = store.entries.get(name)
        if entry is not None:
            entry.last_used_at = store.next_tick()
            store.entries.move_to_end(name)

    def admit(self, store, candidate, node_degree, max_degree, diameter):
        if candidate.name in store.entries or store.capacity == 0:
            return AdmissionDecision(False, None)
        if len(store.entries) < store.capacity:
            store.insert(candidate)
            return AdmissionDecision(True, None)
        victim, _ = store.entries.popitem(last=False)
        store.insert(candidate)
        return AdmissionDecision(True, victim)


class UcPolicy(CachePolicy):
    """Content-Metric replacement with an admission gate.

    A full store admits a candidate only when its CM strictly exceeds the
    minimum resident CM; otherwise the store is left untouched (this keeps
    one-hit wonders from churning the cache). CM ties for the victim break
    by smaller last_used_at, then smaller name.

    The eviction scan evaluates the exact content_metric() expression with
    the constant pieces hoisted: the distance product of each entry is cached
    at insertion (the diameter never changes mid-run) and the min() clamps
    are dropped where the operand provably cannot exceed 1. The resulting
    floats are bit-identical to content_metric(), which the oracle tests
    assert.
    """

    kind = PolicyKind.UC

    def __init__(self, cs_capacity: int, weights: UcWeights | None = None):
        self.weights = weights if weights is not None else UcWeights()
        self.frequencies = FrequencyTable(FREQ_TABLE_FACTOR * cs_capacity)
        self._dist_parts: dict[int, float] = {}  # name -> w_d * min(hops/diam, 1)
        # Last full-scan result (max stored freq, victim cm, victim name,
        # victim entry), reusable while no stored entry's frequency or the
        # store contents changed. Only cached when the scan's normalizer was
        # the stored maximum itself, so it is candidate-independent.
        self._scan_cache: tuple[int, float, int, CacheEntry] | None = None

    def on_access(self, store: ContentStore, name: int) -> None:
        evicted = self.frequencies.record(name)
        if self._scan_cache is not None:
            entries = store.entries
            if name in entries or (evicted is not None and evicted in entries):
                self._scan_cache = None

    def admit(self, store, candidate, node_degree, max_degree, diameter):
        entries = store.entries
        if candidate.name in entries or store.capacity == 0:
            return AdmissionDecision(False, None)
        if diameter <= 0 or max_degree <= 0:
            raise InvalidParameterError("UC needs positive diameter and max_degree")
        cand_dist_part = self.weights.w_d * min(candidate.hops_from_source / diameter, 1.0)
        if len(entries) < store.capacity:
            self._dist_parts[candidate.name] = cand_dist_part
            store.insert(candidate)
            self._scan_cache = None
            return AdmissionDecision(True, None)

        counts_get = self.frequencies.counts.get
        cand_freq = counts_get(candidate.name, 1)
        w_f = self.weights.w_f
        reach_part = self.weights.w_r * (node_degree / max_degree)

        cache = self._scan_cache
        if cache is not None and cand_freq <= cache[0]:
            max_freq, victim_cm, victim_name, victim = cache
        else:
            items = list(entries.items())
            freqs = [counts_get(name, 1) for name, _ in items]
            max_stored = max(freqs)
            max_freq = max_stored if cand_freq <= max_stored else cand_freq

            dist_parts = self._dist_parts
            victim_name = -1
            victim = None
            victim_cm = float("inf")
            for (name, entry), f in zip(items, freqs):
                cm = w_f * (f / max_freq) + dist_parts[name] + reach_part
                entry.content_metric = cm
                if cm < victim_cm:
                    victim_cm = cm
                    victim_name = name
                    victim = entry
                elif cm == victim_cm and (entry.last_used_at, name) < (
                    victim.last_used_at,
                    victim_name,
                ):
                    victim_name = name
                    victim = entry
            if max_freq == max_stored:
                self._scan_cache = (max_stored, victim_cm, victim_name, victim)

        cand_cm = w_f * (cand_freq / max_freq) + cand_dist_part + reach_part
        candidate.content_metric = cand_cm
        if cand_cm <= victim_cm:
            return AdmissionDecision(False, None)
        del self._dist_parts[victim_name]
        store.remove(victim_name)
        self._dist_parts[candidate.name] = cand_dist_part
        store.insert(candidate)
        self._scan_cache = None
        return AdmissionDecision(True, victim_name)


def make_policy(
    kind: PolicyKind, cs_capacity: int, uc_weights: UcWeights | None = None
) -> CachePolicy:
    """One policy instance per router (UC keeps per-router frequency state)."""
    if kind is PolicyKind.FIFO:
        return FifoPolicy()
    if kind is PolicyKind.LRU:
        return LruPolicy()
    return UcPolicy(cs_capacity, uc_weights)
