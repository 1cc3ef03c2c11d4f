"""Content request workload: Mandelbrot-Zipf popularity plus Poisson arrivals.

The rank popularity law is p(r) = C / (r + q)^alpha for ranks 1..N, with C
chosen so the probabilities sum to one. ``alpha`` controls the slope of the
curve (skewness) and ``q >= 0`` flattens its head (plateau). Sampling is
inverse-CDF over a precomputed cumulative table, cached per parameter set.
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, RankOutOfRangeError

DEFAULT_AGGREGATE_RATE = 1000.0  # requests per second, network-wide


@dataclass(frozen=True)
class MZipfParams:
    """Mandelbrot-Zipf parameters: skewness alpha > 0, plateau q >= 0, catalog N."""

    alpha: float
    q: float
    catalog_size: int

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.q < 0:
            raise InvalidParameterError(f"q must be >= 0, got {self.q}")
        if self.catalog_size < 1:
            raise InvalidParameterError(
                f"catalog_size must be >= 1, got {self.catalog_size}"
            )


# Cached (pmf array, cdf list) per parameter set; tables are immutable.
_TABLES: dict[MZipfParams, tuple[np.ndarray, list[float]]] = {}


def _tables(params: MZipfParams) -> tuple[np.ndarray, list[float]]:
    cached = _TABLES.get(params)
    if cached is None:
        ranks = np.arange(1, params.catalog_size + 1, dtype=np.float64)
        weights = (ranks + params.q) ** -params.alpha
        pmf = weights / weights.sum()
        cdf = np.cumsum(pmf)
        cdf[-1] = 1.0  # kill cumulative rounding at the tail
        cached = (pmf, cdf.tolist())
        _TABLES[params] = cached
    return cached


def mzipf_pmf(r: int, params: MZipfParams) -> float:
    """Probability that a request targets the rank-r content."""
    if not 1 <= r <= params.catalog_size:
        raise RankOutOfRangeError(
            f"rank {r} outside 1..{params.catalog_size}"
        )
    pmf, _ = _tables(params)
    return float(pmf[r - 1])


def mzipf_pmf_array(params: MZipfParams) -> np.ndarray:
    """Full pmf indexed by rank-1; read-only convenience for analysis/tests."""
    return _tables(params)[0].copy()


def sample_rank(params: MZipfParams, rng: random.Random) -> int:
    """Draw a content rank with probability mzipf_pmf(rank)."""
    _, cdf = _tables(params)
    return bisect_right(cdf, rng.random()) + 1


@dataclass(frozen=True)
class RequestStream:
    """Aggregate request process: exponential inter-arrivals at a fixed rate,
    consumers uniform over routers, ranks Mandelbrot-Zipf."""

    params: MZipfParams
    consumer_count: int
    aggregate_rate: float = DEFAULT_AGGREGATE_RATE

    def __post_init__(self) -> None:
        if self.aggregate_rate <= 0:
            raise InvalidParameterError(
                f"aggregate_rate must be > 0, got {self.aggregate_rate}"
            )
        if self.consumer_count < 1:
            raise InvalidParameterError("need at least one consumer router")


def next_request(
    stream: RequestStream, rng: random.Random, now: float
) -> tuple[float, int, int]:
    """Draw the next request as (arrival_time, consumer_node, content_rank).

    Exactly three rng draws in fixed order (inter-arrival, consumer, rank);
    the simulator's determinism contract depends on this order.
    """
    arrival = now + rng.expovariate(stream.aggregate_rate)
    consumer = rng.randrange(stream.consumer_count)
    rank = sample_rank(stream.params, rng)
    return arrival, consumer, rank
