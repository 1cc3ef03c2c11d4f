"""Experiment configuration: YAML parsing, strict validation, defaults.

A config describes one sweep: a topology, the policies to compare, the
cache-size percentages, the popularity parameter sets, and the run lengths.
Unknown keys are rejected so typos fail loudly instead of silently running
defaults.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import yaml

from .errors import ConfigError, InvalidParameterError
from .policies import PolicyKind, UcWeights

DEFAULT_CATALOG_SIZE = 1000
DEFAULT_CACHE_PCT_SWEEP = (1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0)
DEFAULT_MZIPF_SETS = ((0.7, 0.7), (5.0, 0.65), (55.0, 0.6))  # (q, alpha) pairs
DEFAULT_AGGREGATE_RATE = 1000.0
DEFAULT_DURATION = 200.0
DEFAULT_WARMUP = 20.0
DEFAULT_REPLICATIONS = 10
DEFAULT_BASE_SEED = 1
DEFAULT_PIT_LIFETIME = 2.0
DEFAULT_LINK_DELAY = 0.010


@dataclass(frozen=True)
class TopologySpec:
    """Either a generated small-world graph (ws) or a topology file."""

    kind: str  # "ws" | "file"
    n: int = 0
    k: int = 0
    p: float = 0.0
    path: str = ""

    def label(self) -> str:
        if self.kind == "ws":
            return f"ws_n{self.n}_k{self.k}_p{self.p:g}"
        stem = self.path.rsplit("/", 1)[-1]
        return stem.removesuffix(".topo")


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologySpec
    policies: tuple[PolicyKind, ...] = (PolicyKind.FIFO, PolicyKind.LRU, PolicyKind.UC)
    uc_weights: UcWeights = field(default_factory=UcWeights)
    catalog_size: int = DEFAULT_CATALOG_SIZE
    cache_pct_sweep: tuple[float, ...] = DEFAULT_CACHE_PCT_SWEEP
    mzipf_sets: tuple[tuple[float, float], ...] = DEFAULT_MZIPF_SETS
    aggregate_rate: float = DEFAULT_AGGREGATE_RATE
    duration: float = DEFAULT_DURATION
    warmup: float = DEFAULT_WARMUP
    replications: int = DEFAULT_REPLICATIONS
    base_seed: int = DEFAULT_BASE_SEED
    pit_lifetime: float = DEFAULT_PIT_LIFETIME
    link_delay: float = DEFAULT_LINK_DELAY
    producer_placement: str = "random"  # "random" | "single"
    producer_node: int = 0  # used only by "single" placement

    def with_seed(self, base_seed: int) -> "ExperimentConfig":
        return replace(self, base_seed=base_seed)


_TOP_LEVEL_KEYS = {
    "topology",
    "policies",
    "uc_weights",
    "catalog_size",
    "cache_pct_sweep",
    "mzipf_sets",
    "aggregate_rate",
    "duration",
    "warmup",
    "replications",
    "base_seed",
    "pit_lifetime",
    "link_delay",
    "producer_placement",
}


def _require_map(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def _check_keys(mapping: dict, allowed: set[str], path: str) -> None:
    for key in mapping:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(f"unknown key {where!r}")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _parse_topology(value) -> TopologySpec:
    m = _require_map(value, "topology")
    _check_keys(m, {"ws", "file"}, "topology")
    if ("ws" in m) == ("file" in m):
        raise ConfigError("topology: give exactly one of 'ws' or 'file'")
    if "ws" in m:
        ws = _require_map(m["ws"], "topology.ws")
        _check_keys(ws, {"n", "k", "p"}, "topology.ws")
        for key in ("n", "k", "p"):
            if key not in ws:
                raise ConfigError(f"topology.ws.{key}: required")
        n = _integer(ws["n"], "topology.ws.n")
        k = _integer(ws["k"], "topology.ws.k")
        p = _number(ws["p"], "topology.ws.p")
        if n < 3:
            raise ConfigError("topology.ws.n: must be >= 3")
        if not 1 <= k < n:
            raise ConfigError("topology.ws.k: must satisfy 1 <= k < n")
        if not 0.0 <= p <= 1.0:
            raise ConfigError("topology.ws.p: must be in [0, 1]")
        return TopologySpec(kind="ws", n=n, k=k, p=p)
    path = m["file"]
    if not isinstance(path, str) or not path:
        raise ConfigError("topology.file: expected a nonempty path string")
    return TopologySpec(kind="file", path=path)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document, filling defaults.

    Raises :class:`ConfigError` naming the offending key for unknown keys,
    type mismatches, and out-of-range values.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"bad YAML: {exc}") from exc
    if raw is None:
        raise ConfigError("empty config")
    raw = _require_map(raw, "config")
    _check_keys(raw, _TOP_LEVEL_KEYS, "")
    if "topology" not in raw:
        raise ConfigError("topology: required")

    cfg = ExperimentConfig(topology=_parse_topology(raw["topology"]))

    if "policies" in raw:
        entries = raw["policies"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("policies: expected a nonempty list")
        try:
            policies = tuple(PolicyKind.from_string(str(e)) for e in entries)
        except InvalidParameterError as exc:
            raise ConfigError(f"policies: {exc}") from exc
        if len(set(policies)) != len(policies):
            raise ConfigError("policies: duplicate entries")
        cfg = replace(cfg, policies=policies)

    if "uc_weights" in raw:
        m = _require_map(raw["uc_weights"], "uc_weights")
        _check_keys(m, {"w_f", "w_d", "w_r"}, "uc_weights")
        try:
            weights = UcWeights(
                w_f=_number(m.get("w_f", 1 / 3), "uc_weights.w_f"),
                w_d=_number(m.get("w_d", 1 / 3), "uc_weights.w_d"),
                w_r=_number(m.get("w_r", 1 / 3), "uc_weights.w_r"),
            )
        except InvalidParameterError as exc:
            raise ConfigError(f"uc_weights: {exc}") from exc
        cfg = replace(cfg, uc_weights=weights)

    if "catalog_size" in raw:
        n = _integer(raw["catalog_size"], "catalog_size")
        if n < 1:
            raise ConfigError("catalog_size: must be >= 1")
        cfg = replace(cfg, catalog_size=n)

    if "cache_pct_sweep" in raw:
        entries = raw["cache_pct_sweep"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("cache_pct_sweep: expected a nonempty list")
        pcts = []
        for i, e in enumerate(entries):
            pct = _number(e, f"cache_pct_sweep[{i}]")
            if not 0.0 < pct <= 100.0:
                raise ConfigError(f"cache_pct_sweep[{i}]: must be in (0, 100], got {e}")
            pcts.append(pct)
        cfg = replace(cfg, cache_pct_sweep=tuple(pcts))

    if "mzipf_sets" in raw:
        entries = raw["mzipf_sets"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("mzipf_sets: expected a nonempty list")
        sets = []
        for i, e in enumerate(entries):
            m = _require_map(e, f"mzipf_sets[{i}]")
            _check_keys(m, {"q", "alpha"}, f"mzipf_sets[{i}]")
            if "q" not in m or "alpha" not in m:
                raise ConfigError(f"mzipf_sets[{i}]: needs both 'q' and 'alpha'")
            q = _number(m["q"], f"mzipf_sets[{i}].q")
            alpha = _number(m["alpha"], f"mzipf_sets[{i}].alpha")
            if q < 0:
                raise ConfigError(f"mzipf_sets[{i}].q: must be >= 0")
            if alpha <= 0:
                raise ConfigError(f"mzipf_sets[{i}].alpha: must be > 0")
            sets.append((q, alpha))
        cfg = replace(cfg, mzipf_sets=tuple(sets))

    for key, cast, check, message in (
        ("aggregate_rate", _number, lambda v: v > 0, "must be > 0"),
        ("duration", _number, lambda v: v > 0, "must be > 0"),
        ("warmup", _number, lambda v: v >= 0, "must be >= 0"),
        ("replications", _integer, lambda v: v >= 2, "must be >= 2 (CIs need spread)"),
        ("base_seed", _integer, lambda v: True, ""),
        ("pit_lifetime", _number, lambda v: v > 0, "must be > 0"),
        ("link_delay", _number, lambda v: v > 0, "must be > 0"),
    ):
        if key in raw:
            value = cast(raw[key], key)
            if not check(value):
                raise ConfigError(f"{key}: {message}, got {raw[key]}")
            cfg = replace(cfg, **{key: value})

    if not cfg.duration > cfg.warmup:
        raise ConfigError(
            f"duration: must exceed warmup, got duration={cfg.duration}, warmup={cfg.warmup}"
        )

    if "producer_placement" in raw:
        m = raw["producer_placement"]
        if isinstance(m, str):
            m = {"mode": m}
        m = _require_map(m, "producer_placement")
        _check_keys(m, {"mode", "node"}, "producer_placement")
        mode = m.get("mode", "random")
        if mode not in ("random", "single"):
            raise ConfigError(f"producer_placement.mode: 'random' or 'single', got {mode!r}")
        node = _integer(m.get("node", 0), "producer_placement.node")
        if node < 0:
            raise ConfigError("producer_placement.node: must be >= 0")
        cfg = replace(cfg, producer_placement=mode, producer_node=node)

    return cfg


def capacity_for(cache_pct: float, catalog_size: int) -> int:
    """Content Store entries for a percentage point; at least one entry."""
    return max(1, round(cache_pct * catalog_size / 100.0))
