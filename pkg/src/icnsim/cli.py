"""Command line entry point: expand a config into runs, write CSV outputs."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import parse_config
from .data import builtin_topology_path
from .errors import SimError
from .metrics import write_csv, write_runs_csv
from .runner import SweepExecutionError, _build_graph, expand_and_run
from .topology import serialize_topology

log = logging.getLogger("icnsim")


def _resolve_topology_path(path: str, config_dir: str) -> str:
    if path.startswith("builtin:"):
        return builtin_topology_path(path.removeprefix("builtin:"))
    if os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(config_dir, path))


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icnsim",
        description="Cache-policy comparison experiments on NDN-style networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute the sweep described by a config file")
    run_p.add_argument("config", help="path to the experiment config (YAML)")
    run_p.add_argument("--out", default="results.csv", help="aggregated CSV destination")
    run_p.add_argument("--seed", type=int, default=None, help="override base_seed")
    run_p.add_argument("--parallel", type=int, default=1, help="worker process cap")
    run_p.add_argument(
        "--topology-realizations",
        type=int,
        default=1,
        help="run the sweep over this many generated topology realizations",
    )
    run_p.add_argument(
        "--emit-topology",
        default=None,
        metavar="PATH",
        help="also dump the (first) topology in the topology file format",
    )
    run_p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except SimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if cfg.topology.kind == "file":
        resolved = _resolve_topology_path(
            cfg.topology.path, os.path.dirname(os.path.abspath(args.config))
        )
        from dataclasses import replace

        cfg = replace(cfg, topology=replace(cfg.topology, path=resolved))
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)

    try:
        if args.emit_topology:
            graph = _build_graph(cfg, realization=0)
            with open(args.emit_topology, "w", encoding="utf-8") as fh:
                fh.write(serialize_topology(graph))
            log.info("topology written to %s", args.emit_topology)

        reports = expand_and_run(
            cfg,
            parallel=max(1, args.parallel),
            topology_realizations=args.topology_realizations,
        )
    except SweepExecutionError as exc:
        for label, message in exc.failures:
            print(f"failed cell {label}: {message}", file=sys.stderr)
        return 1
    except SimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    write_csv(reports, args.out)
    stem, ext = os.path.splitext(args.out)
    runs_path = f"{stem}_runs{ext or '.csv'}"
    write_runs_csv(reports, runs_path)
    log.info("wrote %s and %s (%d runs)", args.out, runs_path, len(reports))
    return 0


if __name__ == "__main__":
    sys.exit(main())
