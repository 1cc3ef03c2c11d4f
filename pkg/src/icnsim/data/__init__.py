"""Bundled topology data files."""
from __future__ import annotations

from importlib import resources

from ..errors import ConfigError


def builtin_topology_path(name: str) -> str:
    """Filesystem path of a bundled topology (e.g. ``sprint_pop``)."""
    filename = name if name.endswith(".topo") else f"{name}.topo"
    path = resources.files(__package__).joinpath(filename)
    if not path.is_file():
        raise ConfigError(f"no builtin topology named {name!r}")
    return str(path)


def sprint_pop_path() -> str:
    """The bundled 52-node POP-level ISP topology."""
    return builtin_topology_path("sprint_pop")
