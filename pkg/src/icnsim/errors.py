"""Exception hierarchy for the simulator.

All errors raised by this package derive from :class:`SimError` so callers
can catch everything with one handler while tests distinguish the kinds.
"""


class SimError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(SimError, ValueError):
    """A numeric or structural parameter violates its precondition."""


class GenerationFailureError(SimError):
    """Topology generation could not produce a connected graph."""


class TopologyParseError(SimError):
    """Topology file is malformed; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SelfLoopError(TopologyParseError):
    pass


class DuplicateEdgeError(TopologyParseError):
    pass


class DisconnectedGraphError(SimError):
    """The graph is not connected and cannot drive a simulation."""


class EmptyProducerSetError(SimError, ValueError):
    pass


class NoRouteError(SimError):
    """No forwarding entry toward a content's producer (unreachable)."""


class NoSuchLinkError(SimError):
    """Transmission requested on a node pair that is not a link."""


class RankOutOfRangeError(SimError, ValueError):
    pass


class InsufficientSamplesError(SimError, ValueError):
    """Fewer samples than a statistic requires (confidence intervals need 2+)."""


class NoCompletedRequestsError(SimError):
    """A ratio metric was requested for a run with zero resolved requests."""


class EventQueueOverflowError(SimError):
    """The event queue exceeded its safety bound; the run is aborted, not truncated."""


class ConfigError(SimError):
    """Experiment configuration is malformed or fails validation."""
