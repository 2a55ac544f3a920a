"""Exception hierarchy for the Worm laboratory."""

from typing import Optional, Tuple


class WormLabError(Exception):
    """Base class for every error raised by the laboratory."""


class DomainViolationError(WormLabError, ValueError):
    """A point lies outside the domain an operation requires (or is not finite)."""


class BranchCutError(WormLabError):
    """Analytic continuation of a branch would cross a chart cut."""


class SpecValidationError(WormLabError, ValueError):
    """A Worm or experiment configuration violates its invariants."""


class SearchExhaustedError(WormLabError):
    """A bounded numerical search could not close its bracket."""


class DisconnectedPairError(WormLabError):
    """Two graph nodes lie in different connected components."""

    def __init__(self, components: Tuple[int, int], message: Optional[str] = None):
        self.components = components
        super().__init__(
            message
            or f"Points lie in disconnected components {components[0]} and {components[1]}"
        )
