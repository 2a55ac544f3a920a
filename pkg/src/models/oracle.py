"""Distance/metric provider contract shared by exact, graph and disc-search oracles."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Generic, Optional, TypeVar

from models.errors import DomainViolationError
from models.geometry import TangentVector2

P = TypeVar("P")

ACCURACY_KINDS = ("exact", "graph_approx", "disc_search_bound")


@dataclass(frozen=True)
class AccuracyClass:
    """Declared accuracy of an oracle.

    ``resolution`` is zero for exact oracles; for graph oracles it is the
    largest edge length of the underlying graph.
    """

    kind: str = "exact"
    resolution: float = 0.0
    direction: Optional[str] = None  # "upper" or "lower" for disc-search bounds

    def __post_init__(self) -> None:
        if self.kind not in ACCURACY_KINDS:
            raise DomainViolationError(f"Unknown accuracy class: {self.kind}")
        if self.resolution < 0:
            raise DomainViolationError("Resolution must be nonnegative")
        if self.kind == "exact" and self.resolution != 0.0:
            raise DomainViolationError("Exact oracles carry zero resolution")
        if self.kind == "disc_search_bound" and self.direction not in ("upper", "lower"):
            raise DomainViolationError("Disc-search bounds need direction 'upper' or 'lower'")

    @classmethod
    def exact(cls) -> "AccuracyClass":
        return cls("exact", 0.0)

    @classmethod
    def graph_approx(cls, resolution: float) -> "AccuracyClass":
        return cls("graph_approx", float(resolution))

    @classmethod
    def disc_search_bound(cls, direction: str) -> "AccuracyClass":
        return cls("disc_search_bound", 0.0, direction)

    @property
    def tolerance(self) -> float:
        """Additive slack allowed in triangle inequalities and Gromov products."""
        return 3.0 * self.resolution

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


class MetricOracle(ABC, Generic[P]):
    """A Kobayashi distance and Kobayashi-Royden metric provider."""

    accuracy: AccuracyClass = AccuracyClass.exact()

    @abstractmethod
    def distance(self, p: P, q: P) -> float:
        """Kobayashi distance between two points."""

    @abstractmethod
    def royden(self, v: TangentVector2) -> float:
        """Kobayashi-Royden length of a tangent vector."""

    def contains(self, p: P) -> bool:
        """Whether ``p`` lies in the oracle's domain."""
        return True

    @property
    def tolerance(self) -> float:
        return self.accuracy.tolerance

    @property
    def name(self) -> str:
        return self.__class__.__name__
