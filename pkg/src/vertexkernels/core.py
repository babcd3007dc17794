"""Domain types shared by every module: graph configuration, points, grids
and tabulated sweeps.

All types are frozen value objects and can be shared between threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError


class ConditionKind(enum.Enum):
    EXNER_SEBA = "exner-seba"
    KIRCHHOFF = "kirchhoff"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class StarGraphConfig:
    """A single vertex with ``n_edges`` semi-infinite leads.

    ``alpha`` is the strength of the delta interaction at the vertex,
    i.e. the vertex condition is ``sum_j u_j'(0) = alpha * u(0)``.
    Dirichlet configurations carry ``alpha = inf`` only as a marker; code
    dispatching on the condition must test ``is_dirichlet`` rather than
    feeding ``alpha`` into formulas.
    """

    n_edges: int
    alpha: float
    condition_kind: ConditionKind

    def __post_init__(self):
        if not isinstance(self.n_edges, (int, np.integer)) or self.n_edges < 1:
            raise DomainError(f"n_edges must be a positive integer, got {self.n_edges!r}")
        if self.condition_kind is ConditionKind.DIRICHLET:
            if not math.isinf(self.alpha):
                raise DomainError("Dirichlet configurations carry no finite alpha")
            return
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if (self.alpha == 0) != (self.condition_kind is ConditionKind.KIRCHHOFF):
            raise DomainError("alpha = 0 if and only if the condition is Kirchhoff")

    @property
    def is_dirichlet(self) -> bool:
        return self.condition_kind is ConditionKind.DIRICHLET

    @property
    def is_kirchhoff(self) -> bool:
        return self.condition_kind is ConditionKind.KIRCHHOFF

    @property
    def damping(self) -> float:
        """alpha / N, the decay rate of the delayed vertex response."""
        return self.alpha / self.n_edges

    def check_edge(self, j: int) -> int:
        if not 1 <= j <= self.n_edges:
            raise DomainError(f"edge {j} outside 1..{self.n_edges}")
        return j

    def __repr__(self):
        if self.is_dirichlet:
            return f"StarGraphConfig(N={self.n_edges}, Dirichlet)"
        return f"StarGraphConfig(N={self.n_edges}, alpha={self.alpha!r})"


def make_graph(n_edges: int, alpha: float) -> StarGraphConfig:
    """Star graph with the Exner-Seba condition (Kirchhoff when ``alpha == 0``).

    Negative ``alpha`` (attractive vertex, bound state) is rejected.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha!r}; use make_dirichlet_graph")
    if alpha < 0:
        raise DomainError("alpha < 0 is not supported")
    kind = ConditionKind.KIRCHHOFF if alpha == 0 else ConditionKind.EXNER_SEBA
    return StarGraphConfig(int(n_edges) if _is_int(n_edges) else n_edges, alpha, kind)


def make_dirichlet_graph(n_edges: int) -> StarGraphConfig:
    return StarGraphConfig(int(n_edges) if _is_int(n_edges) else n_edges, math.inf,
                           ConditionKind.DIRICHLET)


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


@dataclass(frozen=True)
class EdgePoint:
    """Point at distance ``coordinate`` from the vertex along edge ``edge``."""

    edge: int
    coordinate: float

    def __post_init__(self):
        if self.edge < 1:
            raise DomainError(f"edge index must be >= 1, got {self.edge}")
        if not self.coordinate >= 0:
            raise DomainError(f"coordinate must be >= 0, got {self.coordinate}")

    def validate_for(self, graph: StarGraphConfig) -> "EdgePoint":
        graph.check_edge(self.edge)
        return self


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``count`` points from ``lo`` to ``hi`` inclusive."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise DomainError(f"grid needs finite lo < hi, got {self.lo}, {self.hi}")
        if self.count < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.count}")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Parse the ``lo:hi:count`` form used on the command line."""
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid must look like lo:hi:count, got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"bad grid {text!r}: {exc}") from None
        return cls(lo, hi, count)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    def __len__(self):
        return self.count


@dataclass(frozen=True)
class TabulatedSweep:
    """Rows of numbers under named columns, plus free-form metadata.

    Metadata holds values that are not samples of a function, such as the
    weight of a Dirac delta at the origin.
    """

    column_names: tuple
    rows: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.column_names)
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        for i, row in enumerate(rows):
            if len(row) != len(names):
                raise DomainError(f"row {i} has {len(row)} values for {len(names)} columns")
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_columns(cls, names: Sequence[str], columns: Sequence[Sequence[float]],
                     metadata=None) -> "TabulatedSweep":
        rows = list(zip(*columns)) if columns else []
        return cls(tuple(names), tuple(rows), dict(metadata or {}))

    def column(self, name: str) -> np.ndarray:
        k = self.column_names.index(name)
        return np.array([row[k] for row in self.rows])

    def __len__(self):
        return len(self.rows)
