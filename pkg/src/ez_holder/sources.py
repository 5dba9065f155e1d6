"""Pluggable cover sources for the stage-by-stage construction."""

from __future__ import annotations

import logging
from typing import Protocol, runtime_checkable

from .covers import ColoredCover, build_greedy_cover, build_structured_cover
from .metric import FiniteMetricSpace

logger = logging.getLogger(__name__)


@runtime_checkable
class CoverSource(Protocol):
    """Protocol for cover sources.

    Any object with a ``cover_for(space, delta)`` method satisfies this.
    """

    name: str

    def cover_for(self, space: FiniteMetricSpace, delta: float) -> ColoredCover: ...


class GreedyCovers:
    """Synthesized covers for arbitrary finite spaces."""

    name = "greedy"

    def __init__(self, sigma: float) -> None:
        if not 0 < sigma < 1:
            raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
        self.sigma = sigma

    def cover_for(self, space: FiniteMetricSpace, delta: float) -> ColoredCover:
        return build_greedy_cover(space, min(delta, 1.0), self.sigma)

    def __repr__(self) -> str:
        return f"GreedyCovers(sigma={self.sigma})"


class StructuredCovers:
    """Covers read off the construction of Cantor, cube-grid and product spaces."""

    name = "structured"

    def cover_for(self, space: FiniteMetricSpace, delta: float) -> ColoredCover:
        return build_structured_cover(space, delta=min(delta, 1.0))

    def __repr__(self) -> str:
        return "StructuredCovers()"


def make_source(kind: str, sigma: float) -> CoverSource:
    """Build a source by name (``"greedy"`` or ``"structured"``)."""
    if kind == "greedy":
        return GreedyCovers(sigma)
    if kind == "structured":
        return StructuredCovers()
    raise ValueError(f"unknown cover source {kind!r}; expected 'greedy' or 'structured'")
