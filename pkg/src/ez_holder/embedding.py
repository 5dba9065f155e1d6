"""The iterated maps f_i into a growing coordinate prefix of ℓ².

Stage 0 sends every point to the origin. Stage i takes a cover at scale δ_i,
places one new vertex per cover element ε_i/2 off the previous image of its
anchor along a fresh basis direction, and maps each point to the convex
combination of the vertices weighted by its distances to the complements of
the sets containing it.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Literal, Sequence

import numpy as np

from .covers import CERT_TOLERANCE, ColoredCover, cover_from_dict, weight_matrix
from .errors import CoverError, PrecisionError
from .metric import FiniteMetricSpace
from .parallel import parallel_map
from .schedule import ScaleSchedule, materialize
from .sources import CoverSource, GreedyCovers, StructuredCovers

logger = logging.getLogger(__name__)

EXACT_MODE_MIN_LOG2_EPS = -60.0

StopReason = Literal["completed", "stabilized", "precision"]

# ── Sparse vectors ────────────────────────────────────────────────────


@dataclass
class SparseVector:
    """A finitely supported element of ℓ².

    Attributes:
        entries: Coordinate index -> value, never storing zeros.
        dimension_hint: Size of the coordinate prefix the vector lives in.
    """

    entries: dict[int, float] = field(default_factory=dict)
    dimension_hint: int = 0

    def __post_init__(self) -> None:
        self.entries = {int(k): float(v) for k, v in self.entries.items() if v != 0.0}
        if self.entries:
            self.dimension_hint = max(self.dimension_hint, max(self.entries) + 1)

    @classmethod
    def zero(cls, dimension_hint: int = 0) -> SparseVector:
        return cls({}, dimension_hint)

    @classmethod
    def basis(cls, k: int, value: float = 1.0) -> SparseVector:
        return cls({k: value}, k + 1)

    def norm(self) -> float:
        return math.hypot(*self.entries.values())

    def __add__(self, other: SparseVector) -> SparseVector:
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0.0) + v
        return SparseVector(out, max(self.dimension_hint, other.dimension_hint))

    def __sub__(self, other: SparseVector) -> SparseVector:
        return self + other.scaled(-1.0)

    def scaled(self, c: float) -> SparseVector:
        return SparseVector({k: c * v for k, v in self.entries.items()}, self.dimension_hint)

    def dist(self, other: SparseVector) -> float:
        return (self - other).norm()

    def dense(self, m: int | None = None) -> np.ndarray:
        m = self.dimension_hint if m is None else m
        out = np.zeros(m)
        for k, v in self.entries.items():
            out[k] = v
        return out

    def to_pairs(self) -> list[list[float]]:
        return [[k, v] for k, v in sorted(self.entries.items())]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]], dimension_hint: int = 0) -> SparseVector:
        return cls({int(k): float(v) for k, v in pairs}, dimension_hint)


def combine(weights: dict[int, float], vectors: Sequence[SparseVector]) -> SparseVector:
    """Σ_k weights[k]·vectors[k]; a single unit weight returns the vector unchanged."""
    if len(weights) == 1:
        (k, lam), = weights.items()
        if lam == 1.0:
            return SparseVector(dict(vectors[k].entries), vectors[k].dimension_hint)
    out: dict[int, float] = {}
    hint = 0
    for k, lam in weights.items():
        hint = max(hint, vectors[k].dimension_hint)
        for c, v in vectors[k].entries.items():
            out[c] = out.get(c, 0.0) + lam * v
    return SparseVector(out, hint)


# ── Stages ────────────────────────────────────────────────────────────


@dataclass
class EmbeddingStage:
    """The map f_i together with the data that defined it.

    Attributes:
        index: Stage index i.
        cover: The cover 𝒰_i (None at stage 0).
        vertices: p_k for every cover element, in cover order.
        coord_offset: m_{i-1}, the first coordinate written by this stage.
        coord_count: m_i = m_{i-1} + |𝒰_i|.
        images: f_i(x) for every point id.
        weights: Barycentric weights of each point, cover index -> λ.
        eps: ε_i.
        delta: Scale δ the cover was built at (δ₀ = 1).
    """

    index: int
    cover: ColoredCover | None
    vertices: list[SparseVector]
    coord_offset: int
    coord_count: int
    images: list[SparseVector]
    weights: list[dict[int, float]]
    eps: float = 1.0
    delta: float = 1.0
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False)

    def image_matrix(self) -> np.ndarray:
        """Images as a dense (points, m_i) array."""
        if self._dense is None:
            m = self.coord_count
            out = np.zeros((len(self.images), max(m, 1)))
            for x, v in enumerate(self.images):
                for k, val in v.entries.items():
                    out[x, k] = val
            self._dense = out
        return self._dense

    @property
    def is_stabilized(self) -> bool:
        return self.cover is not None and self.cover.is_singletons


def initial_stage(space: FiniteMetricSpace) -> EmbeddingStage:
    """f₀ ≡ 0 with an empty coordinate prefix."""
    n = len(space)
    return EmbeddingStage(
        index=0,
        cover=None,
        vertices=[],
        coord_offset=0,
        coord_count=0,
        images=[SparseVector.zero() for _ in range(n)],
        weights=[{} for _ in range(n)],
    )


def refine_stage(
    space: FiniteMetricSpace,
    prev: EmbeddingStage,
    cover: ColoredCover,
    schedule: ScaleSchedule,
    i: int | None = None,
    *,
    threads: int | None = None,
) -> EmbeddingStage:
    """Build stage i = prev.index + 1 from its cover.

    Raises:
        CoverError: a cover set is the whole space, or some point has zero total weight.
    """
    i = prev.index + 1 if i is None else i
    if i != prev.index + 1:
        raise ValueError(f"stage {i} cannot follow stage {prev.index}")
    if cover.full_space_sets:
        raise CoverError(f"stage {i}: cover contains a set equal to the whole space", stage=i)
    delta_i = schedule.delta(i, "upper")
    if cover.target_delta > delta_i * (1 + CERT_TOLERANCE):
        logger.warning("stage %d: cover built at delta=%.6g, coarser than δ_%d=%.6g", i, cover.target_delta, i, delta_i)

    eps = schedule.eps(i)
    W = weight_matrix(space, cover, threads=threads)
    totals = W.sum(axis=1)
    if np.any(totals <= 0):
        x = int(np.flatnonzero(totals <= 0)[0])
        raise CoverError(f"stage {i}: point {x} has zero total weight; the Lebesgue certificate is wrong", stage=i, point=x)

    offset = prev.coord_count
    vertices = [
        prev.images[s.anchor] + SparseVector.basis(offset + k, eps / 2)
        for k, s in enumerate(cover.sets)
    ]
    for v in vertices:
        v.dimension_hint = offset + len(cover)

    def _bary(x: int) -> dict[int, float]:
        ks = np.flatnonzero(W[x] > 0)
        return {int(k): float(W[x, k] / totals[x]) for k in ks}

    weights = parallel_map(_bary, list(space.points), threads=threads)
    images = parallel_map(lambda lam: combine(lam, vertices), weights, threads=threads)
    for v in images:
        v.dimension_hint = offset + len(cover)

    stage = EmbeddingStage(
        index=i,
        cover=cover,
        vertices=vertices,
        coord_offset=offset,
        coord_count=offset + len(cover),
        images=images,
        weights=weights,
        eps=eps,
        delta=cover.target_delta,
    )
    logger.debug("refine_stage: stage %d, %d sets, m=%d", i, len(cover), stage.coord_count)
    return stage


def coordinate_discipline(prev: EmbeddingStage, stage: EmbeddingStage) -> list[str]:
    """Check that stage only writes coordinates [m_{i-1}, m_i) beyond the previous images."""
    errors = []
    for k, (p, s) in enumerate(zip(stage.vertices, stage.cover or [])):
        head = {c: v for c, v in p.entries.items() if c < stage.coord_offset}
        if head != prev.images[s.anchor].entries:
            errors.append(f"vertex {k}: earlier coordinates differ from f_{prev.index}(x_{k})")
        tail = {c: v for c, v in p.entries.items() if c >= stage.coord_offset}
        if tail != {stage.coord_offset + k: stage.eps / 2}:
            errors.append(f"vertex {k}: new coordinates are not (ε_i/2)·e_(m+{k})")
    for x, img in enumerate(stage.images):
        if img.entries and max(img.entries) >= stage.coord_count:
            errors.append(f"image of {x} leaves the first {stage.coord_count} coordinates")
    return errors


# ── Construction ──────────────────────────────────────────────────────


@dataclass
class Construction:
    """Stages f_0, ..., f_I of one run.

    Attributes:
        space: The normalized space.
        schedule: The schedule the run used.
        stages: Built stages, stage 0 first.
        stop_reason: ``"completed"``, ``"stabilized"`` or ``"precision"``.
        source: Name of the cover source.
    """

    space: FiniteMetricSpace
    schedule: ScaleSchedule
    stages: list[EmbeddingStage]
    stop_reason: StopReason = "completed"
    source: str = "greedy"

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self) -> Iterator[EmbeddingStage]:
        return iter(self.stages)

    def __getitem__(self, i: int) -> EmbeddingStage:
        return self.stages[i]

    @property
    def last(self) -> EmbeddingStage:
        return self.stages[-1]

    @property
    def tail_bound(self) -> float:
        """2ε_{I+1}, an upper bound on d(f, f_I)."""
        return 2.0 * materialize(self.schedule.log_eps[self.last.index + 1], "upper")


def _default_source(space: FiniteMetricSpace, schedule: ScaleSchedule) -> CoverSource:
    if space.kind in ("cantor", "grid", "product") and space.power == 1.0:
        return StructuredCovers()
    return GreedyCovers(schedule.params.sigma)


def run_construction(
    space: FiniteMetricSpace,
    schedule: ScaleSchedule,
    stages: int | None = None,
    source: CoverSource | None = None,
    *,
    stop_on_stabilization: bool = True,
    delta_max: float = 1.0,
    threads: int | None = None,
) -> Construction:
    """Build stages 1..stages in order.

    Stops early after the first stage whose cover is all singletons (when
    ``stop_on_stabilization``), and in exact mode before a stage whose ε_i is
    below 2^-60 unless its cover is all singletons.

    Raises:
        CoverError: the source returned a cover that is not certified at δ_i
            with Lebesgue ≥ σδ_i; the stage index is attached.
        ValueError: δ₁ exceeds ``delta_max``, the scale below which the caller
            knows covers exist.
    """
    stages = schedule.stages if stages is None else stages
    if not 1 <= stages <= schedule.stages:
        raise ValueError(f"stages must lie in [1, {schedule.stages}], got {stages}")
    if not 0 < delta_max <= 1:
        raise ValueError(f"delta_max must lie in (0, 1], got {delta_max}")
    if schedule.log_delta[1] > math.log2(delta_max):
        raise ValueError(f"δ₁ = 2^{schedule.log_delta[1]:.3f} exceeds delta_max={delta_max}")
    source = source or _default_source(space, schedule)
    sigma = schedule.params.sigma

    built = [initial_stage(space)]
    reason: StopReason = "completed"
    for i in range(1, stages + 1):
        try:
            delta_i = schedule.delta(i)
        except PrecisionError:
            logger.warning("stage %d: δ_%d underflows binary floating point; stopping", i, i)
            reason = "precision"
            break
        cover = source.cover_for(space, delta_i)
        if (
            cover.full_space_sets
            or cover.mesh > delta_i * (1 + CERT_TOLERANCE)
            or cover.lebesgue < sigma * delta_i * (1 - CERT_TOLERANCE)
        ):
            raise CoverError(
                f"stage {i}: cover at δ={delta_i:.6g} is not certified "
                f"(mesh={cover.mesh:.6g}, lebesgue={cover.lebesgue:.6g}, need >= {sigma * delta_i:.6g})",
                stage=i,
            )
        if schedule.mode == "exact" and schedule.log_eps[i] < EXACT_MODE_MIN_LOG2_EPS and not cover.is_singletons:
            logger.warning("stage %d: ε_%d = 2^%.1f is too small for exact-mode coordinates; stopping", i, i, schedule.log_eps[i])
            reason = "precision"
            break
        built.append(refine_stage(space, built[-1], cover, schedule, i, threads=threads))
        if stop_on_stabilization and cover.is_singletons:
            reason = "stabilized"
            break
    logger.info("run_construction: %d stages, stop reason %s", len(built) - 1, reason)
    return Construction(space=space, schedule=schedule, stages=built, stop_reason=reason, source=source.name)


def evaluate_limit(construction: Construction, x: int) -> tuple[SparseVector, float]:
    """The last image of x and the radius 2ε_{I+1} around it that contains f(x)."""
    return construction.last.images[x], construction.tail_bound


# ── Simplices ─────────────────────────────────────────────────────────


@dataclass
class SimplexComplex:
    """Simplices spanned by vertices of intersecting cover elements.

    Attributes:
        simplices: Cover-index tuples, faces included, sorted by size then index.
        maximal: Support sets realized by some point that no other realized support contains.
        stage: Stage index.
        count_bound_log2: log₂ of |𝒰|^(n+2).
    """

    simplices: list[tuple[int, ...]]
    maximal: list[tuple[int, ...]]
    stage: int
    count_bound_log2: float

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def within_bound(self) -> bool:
        return not self.simplices or math.log2(len(self.simplices)) <= self.count_bound_log2 + 1e-12

    @property
    def max_vertices(self) -> int:
        return max((len(s) for s in self.simplices), default=0)


def enumerate_simplices(stage: EmbeddingStage, n: int = 0) -> SimplexComplex:
    """Collect the simplices of stage i together with all their faces."""
    if stage.cover is None:
        raise ValueError("stage 0 has no cover")
    supports = {tuple(sorted(w)) for w in stage.weights if w}
    maximal = sorted(s for s in supports if not any(set(s) < set(t) for t in supports))
    faces: set[tuple[int, ...]] = set()
    for s in maximal:
        for r in range(1, len(s) + 1):
            faces.update(itertools.combinations(s, r))
    simplices = sorted(faces, key=lambda t: (len(t), t))
    complex_ = SimplexComplex(
        simplices=simplices,
        maximal=maximal,
        stage=stage.index,
        count_bound_log2=(n + 2) * math.log2(max(len(stage.cover), 1)),
    )
    if not complex_.within_bound:
        logger.warning("stage %d: %d simplices exceed |U|^(n+2)", stage.index, len(simplices))
    return complex_


def simplex_bound_log2(schedule: ScaleSchedule, i: int) -> float:
    """log₂ of N^((n+2)·log₂(2/(σδ_i))), the exact-mode simplex count bound."""
    p = schedule.params
    return (p.n + 2) * (1.0 - math.log2(p.sigma) - schedule.log_delta[i]) * math.log2(p.N)


# ── Rescaling ─────────────────────────────────────────────────────────


def rescale_constants(lam: float, alpha: float, beta: float, diameter: float) -> tuple[float, float]:
    """Envelope constants for the original metric d = diameter · d̂.

    ``(1/λ) d̂^α ≤ |f(x) − f(y)| ≤ λ d̂^β`` becomes
    ``a·d^α ≤ |f(x) − f(y)| ≤ b·d^β`` with a = 1/(λ·diam^α), b = λ/diam^β.
    """
    if lam <= 0 or diameter <= 0:
        raise ValueError("lam and diameter must be positive")
    return 1.0 / (lam * diameter**alpha), lam / diameter**beta


# ── Serialization ─────────────────────────────────────────────────────


def stage_to_dict(stage: EmbeddingStage) -> dict[str, Any]:
    data: dict[str, Any] = {
        "i": stage.index,
        "m": stage.coord_count,
        "offset": stage.coord_offset,
        "eps": stage.eps,
        "delta": stage.delta,
        "vertices": [v.to_pairs() for v in stage.vertices],
        "images": {str(x): v.to_pairs() for x, v in enumerate(stage.images)},
        "weights": {str(x): {str(k): lam for k, lam in w.items()} for x, w in enumerate(stage.weights)},
    }
    if stage.cover is not None:
        data["cover"] = stage.cover.to_dict()
        data["certs"] = data["cover"]["certs"]
    return data


def stage_from_dict(space: FiniteMetricSpace, data: dict[str, Any]) -> EmbeddingStage:
    """Rebuild a stage; its cover certificates are recomputed."""
    m = int(data["m"])
    n = len(space)
    images = [SparseVector.from_pairs(data["images"][str(x)], m) for x in range(n)]
    weights = [{int(k): float(v) for k, v in data.get("weights", {}).get(str(x), {}).items()} for x in range(n)]
    cover = cover_from_dict(space, data["cover"]) if "cover" in data else None
    return EmbeddingStage(
        index=int(data["i"]),
        cover=cover,
        vertices=[SparseVector.from_pairs(v, m) for v in data["vertices"]],
        coord_offset=int(data.get("offset", 0)),
        coord_count=m,
        images=images,
        weights=weights,
        eps=float(data.get("eps", 1.0)),
        delta=float(data.get("delta", 1.0)),
    )
