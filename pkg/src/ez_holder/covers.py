"""Colored covers with certified mesh, Lebesgue number and multiplicity.

On a finite sample, a cover set is open in the sense that matters to the
construction: x belongs to U exactly when its weight d(x, X \\ U) is positive.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CoverError
from .metric import CantorSpec, FiniteMetricSpace
from .parallel import parallel_map

logger = logging.getLogger(__name__)

CERT_TOLERANCE = 1e-9

# ── Types ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CoverSet:
    """One element U_k of a cover.

    Attributes:
        members: Point ids in the set.
        anchor: Representative point x_k (the smallest member id).
        color: Color class of the set.
    """

    members: frozenset[int]
    anchor: int
    color: int = 0

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("cover sets must be nonempty")
        if self.anchor not in self.members:
            raise ValueError(f"anchor {self.anchor} is not a member of the set")
        if self.color < 0:
            raise ValueError(f"color must be nonnegative, got {self.color}")

    @classmethod
    def of(cls, members: Iterable[int], color: int = 0) -> CoverSet:
        ms = frozenset(int(m) for m in members)
        if not ms:
            raise ValueError("cover sets must be nonempty")
        return cls(members=ms, anchor=min(ms), color=color)

    @property
    def ids(self) -> list[int]:
        return sorted(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self.members


@dataclass(frozen=True)
class ColoredCover:
    """A colored cover of a finite space together with its computed certificates.

    Attributes:
        sets: Cover elements ordered by (color, smallest member id).
        mesh: Largest set diameter.
        lebesgue: min over x of max over U of d(x, X \\ U).
        multiplicity: Most sets containing a single point.
        color_count: Number of distinct colors.
        target_delta: Scale δ the cover was built for.
        sigma: Lebesgue coefficient the cover claims.
        full_space_sets: Number of sets equal to the whole space.
        provenance: How the cover was produced.
    """

    sets: tuple[CoverSet, ...]
    mesh: float
    lebesgue: float
    multiplicity: int
    color_count: int
    target_delta: float
    sigma: float
    full_space_sets: int = 0
    provenance: str = "greedy"

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[CoverSet]:
        return iter(self.sets)

    def __getitem__(self, k: int) -> CoverSet:
        return self.sets[k]

    @property
    def is_certified(self) -> bool:
        """Mesh ≤ δ, Lebesgue ≥ σδ and no full-space set."""
        return (
            self.full_space_sets == 0
            and self.mesh <= self.target_delta * (1 + CERT_TOLERANCE)
            and self.lebesgue >= self.sigma * self.target_delta * (1 - CERT_TOLERANCE)
        )

    @property
    def is_singletons(self) -> bool:
        return all(len(s) == 1 for s in self.sets)

    def memberships(self, n: int) -> list[tuple[int, ...]]:
        """For every point, the indices of the sets containing it."""
        out: list[list[int]] = [[] for _ in range(n)]
        for k, s in enumerate(self.sets):
            for x in s.members:
                out[x].append(k)
        return [tuple(m) for m in out]

    def to_dict(self) -> dict[str, Any]:
        return {
            "targetDelta": self.target_delta,
            "sigma": self.sigma,
            "provenance": self.provenance,
            "sets": [{"members": s.ids, "anchor": s.anchor, "color": s.color} for s in self.sets],
            "certs": {
                "mesh": self.mesh,
                "lebesgue": self.lebesgue,
                "multiplicity": self.multiplicity,
                "colorCount": self.color_count,
            },
        }


# ── Weights ───────────────────────────────────────────────────────────


def weight(space: FiniteMetricSpace, cover_set: CoverSet, x: int) -> float:
    """d(x, X \\ U): distance from x to the complement of the set.

    Raises:
        ValueError: the set is the whole space.
    """
    complement = np.setdiff1d(np.arange(len(space)), np.fromiter(cover_set.members, dtype=int))
    if complement.size == 0:
        raise ValueError("weight is undefined for a set equal to the whole space")
    if x not in cover_set.members:
        return 0.0
    return float(space.row(x)[complement].min())


def _weight_column(space: FiniteMetricSpace, members: Sequence[int]) -> np.ndarray:
    n = len(space)
    col = np.zeros(n)
    idx = np.asarray(sorted(members), dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[idx] = False
    if not mask.any():
        return col
    col[idx] = space.matrix[np.ix_(idx, np.flatnonzero(mask))].min(axis=1)
    return col


def weight_matrix(space: FiniteMetricSpace, sets: Sequence[CoverSet] | ColoredCover, threads: int | None = None) -> np.ndarray:
    """Weights of every point in every set, shape (points, sets).

    Full-space sets get a zero column.
    """
    cols = parallel_map(lambda s: _weight_column(space, s.ids), list(sets), threads=threads)
    if not cols:
        return np.zeros((len(space), 0))
    return np.column_stack(cols)


# ── Certification ─────────────────────────────────────────────────────


def set_diameter(space: FiniteMetricSpace, members: Iterable[int]) -> float:
    idx = np.asarray(sorted(members), dtype=int)
    if idx.size < 2:
        return 0.0
    return float(space.matrix[np.ix_(idx, idx)].max())


def _lebesgue(W: np.ndarray) -> float:
    if W.shape[1] == 0:
        return 0.0
    return float(W.max(axis=1).min())


def certify(
    space: FiniteMetricSpace,
    sets: Sequence[CoverSet],
    target_delta: float,
    sigma: float,
    provenance: str,
    *,
    threads: int | None = None,
) -> ColoredCover:
    """Compute the certificates of a family of sets and wrap it as a ColoredCover."""
    n = len(space)
    ordered = tuple(sorted(sets, key=lambda s: (s.color, s.anchor)))
    W = weight_matrix(space, ordered, threads=threads)
    counts = np.zeros(n, dtype=int)
    for s in ordered:
        counts[s.ids] += 1
    full = sum(1 for s in ordered if len(s) == n)
    return ColoredCover(
        sets=ordered,
        mesh=max((set_diameter(space, s.members) for s in ordered), default=0.0),
        lebesgue=_lebesgue(W),
        multiplicity=int(counts.max()) if n else 0,
        color_count=len({s.color for s in ordered}),
        target_delta=float(target_delta),
        sigma=float(sigma),
        full_space_sets=full,
        provenance=provenance,
    )


def _color(members: list[frozenset[int]], n: int) -> list[int]:
    """First-fit coloring of the intersection graph, sets visited by smallest member id."""
    order = sorted(range(len(members)), key=lambda k: min(members[k]))
    graph = nx.Graph()
    graph.add_nodes_from(order)
    by_point: list[list[int]] = [[] for _ in range(n)]
    for k, ms in enumerate(members):
        for x in ms:
            by_point[x].append(k)
    for ks in by_point:
        for a in range(len(ks)):
            for b in range(a + 1, len(ks)):
                graph.add_edge(ks[a], ks[b])
    coloring = nx.greedy_color(graph, strategy=lambda g, colors: iter(order))
    return [coloring[k] for k in range(len(members))]


def _prune(space: FiniteMetricSpace, members: list[frozenset[int]], floor: float) -> list[frozenset[int]]:
    """Drop sets contained in another set, largest first, keeping Lebesgue ≥ floor."""
    if not members:
        return members
    W = np.column_stack([_weight_column(space, sorted(m)) for m in members])
    alive = [True] * len(members)
    order = sorted(range(len(members)), key=lambda k: (-len(members[k]), min(members[k])))
    for k in order:
        if not any(alive[j] and j != k and members[k] <= members[j] for j in range(len(members))):
            continue
        alive[k] = False
        keep = [j for j in range(len(members)) if alive[j]]
        if _lebesgue(W[:, keep]) < floor * (1 - CERT_TOLERANCE):
            alive[k] = True
            logger.debug("prune: kept redundant set %d to preserve the Lebesgue number", k)
    return [m for m, a in zip(members, alive) if a]


def _finish(
    space: FiniteMetricSpace,
    members: list[frozenset[int]],
    delta: float,
    sigma: float,
    provenance: str,
) -> ColoredCover:
    members = _prune(space, _dedupe(members), sigma * delta)
    colors = _color(members, len(space))
    sets = [CoverSet.of(m, color=c) for m, c in zip(members, colors)]
    return certify(space, sets, delta, sigma, provenance)


def _dedupe(members: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    seen: set[frozenset[int]] = set()
    out = []
    for m in members:
        if m and m not in seen:
            seen.add(m)
            out.append(m)
    return out


# ── Greedy covers ─────────────────────────────────────────────────────


def _net(D: np.ndarray, candidates: np.ndarray, radius: float) -> list[int]:
    """Maximal radius-separated subset of candidates, chosen in id order."""
    mind = np.full(candidates.size, np.inf)
    centers: list[int] = []
    while True:
        free = np.flatnonzero(mind >= radius)
        if free.size == 0:
            return centers
        c = int(candidates[free[0]])
        centers.append(c)
        mind = np.minimum(mind, D[c, candidates])


def _voronoi_sets(D: np.ndarray, comp: np.ndarray, delta: float, s: float) -> list[frozenset[int]]:
    r = delta / 2 - s
    if r <= 0:
        logger.warning("sigma >= 1/2 leaves no room for a Voronoi cover; certification will likely fail")
        r = delta / 4
    centers = _net(D, comp, r)
    owner = np.asarray(centers)[np.argmin(D[np.ix_(comp, centers)], axis=1)]
    out = []
    for c in centers:
        cell = comp[owner == c]
        near = D[np.ix_(cell, comp)].min(axis=0) <= s * (1 + CERT_TOLERANCE)
        out.append(frozenset(int(x) for x in comp[near]))
    return out


def build_greedy_cover(space: FiniteMetricSpace, delta: float, sigma: float) -> ColoredCover:
    """Synthesize a colored cover at scale delta with Lebesgue target sigma·delta.

    Components of the graph joining points at distance ≤ σδ become sets when
    their diameter is at most δ. Larger components are covered by the closed
    σδ-neighbourhoods of the Voronoi cells of a (δ/2 − σδ)-net.

    The returned cover always carries its computed certificates; check
    ``is_certified`` before relying on it.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    n = len(space)
    D = space.matrix
    s = sigma * delta
    adjacency = csr_matrix(D <= s * (1 + CERT_TOLERANCE))
    _, labels = connected_components(adjacency, directed=False)

    members: list[frozenset[int]] = []
    comps = sorted((np.flatnonzero(labels == lab) for lab in np.unique(labels)), key=lambda c: int(c[0]))
    for comp in comps:
        diam = float(D[np.ix_(comp, comp)].max()) if comp.size > 1 else 0.0
        if diam <= delta * (1 + CERT_TOLERANCE) and comp.size < n:
            members.append(frozenset(int(x) for x in comp))
        else:
            members.extend(_voronoi_sets(D, comp, delta, s))

    cover = _finish(space, members, delta, sigma, "greedy")
    if not cover.is_certified:
        logger.warning(
            "greedy cover at delta=%.6g not certified: mesh=%.6g lebesgue=%.6g (need >= %.6g)",
            delta, cover.mesh, cover.lebesgue, sigma * delta,
        )
    logger.debug("build_greedy_cover: delta=%.6g -> %d sets, multiplicity %d", delta, len(cover), cover.multiplicity)
    return cover


# ── Structured covers ─────────────────────────────────────────────────


def _cantor_level(spec: CantorSpec, delta: float) -> int | None:
    """Smallest sampled level whose widest interval is at most delta."""
    for k, widths in enumerate(spec.interval_widths()):
        if max(widths) <= delta * (1 + CERT_TOLERANCE):
            return k
    return None


def _cantor_axis(values: Sequence[Fraction], spec: CantorSpec, level: int | None) -> list[np.ndarray]:
    """Point groups of the level-k interval traces (singletons past the sampled depth).

    ``values`` must be sorted ascending, as the Cantor and product builders emit them.
    """
    vals = list(values)
    if level is None or level > spec.levels:
        bounds = [(u, u) for u in sorted(set(vals))]
    else:
        bounds = spec.interval_bounds(level)
    groups = []
    for a, b in bounds:
        lo, hi = bisect.bisect_left(vals, a), bisect.bisect_right(vals, b)
        if hi > lo:
            groups.append(np.arange(lo, hi))
    return groups


def _ball_axis(values: np.ndarray, delta: float) -> list[np.ndarray]:
    """Open balls of radius δ/2 centred at jδ/2 on one axis of [0, 1]."""
    out = []
    for j in range(math.ceil(2.0 / delta) + 2):
        idx = np.flatnonzero(np.abs(values - j * delta / 2) < delta / 2 - 1e-12)
        if idx.size:
            out.append(idx)
    return out


def _product_sets(axes: list[list[np.ndarray]], n: int) -> list[frozenset[int]]:
    """Every nonempty intersection of one group per axis."""
    out: list[frozenset[int]] = []

    def _walk(a: int, current: np.ndarray) -> None:
        if current.size == 0:
            return
        if a == len(axes):
            out.append(frozenset(int(x) for x in current))
            return
        for idx in axes[a]:
            _walk(a + 1, np.intersect1d(current, idx, assume_unique=True))

    _walk(0, np.arange(n))
    return out


def build_structured_cover(
    space: FiniteMetricSpace,
    level: int | None = None,
    *,
    delta: float | None = None,
) -> ColoredCover:
    """Exact covers of the example spaces, read off their constructions.

    Cantor samples get level-k interval traces (multiplicity 1). Unit-cube
    grids get products of shifted open balls of radius δ/2 centred at jδ/2
    (two colors per axis). ``C × Iⁿ`` grids get products of both, with the
    multiplicity measured on the result.

    Args:
        space: A space built by build_cantor, build_cube_grid or build_product_grid.
        level: Cantor level k (Cantor spaces), or δ = 2^-level for grids.
        delta: Target scale in the normalized metric; overrides ``level``.
    """
    kind = space.kind
    if kind not in ("cantor", "grid", "product"):
        raise ValueError(f"no structured cover for spaces of kind {kind!r}")
    if level is None and delta is None:
        raise ValueError("pass a level or a delta")

    if kind == "cantor":
        spec = CantorSpec.from_dict(space.provenance["cantor"])
        k = level if delta is None else _cantor_level(spec, delta)
        if k == 0:
            raise ValueError("level 0 is the whole space; structured Cantor covers start at level 1")
        if k is not None and k > spec.levels:
            k = None
        if delta is None:
            target = max(spec.interval_widths()[k]) if k is not None else space.min_distance
        else:
            target = float(delta)
        values = [p[0] for p in space.exact_coords]
        members = [frozenset(int(x) for x in g) for g in _cantor_axis(values, spec, k)]
        declared = 1.0 / 3.0
        provenance = f"structured:cantor:{'singletons' if k is None else k}"
    else:
        n_axes = int(space.provenance["n"])
        target = float(delta) if delta is not None else 2.0**-level
        # raw factors live in [0, 1]; a raw box of side δ has normalized diameter ≤ δ
        raw = space.raw_coords
        axes: list[list[np.ndarray]] = []
        offset = 0
        if kind == "product":
            spec = CantorSpec.from_dict(space.provenance["cantor"])
            values = [p[0] for p in space.exact_coords]
            axes.append(_cantor_axis(values, spec, _cantor_level(spec, target)))
            offset = 1
        for a in range(n_axes):
            axes.append(_ball_axis(raw[:, offset + a], target))
        members = _product_sets(axes, len(space))
        declared = 1.0 / (4.0 * math.sqrt(n_axes + offset))
        provenance = f"structured:{kind}"

    members = _prune(space, _dedupe(members), 0.0)
    colors = _color(members, len(space))
    sets = [CoverSet.of(m, color=c) for m, c in zip(members, colors)]
    cover = certify(space, sets, target, declared, provenance)
    sigma = min(declared, cover.lebesgue / target) if target > 0 else declared
    return replace(cover, sigma=sigma)


# ── Size-controlled refinement ────────────────────────────────────────


def size_bound_log2(N: int, sigma: float, delta: float, diameter: float = 1.0) -> float:
    """log₂ of N^(log₂(2·diam/(σδ)))."""
    return math.log2(N) * math.log2(2.0 * diameter / (sigma * delta))


def size_controlled_refine(space: FiniteMetricSpace, base: ColoredCover, N: int) -> ColoredCover:
    """Shrink a certified cover to few sets by snapping a σ′δ/2-net into it.

    Each net point x_j is snapped to a base element containing B(x_j, σ′δ).
    The result is a subfamily of ``base`` with Lebesgue ≥ σ′δ/2, so its
    coefficient is σ = σ′/2.

    Raises:
        CoverError: no base element contains some B(x_j, σ′δ).
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if not base.is_certified:
        raise CoverError("size_controlled_refine needs a certified base cover", provenance=base.provenance)
    sigma_p, delta = base.sigma, base.target_delta
    D = space.matrix
    W = weight_matrix(space, base)
    radius = sigma_p * delta / 2
    centers = _net(D, np.arange(len(space)), radius)
    chosen: list[int] = []
    for c in centers:
        ok = np.flatnonzero(W[c] >= sigma_p * delta * (1 - CERT_TOLERANCE))
        if ok.size == 0:
            raise CoverError(
                f"no cover element contains the {sigma_p * delta:.6g}-ball around point {c}; "
                "the base cover's Lebesgue certificate is wrong",
                point=int(c),
            )
        best = int(ok[np.argmax(W[c, ok])])
        if best not in chosen:
            chosen.append(best)

    used = sorted({base.sets[k].color for k in chosen})
    remap = {c: i for i, c in enumerate(used)}
    sets = [replace(base.sets[k], color=remap[base.sets[k].color]) for k in chosen]
    cover = certify(space, sets, delta, sigma_p / 2, f"refined:{base.provenance}")

    count_cap = math.log2(N) * math.ceil(math.log2(4.0 * space.diameter / (sigma_p * delta)))
    if len(centers) > 1 and math.log2(len(centers)) > count_cap + 1e-12:
        logger.warning("net of %d balls exceeds N^ceil(log2(4 diam/σ'δ)); N=%d is too small for this space", len(centers), N)
    if math.log2(len(cover)) > size_bound_log2(N, sigma_p / 2, delta, space.diameter) + 1e-12:
        logger.warning("refined cover has %d sets, above the N^log2(2 diam/σδ) bound", len(cover))
    return cover


# ── Weight inequalities ───────────────────────────────────────────────


def weight_profile(space: FiniteMetricSpace, cover: ColoredCover, x: int) -> np.ndarray:
    """Weights of point x in every set of the cover, in cover order."""
    n = len(space)
    out = np.zeros(len(cover))
    for k, s in enumerate(cover.sets):
        if x in s.members and len(s) < n:
            out[k] = weight(space, s, x)
    return out


@dataclass
class WeightReport:
    """Outcome of the weight inequalities on one cover.

    Attributes:
        pairs_checked: Point pairs examined.
        worst_lipschitz_slack: min over pairs and sets of d(x, y) − |w_U(x) − w_U(y)|.
        sum_range: (min, max) of the weight sums.
        isolated_sets: Sets with some weight above 2δ.
        errors: Violations with witnesses.
    """

    pairs_checked: int = 0
    worst_lipschitz_slack: float = math.inf
    sum_range: tuple[float, float] = (0.0, 0.0)
    isolated_sets: list[int] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return len(self.errors) == 0


def check_weight_bounds(space: FiniteMetricSpace, cover: ColoredCover, delta: float | None = None) -> WeightReport:
    """Check the inequalities the construction needs from the weights.

    Every weight is 1-Lipschitz; the weight sum Σ_U w_U(x) lies in [ξ, 2Mδ]
    (ξ the Lebesgue number, M the multiplicity) wherever no weight exceeds 2δ,
    and is 2M-Lipschitz; a set in which some weight exceeds 2δ meets no
    other set.
    """
    delta = cover.target_delta if delta is None else float(delta)
    report = WeightReport()
    n = len(space)
    D = space.matrix
    W = weight_matrix(space, cover)
    M = max(cover.multiplicity, 1)
    tol = CERT_TOLERANCE

    for k in range(W.shape[1]):
        col = W[:, k]
        slack = D - np.abs(col[:, None] - col[None, :])
        i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
        report.worst_lipschitz_slack = min(report.worst_lipschitz_slack, float(slack[i, j]))
        if slack[i, j] < -tol * max(1.0, D[i, j]):
            report.errors.append(f"weight of set {k} is not 1-Lipschitz at ({i}, {j})")
    report.pairs_checked = n * (n - 1) // 2

    S = W.sum(axis=1)
    report.sum_range = (float(S.min()), float(S.max())) if n else (0.0, 0.0)
    xi = _lebesgue(W)
    if np.any(S < xi * (1 - tol)):
        report.errors.append(f"weight sum {S.min():.6g} falls below the Lebesgue number {xi:.6g}")
    bounded = W.max(axis=1) <= 2 * delta * (1 + tol)
    if np.any(S[bounded] > 2 * M * delta * (1 + tol)):
        x = int(np.flatnonzero(bounded & (S > 2 * M * delta * (1 + tol)))[0])
        report.errors.append(f"weight sum {S[x]:.6g} at point {x} exceeds 2Mδ = {2 * M * delta:.6g}")
    sum_slack = 2 * M * D - np.abs(S[:, None] - S[None, :])
    if sum_slack.size and sum_slack.min() < -tol * max(1.0, float(D.max())):
        i, j = np.unravel_index(int(np.argmin(sum_slack)), sum_slack.shape)
        report.errors.append(f"weight sum is not 2M-Lipschitz at ({i}, {j})")

    for k in np.flatnonzero(W.max(axis=0) > 2 * delta * (1 + tol)):
        k = int(k)
        report.isolated_sets.append(k)
        for j, other in enumerate(cover.sets):
            if j != k and other.members & cover.sets[k].members:
                report.errors.append(f"set {k} has weight above 2δ but meets set {j}")
                break
    return report


# ── Verification ──────────────────────────────────────────────────────


@dataclass
class CoverReport:
    """Recomputed certificates of a cover.

    Attributes:
        mesh: Largest set diameter.
        lebesgue: Lebesgue number.
        multiplicity: Largest number of sets containing a point.
        color_count: Number of colors used.
        redundant_pairs: (i, j) with set i contained in set j.
        full_space_sets: Indices of sets equal to the whole space.
        warnings: Non-blocking notes.
        errors: Certificate failures.
    """

    mesh: float = 0.0
    lebesgue: float = 0.0
    multiplicity: int = 0
    color_count: int = 0
    redundant_pairs: list[tuple[int, int]] = field(default_factory=list)
    full_space_sets: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def is_certified(self) -> bool:
        return len(self.errors) == 0


def verify_cover(space: FiniteMetricSpace, cover: ColoredCover, *, threads: int | None = None) -> CoverReport:
    """Recompute every certificate of a cover and compare with the stored values."""
    report = CoverReport()
    n = len(space)
    sets = list(cover.sets)

    covered = np.zeros(n, dtype=int)
    for s in sets:
        covered[s.ids] += 1
    if np.any(covered == 0):
        report.errors.append(f"points not covered: {np.flatnonzero(covered == 0)[:10].tolist()}")
    report.multiplicity = int(covered.max()) if n else 0
    report.color_count = len({s.color for s in sets})

    report.full_space_sets = [k for k, s in enumerate(sets) if len(s) == n]
    for k in report.full_space_sets:
        report.errors.append(f"set {k} is the whole space; its weight is undefined")

    for a in range(len(sets)):
        for b in range(len(sets)):
            if a == b:
                continue
            if sets[a].color == sets[b].color and a < b and sets[a].members & sets[b].members:
                report.errors.append(f"sets {a} and {b} share color {sets[a].color} but intersect")
            if sets[a].members <= sets[b].members and (sets[a].members != sets[b].members or a > b):
                report.redundant_pairs.append((a, b))
    if report.redundant_pairs:
        a, b = report.redundant_pairs[0]
        report.errors.append(
            f"set {a} is contained in set {b} ({len(report.redundant_pairs)} redundant pairs); prune with prune_redundant()"
        )

    report.mesh = max((set_diameter(space, s.members) for s in sets), default=0.0)
    W = weight_matrix(space, sets, threads=threads)
    report.lebesgue = _lebesgue(W)

    # every open ball of radius lebesgue must sit inside some set
    for x in range(n):
        ball = set(np.flatnonzero(space.matrix[x] < report.lebesgue * (1 - CERT_TOLERANCE)).tolist())
        if not any(ball <= s.members for s in sets):
            report.errors.append(f"B({x}, {report.lebesgue:.6g}) lies in no cover set")
            break

    if report.multiplicity > report.color_count:
        report.errors.append(f"multiplicity {report.multiplicity} exceeds the {report.color_count} colors")

    for name, stored, ours in (
        ("mesh", cover.mesh, report.mesh),
        ("lebesgue", cover.lebesgue, report.lebesgue),
        ("multiplicity", cover.multiplicity, report.multiplicity),
    ):
        if not math.isclose(stored, ours, rel_tol=CERT_TOLERANCE, abs_tol=1e-15):
            report.errors.append(f"stored {name} {stored:.6g} differs from recomputed {ours:.6g}")

    if report.mesh > cover.target_delta * (1 + CERT_TOLERANCE):
        report.errors.append(f"mesh {report.mesh:.6g} exceeds delta {cover.target_delta:.6g}")
    if report.lebesgue < cover.sigma * cover.target_delta * (1 - CERT_TOLERANCE):
        report.errors.append(
            f"Lebesgue number {report.lebesgue:.6g} is below sigma*delta {cover.sigma * cover.target_delta:.6g}"
        )
    if cover.color_count > 0 and report.color_count != cover.color_count:
        report.warnings.append(f"stored color count {cover.color_count} differs from {report.color_count}")
    return report


def prune_redundant(space: FiniteMetricSpace, cover: ColoredCover) -> ColoredCover:
    """Remove subset-redundant sets while keeping Lebesgue ≥ σδ."""
    members = set(_prune(space, [s.members for s in cover.sets], cover.sigma * cover.target_delta))
    kept = [s for s in cover.sets if s.members in members]
    seen: set[frozenset[int]] = set()
    unique = []
    for s in kept:
        if s.members not in seen:
            seen.add(s.members)
            unique.append(s)
    return certify(space, unique, cover.target_delta, cover.sigma, cover.provenance)


def cover_from_dict(space: FiniteMetricSpace, data: dict[str, Any]) -> ColoredCover:
    """Rebuild a cover from its dump; certificates are recomputed, never trusted."""
    sets = []
    for raw in data["sets"]:
        ms = frozenset(int(m) for m in raw["members"])
        sets.append(CoverSet(members=ms, anchor=int(raw.get("anchor", min(ms))), color=int(raw.get("color", 0))))
    return certify(space, sets, float(data["targetDelta"]), float(data["sigma"]), str(data.get("provenance", "loaded")))
