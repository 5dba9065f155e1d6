"""Finite metric spaces, example-space builders and doubling estimates.

Every space is a finite sample of a compact metric space. Distances are
computed lazily from raw coordinates (or read from an explicit matrix), then
raised to a snowflake power and multiplied by a normalization scale:

    dist(i, j) = scale * base(i, j) ** power
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import cdist, pdist, squareform

logger = logging.getLogger(__name__)

DEFAULT_POINT_BUDGET = 200_000
EXHAUSTIVE_TRIANGLE_LIMIT = 200
MATRIX_LIMIT = 6_000

# ── Cantor interval trees ─────────────────────────────────────────────


GapFunction = Callable[[int, int, Fraction], "Fraction | float"]


@dataclass(frozen=True)
class CantorSpec:
    """Recipe for a symmetric Cantor set in [0, 1].

    Level k cuts one open gap J_{k,i} out of the middle of each level-(k-1)
    interval, i = 1..2^(k-1).

    Attributes:
        gap: ``gap(k, i, parent_width)`` returns diam(J_{k,i}).
        levels: Sampling depth m; the sample is the 2^(m+1) interval endpoints.
        name: ``"third"``, ``"fastgap"`` or ``"custom"`` (used for dumps).
        ratios: Per-level gap/parent ratios for custom specs.
    """

    gap: GapFunction
    levels: int
    name: str = "custom"
    ratios: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.levels < 0:
            raise ValueError(f"levels must be >= 0, got {self.levels}")

    @cached_property
    def _intervals(self) -> list[list[tuple[Fraction, Fraction]]]:
        levels: list[list[tuple[Fraction, Fraction]]] = [[(Fraction(0), Fraction(1))]]
        for k in range(1, self.levels + 1):
            children: list[tuple[Fraction, Fraction]] = []
            for i, (a, b) in enumerate(levels[-1], start=1):
                width = b - a
                g = Fraction(self.gap(k, i, width))
                if not 0 < g < width:
                    raise ValueError(
                        f"Degenerate cut at level {k}, index {i}: gap {float(g):.6g} "
                        f"must lie strictly inside the parent width {float(width):.6g}."
                    )
                side = (width - g) / 2
                children.append((a, a + side))
                children.append((b - side, b))
            levels.append(children)
        return levels

    def interval_bounds(self, level: int) -> list[tuple[Fraction, Fraction]]:
        """Exact endpoints of I_{level,i}, left to right."""
        if not 0 <= level <= self.levels:
            raise ValueError(f"level must be in [0, {self.levels}], got {level}")
        return list(self._intervals[level])

    def interval_widths(self) -> list[list[float]]:
        """diam(I_{k,i}) for every level k = 0..levels."""
        return [[float(b - a) for a, b in lvl] for lvl in self._intervals]

    def gap_diameters(self) -> list[list[float]]:
        """diam(J_{k,i}) for k = 1..levels (index 0 of the result is level 1)."""
        out = []
        for k in range(1, self.levels + 1):
            parents = self._intervals[k - 1]
            out.append([float(self.gap(k, i, b - a)) for i, (a, b) in enumerate(parents, start=1)])
        return out

    def endpoints(self) -> list[Fraction]:
        """Sorted endpoints of the level-m intervals (all lie in the limit set)."""
        pts = set()
        for a, b in self._intervals[self.levels]:
            pts.add(a)
            pts.add(b)
        return sorted(pts)

    def with_levels(self, levels: int) -> CantorSpec:
        return replace(self, levels=levels)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "levels": self.levels, "ratios": list(self.ratios) if self.ratios else None}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CantorSpec:
        name = data.get("name", "custom")
        levels = int(data["levels"])
        if name == "third":
            return middle_third(levels)
        if name == "fastgap":
            return fastgap(levels)
        ratios = data.get("ratios")
        if not ratios:
            raise ValueError("Custom Cantor spec needs a nonempty 'ratios' list")
        return from_ratios(ratios, levels)


def middle_third(levels: int) -> CantorSpec:
    """The middle-third Cantor set (every gap is a third of its parent)."""
    return CantorSpec(gap=lambda k, i, w: w / 3, levels=levels, name="third")


def fastgap(levels: int) -> CantorSpec:
    """Cantor set whose level-k gaps have diameter 1/(10 k^k)."""
    return CantorSpec(gap=lambda k, i, w: Fraction(1, 10 * k**k), levels=levels, name="fastgap")


def from_ratios(ratios: Sequence[float], levels: int) -> CantorSpec:
    """Custom Cantor set cutting gap = ratios[k-1] * parent width (last ratio repeats)."""
    rs = tuple(float(r) for r in ratios)
    if not rs:
        raise ValueError("ratios must be nonempty")
    for r in rs:
        if not 0 < r < 1:
            raise ValueError(f"gap ratios must lie in (0, 1), got {r}")

    def _gap(k: int, i: int, w: Fraction) -> Fraction:
        return Fraction(rs[min(k, len(rs)) - 1]) * w

    return CantorSpec(gap=_gap, levels=levels, name="custom", ratios=rs)


def check_width_bound(spec: CantorSpec) -> list[tuple[int, int, float]]:
    """Return (level, index, width) for every interval narrower than 3^-level.

    Empty for every spec whose gap ratios are all at most 1/3.
    """
    bad = []
    for k, widths in enumerate(spec.interval_widths()):
        floor = 3.0**-k
        for i, w in enumerate(widths, start=1):
            if w < floor * (1 - 1e-12):
                bad.append((k, i, w))
    return bad


# ── Metric spaces ─────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space with lazily computed distances.

    Attributes:
        raw_coords: (n, d) array of unscaled coordinates, or None.
        raw_matrix: (n, n) base distance matrix when there are no coordinates.
        provenance: Builder descriptor (``{"kind": "cantor", ...}``).
        scale: Normalization factor applied after the snowflake power.
        power: Snowflake exponent p in (0, 1].
        exact_coords: Rational coordinates for spaces built from rational data.
        labels: Optional display labels, one per point.
    """

    raw_coords: np.ndarray | None = None
    raw_matrix: np.ndarray | None = None
    provenance: dict[str, Any] = field(default_factory=dict)
    scale: float = 1.0
    power: float = 1.0
    exact_coords: tuple[tuple[Fraction, ...], ...] | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if (self.raw_coords is None) == (self.raw_matrix is None):
            raise ValueError("Provide exactly one of raw_coords or raw_matrix")
        if self.raw_coords is not None and self.raw_coords.ndim != 2:
            raise ValueError(f"raw_coords must be 2-D, got shape {self.raw_coords.shape}")
        if self.raw_matrix is not None:
            m = self.raw_matrix
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"raw_matrix must be square, got shape {m.shape}")
        if not 0 < self.power <= 1:
            raise ValueError(f"power must lie in (0, 1], got {self.power}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    # -- size and ids --

    def __len__(self) -> int:
        if self.raw_coords is not None:
            return int(self.raw_coords.shape[0])
        return int(self.raw_matrix.shape[0])

    @property
    def points(self) -> range:
        return range(len(self))

    @property
    def kind(self) -> str:
        return str(self.provenance.get("kind", "points"))

    @property
    def coords(self) -> np.ndarray | None:
        """Scaled coordinates when the metric is Euclidean on them, else None."""
        if self.raw_coords is None or self.power != 1.0:
            return None
        return self.raw_coords * self.scale

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    # -- distances --

    def _finish(self, base: np.ndarray | float) -> np.ndarray | float:
        if self.power != 1.0:
            base = np.power(base, self.power)
        return base * self.scale

    def dist(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if self.raw_coords is not None:
            base = float(np.linalg.norm(self.raw_coords[i] - self.raw_coords[j]))
        else:
            base = float(self.raw_matrix[i, j])
        return float(self._finish(base))

    def row(self, i: int) -> np.ndarray:
        """Distances from point i to every point."""
        if "matrix" in self.__dict__:
            return self.__dict__["matrix"][i]
        if self.raw_coords is not None:
            base = cdist(self.raw_coords[i : i + 1], self.raw_coords)[0]
        else:
            base = self.raw_matrix[i].astype(float)
        return np.asarray(self._finish(base))

    def rows(self, ids: Sequence[int]) -> np.ndarray:
        """Distances from each of ids to every point, shape (len(ids), n)."""
        idx = np.asarray(ids, dtype=int)
        if "matrix" in self.__dict__:
            return self.__dict__["matrix"][idx]
        if self.raw_coords is not None:
            base = cdist(self.raw_coords[idx], self.raw_coords)
        else:
            base = self.raw_matrix[idx].astype(float)
        return np.asarray(self._finish(base))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Full distance matrix (guarded by MATRIX_LIMIT)."""
        n = len(self)
        if n > MATRIX_LIMIT:
            raise ValueError(
                f"Space has {n} points; a full distance matrix is limited to {MATRIX_LIMIT}. "
                "Use row()/rows() instead."
            )
        if self.raw_coords is not None:
            base = squareform(pdist(self.raw_coords)) if n > 1 else np.zeros((n, n))
        else:
            base = self.raw_matrix.astype(float)
        return np.asarray(self._finish(base))

    def exact_sq_dist(self, i: int, j: int) -> Fraction:
        """Exact squared distance for Euclidean coordinate spaces.

        Rational coordinates are used when the builder recorded them; float
        coordinates are converted exactly otherwise.
        """
        if self.raw_coords is None or self.power != 1.0:
            raise ValueError("exact distances need a coordinate space without snowflake power")
        if self.exact_coords is not None:
            a, b = self.exact_coords[i], self.exact_coords[j]
        else:
            a = tuple(Fraction(float(v)) for v in self.raw_coords[i])
            b = tuple(Fraction(float(v)) for v in self.raw_coords[j])
        base = sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))
        return base * Fraction(self.scale) ** 2

    def exact_dist(self, i: int, j: int) -> Fraction:
        """Exact d(i, j) on the line; the exact squared distance in higher dimensions."""
        sq = self.exact_sq_dist(i, j)
        if self.raw_coords.shape[1] > 1:
            return sq
        if self.exact_coords is not None:
            return abs(self.exact_coords[i][0] - self.exact_coords[j][0]) * Fraction(self.scale)
        return abs(Fraction(float(self.raw_coords[i, 0])) - Fraction(float(self.raw_coords[j, 0]))) * Fraction(self.scale)

    @cached_property
    def _base_diameter(self) -> float:
        n = len(self)
        if n < 2:
            return 0.0
        if self.raw_matrix is not None:
            return float(self.raw_matrix.max())
        pts = self.raw_coords
        if pts.shape[1] == 1:
            return float(np.ptp(pts[:, 0]))
        if n <= 4000:
            return float(pdist(pts).max())
        hull = ConvexHull(pts)
        return float(pdist(pts[hull.vertices]).max())

    @property
    def diameter(self) -> float:
        return float(self._finish(self._base_diameter))

    @cached_property
    def min_distance(self) -> float:
        """Smallest positive pairwise distance."""
        n = len(self)
        if n < 2:
            return 0.0
        if self.raw_coords is not None:
            dd, _ = cKDTree(self.raw_coords).query(self.raw_coords, k=2)
            base = float(dd[:, 1].min())
        else:
            m = self.raw_matrix.astype(float).copy()
            np.fill_diagonal(m, np.inf)
            base = float(m.min())
        return float(self._finish(base))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({self.kind}, {len(self)} points, diameter={self.diameter:.6g})"


def normalize(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """Rescale the metric to diameter 1; the factor is kept in ``space.scale``."""
    if len(space) < 2:
        raise ValueError("Cannot normalize a single-point space")
    base = space._base_diameter
    if base <= 0:
        raise ValueError("Cannot normalize a zero-diameter space")
    scale = 1.0 / base**space.power
    if scale == space.scale:
        return space
    return replace(space, scale=scale)


# ── Builders ──────────────────────────────────────────────────────────


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise ValueError(f"Space would have {count} points, over the point budget of {budget}.")


def build_points(values: Iterable[Any], *, normalized: bool = True) -> FiniteMetricSpace:
    """Build a space from explicit coordinates (scalars or vectors)."""
    rows = [tuple(v) if isinstance(v, (list, tuple, np.ndarray)) else (v,) for v in values]
    if not rows:
        raise ValueError("values must be nonempty")
    exact = tuple(tuple(Fraction(x) if isinstance(x, (int, Fraction)) else Fraction(float(x)) for x in r) for r in rows)
    coords = np.array([[float(x) for x in r] for r in rows], dtype=float)
    if len(np.unique(coords, axis=0)) != len(coords):
        raise ValueError("points must be distinct")
    space = FiniteMetricSpace(raw_coords=coords, provenance={"kind": "points"}, exact_coords=exact)
    return normalize(space) if normalized else space


def build_from_matrix(matrix: Any, *, normalized: bool = True) -> FiniteMetricSpace:
    """Build a space from an explicit symmetric distance matrix."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {m.shape}")
    if not np.allclose(m, m.T) or np.any(np.diag(m) != 0):
        raise ValueError("distance matrix must be symmetric with a zero diagonal")
    off = m[~np.eye(len(m), dtype=bool)]
    if np.any(off <= 0):
        raise ValueError("distinct points must be at positive distance")
    space = FiniteMetricSpace(raw_matrix=m, provenance={"kind": "matrix"})
    return normalize(space) if normalized else space


def build_cantor(spec: CantorSpec) -> FiniteMetricSpace:
    """Sample a Cantor set by the endpoints of its level-m intervals."""
    ends = spec.endpoints()
    coords = np.array([[float(x)] for x in ends])
    provenance = {
        "kind": "cantor",
        "cantor": spec.to_dict(),
        "widths": spec.interval_widths(),
    }
    space = FiniteMetricSpace(
        raw_coords=coords,
        provenance=provenance,
        exact_coords=tuple((x,) for x in ends),
    )
    logger.debug("build_cantor: %s levels=%d -> %d points", spec.name, spec.levels, len(ends))
    return normalize(space)


def _lattice(n: int, grid_res: int) -> list[tuple[Fraction, ...]]:
    axis = [Fraction(k, grid_res - 1) for k in range(grid_res)]
    return list(itertools.product(axis, repeat=n))


def build_cube_grid(n: int, grid_res: int, *, point_budget: int = DEFAULT_POINT_BUDGET) -> FiniteMetricSpace:
    """Uniform lattice with grid_res values per axis on the unit cube I^n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if grid_res < 2:
        raise ValueError(f"grid_res must be >= 2, got {grid_res}")
    _check_budget(grid_res**n, point_budget)
    pts = _lattice(n, grid_res)
    coords = np.array([[float(x) for x in p] for p in pts])
    space = FiniteMetricSpace(
        raw_coords=coords,
        provenance={"kind": "grid", "n": n, "grid_res": grid_res},
        exact_coords=tuple(pts),
    )
    return normalize(space)


def build_product_grid(
    cantor: CantorSpec,
    n: int,
    grid_res: int,
    *,
    point_budget: int = DEFAULT_POINT_BUDGET,
) -> FiniteMetricSpace:
    """Product of the Cantor endpoint sample with a lattice on I^n, l2 metric.

    Points are ordered lexicographically by (cantor coordinate, t_1, ..., t_n).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if grid_res < 2:
        raise ValueError(f"grid_res must be >= 2, got {grid_res}")
    ends = cantor.endpoints()
    _check_budget(len(ends) * grid_res**n, point_budget)
    lattice = _lattice(n, grid_res)
    exact = tuple((c, *t) for c in ends for t in lattice)
    coords = np.array([[float(x) for x in p] for p in exact])
    space = FiniteMetricSpace(
        raw_coords=coords,
        provenance={
            "kind": "product",
            "cantor": cantor.to_dict(),
            "widths": cantor.interval_widths(),
            "n": n,
            "grid_res": grid_res,
            "cantor_points": len(ends),
        },
        exact_coords=exact,
    )
    logger.debug("build_product_grid: %d x %d^%d points", len(ends), grid_res, n)
    return normalize(space)


def build_harmonic(M: int) -> FiniteMetricSpace:
    """The truncated harmonic sequence {0} ∪ {1/k : 1 <= k <= M}, ascending."""
    if M < 3:
        raise ValueError(f"truncation M must be >= 3, got {M}")
    values = [Fraction(0)] + [Fraction(1, k) for k in range(M, 0, -1)]
    coords = np.array([[float(v)] for v in values])
    space = FiniteMetricSpace(
        raw_coords=coords,
        provenance={"kind": "harmonic", "M": M},
        exact_coords=tuple((v,) for v in values),
    )
    return normalize(space)


# ── Axiom checks ──────────────────────────────────────────────────────


@dataclass
class AxiomReport:
    """Result of checking the metric axioms.

    Attributes:
        exhaustive: True when every triple was checked.
        triples_checked: Number of (i, j, k) triples examined.
        warnings: Non-blocking notes.
        errors: Axiom violations with witnesses.
    """

    exhaustive: bool = True
    triples_checked: int = 0
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def is_metric(self) -> bool:
        return len(self.errors) == 0


def check_metric_axioms(
    space: FiniteMetricSpace,
    *,
    seed: int = 0,
    samples: int = 20_000,
    tol: float = 1e-12,
) -> AxiomReport:
    """Check symmetry, positivity and the triangle inequality.

    Exhaustive up to EXHAUSTIVE_TRIANGLE_LIMIT points, seeded sampling above.
    """
    report = AxiomReport()
    n = len(space)
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT:
        d = space.matrix
        if not np.allclose(d, d.T, rtol=0, atol=tol):
            report.errors.append("distance matrix is not symmetric")
        off = d[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            report.errors.append("two distinct points are at distance 0")
        for k in range(n):
            excess = d - (d[:, k : k + 1] + d[k : k + 1, :])
            i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
            if excess[i, j] > tol * max(1.0, d[i, j]):
                report.errors.append(f"triangle inequality fails for ({i}, {k}, {j}): excess {excess[i, j]:.3g}")
                break
        report.triples_checked = n**3
        return report

    report.exhaustive = False
    rng = np.random.default_rng(seed)
    triples = rng.integers(0, n, size=(samples, 3))
    for i, j, k in triples:
        i, j, k = int(i), int(j), int(k)
        dij, dik, dkj = space.dist(i, j), space.dist(i, k), space.dist(k, j)
        if dij > dik + dkj + tol * max(1.0, dij):
            report.errors.append(f"triangle inequality fails for ({i}, {k}, {j})")
            break
    report.triples_checked = samples
    report.warnings.append(f"sampled {samples} triples with seed {seed}")
    return report


# ── Doubling ──────────────────────────────────────────────────────────


@dataclass
class DoublingEstimate:
    """Sampled doubling certificate.

    Attributes:
        N_hat: Largest number of half-radius balls any checked ball needed.
        scales_checked: Radii that were checked.
        witness: (center, radius) attaining N_hat.
    """

    N_hat: int
    scales_checked: list[float]
    witness: tuple[int, float]


def _greedy_half_cover(space: FiniteMetricSpace, members: np.ndarray, radius: float) -> int:
    """Count balls of radius `radius` centred at a maximal separated subset of members."""
    uncovered = np.ones(len(members), dtype=bool)
    full = space.matrix if len(space) <= MATRIX_LIMIT else None
    count = 0
    while uncovered.any():
        k = int(members[int(np.argmax(uncovered))])
        row = full[k] if full is not None else space.row(k)
        uncovered &= row[members] > radius
        count += 1
    return count


def estimate_doubling(space: FiniteMetricSpace, scales: Sequence[float]) -> DoublingEstimate:
    """Greedily cover every closed ball B(x, r) by balls of radius r/2."""
    if not scales:
        raise ValueError("scales must be nonempty")
    diam = space.diameter
    for r in scales:
        if not 0 < r <= diam * (1 + 1e-12):
            raise ValueError(f"scale {r} must lie in (0, diameter={diam:.6g}]")

    best = (1, (0, float(scales[0])))
    full = space.matrix if len(space) <= MATRIX_LIMIT else None
    for x in space.points:
        row = full[x] if full is not None else space.row(x)
        for r in scales:
            members = np.flatnonzero(row <= r)
            count = _greedy_half_cover(space, members, r / 2)
            if count > best[0]:
                best = (count, (x, float(r)))
    logger.debug("estimate_doubling: N_hat=%d at %s", best[0], best[1])
    return DoublingEstimate(N_hat=best[0], scales_checked=[float(r) for r in scales], witness=best[1])


# ── Serialization ─────────────────────────────────────────────────────


def space_to_dict(space: FiniteMetricSpace) -> dict[str, Any]:
    """JSON-ready dump: points, coords or matrix, diameter and provenance."""
    data: dict[str, Any] = {
        "points": [space.label(i) for i in space.points],
        "diameter": space.diameter,
        "scale": space.scale,
        "power": space.power,
        "provenance": space.provenance,
    }
    if space.raw_coords is not None:
        data["distances"] = "coords"
        data["coords"] = space.raw_coords.tolist()
        if space.exact_coords is not None:
            data["exact_coords"] = [[str(x) for x in p] for p in space.exact_coords]
    else:
        data["distances"] = "matrix"
        data["coords"] = None
        data["matrix"] = space.raw_matrix.tolist()
    return data


def space_from_dict(data: dict[str, Any]) -> FiniteMetricSpace:
    """Inverse of space_to_dict."""
    labels = tuple(str(p) for p in data.get("points", []))
    kwargs: dict[str, Any] = {
        "provenance": dict(data.get("provenance", {})),
        "scale": float(data.get("scale", 1.0)),
        "power": float(data.get("power", 1.0)),
    }
    if data.get("distances") == "matrix":
        kwargs["raw_matrix"] = np.asarray(data["matrix"], dtype=float)
    else:
        kwargs["raw_coords"] = np.asarray(data["coords"], dtype=float)
        if data.get("exact_coords") is not None:
            kwargs["exact_coords"] = tuple(tuple(Fraction(x) for x in p) for p in data["exact_coords"])
    space = FiniteMetricSpace(**kwargs)
    if labels and labels != tuple(str(i) for i in range(len(space))):
        space = replace(space, labels=labels)
    if not math.isclose(space.diameter, float(data.get("diameter", space.diameter)), rel_tol=1e-9):
        raise ValueError("space dump is inconsistent: stored diameter does not match the data")
    return space
