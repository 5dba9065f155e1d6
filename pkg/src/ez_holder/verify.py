"""Numeric checks of the construction's inequalities on built stages.

Every checker compares a left side with a right side on a finite set of
pairs (or points) and reports the worst relative slack (rhs − lhs)/max(|lhs|, |rhs|).
A check passes when that slack is at least −RELATIVE_TOLERANCE. Slacks within
EXACT_RECHECK_BAND of zero are recomputed with rationals from the float
image coordinates before grading.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Literal, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .check import lemma_check
from .covers import check_weight_bounds
from .embedding import Construction, EmbeddingStage, SparseVector, coordinate_discipline, enumerate_simplices
from .errors import CertificateError
from .metric import FiniteMetricSpace
from .parallel import parallel_map
from .schedule import ScaleSchedule, materialize

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-9
EXACT_RECHECK_BAND = 1e-7
ORACLE_MAX_POINTS = 12
MAX_WITNESSES = 10

_exact_rechecks = True

Status = Literal["pass", "fail", "not-certified"]


def set_exact_rechecks(enabled: bool) -> None:
    """Toggle the rational re-check of near-zero slacks (off for ``--precision float64``)."""
    global _exact_rechecks
    _exact_rechecks = bool(enabled)


# ── Reports ───────────────────────────────────────────────────────────


@dataclass
class LemmaReport:
    """Outcome of one check.

    Attributes:
        lemma: Check id.
        pairs_checked: Number of inequalities evaluated.
        worst_slack: min of rhs − lhs.
        worst_relative_slack: min of (rhs − lhs)/max(|lhs|, |rhs|).
        witnesses: Up to MAX_WITNESSES worst cases, worst first.
        mode: Schedule mode.
        status: ``"pass"``, ``"fail"`` or ``"not-certified"``.
        constant_used: The constant on the right side, when there is one.
        stage: Stage index for stage-scoped checks.
        details: Check-specific extras.
        duration_ms: Wall time of the check.
    """

    lemma: str
    pairs_checked: int = 0
    worst_slack: float = math.inf
    worst_relative_slack: float = math.inf
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    mode: str = "exact"
    status: Status = "pass"
    constant_used: float | None = None
    stage: int | None = None
    details: dict[str, Any] = field(default_factory=dict)
    duration_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "lemma": self.lemma,
            "pass": self.passed,
            "status": self.status,
            "worstSlack": _finite(self.worst_slack),
            "worstRelativeSlack": _finite(self.worst_relative_slack),
            "pairs": self.pairs_checked,
            "mode": self.mode,
            "constant": self.constant_used,
            "stage": self.stage,
            "witnesses": self.witnesses,
            "details": self.details,
            "durationMs": self.duration_ms,
        }


def _finite(x: float) -> float | None:
    return x if math.isfinite(x) else None


def not_certified(lemma: str, mode: str, reason: str, stage: int | None = None) -> LemmaReport:
    return LemmaReport(lemma=lemma, mode=mode, status="not-certified", stage=stage, details={"reason": reason})


def merge_reports(reports: Sequence[LemmaReport]) -> LemmaReport:
    """Combine per-stage reports of one check by min-reduction on slack."""
    if not reports:
        raise ValueError("nothing to merge")
    lemma = reports[0].lemma
    if any(r.lemma != lemma for r in reports):
        raise ValueError("merge_reports needs reports of a single check")
    statuses = {r.status for r in reports}
    status: Status = "fail" if "fail" in statuses else ("not-certified" if "not-certified" in statuses else "pass")
    witnesses = sorted(
        (w for r in reports for w in r.witnesses),
        key=lambda w: w.get("relativeSlack", 0.0),
    )[:MAX_WITNESSES]
    return LemmaReport(
        lemma=lemma,
        pairs_checked=sum(r.pairs_checked for r in reports),
        worst_slack=min(r.worst_slack for r in reports),
        worst_relative_slack=min(r.worst_relative_slack for r in reports),
        witnesses=witnesses,
        mode=reports[0].mode,
        status=status,
        details={"stages": [r.stage for r in reports]},
        duration_ms=sum(r.duration_ms for r in reports),
    )


ExactFn = Callable[[int, int], float]


def _grade(
    lemma: str,
    lhs: np.ndarray,
    rhs: np.ndarray,
    where: np.ndarray,
    *,
    mode: str,
    stage: int | None = None,
    constant: float | None = None,
    exact: ExactFn | None = None,
    details: dict[str, Any] | None = None,
) -> LemmaReport:
    """Grade lhs ≤ rhs elementwise; ``where`` holds the (x, y) label of each entry."""
    report = LemmaReport(lemma=lemma, mode=mode, stage=stage, constant_used=constant, details=details or {})
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), lhs.shape).ravel()
    report.pairs_checked = int(lhs.size)
    if lhs.size == 0:
        report.details.setdefault("note", "vacuous: no pairs meet the hypothesis")
        return report

    slack = rhs - lhs
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), np.finfo(float).tiny)
    rel = slack / scale
    near = np.flatnonzero(np.abs(rel) <= EXACT_RECHECK_BAND)
    if exact is not None and _exact_rechecks and near.size:
        rel[near] = parallel_map(lambda k: exact(int(where[k][0]), int(where[k][1])), list(near))
        report.details["exact_rechecks"] = int(near.size)

    report.worst_slack = float(slack.min())
    report.worst_relative_slack = float(rel.min())
    for k in np.argsort(rel, kind="stable")[:MAX_WITNESSES]:
        report.witnesses.append({
            "x": int(where[k][0]),
            "y": int(where[k][1]),
            "lhs": float(lhs[k]),
            "rhs": float(rhs[k]),
            "relativeSlack": float(rel[k]),
        })
    if report.worst_relative_slack < -RELATIVE_TOLERANCE:
        report.status = "fail"
        logger.info("%s failed at stage %s: relative slack %.3g", lemma, stage, report.worst_relative_slack)
    return report


def _exact_sq(u: SparseVector, v: SparseVector) -> Fraction:
    keys = set(u.entries) | set(v.entries)
    return sum(((Fraction(u.entries.get(k, 0.0)) - Fraction(v.entries.get(k, 0.0))) ** 2 for k in keys), Fraction(0))


def _exact_rel(lhs_sq: Fraction, rhs_sq: Fraction) -> float:
    """Relative slack of lhs ≤ rhs from exact squares (first order in the difference)."""
    top = max(lhs_sq, rhs_sq)
    if top == 0:
        return 0.0
    return float((rhs_sq - lhs_sq) / (2 * top))


def _image_distances(stage: EmbeddingStage) -> np.ndarray:
    X = stage.image_matrix()
    if len(X) < 2:
        return np.zeros((len(X), len(X)))
    return squareform(pdist(X))


def _pairs(mask: np.ndarray) -> np.ndarray:
    iu, ju = np.nonzero(np.triu(mask, 1))
    return np.column_stack([iu, ju])


def _exact_domain_sq(space: FiniteMetricSpace) -> Callable[[int, int], Fraction] | None:
    if space.raw_coords is None or space.power != 1.0:
        return None
    return space.exact_sq_dist


# ── Stage checks ──────────────────────────────────────────────────────


@lemma_check("local-lipschitz")
def check_local_lipschitz(stage: EmbeddingStage, schedule: ScaleSchedule, space: FiniteMetricSpace) -> LemmaReport:
    """Close points move little: d(f_i x, f_i y) ≤ (L/2)(ε_i/δ_i)·d(x, y) when d(x, y) < σδ_i."""
    i = stage.index
    delta = stage.delta
    log2_c = schedule.constants.log2_L - 1.0 + math.log2(stage.eps) - math.log2(delta)
    c = materialize(log2_c)
    D, E = space.matrix, _image_distances(stage)
    where = _pairs(D < schedule.params.sigma * delta)
    dom = D[where[:, 0], where[:, 1]] if where.size else np.array([])
    img = E[where[:, 0], where[:, 1]] if where.size else np.array([])
    exact_dom = _exact_domain_sq(space)

    def _exact(x: int, y: int) -> float:
        d_sq = exact_dom(x, y) if exact_dom else Fraction(float(D[x, y])) ** 2
        return _exact_rel(_exact_sq(stage.images[x], stage.images[y]), Fraction(c) ** 2 * d_sq)

    return _grade("local-lipschitz", img, c * dom, where, mode=schedule.mode, stage=i, constant=c, exact=_exact)


@lemma_check("separation", min_stage=1)
def check_separation(stage: EmbeddingStage, schedule: ScaleSchedule, space: FiniteMetricSpace) -> LemmaReport:
    """Far points have far images: d(f_i x, f_i y) ≥ ε_i/√(2M) when d(x, y) > δ_i."""
    if stage.cover is None:
        raise ValueError("separation needs a stage with a cover (index >= 1)")
    M = max(stage.cover.multiplicity, 1)
    c = stage.eps / math.sqrt(2 * M)
    D, E = space.matrix, _image_distances(stage)
    where = _pairs(D > stage.delta)
    img = E[where[:, 0], where[:, 1]] if where.size else np.array([])

    def _exact(x: int, y: int) -> float:
        return _exact_rel(Fraction(stage.eps) ** 2 / (2 * M), _exact_sq(stage.images[x], stage.images[y]))

    details = {"multiplicity": M}
    if schedule.params.n + 1 < M:
        details["note"] = f"multiplicity {M} exceeds n+1 = {schedule.params.n + 1}"
    return _grade(
        "separation", np.full(img.shape, c), img, where,
        mode=schedule.mode, stage=stage.index, constant=c, exact=_exact, details=details,
    )


@lemma_check("edge-length", min_stage=1)
def check_edge_lengths(stage: EmbeddingStage, schedule: ScaleSchedule, space: FiniteMetricSpace) -> LemmaReport:
    """Vertices of intersecting cover elements lie within 2ε_i of each other."""
    if stage.cover is None:
        raise ValueError("edge lengths need a stage with a cover (index >= 1)")
    edges = sorted({
        (a, b)
        for w in stage.weights
        for a, b in itertools.combinations(sorted(w), 2)
    })
    bound = 2.0 * stage.eps
    where = np.array(edges, dtype=int).reshape(-1, 2)
    lengths = np.array([stage.vertices[a].dist(stage.vertices[b]) for a, b in edges])

    def _exact(a: int, b: int) -> float:
        return _exact_rel(_exact_sq(stage.vertices[a], stage.vertices[b]), Fraction(bound) ** 2)

    report = _grade("edge-length", lengths, bound, where, mode=schedule.mode, stage=stage.index, constant=bound, exact=_exact)
    for w in report.witnesses:
        w["u"], w["v"] = w.pop("x"), w.pop("y")
    return report


@lemma_check("weights", min_stage=1)
def check_weights(stage: EmbeddingStage, schedule: ScaleSchedule, space: FiniteMetricSpace) -> LemmaReport:
    """Cover weights are 1-Lipschitz with bounded, Lipschitz sums."""
    if stage.cover is None:
        raise ValueError("weights need a stage with a cover (index >= 1)")
    result = check_weight_bounds(space, stage.cover, stage.delta)
    return LemmaReport(
        lemma="weights",
        pairs_checked=result.pairs_checked,
        worst_slack=result.worst_lipschitz_slack,
        worst_relative_slack=result.worst_lipschitz_slack,
        mode=schedule.mode,
        status="pass" if result.holds else "fail",
        stage=stage.index,
        details={
            "errors": result.errors,
            "sumRange": list(result.sum_range),
            "isolatedSets": result.isolated_sets,
        },
    )


@lemma_check("qmeasure", min_stage=1, modes=("exact",))
def check_qmeasure(stage: EmbeddingStage, schedule: ScaleSchedule, space: FiniteMetricSpace) -> LemmaReport:
    """The image at stage i has a cover by sets V with Σ diam(V)^q ≤ 4^q and η-balls inside some V.

    Every simplex of dimension r is covered by ceil(4√n·ε_i/η_i)^r cubes of
    edge η_i/√n (diameter ≤ η_i) filling the box of half-width 2ε_i about its
    first vertex; each cube is inflated to the closed ball V of radius 2η_i
    about its center. Sums are kept in log₂.

    Containment is checked per point: the image must be the weighted average
    of its simplex's vertices and lie within 2ε_i of the first vertex. Such a
    point sits in one of the counted cubes, and B(f_i(x), η_i) is inside that
    cube's V because the cube's center is at most η_i/2 away. In exact
    mode η_i is far below the float resolution of ε_i, so the ball itself is
    not tested.
    """
    if schedule.mode != "exact":
        return not_certified("qmeasure", schedule.mode, "q-measure constants are exact-mode only", stage.index)
    if stage.cover is None:
        raise ValueError("q-measure needs a stage with a cover (index >= 1)")
    p = schedule.params
    i = stage.index
    log_eps, log_eta = schedule.log_eps[i], schedule.log_eta[i]
    complex_ = enumerate_simplices(stage, p.n)

    log_counts = []
    for s in complex_.simplices:
        r = len(s) - 1
        if r == 0:
            log_counts.append(0.0)
            continue
        n_eff = max(p.n, r)
        log_side = 2.0 + 0.5 * math.log2(n_eff) + log_eps - log_eta
        per_axis = log_side if log_side > 52 else math.log2(max(1.0, math.ceil(2.0**log_side)))
        log_counts.append(r * per_axis)
    log2_count = float(np.logaddexp2.reduce(np.array(log_counts))) if log_counts else -math.inf
    raw = log2_count + p.q * log_eta
    inflated = 2.0 * p.q + raw

    # each image is a vertex average lying in its simplex's cube grid
    contain_errors = []
    for x, lam in enumerate(stage.weights):
        if not lam or min(lam.values()) < 0 or abs(sum(lam.values()) - 1.0) > 1e-12:
            contain_errors.append(f"point {x}: weights are not a probability vector")
            continue
        recon = SparseVector({})
        for k, w in lam.items():
            recon = recon + stage.vertices[k].scaled(w)
        if recon.dist(stage.images[x]) > 1e-12 * max(1.0, stage.images[x].norm()) + 1e-300:
            contain_errors.append(f"point {x}: image is not the weighted vertex average")
            continue
        if stage.images[x].dist(stage.vertices[min(lam)]) > 2.0 * stage.eps * (1 + RELATIVE_TOLERANCE):
            contain_errors.append(f"point {x}: image lies outside the cube grid of its simplex")
    edge = check_edge_lengths(stage, schedule, space)

    report = LemmaReport(
        lemma="qmeasure",
        pairs_checked=len(complex_.simplices),
        worst_slack=-raw,
        worst_relative_slack=-raw,
        mode=schedule.mode,
        stage=i,
        constant_used=4.0**p.q,
        details={
            "simplices": len(complex_.simplices),
            "log2RawSum": raw,
            "log2InflatedSum": inflated,
            "log2Bound": 2.0 * p.q,
            "withinCountBound": complex_.within_bound,
            "containmentErrors": contain_errors[:MAX_WITNESSES],
        },
    )
    if raw > RELATIVE_TOLERANCE or contain_errors or not edge.passed:
        report.status = "fail"
    return report


# ── Construction checks ───────────────────────────────────────────────


def _padded(stage: EmbeddingStage, m: int) -> np.ndarray:
    X = stage.image_matrix()
    out = np.zeros((X.shape[0], m))
    out[:, : stage.coord_count] = X[:, : stage.coord_count]
    return out


@lemma_check("cauchy-limit", scope="construction")
def check_cauchy_and_limit(construction: Construction) -> LemmaReport:
    """Consecutive maps are ε_{i+1}-close and f stays within 2ε_i of f_{i-1}."""
    schedule = construction.schedule
    stages = construction.stages
    if len(stages) < 2:
        return _grade("cauchy-limit", np.array([]), np.array([]), np.zeros((0, 2), dtype=int), mode=schedule.mode)
    m = stages[-1].coord_count
    dense = [_padded(s, m) for s in stages]
    tail = construction.tail_bound
    lhs, rhs, where = [], [], []
    for a in range(len(stages) - 1):
        step = np.linalg.norm(dense[a + 1] - dense[a], axis=1)
        lhs.append(step)
        rhs.append(np.full(step.shape, stages[a + 1].eps))
        where.append(np.column_stack([np.arange(step.size), np.full(step.size, a + 1)]))
    for a in range(1, len(stages)):
        # d(f, f_{a-1}) ≤ d(f_I, f_{a-1}) + tail ≤ 2ε_a
        far = np.linalg.norm(dense[-1] - dense[a - 1], axis=1) + tail
        lhs.append(far)
        rhs.append(np.full(far.shape, 2.0 * stages[a].eps))
        where.append(np.column_stack([np.arange(far.size), np.full(far.size, -a)]))
    report = _grade(
        "cauchy-limit", np.concatenate(lhs), np.concatenate(rhs), np.concatenate(where),
        mode=schedule.mode, details={"tail": tail},
    )
    for w in report.witnesses:
        w["point"], stage_tag = w.pop("x"), w.pop("y")
        w["kind"] = "step" if stage_tag > 0 else "limit"
        w["stage"] = abs(stage_tag)
    return report


@lemma_check("limit-scales", scope="construction")
def check_limit_scales(construction: Construction) -> LemmaReport:
    """The limit map respects every scale: upper (9/2)ε_i below δ_i, lower ε_{i+1}/(2√(2M)) above δ_{i+1}."""
    schedule = construction.schedule
    D = construction.space.matrix
    E = _image_distances(construction.last)
    tail = construction.tail_bound
    lhs, rhs, where = [], [], []
    for s in construction.stages:
        pairs = _pairs(D <= s.delta * (1 + RELATIVE_TOLERANCE))
        if pairs.size:
            lhs.append(E[pairs[:, 0], pairs[:, 1]] + 2 * tail)
            rhs.append(np.full(len(pairs), 4.5 * s.eps))
            where.append(pairs)
    for s in construction.stages[1:]:
        M = max(s.cover.multiplicity, 1)
        pairs = _pairs(D > s.delta)
        if pairs.size:
            lhs.append(np.full(len(pairs), s.eps / (2 * math.sqrt(2 * M))))
            rhs.append(E[pairs[:, 0], pairs[:, 1]] - 2 * tail)
            where.append(pairs)
    if not lhs:
        return _grade("limit-scales", np.array([]), np.array([]), np.zeros((0, 2), dtype=int), mode=schedule.mode)
    return _grade(
        "limit-scales", np.concatenate(lhs), np.concatenate(rhs), np.concatenate(where),
        mode=schedule.mode, details={"tail": tail},
    )


@lemma_check("coordinates", scope="construction")
def check_coordinates(construction: Construction) -> LemmaReport:
    """Stage i writes only coordinates m_{i-1}..m_i − 1, and vertices extend their anchors' images."""
    errors: list[str] = []
    for prev, stage in zip(construction.stages, construction.stages[1:]):
        errors.extend(f"stage {stage.index}: {e}" for e in coordinate_discipline(prev, stage))
        if stage.coord_count != prev.coord_count + len(stage.cover):
            errors.append(f"stage {stage.index}: m_i != m_(i-1) + |U_i|")
    return LemmaReport(
        lemma="coordinates",
        pairs_checked=len(construction.stages) - 1,
        worst_slack=0.0 if not errors else -1.0,
        worst_relative_slack=0.0 if not errors else -1.0,
        mode=construction.schedule.mode,
        status="fail" if errors else "pass",
        details={"errors": errors[:MAX_WITNESSES]},
    )


@lemma_check("biholder", scope="construction", modes=("exact",))
def check_biholder(construction: Construction) -> LemmaReport:
    """(1/λ)·d^(2Q) ≤ d(f x, f y) ≤ λ·d^(1/(4Q)) on every pair, with f known up to the tail."""
    schedule = construction.schedule
    if schedule.mode != "exact":
        return not_certified("biholder", schedule.mode, "λ and Q are exact-mode constants")
    c = schedule.constants
    lam, Q = c.lam, c.Q
    D = construction.space.matrix
    E = _image_distances(construction.last)
    tail = construction.tail_bound
    where = _pairs(np.ones_like(D, dtype=bool))
    d = D[where[:, 0], where[:, 1]]
    e = E[where[:, 0], where[:, 1]]
    lower = np.power(d, 2 * Q) / lam
    upper = lam * np.power(d, 1.0 / (4 * Q))
    details = {"lambda": lam, "alpha": 2 * Q, "beta": 1.0 / (4 * Q), "tail": tail}
    if construction.stop_reason != "stabilized":
        details["note"] = f"run stopped with reason {construction.stop_reason!r}; f is bounded through its tail"
    return _grade(
        "biholder",
        np.concatenate([lower, e + 2 * tail]),
        np.concatenate([e - 2 * tail, upper]),
        np.concatenate([where, where]),
        mode=schedule.mode,
        constant=lam,
        details=details,
    )


# ── Standalone checks ─────────────────────────────────────────────────


def check_simplex_minimum(m_max: int = 6, resolution: int = 3) -> LemmaReport:
    """Grid check that Σλ_k² over the probability simplex in m variables is minimized at 1/m.

    The grid has m·resolution steps per axis, so it contains the uniform point.
    """
    minima: dict[int, float] = {}
    lhs, rhs = [], []
    for m in range(1, m_max + 1):
        steps = m * resolution
        # stars and bars: bar positions among steps + m − 1 slots
        combos = list(itertools.combinations(range(steps + m - 1), m - 1))
        bars = np.array(combos, dtype=int).reshape(len(combos), m - 1)
        edges = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), steps + m - 1)])
        parts = np.diff(edges, axis=1) - 1
        values = ((parts / steps) ** 2).sum(axis=1)
        minima[m] = float(values.min())
        lhs.append(1.0 / m)
        rhs.append(minima[m])
    report = _grade(
        "simplex-minimum", np.array(lhs), np.array(rhs),
        np.column_stack([np.arange(1, m_max + 1), np.arange(1, m_max + 1)]),
        mode="exact", details={"minima": minima},
    )
    if any(abs(minima[m] - 1.0 / m) > 1e-12 for m in minima):
        report.status = "fail"
    return report


@dataclass
class OracleProfile:
    """Exhaustive Hölder envelope of a map on a small space.

    Attributes:
        alpha: Lower exponent, max(1, steepest log-log slope).
        beta: Upper exponent, min(1, shallowest log-log slope).
        lower_constant: Smallest a with a·d^α ≤ e on every pair.
        upper_constant: Smallest b with e ≤ b·d^β on every pair.
        lam: max(1/a, b, 1).
        pairs: (d, e) for every pair of distinct points.
    """

    alpha: float
    beta: float
    lower_constant: float
    upper_constant: float
    lam: float
    pairs: list[tuple[float, float]]

    def within(self, lam: float, alpha: float, beta: float, tail: float = 0.0) -> bool:
        """Whether every pair satisfies (1/λ)d^α ≤ e − 2·tail and e + 2·tail ≤ λd^β."""
        tol = RELATIVE_TOLERANCE
        return all(
            d**alpha / lam <= (e - 2 * tail) * (1 + tol) and (e + 2 * tail) <= lam * d**beta * (1 + tol)
            for d, e in self.pairs
        )


def brute_force_oracle(
    space: FiniteMetricSpace,
    images: Sequence[SparseVector] | np.ndarray | None = None,
    *,
    image_distances: np.ndarray | None = None,
) -> OracleProfile:
    """Fit Hölder exponents and constants of a map from all pairs of pairs.

    Raises:
        CertificateError: the space has more than ORACLE_MAX_POINTS points.
    """
    n = len(space)
    if n > ORACLE_MAX_POINTS:
        raise CertificateError(f"oracle is limited to {ORACLE_MAX_POINTS} points, got {n}", points=n)
    if image_distances is None:
        if images is None:
            raise ValueError("pass images or image_distances")
        if isinstance(images, np.ndarray):
            X = images
        else:
            m = max((v.dimension_hint for v in images), default=0)
            X = np.array([v.dense(max(m, 1)) for v in images])
        image_distances = squareform(pdist(X)) if n > 1 else np.zeros((n, n))
    D = space.matrix
    pairs = [(float(D[x, y]), float(image_distances[x, y])) for x, y in itertools.combinations(range(n), 2)]
    if any(e <= 0 for _, e in pairs):
        raise CertificateError("the map is not injective on the sample")

    slopes = [
        (math.log(e1) - math.log(e2)) / (math.log(d1) - math.log(d2))
        for (d1, e1), (d2, e2) in itertools.combinations(pairs, 2)
        if not math.isclose(d1, d2, rel_tol=1e-12)
    ]
    alpha = max([1.0, *slopes])
    beta = min([1.0, *slopes])
    a = min((e / d**alpha for d, e in pairs), default=1.0)
    b = max((e / d**beta for d, e in pairs), default=1.0)
    return OracleProfile(alpha=alpha, beta=beta, lower_constant=a, upper_constant=b, lam=max(1.0 / a, b, 1.0), pairs=pairs)


STAGE_CHECKS = (check_local_lipschitz, check_separation, check_edge_lengths, check_weights, check_qmeasure)
CONSTRUCTION_CHECKS = (check_cauchy_and_limit, check_limit_scales, check_coordinates, check_biholder)
