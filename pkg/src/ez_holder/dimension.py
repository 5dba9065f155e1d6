"""Box-counting dimension estimates and the counterexample certificates.

Three certificates accompany the embedding: a product ``C × Iⁿ`` of a
Cantor set with a cube, whose Hölder images keep dimension above n; a
Cantor set with fast-shrinking gaps that no bi-Hölder map sends to
measure zero; and the harmonic sequence, which has no fine multiplicity-one
covers with a proportional Lebesgue number.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order
from scipy.spatial.distance import cdist, pdist
from scipy.stats import linregress

from .errors import CertificateError
from .metric import FiniteMetricSpace, build_cantor, check_width_bound, fastgap, middle_third, normalize
from .parallel import parallel_map

logger = logging.getLogger(__name__)

CANTOR_DIMENSION = math.log(2) / math.log(3)
BOX_TOLERANCE = 1e-9
K_SEARCH_LIMIT = 1_000_000
SAMPLE_CORRECTION = 0.5

# ── Box counting ──────────────────────────────────────────────────────


@dataclass
class DimensionReport:
    """Covering numbers across scales and the fitted log-log slope.

    Attributes:
        scales: Radii (box sides for coordinate spaces), decreasing.
        counts: Covering number at each scale.
        slope: Least-squares slope of log N against log(1/r).
        intercept: Intercept of the fit.
        residual: Root-mean-square residual of the fit.
        method: ``"boxes"`` (sup-norm boxes on coordinates) or ``"balls"``.
        measure_at_scale: Σ diam(U)^s per scale when requested.
        warnings: Non-blocking notes.
    """

    scales: list[float]
    counts: list[int]
    slope: float
    intercept: float
    residual: float
    method: str
    measure_at_scale: list[float] | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scales": self.scales,
            "counts": self.counts,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "method": self.method,
            "measureAtScale": self.measure_at_scale,
            "warnings": self.warnings,
        }


def geometric_scales(base: float, k_min: int, k_max: int) -> list[float]:
    """[base^-k for k = k_min..k_max]."""
    if base <= 1:
        raise ValueError(f"base must exceed 1, got {base}")
    if k_max < k_min:
        raise ValueError("k_max must be >= k_min")
    return [base ** -k for k in range(k_min, k_max + 1)]


def scale_range(a: float, b: float, steps: int) -> list[float]:
    """`steps` log-spaced scales from a to b, largest first."""
    if not (a > 0 and b > 0) or a == b:
        raise ValueError(f"scale endpoints must be distinct and positive, got {a}, {b}")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    return sorted(np.geomspace(a, b, steps).tolist(), reverse=True)


def _box_sets(space: FiniteMetricSpace, r: float) -> list[np.ndarray]:
    """Greedy cover by one-sided boxes [x, x + r]^d anchored at the lex-least uncovered point."""
    X = space.coords
    order = np.lexsort(X.T[::-1])
    uncovered = np.ones(len(X), dtype=bool)
    reach = r * (1 + BOX_TOLERANCE)
    sets = []
    pos = 0
    while True:
        while pos < len(order) and not uncovered[order[pos]]:
            pos += 1
        if pos == len(order):
            return sets
        x = X[order[pos]]
        off = X - x
        inside = uncovered & np.all((off >= -reach * BOX_TOLERANCE) & (off <= reach), axis=1)
        sets.append(np.flatnonzero(inside))
        uncovered &= ~inside


def _ball_sets(space: FiniteMetricSpace, r: float) -> list[np.ndarray]:
    """Greedy cover by closed balls of radius r centred at the first uncovered point."""
    uncovered = np.ones(len(space), dtype=bool)
    sets = []
    while uncovered.any():
        x = int(np.argmax(uncovered))
        inside = uncovered & (space.row(x) <= r * (1 + BOX_TOLERANCE))
        sets.append(np.flatnonzero(inside))
        uncovered &= ~inside
    return sets


def _uses_boxes(space: FiniteMetricSpace) -> bool:
    return space.coords is not None


def _cover_sets(space: FiniteMetricSpace, r: float) -> list[np.ndarray]:
    return _box_sets(space, r) if _uses_boxes(space) else _ball_sets(space, r)


def _set_diameter(space: FiniteMetricSpace, idx: np.ndarray) -> float:
    if idx.size < 2:
        return 0.0
    if _uses_boxes(space):
        return float(pdist(space.coords[idx]).max())
    return float(space.rows(idx)[:, idx].max())


def measure_at_scale(space: FiniteMetricSpace, scale: float, s: float) -> float:
    """Σ diam(U)^s over the greedy cover at the given scale."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    return float(sum(_set_diameter(space, idx) ** s for idx in _cover_sets(space, scale)))


def box_dimension(
    space: FiniteMetricSpace,
    scales: Sequence[float],
    *,
    measure_exponent: float | None = None,
    threads: int | None = None,
) -> DimensionReport:
    """Estimate the box-counting dimension from greedy covering numbers.

    Coordinate spaces are covered by sup-norm boxes of side r, other spaces
    by metric balls of radius r.

    Raises:
        ValueError: fewer than 4 scales, or a range narrower than two octaves.
    """
    rs = sorted((float(r) for r in scales), reverse=True)
    if len(rs) < 4:
        raise ValueError(f"need at least 4 scales, got {len(rs)}")
    if rs[0] / rs[-1] < 4 * (1 - 1e-12):
        raise ValueError("scales must span at least two octaves")
    warnings = []
    floor = 2 * space.min_distance
    for r in rs:
        if r < floor:
            warnings.append(f"scale {r:.6g} is below twice the sample resolution {space.min_distance:.6g}")
            logger.warning("box_dimension: scale %.6g approaches the sample resolution", r)

    covers = parallel_map(lambda r: _cover_sets(space, r), rs, threads=threads)
    counts = [len(c) for c in covers]
    for a, b in zip(counts, counts[1:]):
        if b < a:
            warnings.append("covering numbers are not monotone in the scale")
            break
    x = np.log(1.0 / np.array(rs))
    y = np.log(np.array(counts, dtype=float))
    fit = linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    measures = None
    if measure_exponent is not None:
        measures = [
            float(sum(_set_diameter(space, idx) ** measure_exponent for idx in cover)) for cover in covers
        ]
    report = DimensionReport(
        scales=rs,
        counts=counts,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        method="boxes" if _uses_boxes(space) else "balls",
        measure_at_scale=measures,
        warnings=warnings,
    )
    logger.debug("box_dimension: counts=%s slope=%.4f", counts, report.slope)
    return report


def snowflake(space: FiniteMetricSpace, power: float) -> FiniteMetricSpace:
    """Replace d by d^p (renormalized to diameter 1).

    Raises:
        ValueError: p outside (0, 1].
    """
    if not 0 < power <= 1:
        raise ValueError(f"snowflake power must lie in (0, 1], got {power}")
    if power == 1:
        return space
    provenance = dict(space.provenance)
    provenance["snowflake"] = provenance.get("snowflake", 1.0) * power
    flaked = replace(space, power=space.power * power, scale=space.scale**power, provenance=provenance)
    return normalize(flaked)


def holder_dimension_bounds(dim: float, alpha: float, beta: float) -> tuple[float, float]:
    """Image dimension bounds (dim/α, dim/β) under an (α, β) bi-Hölder map."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("exponents must be positive")
    return dim / alpha, dim / beta


def dimension_to_csv(report: DimensionReport) -> str:
    """``scale,count,log_inv_scale,log_count`` rows, one per scale."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scale", "count", "log_inv_scale", "log_count"])
    for r, c in zip(report.scales, report.counts):
        writer.writerow([repr(r), c, repr(math.log(1.0 / r)), repr(math.log(c))])
    return buf.getvalue()


# ── Ahlfors constant ──────────────────────────────────────────────────


def ahlfors_constant(space: FiniteMetricSpace, s: float = CANTOR_DIMENSION, max_level: int | None = None) -> float:
    """Estimate ν = max μ(B)/diam(B)^s for the level-m uniform measure on a Cantor sample.

    Each sample point carries mass 1/|X| (two endpoints per level-m interval).
    Balls are centred at sample points with radii 2^-j and 3^-k down to the
    sampled level; diam(B) is taken as 2r.
    """
    if space.kind != "cantor":
        raise ValueError(f"ahlfors_constant needs a Cantor sample, got {space.kind!r}")
    levels = int(space.provenance["cantor"]["levels"])
    top = levels if max_level is None else min(levels, max_level)
    radii = sorted({2.0**-j for j in range(1, math.ceil(top * math.log2(3)) + 1)} | {3.0**-k for k in range(1, top + 1)})
    mass = 1.0 / len(space)
    best = 0.0
    for x in space.points:
        row = space.row(x)
        for r in radii:
            count = int(np.count_nonzero(row <= r * (1 + BOX_TOLERANCE)))
            best = max(best, count * mass / (2 * r) ** s)
    return best


# ── Fast-gap Cantor set ───────────────────────────────────────────────


@dataclass
class FastgapCertificate:
    """Gap-sum and image-measure certificate for the fast-gap Cantor set.

    Attributes:
        levels: Number of gap levels summed exactly.
        partial_sum: Σ_{k ≤ levels} 2^(k-1)/(10 k^k), exact.
        tail_bound: Rigorous bound on the remaining gap levels.
        tail_bound_comparison: The 2^k/k^k ≤ 2^-k comparison bound (k ≥ 4).
        total_upper: partial_sum + tail_bound.
        length_lower: 1 − total_upper, a lower bound for H¹ of the set.
        k: Minimal k with (k+1)^β ≥ 3 and ((k+1)^β/3^α)^k > 2λ²/10^β.
        log2_measure_lower: log₂ of 1/(2λ·3^(αk)).
        measure_lower: 1/(2λ·3^(αk)).
        width_violations: Sampled intervals narrower than 3^-level.
    """

    alpha: float
    beta: float
    lam: float
    levels: int
    partial_sum: float
    tail_bound: float
    tail_bound_comparison: float
    total_upper: float
    length_lower: float
    k: int
    log2_measure_lower: float
    measure_lower: float
    width_violations: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.total_upper < 0.5 and not self.width_violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda": self.lam,
            "levels": self.levels,
            "partialSum": self.partial_sum,
            "tailBound": self.tail_bound,
            "tailBoundComparison": self.tail_bound_comparison,
            "totalUpper": self.total_upper,
            "lengthLower": self.length_lower,
            "k": self.k,
            "measureLowerLog2": self.log2_measure_lower,
            "measureLower": self.measure_lower,
            "widthViolations": [list(v) for v in self.width_violations],
            "holds": self.holds,
        }


def gap_sum_partial(levels: int) -> Fraction:
    """Σ_{k=1..levels} 2^(k-1)/(10 k^k), the total length removed by the first gap levels."""
    return sum((Fraction(2 ** (k - 1), 10 * k**k) for k in range(1, levels + 1)), Fraction(0))


def gap_sum_tail(levels: int) -> tuple[float, float]:
    """Bounds on Σ_{k > levels} 2^(k-1)/(10 k^k).

    Returns the geometric bound (1/20)(2/K)^K/(1 − 2/K) with K = levels + 1, and
    the comparison bound (1/20)·2^(1-K) valid for K ≥ 4 (inf otherwise).
    """
    K = levels + 1
    if K < 3:
        raise ValueError("tail bounds need levels >= 2")
    geometric = (2.0 / K) ** K / (1 - 2.0 / K) / 20.0
    comparison = 2.0 ** (1 - K) / 20.0 if K >= 4 else math.inf
    return geometric, comparison


def minimal_k(alpha: float, beta: float, lam: float, limit: int = K_SEARCH_LIMIT) -> int:
    """Smallest k ≥ 1 with (k+1)^β ≥ 3 and ((k+1)^β/3^α)^k > 2λ²/10^β, searched in log₂.

    Raises:
        CertificateError: no such k below ``limit``.
    """
    target = 1.0 + 2 * math.log2(lam) - beta * math.log2(10)
    for k in range(1, limit + 1):
        base = beta * math.log2(k + 1)
        if base < math.log2(3) - 1e-12:
            continue
        if k * (base - alpha * math.log2(3)) > target:
            return k
    raise CertificateError(f"no k below {limit} satisfies the image-measure inequalities", alpha=alpha, beta=beta)


def fastgap_certificate(levels: int = 6, alpha: float = 1.0, beta: float = 1.0, lam: float = 1.0) -> FastgapCertificate:
    """Certify that the fast-gap Cantor set has length ≥ 1/2 and no measure-zero bi-Hölder image."""
    if not alpha >= 1 >= beta > 0:
        raise ValueError(f"need alpha >= 1 >= beta > 0, got alpha={alpha}, beta={beta}")
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    partial = float(gap_sum_partial(levels))
    geometric, comparison = gap_sum_tail(levels)
    tail = min(geometric, comparison)
    k = minimal_k(alpha, beta, lam)
    log2_lower = -1.0 - math.log2(lam) - alpha * k * math.log2(3)
    violations = check_width_bound(fastgap(levels))
    cert = FastgapCertificate(
        alpha=alpha,
        beta=beta,
        lam=lam,
        levels=levels,
        partial_sum=partial,
        tail_bound=tail,
        tail_bound_comparison=comparison,
        total_upper=partial + tail,
        length_lower=1.0 - (partial + tail),
        k=k,
        log2_measure_lower=log2_lower,
        measure_lower=2.0**log2_lower,
        width_violations=violations,
    )
    if not cert.holds:
        logger.warning("fast-gap certificate does not hold: total=%.6g, %d width violations", cert.total_upper, len(violations))
    return cert


# ── Hypercurve product ────────────────────────────────────────────────


@dataclass
class HypercurveCertificate:
    """Dimension certificate for Hölder images of C × Iⁿ.

    Attributes:
        lam, alpha, beta: Bi-Hölder parameters of the candidate map.
        n: Cube dimension.
        nu: Ahlfors constant used for the Cantor measure.
        nu_derived: Whether nu was estimated from a sample.
        A: Spread constant 2^(log2/log3)·ν·λ^(log2/(α log3)).
        B: Bigness constant Hⁿ(Iⁿ)/(λ√n)ⁿ.
        lower_bound: n + log2/(α log3).
        B_over_A: Lower bound for the image's measure sum.
    """

    lam: float
    alpha: float
    beta: float
    n: int
    nu: float
    nu_derived: bool
    A: float
    B: float
    lower_bound: float
    B_over_A: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "n": self.n,
            "nu": self.nu,
            "nuDerived": self.nu_derived,
            "A": self.A,
            "B": self.B,
            "lowerBound": self.lower_bound,
            "BOverA": self.B_over_A,
        }


def hypercurve_certificate(
    lam: float,
    alpha: float,
    n: int,
    nu: float | None = None,
    *,
    beta: float = 1.0,
    nu_levels: int = 8,
) -> HypercurveCertificate:
    """Constants showing a Hölder image of C × Iⁿ has dimension ≥ n + log2/(α log3).

    Without ``nu``, the Ahlfors constant is estimated on a middle-third sample
    of ``nu_levels`` levels.
    """
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    derived = nu is None
    if nu is None:
        nu = ahlfors_constant(build_cantor(middle_third(nu_levels)))
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}")
    B = 1.0 / (lam * math.sqrt(n)) ** n
    A = 2.0**CANTOR_DIMENSION * nu * lam ** (CANTOR_DIMENSION / alpha)
    return HypercurveCertificate(
        lam=lam,
        alpha=alpha,
        beta=beta,
        n=n,
        nu=nu,
        nu_derived=derived,
        A=A,
        B=B,
        lower_bound=n + CANTOR_DIMENSION / alpha,
        B_over_A=B / A,
    )


@dataclass
class MeasureCheck:
    """Σ diam(U)^s over greedy covers of a C × Iⁿ sample, against a threshold."""

    exponent: float
    scales: list[float]
    measures: list[float]
    threshold: float

    @property
    def holds(self) -> bool:
        return all(m >= self.threshold for m in self.measures)

    def to_dict(self) -> dict[str, Any]:
        return {
            "exponent": self.exponent,
            "scales": self.scales,
            "measures": self.measures,
            "threshold": self.threshold,
            "holds": self.holds,
        }


def hypercurve_sample_check(
    space: FiniteMetricSpace,
    certificate: HypercurveCertificate,
    scales: Sequence[float] = (0.5, 0.25, 0.125, 0.0625),
    *,
    correction: float = SAMPLE_CORRECTION,
) -> MeasureCheck:
    """Compare covering sums at the certificate's exponent with correction·B/A.

    A finite grid undercounts diameters at scales near its resolution;
    ``correction`` absorbs that loss.
    """
    if not 0 < correction <= 1:
        raise ValueError(f"correction must lie in (0, 1], got {correction}")
    s = certificate.lower_bound
    rs = [float(r) for r in scales]
    measures = [measure_at_scale(space, r, s) for r in rs]
    return MeasureCheck(exponent=s, scales=rs, measures=measures, threshold=correction * certificate.B_over_A)


@dataclass
class ProjectionReport:
    """Face and Lipschitz checks of the projection F = Ψ∘γ on a C × Iⁿ grid.

    Attributes:
        lam: Cap parameter λ.
        n: Cube dimension.
        face_violations: (point, axis, expected) for face points mapped off their face.
        psi_lipschitz: Largest observed |ψ_i(a) − ψ_i(b)|/|a − b|.
        Psi_lipschitz: Largest observed |Ψ(a) − Ψ(b)|/|a − b|.
        density_gap: Largest distance from a lattice point of Iⁿ to F of its fibre.
        errors: Failed checks.
    """

    lam: float
    n: int
    face_violations: list[tuple[int, int, int]] = field(default_factory=list)
    psi_lipschitz: float = 0.0
    Psi_lipschitz: float = 0.0
    density_gap: float = 0.0
    density_tolerance: float = 0.0
    errors: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return len(self.errors) == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "n": self.n,
            "faceViolations": [list(v) for v in self.face_violations[:10]],
            "psiLipschitz": self.psi_lipschitz,
            "PsiLipschitz": self.Psi_lipschitz,
            "densityGap": self.density_gap,
            "densityTolerance": self.density_tolerance,
            "errors": self.errors,
            "holds": self.holds,
        }


def _max_ratio(values: np.ndarray, pts: np.ndarray) -> float:
    """max |v(a) − v(b)| / |a − b| over distinct pairs."""
    num = pdist(values.reshape(len(values), -1))
    den = pdist(pts)
    ok = den > 0
    return float((num[ok] / den[ok]).max()) if ok.any() else 0.0


def projection_surjectivity_check(
    space: FiniteMetricSpace,
    images: np.ndarray | None = None,
    lam: float = 1.0,
) -> ProjectionReport:
    """Check the capped projection of a candidate map on a C × Iⁿ grid.

    With γ the candidate (default: the identity on raw product coordinates),
    φ_i(y) = d(y, γ(A_i)) where A_i is the face t_i = 0, ψ_i = min(λφ_i, 1) and
    F = (ψ_i ∘ γ)_i. F must send A_i into t_i = 0 and O_i (t_i = 1) into t_i = 1,
    ψ_i must be λ-Lipschitz, Ψ must be λ√n-Lipschitz, and on every Cantor fibre
    F must come within one lattice step of every lattice point of Iⁿ.
    """
    if space.kind != "product":
        raise ValueError(f"projection check needs a C × I^n product grid, got {space.kind!r}")
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    n = int(space.provenance["n"])
    res = int(space.provenance["grid_res"])
    exact = space.exact_coords
    gamma = space.raw_coords if images is None else np.asarray(images, dtype=float)
    if len(gamma) != len(space):
        raise ValueError("images must have one row per point")

    report = ProjectionReport(lam=lam, n=n)
    F = np.zeros((len(space), n))
    for i in range(n):
        face = np.array([x for x, p in enumerate(exact) if p[1 + i] == 0])
        phi = cdist(gamma, gamma[face]).min(axis=1)
        psi = np.minimum(lam * phi, 1.0)
        F[:, i] = psi
        for x, p in enumerate(exact):
            if p[1 + i] == 0 and psi[x] != 0.0:
                report.face_violations.append((x, i, 0))
            elif p[1 + i] == 1 and psi[x] != 1.0:
                report.face_violations.append((x, i, 1))
        report.psi_lipschitz = max(report.psi_lipschitz, _max_ratio(psi, gamma))
    report.Psi_lipschitz = _max_ratio(F, gamma)

    if report.face_violations:
        report.errors.append(f"{len(report.face_violations)} face points leave their faces")
    if report.psi_lipschitz > lam * (1 + BOX_TOLERANCE):
        report.errors.append(f"ψ_i Lipschitz constant {report.psi_lipschitz:.6g} exceeds λ = {lam}")
    if report.Psi_lipschitz > lam * math.sqrt(n) * (1 + BOX_TOLERANCE):
        report.errors.append(f"Ψ Lipschitz constant {report.Psi_lipschitz:.6g} exceeds λ√n = {lam * math.sqrt(n):.6g}")

    axis = np.linspace(0.0, 1.0, res)
    lattice = np.array(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1).T
    fibres: dict[Fraction, list[int]] = {}
    for x, p in enumerate(exact):
        fibres.setdefault(p[0], []).append(x)
    report.density_tolerance = math.sqrt(n) / (res - 1)
    for ids in fibres.values():
        gap = float(cdist(lattice, F[ids]).min(axis=1).max())
        report.density_gap = max(report.density_gap, gap)
    if report.density_gap > report.density_tolerance * (1 + BOX_TOLERANCE):
        report.errors.append(f"F misses the lattice by {report.density_gap:.6g} on some fibre")
    return report


# ── Harmonic sequence ─────────────────────────────────────────────────


@dataclass
class CapacityCertificate:
    """Refutation of fine multiplicity-one covers on {0} ∪ {1/m}.

    Attributes:
        sigma: Lebesgue coefficient being refuted.
        n: Witness index, ⌈max(2/σ, 2)⌉ + 1.
        delta: Witness scale 2/(σ·n(n−1)).
        M: Truncation of the sample.
        max_step: Largest gap between consecutive points of {0} ∪ {1/m : m ≥ n−1}.
        chain_size: Points in the σδ-chain component of 0.
        chain_diameter: Diameter of that component.
        checks: Outcome of each inequality.
    """

    sigma: float
    n: int
    delta: float
    M: int
    max_step: float
    chain_size: int
    chain_diameter: float
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "sigma": self.sigma,
            "n": self.n,
            "delta": self.delta,
            "sigmaDelta": self.sigma * self.delta,
            "M": self.M,
            "maxStep": self.max_step,
            "chainSize": self.chain_size,
            "chainDiameter": self.chain_diameter,
            "checks": self.checks,
            "holds": self.holds,
        }


def refuter_witness(sigma: float) -> tuple[int, float]:
    """(n, δ) with n = ⌈max(2/σ, 2)⌉ + 1 and δ = 2/(σ·n(n−1))."""
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    n = math.ceil(max(2.0 / sigma, 2.0)) + 1
    return n, 2.0 / (sigma * n * (n - 1))


def harmonic_truncation(sigma: float) -> int:
    """Smallest M for which the harmonic sample reaches the refuter witness, n(n-1)."""
    n, _ = refuter_witness(sigma)
    return n * (n - 1)


def capacity_refuter(space: FiniteMetricSpace, sigma: float) -> CapacityCertificate:
    """Show that no multiplicity-one cover of the harmonic sample has mesh ≤ δ and Lebesgue ≥ σδ.

    Points closer than σδ must share the set holding the σδ-ball of either, so
    the whole σδ-chain through 0 lies in one set. That chain reaches 1/(n−1),
    so the set's diameter exceeds δ.

    Raises:
        CertificateError: the sample is truncated before M = n(n−1).
    """
    if space.kind != "harmonic":
        raise ValueError(f"capacity_refuter needs a harmonic sample, got {space.kind!r}")
    n, delta = refuter_witness(sigma)
    M = int(space.provenance["M"])
    if M < n * (n - 1):
        raise CertificateError(f"truncation M={M} is below n(n-1)={n * (n - 1)} for sigma={sigma}", M=M, n=n)
    sd = sigma * delta
    values = [p[0] for p in space.exact_coords]
    index = {v: x for x, v in enumerate(values)}
    D = space.matrix

    tail = [index[Fraction(0)]] + [index[Fraction(1, m)] for m in range(M, n - 2, -1)]
    steps = [float(D[a, b]) for a, b in zip(tail, tail[1:])]
    max_step = max(steps)

    order = breadth_first_order(csr_matrix(D < sd), index[Fraction(0)], directed=False, return_predecessors=False)
    chain = np.sort(order)
    chain_diam = float(D[np.ix_(chain, chain)].max())

    checks = {
        "closeness": max_step < sd and all(1.0 / (m * (m - 1)) <= 1.0 / (n * (n - 1)) for m in range(n, M + 1)),
        "chain": set(tail) <= set(chain.tolist()),
        "diameter": chain_diam >= 1.0 / (n - 1) * (1 - 1e-12) and 1.0 / (n - 1) > delta,
    }
    cert = CapacityCertificate(
        sigma=sigma,
        n=n,
        delta=delta,
        M=M,
        max_step=max_step,
        chain_size=int(chain.size),
        chain_diameter=chain_diam,
        checks=checks,
    )
    logger.debug("capacity_refuter: sigma=%g n=%d delta=%g checks=%s", sigma, n, delta, checks)
    return cert
