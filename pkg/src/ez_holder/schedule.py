"""Scale schedules: the ε, δ, η sequences and their named constants.

All sequences are stored as log₂ values. The ε recurrence is affine in log₂,
so the log domain keeps it exact up to additive rounding, while the linear
values underflow any float after two or three exact-mode stages.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Literal

from .errors import PrecisionError

logger = logging.getLogger(__name__)

LINEAR_LOG2_LIMIT = 900
AGREEMENT_TOLERANCE = 1e-12

Mode = Literal["exact", "relaxed"]


def materialize(log2_value: float, bound: Literal["upper", "lower"] | None = None) -> float:
    """Linear value of 2**log2_value.

    Args:
        log2_value: The log₂ to materialize.
        bound: When the value is below 2**-900, ``"upper"`` returns 2**-900
            and ``"lower"`` returns 0.0. Without a bound the call raises.

    Raises:
        PrecisionError: |log2_value| > LINEAR_LOG2_LIMIT and no usable bound.
    """
    if abs(log2_value) <= LINEAR_LOG2_LIMIT:
        return 2.0**log2_value
    if log2_value < 0 and bound == "upper":
        return 2.0**-LINEAR_LOG2_LIMIT
    if log2_value < 0 and bound == "lower":
        return 0.0
    raise PrecisionError(
        f"2**{log2_value:.6g} cannot be materialized (|log2| > {LINEAR_LOG2_LIMIT})",
        log2=log2_value,
    )


def _close(a: float, b: float, tol: float = AGREEMENT_TOLERANCE) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# ── Parameters and constants ──────────────────────────────────────────


@dataclass(frozen=True)
class ScheduleParams:
    """Inputs of a schedule.

    Attributes:
        n: Capacity dimension of the space.
        q: Target dimension, q > n.
        sigma: Lebesgue coefficient in (0, 1).
        N: Doubling bound, N >= 2.
        mode: ``"exact"`` or ``"relaxed"``.
    """

    n: int
    q: float
    sigma: float
    N: int
    mode: Mode = "exact"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if not self.q > self.n:
            raise ValueError(f"q must exceed n={self.n}, got {self.q}")
        if not 0 < self.sigma < 1:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")
        if not isinstance(self.N, int) or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if self.mode not in ("exact", "relaxed"):
            raise ValueError(f"mode must be 'exact' or 'relaxed', got {self.mode!r}")

    @property
    def exponent(self) -> float:
        """(n+2)/(q-n), the factor shared by B₂, B₃ and Q."""
        return (self.n + 2) / (self.q - self.n)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "q": self.q, "sigma": self.sigma, "N": self.N, "mode": self.mode}


def base_L(n: int, sigma: float) -> float:
    """L = 128 (n+1)² / σ²."""
    return 128.0 * (n + 1) ** 2 / sigma**2


def _log2_B1(n: int, q: float) -> float:
    # (8√n)^(n/(q-n)), with (8√n)^0 = 1 when n = 0
    if n == 0:
        return 0.0
    return n / (q - n) * math.log2(8.0 * math.sqrt(n))


@dataclass(frozen=True)
class Constants:
    """Named constants of a schedule, in log₂ where they can be huge.

    Attributes:
        L: Scale ratio constant.
        log2_B1: log₂ B₁ with B₁ = (8√n)^(n/(q-n)).
        B2: ((n+2)/(q-n)) log₂(2/σ).
        B3: ((n+2)/(q-n)) log₂ L.
        log2_C: log₂ C, where C = 1/ε₁.
        Q: ((n+2)/(q-n)) log₂ N.
        log2_lambda: log₂ of the bi-Hölder constant λ.
    """

    L: float
    log2_B1: float
    B2: float
    B3: float
    log2_C: float
    Q: float
    log2_lambda: float

    @property
    def log2_L(self) -> float:
        return math.log2(self.L)

    @property
    def C(self) -> float:
        return materialize(self.log2_C)

    @property
    def lam(self) -> float:
        return materialize(self.log2_lambda)

    def to_dict(self) -> dict[str, Any]:
        return {
            "L": self.L,
            "B1_log2": self.log2_B1,
            "B2": self.B2,
            "B3": self.B3,
            "C_log2": self.log2_C,
            "Q": self.Q,
            "lambda_log2": self.log2_lambda,
        }


def _lambda_log2(n: int, log2_C: float, Q: float) -> float:
    first = math.log2(4.5) + log2_C / (2 * Q)
    second = 1.5 + 0.5 * math.log2(n + 1) + log2_C
    return max(first, second)


def compute_constants(params: ScheduleParams, *, L: float | None = None, log2_C: float | None = None) -> Constants:
    """Evaluate L, B₁, B₂, B₃, C, Q and λ.

    Args:
        params: Schedule parameters.
        L: Override for L (relaxed schedules pass L_user).
        log2_C: Override for log₂ C (relaxed schedules use C = 1/ε₁).
    """
    n, q, sigma = params.n, params.q, params.sigma
    L = base_L(n, sigma) if L is None else L
    log2_N = math.log2(params.N)
    B2 = params.exponent * math.log2(2.0 / sigma)
    B3 = params.exponent * math.log2(L)
    Q = params.exponent * log2_N
    log2_B1 = _log2_B1(n, q)
    if log2_C is None:
        log2_C = 3.0 + log2_B1 + B2 * log2_N
    return Constants(
        L=L,
        log2_B1=log2_B1,
        B2=B2,
        B3=B3,
        log2_C=log2_C,
        Q=Q,
        log2_lambda=_lambda_log2(n, log2_C, Q),
    )


def n_conditions(n: int, q: float, sigma: float, N: int) -> dict[str, bool]:
    """The conditions a doubling bound N must meet for an exact schedule."""
    params = ScheduleParams(n=n, q=q, sigma=sigma, N=N)
    c = compute_constants(params)
    log2_N = math.log2(N)
    return {
        "C>=1": c.log2_C >= 0.0,
        "Q>=1": c.Q >= 1.0,
        "B1*N^B2>=L": c.log2_B1 + c.B2 * log2_N >= c.log2_L,
        "exponent*log2(N)>=1": params.exponent * log2_N >= 1.0,
    }


def choose_N(n: int, q: float, sigma: float, N_floor: int = 2) -> int:
    """Smallest integer N >= N_floor meeting every n_condition.

    Every condition is monotone in N: doubling brackets the answer, then
    bisection finds the first N that passes.
    """
    if N_floor < 2:
        raise ValueError(f"N_floor must be >= 2, got {N_floor}")

    def ok(N: int) -> bool:
        return all(n_conditions(n, q, sigma, N).values())

    lo, hi = N_floor - 1, N_floor
    while not ok(hi):
        lo, hi = hi, hi * 2
    # lo fails (or is below the floor), hi passes
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    N = hi
    logger.debug("choose_N(n=%d, q=%g, sigma=%g, floor=%d) -> %d", n, q, sigma, N_floor, N)
    return N


# ── Schedules ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ScaleSchedule:
    """ε_i, δ_i and η_i in log₂, for i = 0..stages+1 (η for i = 0..stages).

    Attributes:
        params: Schedule parameters.
        constants: Named constants.
        log_eps: log₂ ε_i.
        log_delta: log₂ δ_i.
        log_eta: log₂ η_i, where η_i = 8 ε_{i+1}.
        ratio: Geometric ratio of a relaxed schedule (None in exact mode).
    """

    params: ScheduleParams
    constants: Constants
    log_eps: tuple[float, ...] = (0.0,)
    log_delta: tuple[float, ...] = (0.0,)
    log_eta: tuple[float, ...] = ()
    ratio: float | None = None

    @property
    def mode(self) -> Mode:
        return self.params.mode

    @property
    def stages(self) -> int:
        return max(0, len(self.log_eps) - 2)

    def eps(self, i: int, bound: Literal["upper", "lower"] | None = None) -> float:
        return materialize(self.log_eps[i], bound)

    def delta(self, i: int, bound: Literal["upper", "lower"] | None = None) -> float:
        return materialize(self.log_delta[i], bound)

    def eta(self, i: int, bound: Literal["upper", "lower"] | None = None) -> float:
        return materialize(self.log_eta[i], bound)

    @property
    def certifies_qmeasure(self) -> bool:
        return self.mode == "exact"


def next_epsilon(schedule: ScaleSchedule, i: int) -> float:
    """log₂ ε_{i+1} from ε_i and δ_i.

    Exact mode evaluates the defining product directly and cross-checks it
    against the closed form
    ``-3 - log₂B₁ - B₂ log₂N - i B₃ log₂N + Q log₂ε_i``.
    """
    if len(schedule.log_delta) <= i or len(schedule.log_eps) <= i:
        raise ValueError(f"schedule has no δ_{i} yet")
    p, c = schedule.params, schedule.constants
    if schedule.mode == "relaxed":
        return (i + 1) * math.log2(schedule.ratio)

    log2_N = math.log2(p.N)
    log_eps_i, log_delta_i = schedule.log_eps[i], schedule.log_delta[i]
    n_term = 0.0 if p.n == 0 else p.n * math.log2(8.0 * math.sqrt(p.n))
    log2_two_over = 1.0 - math.log2(p.sigma) - log_delta_i
    direct = -3.0 - (n_term + (p.n + 2) * log2_two_over * log2_N) / (p.q - p.n)
    closed = -3.0 - c.log2_B1 - c.B2 * log2_N - i * c.B3 * log2_N + c.Q * log_eps_i
    if not _close(direct, closed):
        raise PrecisionError(
            f"ε_{i + 1}: direct form {direct!r} and closed form {closed!r} disagree",
            stage=i + 1,
        )
    return direct


def next_delta(schedule: ScaleSchedule, i: int) -> float:
    """log₂ δ_{i+1} = log₂ δ_i - log₂ ε_i + log₂ ε_{i+1} - log₂ L."""
    if len(schedule.log_eps) <= i + 1:
        raise ValueError(f"schedule has no ε_{i + 1} yet")
    return schedule.log_delta[i] - schedule.log_eps[i] + schedule.log_eps[i + 1] - schedule.constants.log2_L


def _grow(schedule: ScaleSchedule, stages: int) -> ScaleSchedule:
    for i in range(stages + 1):
        schedule = replace(schedule, log_eps=schedule.log_eps + (next_epsilon(schedule, i),))
        schedule = replace(schedule, log_delta=schedule.log_delta + (next_delta(schedule, i),))
    log_eta = tuple(3.0 + e for e in schedule.log_eps[1:])
    return replace(schedule, log_eta=log_eta)


def exact_schedule(params: ScheduleParams, stages: int) -> ScaleSchedule:
    """Schedule with ε_{i+1} from the exact recurrence."""
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    if params.mode != "exact":
        params = replace(params, mode="exact")
    schedule = _grow(ScaleSchedule(params=params, constants=compute_constants(params)), stages)
    logger.debug("exact_schedule: log2 eps_1=%g, log2 delta_1=%g", schedule.log_eps[1], schedule.log_delta[1])
    return schedule


def relaxed_schedule(
    params: ScheduleParams,
    stages: int,
    *,
    L_user: float | None = None,
    ratio: float | None = None,
) -> ScaleSchedule:
    """Geometric surrogate ε_i = ratio^i with δ_i from the same δ recurrence.

    Args:
        params: Schedule parameters (mode is forced to ``"relaxed"``).
        stages: Number of embedding stages the schedule must serve.
        L_user: L to use, at least 128(n+1)²/σ² (default: that value).
        ratio: ε ratio, at most 1/L_user and 1/(8√(2(n+1))) (default 1/L_user).
    """
    if stages < 1:
        raise ValueError(f"stages must be >= 1, got {stages}")
    L_min = base_L(params.n, params.sigma)
    L_user = L_min if L_user is None else float(L_user)
    if L_user < L_min * (1 - AGREEMENT_TOLERANCE):
        raise ValueError(f"L_user={L_user:.6g} is below L={L_min:.6g}")
    ratio = 1.0 / L_user if ratio is None else float(ratio)
    if not 0 < ratio <= (1.0 / L_user) * (1 + AGREEMENT_TOLERANCE):
        raise ValueError(f"ratio={ratio:.6g} must lie in (0, 1/L_user={1.0 / L_user:.6g}]")
    if ratio > 1.0 / (8.0 * math.sqrt(2.0 * (params.n + 1))):
        raise ValueError(f"ratio={ratio:.6g} exceeds 1/(8√(2(n+1)))")
    params = replace(params, mode="relaxed")
    constants = compute_constants(params, L=L_user, log2_C=-math.log2(ratio))
    return _grow(ScaleSchedule(params=params, constants=constants, ratio=ratio), stages)


def build_schedule(
    params: ScheduleParams,
    stages: int,
    *,
    L_user: float | None = None,
    ratio: float | None = None,
) -> ScaleSchedule:
    """Dispatch on params.mode."""
    if params.mode == "relaxed":
        return relaxed_schedule(params, stages, L_user=L_user, ratio=ratio)
    return exact_schedule(params, stages)


# ── Verification ──────────────────────────────────────────────────────


@dataclass
class ScheduleReport:
    """Consistency report of a schedule.

    Attributes:
        indices_checked: Number of stage indices examined.
        warnings: Non-blocking notes.
        errors: Failed identities, one line each.
    """

    indices_checked: int = 0
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def is_consistent(self) -> bool:
        return len(self.errors) == 0


def verify_schedule(schedule: ScaleSchedule, tol: float = AGREEMENT_TOLERANCE) -> ScheduleReport:
    """Re-check every schedule identity in log₂."""
    report = ScheduleReport()
    c, p = schedule.constants, schedule.params
    le, ld, lh = schedule.log_eps, schedule.log_delta, schedule.log_eta
    log2_L = c.log2_L

    def _le(a: float, b: float) -> bool:
        return a <= b + tol * max(1.0, abs(a), abs(b))

    if le[0] != 0.0 or ld[0] != 0.0:
        report.errors.append("ε₀ and δ₀ must both be 1")

    for i in range(1, len(le)):
        if not _close(ld[i], -i * log2_L + le[i], tol):
            report.errors.append(f"i={i}: δ_i != L^-i ε_i")
        if not _le(le[i] - le[i - 1], -log2_L):
            report.errors.append(f"i={i}: ε_i/ε_(i-1) > 1/L")
        if not _le(le[i], -i * log2_L):
            report.errors.append(f"i={i}: ε_i > L^-i")
    for i in range(len(le) - 1):
        if not _le(le[i], (c.log2_C + le[i + 1]) / (2 * c.Q)):
            report.errors.append(f"i={i}: ε_i > (C ε_(i+1))^(1/2Q)")
    for i, eta in enumerate(lh):
        if not _close(eta, 3.0 + le[i + 1], tol):
            report.errors.append(f"i={i}: η_i != 8 ε_(i+1)")

    if schedule.mode == "exact":
        if len(le) > 1 and not _close(le[1] + c.log2_C, 0.0, tol):
            report.errors.append("ε₁·C != 1")
        for name, ok in n_conditions(p.n, p.q, p.sigma, p.N).items():
            if not ok:
                report.errors.append(f"N={p.N} violates {name}")
    else:
        report.warnings.append("relaxed schedule: q-measure and bi-Hölder constants are not certified")
    report.indices_checked = len(le)
    return report


# ── Serialization ─────────────────────────────────────────────────────


def schedule_to_dict(schedule: ScaleSchedule) -> dict[str, Any]:
    return {
        "mode": schedule.mode,
        "params": schedule.params.to_dict(),
        "constants": schedule.constants.to_dict(),
        "ratio": schedule.ratio,
        "stages": schedule.stages,
        "log2_eps": list(schedule.log_eps),
        "log2_delta": list(schedule.log_delta),
        "log2_eta": list(schedule.log_eta),
    }


def schedule_from_dict(data: dict[str, Any]) -> ScaleSchedule:
    """Rebuild a schedule from its parameters and check it against the dump."""
    raw = dict(data["params"])
    raw["mode"] = data.get("mode", raw.get("mode", "exact"))
    params = ScheduleParams(**raw)
    stages = int(data["stages"])
    L_user = data.get("constants", {}).get("L")
    schedule = build_schedule(params, stages, L_user=L_user if params.mode == "relaxed" else None, ratio=data.get("ratio"))
    for key, ours in (("log2_eps", schedule.log_eps), ("log2_delta", schedule.log_delta)):
        stored = data.get(key)
        if stored is not None and (len(stored) != len(ours) or not all(_close(a, b) for a, b in zip(stored, ours))):
            raise ValueError(f"schedule dump is inconsistent: {key} does not match its parameters")
    return schedule
