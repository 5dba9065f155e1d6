"""Tests for schedule.py — constants, scale recurrences and their checks."""

import math

import pytest

from ez_holder.errors import PrecisionError
from ez_holder.schedule import (
    LINEAR_LOG2_LIMIT,
    ScheduleParams,
    base_L,
    build_schedule,
    choose_N,
    compute_constants,
    exact_schedule,
    materialize,
    n_conditions,
    next_delta,
    next_epsilon,
    relaxed_schedule,
    schedule_from_dict,
    schedule_to_dict,
    verify_schedule,
)


def _make_params(n=0, q=1.0, sigma=0.5, N=8, mode="exact"):
    return ScheduleParams(n=n, q=q, sigma=sigma, N=N, mode=mode)


# ── materialize tests ─────────────────────────────────────────────────


class TestMaterialize:
    def test_in_range(self):
        assert materialize(-10) == 2.0**-10

    def test_out_of_range_raises(self):
        with pytest.raises(PrecisionError):
            materialize(-(LINEAR_LOG2_LIMIT + 1))

    def test_bounds(self):
        assert materialize(-5000, "upper") == 2.0**-LINEAR_LOG2_LIMIT
        assert materialize(-5000, "lower") == 0.0

    def test_huge_positive_has_no_bound(self):
        with pytest.raises(PrecisionError):
            materialize(5000, "upper")


# ── Parameter tests ───────────────────────────────────────────────────


class TestParams:
    def test_q_must_exceed_n(self):
        with pytest.raises(ValueError, match="q must exceed"):
            _make_params(n=1, q=1.0)

    def test_sigma_range(self):
        with pytest.raises(ValueError, match="sigma"):
            _make_params(sigma=1.5)

    def test_N_floor(self):
        with pytest.raises(ValueError, match="N must be"):
            _make_params(N=1)

    def test_mode(self):
        with pytest.raises(ValueError, match="mode"):
            _make_params(mode="loose")


class TestConstants:
    def test_reference_constants(self):
        c = compute_constants(_make_params())
        assert c.L == 512
        assert c.Q == pytest.approx(6.0)
        assert c.log2_C == pytest.approx(15.0)
        assert c.log2_lambda == pytest.approx(16.5)

    def test_base_L(self):
        assert base_L(1, 0.5) == pytest.approx(2048.0)


class TestChooseN:
    @pytest.mark.parametrize("n, q, sigma, expected", [(0, 1.0, 0.5, 5), (1, 2.0, 0.5, 3)])
    def test_reference_values(self, n, q, sigma, expected):
        assert choose_N(n, q, sigma) == expected

    def test_result_meets_every_condition(self):
        N = choose_N(0, 0.5, 0.25)
        assert all(n_conditions(0, 0.5, 0.25, N).values())

    @pytest.mark.parametrize(
        "n, q, sigma, floor",
        [(0, 1.0, 0.5, 2), (1, 2.0, 0.5, 2), (0, 0.5, 0.25, 2), (2, 3.0, 0.3, 2), (0, 1.0, 0.5, 4)],
    )
    def test_one_below_fails(self, n, q, sigma, floor):
        N = choose_N(n, q, sigma, N_floor=floor)
        assert N >= floor
        assert all(n_conditions(n, q, sigma, N).values())
        if N > floor:
            assert not all(n_conditions(n, q, sigma, N - 1).values())

    def test_floor_above_minimum_is_kept(self):
        assert choose_N(0, 1.0, 0.5, N_floor=16) == 16

    def test_floor_guard(self):
        with pytest.raises(ValueError, match="N_floor"):
            choose_N(0, 1.0, 0.5, N_floor=1)


# ── Exact schedule tests ──────────────────────────────────────────────


class TestExactSchedule:
    def test_reference_scales(self):
        s = exact_schedule(_make_params(), 3)
        assert s.log_eps[1] == pytest.approx(-15.0)
        assert s.log_delta[1] == pytest.approx(-24.0)
        assert s.log_eps[2] == pytest.approx(-159.0)
        assert s.eps(1) == 2.0**-15
        assert s.delta(1) == 2.0**-24

    def test_lengths(self):
        s = exact_schedule(_make_params(), 3)
        assert s.stages == 3
        assert len(s.log_eps) == 5
        assert len(s.log_delta) == 5
        assert len(s.log_eta) == 4

    def test_eta_is_eight_eps(self):
        s = exact_schedule(_make_params(), 2)
        for i, eta in enumerate(s.log_eta):
            assert eta == pytest.approx(3.0 + s.log_eps[i + 1])

    def test_next_functions_agree_with_schedule(self):
        s = exact_schedule(_make_params(), 2)
        assert next_epsilon(s, 1) == pytest.approx(s.log_eps[2])
        assert next_delta(s, 1) == pytest.approx(s.log_delta[2])

    def test_next_epsilon_needs_delta(self):
        s = exact_schedule(_make_params(), 1)
        with pytest.raises(ValueError):
            next_epsilon(s, 10)

    def test_deep_scale_raises_on_materialize(self):
        s = exact_schedule(_make_params(), 4)
        with pytest.raises(PrecisionError):
            s.eps(4)

    def test_stages_guard(self):
        with pytest.raises(ValueError, match="stages"):
            exact_schedule(_make_params(), 0)

    @pytest.mark.parametrize(
        "n, q, sigma, N",
        [(0, 1.0, 0.5, 8), (0, 0.5, 0.25, None), (1, 2.0, 0.5, None)],
    )
    def test_identities_hold_for_fifty_stages(self, n, q, sigma, N):
        N = N or choose_N(n, q, sigma)
        s = exact_schedule(_make_params(n=n, q=q, sigma=sigma, N=N), 50)
        report = verify_schedule(s)
        assert report.is_consistent, report.errors
        log2_L = math.log2(s.constants.L)
        for i in range(1, 51):
            assert s.log_delta[i] == pytest.approx(-i * log2_L + s.log_eps[i], rel=1e-12)
        assert s.log_eps[1] + s.constants.log2_C == pytest.approx(0.0, abs=1e-12)


# ── Relaxed schedule tests ────────────────────────────────────────────


class TestRelaxedSchedule:
    def test_geometric(self):
        s = relaxed_schedule(_make_params(), 3)
        assert s.mode == "relaxed"
        assert s.ratio == pytest.approx(1 / 512)
        for i in range(1, 5):
            assert s.log_eps[i] == pytest.approx(-9.0 * i)

    def test_consistent_with_warning(self):
        report = verify_schedule(relaxed_schedule(_make_params(), 5))
        assert report.is_consistent, report.errors
        assert any("relaxed" in w for w in report.warnings)

    def test_custom_L_and_ratio(self):
        s = relaxed_schedule(_make_params(), 2, L_user=1024.0, ratio=1 / 2048)
        assert s.constants.L == 1024.0
        assert s.log_eps[1] == pytest.approx(-11.0)
        assert verify_schedule(s).is_consistent

    def test_L_below_minimum(self):
        with pytest.raises(ValueError, match="below"):
            relaxed_schedule(_make_params(), 2, L_user=100.0)

    def test_ratio_above_inverse_L(self):
        with pytest.raises(ValueError, match="ratio"):
            relaxed_schedule(_make_params(), 2, ratio=0.01)

    def test_build_schedule_dispatch(self):
        assert build_schedule(_make_params(mode="relaxed"), 2).mode == "relaxed"
        assert build_schedule(_make_params(), 2).mode == "exact"


# ── Verification and dump tests ───────────────────────────────────────


class TestVerifySchedule:
    def test_detects_tampering(self):
        from dataclasses import replace

        s = exact_schedule(_make_params(), 2)
        broken = replace(s, log_delta=(0.0, -20.0, *s.log_delta[2:]))
        report = verify_schedule(broken)
        assert not report.is_consistent

    def test_bad_N_reported(self):
        s = exact_schedule(_make_params(N=2), 2)
        report = verify_schedule(s)
        assert any("N=2" in e for e in report.errors)


class TestScheduleDumps:
    def test_round_trip(self):
        for s in (exact_schedule(_make_params(), 3), relaxed_schedule(_make_params(), 3)):
            again = schedule_from_dict(schedule_to_dict(s))
            assert again.log_eps == pytest.approx(s.log_eps)
            assert again.mode == s.mode

    def test_inconsistent_dump(self):
        data = schedule_to_dict(exact_schedule(_make_params(), 2))
        data["log2_eps"][1] = -3.0
        with pytest.raises(ValueError, match="inconsistent"):
            schedule_from_dict(data)
