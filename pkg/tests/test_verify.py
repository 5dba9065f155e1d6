"""Tests for verify.py — stage and construction checks, simplex minimum, oracle."""

from dataclasses import replace

import numpy as np
import pytest

from ez_holder.covers import CoverSet, build_greedy_cover, certify
from ez_holder.embedding import SparseVector, initial_stage, refine_stage, run_construction
from ez_holder.errors import CertificateError
from ez_holder.metric import build_cantor, build_cube_grid, build_points, middle_third
from ez_holder.schedule import ScheduleParams, exact_schedule, relaxed_schedule
from ez_holder.suite import default_suite
from ez_holder.verify import (
    LemmaReport,
    brute_force_oracle,
    check_biholder,
    check_cauchy_and_limit,
    check_coordinates,
    check_edge_lengths,
    check_limit_scales,
    check_local_lipschitz,
    check_qmeasure,
    check_separation,
    check_simplex_minimum,
    check_weights,
    merge_reports,
    set_exact_rechecks,
)


def _make_params(mode="exact"):
    return ScheduleParams(n=0, q=1.0, sigma=0.5, N=8, mode=mode)


def _make_run(values=(0, 2), mode="exact", stages=4):
    space = build_points(list(values))
    build = exact_schedule if mode == "exact" else relaxed_schedule
    return run_construction(space, build(_make_params(mode), stages))


def _make_bad_stage():
    """A stage whose cover is coarser than its scale allows, so nearby points get split."""
    space = build_points([0, 0.001, 1])
    schedule = relaxed_schedule(_make_params("relaxed"), 2)
    cover = certify(space, [CoverSet.of([k]) for k in range(3)], 1.0, 0.5, "hand")
    return space, schedule, refine_stage(space, initial_stage(space), cover, schedule)


def _make_edge_stage():
    """Exact stage 1 on {0, 1/2, 1} whose middle point sits in two overlapping sets."""
    space = build_points([0, 0.5, 1])
    schedule = exact_schedule(_make_params(), 2)
    sets = [CoverSet.of([0, 1], color=0), CoverSet.of([1, 2], color=1)]
    cover = certify(space, sets, 1.0, 0.5, "hand")
    return space, schedule, refine_stage(space, initial_stage(space), cover, schedule)


# ── Stage check tests ─────────────────────────────────────────────────


class TestStageChecks:
    def test_two_point_stage_passes(self):
        run = _make_run()
        stage = run.last
        for check in (check_local_lipschitz, check_separation, check_edge_lengths, check_weights, check_qmeasure):
            report = check(stage, run.schedule, run.space)
            assert report.passed, (check.name, report.to_dict())
            assert report.stage == 1

    def test_separation_is_tight_and_rechecked(self):
        run = _make_run()
        report = check_separation(run.last, run.schedule, run.space)
        assert report.pairs_checked == 1
        assert report.constant_used == pytest.approx(2.0**-15 / np.sqrt(2))
        assert report.details["exact_rechecks"] == 1
        assert report.worst_relative_slack == pytest.approx(0.0, abs=1e-12)

    def test_float_only_grading(self):
        run = _make_run()
        set_exact_rechecks(False)
        try:
            report = check_separation(run.last, run.schedule, run.space)
        finally:
            set_exact_rechecks(True)
        assert "exact_rechecks" not in report.details

    def test_local_lipschitz_failure_has_witness(self):
        space, schedule, stage = _make_bad_stage()
        report = check_local_lipschitz(stage, schedule, space)
        assert report.status == "fail"
        assert report.constant_used == pytest.approx(0.5)
        assert (report.witnesses[0]["x"], report.witnesses[0]["y"]) == (0, 1)

    def test_separation_failure(self):
        run = _make_run()
        collapsed = replace(run.last, images=[SparseVector.zero(2), SparseVector.zero(2)], _dense=None)
        report = check_separation(collapsed, run.schedule, run.space)
        assert report.status == "fail"
        assert report.witnesses[0]["rhs"] == 0.0

    def test_vacuous_local_lipschitz(self):
        run = _make_run()
        report = check_local_lipschitz(run.last, run.schedule, run.space)
        assert report.pairs_checked == 0
        assert report.passed
        assert "vacuous" in report.details["note"]

    def test_qmeasure_relaxed_is_not_certified(self):
        run = _make_run(mode="relaxed")
        report = check_qmeasure(run.last, run.schedule, run.space)
        assert report.status == "not-certified"

    def test_qmeasure_log_sums(self):
        run = _make_run()
        report = check_qmeasure(run.last, run.schedule, run.space)
        # two vertices, q = 1, η₁ = 8ε₂ = 2^-156
        assert report.details["log2RawSum"] == pytest.approx(1.0 - 156.0)
        assert report.details["log2InflatedSum"] == pytest.approx(2.0 + 1.0 - 156.0)

    def test_qmeasure_counts_cubes_on_an_edge(self):
        space, schedule, stage = _make_edge_stage()
        report = check_qmeasure(stage, schedule, space)
        assert report.passed, report.to_dict()
        assert report.details["simplices"] == 3
        # one edge: ceil(4·ε₁/η₁) = 2^143 cubes of edge η₁ = 2^-156
        assert report.details["log2RawSum"] == pytest.approx(143.0 - 156.0)
        assert report.details["log2InflatedSum"] == pytest.approx(2.0 + 143.0 - 156.0)
        assert report.details["containmentErrors"] == []

    def test_qmeasure_flags_image_outside_cube_grid(self):
        space, schedule, stage = _make_edge_stage()
        v0, v1 = stage.vertices[0], stage.vertices[1].scaled(20.0)
        images = [v0, v0.scaled(0.5) + v1.scaled(0.5), v1]
        stretched = replace(stage, vertices=[v0, v1], images=images, _dense=None)
        report = check_qmeasure(stretched, schedule, space)
        assert report.status == "fail"
        assert report.details["containmentErrors"] == ["point 1: image lies outside the cube grid of its simplex"]

    def test_edge_lengths_on_interval(self):
        space = build_cube_grid(1, 17)
        schedule = relaxed_schedule(_make_params("relaxed"), 2)
        stage = refine_stage(space, initial_stage(space), build_greedy_cover(space, 0.25, 0.25), schedule)
        report = check_edge_lengths(stage, schedule, space)
        assert report.passed
        assert report.pairs_checked > 0

    def test_stage_checks_need_a_cover(self):
        run = _make_run()
        with pytest.raises(ValueError):
            check_separation(run.stages[0], run.schedule, run.space)


# ── Construction check tests ──────────────────────────────────────────


class TestConstructionChecks:
    @pytest.mark.parametrize("values", [(0, 2), (0, 0.125, 0.375, 0.5, 1)])
    def test_exact_runs_pass(self, values):
        run = _make_run(values)
        for check in (check_cauchy_and_limit, check_limit_scales, check_coordinates, check_biholder):
            report = check(run)
            assert report.passed, (check.name, report.to_dict())

    def test_biholder_relaxed_is_not_certified(self):
        run = _make_run(mode="relaxed")
        assert check_biholder(run).status == "not-certified"

    def test_cauchy_witness_labels(self):
        report = check_cauchy_and_limit(_make_run())
        assert {w["kind"] for w in report.witnesses} <= {"step", "limit"}
        assert all("point" in w for w in report.witnesses)

    def test_coordinates_detect_tampering(self):
        run = _make_run()
        stage = run.last
        moved = [v + SparseVector.basis(stage.coord_count + 3) for v in stage.images]
        run.stages[-1] = replace(stage, images=moved, _dense=None)
        report = check_coordinates(run)
        assert report.status == "fail"
        assert report.details["errors"]

    def test_cantor_relaxed_suite(self):
        space = build_cantor(middle_third(3))
        run = run_construction(space, relaxed_schedule(_make_params("relaxed"), 2))
        by_name = {r.lemma: r for r in default_suite().run_merged(run)}
        assert by_name["biholder"].status == "not-certified"
        assert by_name["qmeasure"].status == "not-certified"
        for name in ("local-lipschitz", "separation", "edge-length", "weights", "cauchy-limit", "limit-scales", "coordinates"):
            assert by_name[name].passed, by_name[name].to_dict()


# ── Report tests ──────────────────────────────────────────────────────


class TestMergeReports:
    def test_min_reduction(self):
        a = LemmaReport("x", pairs_checked=2, worst_slack=0.5, worst_relative_slack=0.1, stage=1)
        b = LemmaReport("x", pairs_checked=3, worst_slack=0.2, worst_relative_slack=0.3, stage=2)
        merged = merge_reports([a, b])
        assert merged.pairs_checked == 5
        assert merged.worst_slack == 0.2
        assert merged.worst_relative_slack == 0.1
        assert merged.details["stages"] == [1, 2]

    def test_fail_wins(self):
        a = LemmaReport("x", status="not-certified")
        b = LemmaReport("x", status="fail")
        assert merge_reports([a, b]).status == "fail"

    def test_empty(self):
        with pytest.raises(ValueError):
            merge_reports([])

    def test_mixed_checks(self):
        with pytest.raises(ValueError, match="single check"):
            merge_reports([LemmaReport("x"), LemmaReport("y")])

    def test_infinite_slack_serializes_as_null(self):
        data = LemmaReport("x").to_dict()
        assert data["worstSlack"] is None
        assert data["pass"] is True


# ── Standalone check tests ────────────────────────────────────────────


def test_simplex_minimum():
    report = check_simplex_minimum(5, 2)
    assert report.passed
    for m, value in report.details["minima"].items():
        assert value == pytest.approx(1.0 / m)


class TestOracle:
    def test_isometry(self):
        space = build_points([0, 1, 3])
        profile = brute_force_oracle(space, space.raw_coords / 3.0)
        assert profile.alpha == pytest.approx(1.0)
        assert profile.beta == pytest.approx(1.0)
        assert profile.lam == pytest.approx(1.0)
        assert profile.within(1.0, 1.0, 1.0)

    def test_two_point_run(self):
        run = _make_run()
        profile = brute_force_oracle(run.space, run.last.images)
        lam = run.schedule.constants.lam
        assert profile.within(lam, 2 * run.schedule.constants.Q, 1 / (4 * run.schedule.constants.Q), run.tail_bound)

    def test_squared_metric_exponents(self):
        space = build_points([0, 0.125, 0.375, 0.5, 1])
        profile = brute_force_oracle(space, image_distances=space.matrix**2)
        assert profile.alpha == pytest.approx(2.0)
        assert profile.beta == pytest.approx(1.0)
        assert profile.lam == pytest.approx(1.0)
        assert profile.within(1.0, 2.0, 1.0)

    def test_not_injective(self):
        space = build_points([0, 1])
        with pytest.raises(CertificateError, match="injective"):
            brute_force_oracle(space, np.zeros((2, 1)))

    def test_point_limit(self):
        space = build_cube_grid(1, 13)
        with pytest.raises(CertificateError, match="limited"):
            brute_force_oracle(space, space.raw_coords)

    def test_needs_images(self):
        with pytest.raises(ValueError, match="images"):
            brute_force_oracle(build_points([0, 1]))
