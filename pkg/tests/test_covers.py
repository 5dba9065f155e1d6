"""Tests for covers.py — weights, greedy and structured covers, refinement, verification."""

from dataclasses import replace

import math

import pytest

from ez_holder.covers import (
    ColoredCover,
    CoverSet,
    build_greedy_cover,
    build_structured_cover,
    certify,
    check_weight_bounds,
    cover_from_dict,
    prune_redundant,
    size_bound_log2,
    size_controlled_refine,
    verify_cover,
    weight,
    weight_matrix,
    weight_profile,
)
from ez_holder.errors import CoverError
from ez_holder.metric import build_cantor, build_cube_grid, build_harmonic, build_points, build_product_grid, middle_third


def _make_interval(res=33):
    return build_cube_grid(1, res)


def _make_cantor(levels=4):
    return build_cantor(middle_third(levels))


# ── Weight tests ──────────────────────────────────────────────────────


class TestWeight:
    def test_distance_to_complement(self):
        space = build_points([0, 1, 3, 4])
        s = CoverSet.of([0, 1])
        assert weight(space, s, 0) == pytest.approx(0.75)
        assert weight(space, s, 1) == pytest.approx(0.5)

    def test_outside_point_has_zero_weight(self):
        space = build_points([0, 1, 3, 4])
        assert weight(space, CoverSet.of([0, 1]), 3) == 0.0

    def test_full_space_set(self):
        space = build_points([0, 1, 2])
        with pytest.raises(ValueError, match="whole space"):
            weight(space, CoverSet.of([0, 1, 2]), 0)

    def test_weight_matrix_matches_weight(self):
        space = _make_interval(9)
        sets = [CoverSet.of(range(0, 5)), CoverSet.of(range(3, 9), color=1)]
        W = weight_matrix(space, sets)
        assert W.shape == (9, 2)
        for x in range(9):
            for k, s in enumerate(sets):
                assert W[x, k] == pytest.approx(weight(space, s, x))

    def test_cover_set_basics(self):
        s = CoverSet.of([4, 2, 7], color=3)
        assert s.anchor == 2
        assert s.ids == [2, 4, 7]
        assert 4 in s
        assert len(s) == 3


# ── Greedy cover tests ────────────────────────────────────────────────


class TestGreedyCover:
    def test_cantor_components(self):
        cover = build_greedy_cover(_make_cantor(), 1 / 9, 1 / 3)
        assert len(cover) == 4
        assert cover.multiplicity == 1
        assert cover.color_count == 1
        assert cover.is_certified

    def test_interval_multiplicity_two(self):
        cover = build_greedy_cover(_make_interval(), 0.25, 0.125)
        assert cover.is_certified
        assert cover.multiplicity == 2
        assert cover.color_count == 2
        assert cover.mesh <= 0.25 + 1e-12
        assert cover.lebesgue >= 0.25 * 0.125 - 1e-12

    def test_fine_scale_gives_singletons(self):
        cover = build_greedy_cover(_make_cantor(3), 0.01, 0.5)
        assert cover.is_singletons
        assert cover.is_certified

    def test_deterministic(self):
        a = build_greedy_cover(_make_interval(), 0.25, 0.125)
        b = build_greedy_cover(_make_interval(), 0.25, 0.125)
        assert a.to_dict() == b.to_dict()

    def test_harmonic_cover_is_verified(self):
        space = build_harmonic(30)
        cover = build_greedy_cover(space, 0.2, 0.25)
        report = verify_cover(space, cover)
        assert report.mesh == pytest.approx(cover.mesh)
        assert report.lebesgue == pytest.approx(cover.lebesgue)
        assert report.multiplicity == cover.multiplicity

    @pytest.mark.parametrize("delta, sigma", [(0.0, 0.5), (1.5, 0.5), (0.5, 0.0), (0.5, 1.0)])
    def test_argument_ranges(self, delta, sigma):
        with pytest.raises(ValueError):
            build_greedy_cover(_make_interval(9), delta, sigma)

    def test_same_color_sets_are_disjoint(self):
        cover = build_greedy_cover(_make_interval(), 0.25, 0.125)
        for a in cover.sets:
            for b in cover.sets:
                if a is not b and a.color == b.color:
                    assert not (a.members & b.members)


# ── Structured cover tests ────────────────────────────────────────────


class TestStructuredCover:
    def test_cantor_level_traces(self):
        cover = build_structured_cover(_make_cantor(), 2)
        assert len(cover) == 4
        assert cover.multiplicity == 1
        assert cover.mesh <= 1 / 9 + 1e-12
        assert cover.lebesgue >= 1 / 9 - 1e-12
        assert cover.sigma == pytest.approx(1 / 3)
        assert cover.is_certified

    def test_cantor_by_delta(self):
        cover = build_structured_cover(_make_cantor(), delta=0.2)
        assert len(cover) == 4
        assert cover.target_delta == 0.2

    def test_cantor_past_sampled_depth(self):
        space = _make_cantor(3)
        cover = build_structured_cover(space, delta=1e-4)
        assert cover.is_singletons
        assert cover.provenance.endswith("singletons")
        assert len(cover) == len(space)

    def test_cantor_level_zero(self):
        with pytest.raises(ValueError, match="level 0"):
            build_structured_cover(_make_cantor(), 0)

    def test_interval_balls(self):
        cover = build_structured_cover(_make_interval(), delta=0.5)
        assert len(cover) == 5
        assert cover.multiplicity == 2
        assert cover.color_count == 2
        assert cover.is_certified

    def test_interval_lebesgue_proportional(self):
        cover = build_structured_cover(_make_interval(), delta=0.25)
        assert cover.lebesgue >= 0.25 / 4 - 1e-12

    def test_product_grid(self):
        space = build_product_grid(middle_third(2), 1, 5)
        cover = build_structured_cover(space, delta=0.5)
        assert cover.is_certified
        assert cover.lebesgue > 0
        assert cover.multiplicity <= 2

    def test_unsupported_kind(self):
        with pytest.raises(ValueError, match="no structured cover"):
            build_structured_cover(build_harmonic(5), delta=0.5)

    def test_needs_level_or_delta(self):
        with pytest.raises(ValueError, match="level or a delta"):
            build_structured_cover(_make_cantor())


# ── Refinement tests ──────────────────────────────────────────────────


class TestSizeControlledRefine:
    def test_subfamily_with_half_sigma(self):
        space = _make_interval()
        base = build_greedy_cover(space, 0.25, 0.125)
        refined = size_controlled_refine(space, base, 2)
        assert refined.sigma == pytest.approx(base.sigma / 2)
        assert {s.members for s in refined.sets} <= {s.members for s in base.sets}
        assert refined.is_certified
        assert math.log2(len(refined)) <= size_bound_log2(2, refined.sigma, 0.25)

    def test_structured_base(self):
        space = _make_cantor()
        base = build_structured_cover(space, 2)
        refined = size_controlled_refine(space, base, 4)
        assert refined.is_certified
        assert len(refined) <= len(base)

    def test_uncertified_base(self):
        space = _make_interval()
        base = replace(build_greedy_cover(space, 0.25, 0.125), lebesgue=0.0)
        with pytest.raises(CoverError, match="certified base"):
            size_controlled_refine(space, base, 2)

    def test_N_guard(self):
        space = _make_interval()
        with pytest.raises(ValueError, match="N must be"):
            size_controlled_refine(space, build_greedy_cover(space, 0.25, 0.125), 1)


# ── Weight inequality tests ───────────────────────────────────────────


class TestWeightBounds:
    def test_greedy_cover_weights(self):
        space = _make_interval()
        cover = build_greedy_cover(space, 0.25, 0.125)
        report = check_weight_bounds(space, cover)
        assert report.holds, report.errors
        assert report.worst_lipschitz_slack >= -1e-12
        assert report.sum_range[0] >= cover.lebesgue - 1e-12

    def test_profile(self):
        space = _make_interval()
        cover = build_greedy_cover(space, 0.25, 0.125)
        profile = weight_profile(space, cover, 16)
        assert profile.shape == (len(cover),)
        assert profile.max() >= cover.lebesgue - 1e-12

    def test_isolated_set_meeting_another(self):
        space = build_points([0, 1, 2, 10])
        sets = [CoverSet.of([0, 1, 2]), CoverSet.of([2, 3], color=1)]
        cover = certify(space, sets, 0.05, 0.1, "hand")
        report = check_weight_bounds(space, cover)
        assert not report.holds
        assert report.isolated_sets


# ── Verification tests ────────────────────────────────────────────────


class TestVerifyCover:
    def test_certified_cover(self):
        space = _make_cantor()
        report = verify_cover(space, build_structured_cover(space, 2))
        assert report.is_certified, report.errors
        assert report.multiplicity == 1

    def test_uncovered_point(self):
        space = build_points([0, 1, 2])
        cover = certify(space, [CoverSet.of([0, 1])], 0.5, 0.1, "hand")
        report = verify_cover(space, cover)
        assert any("not covered" in e for e in report.errors)

    def test_same_color_overlap(self):
        space = build_points([0, 1, 2, 3])
        cover = certify(space, [CoverSet.of([0, 1, 2]), CoverSet.of([2, 3])], 1.0, 0.1, "hand")
        report = verify_cover(space, cover)
        assert any("share color" in e for e in report.errors)

    def test_full_space_set(self):
        space = build_points([0, 1])
        cover = certify(space, [CoverSet.of([0, 1])], 1.0, 0.1, "hand")
        report = verify_cover(space, cover)
        assert report.full_space_sets == [0]
        assert not report.is_certified

    def test_redundant_sets_and_prune(self):
        space = build_points([0, 1, 2, 3, 4])
        sets = [CoverSet.of([0, 1, 2]), CoverSet.of([1, 2], color=1), CoverSet.of([2, 3, 4], color=2)]
        cover = certify(space, sets, 1.0, 0.05, "hand")
        report = verify_cover(space, cover)
        assert report.redundant_pairs
        pruned = prune_redundant(space, cover)
        assert len(pruned) == 2
        assert not verify_cover(space, pruned).redundant_pairs

    def test_tampered_certificate(self):
        space = _make_cantor()
        cover = replace(build_structured_cover(space, 2), mesh=0.01)
        report = verify_cover(space, cover)
        assert any("stored mesh" in e for e in report.errors)

    def test_dump_round_trip(self):
        space = _make_interval()
        cover = build_greedy_cover(space, 0.25, 0.125)
        again = cover_from_dict(space, cover.to_dict())
        assert isinstance(again, ColoredCover)
        assert again.mesh == pytest.approx(cover.mesh)
        assert again.lebesgue == pytest.approx(cover.lebesgue)
        assert [s.members for s in again.sets] == [s.members for s in cover.sets]
