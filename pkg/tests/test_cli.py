"""Tests for cli.py — subcommands, artifacts and exit codes."""

import json

import pytest

from ez_holder.cli import DEMO_PRESETS, EXIT_CERTIFICATE, EXIT_OK, EXIT_USAGE, build_parser, config_from_args, dumps, main
from ez_holder.parallel import set_default_threads
from ez_holder.verify import set_exact_rechecks


@pytest.fixture(autouse=True)
def _reset_globals():
    yield
    set_exact_rechecks(True)
    set_default_threads(None)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


# ── Demo tests ────────────────────────────────────────────────────────


class TestDemo:
    @pytest.mark.parametrize("preset", sorted(DEMO_PRESETS))
    def test_presets_pass(self, preset, capsys):
        assert main(["demo", "--preset", preset]) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["preset"] == preset
        assert all(r["status"] != "fail" for r in data["reports"])
        assert "durationMs" not in data["reports"][0]

    def test_two_point_oracle(self, capsys):
        assert main(["demo"]) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["stopReason"] == "stabilized"
        assert data["oracle"]["within"] is True
        assert data["config"]["values"] == [0.0, 2.0]

    def test_cantor_relaxed_not_certified_checks(self, capsys):
        main(["demo", "--preset", "cantor-relaxed"])
        by_name = {r["lemma"]: r for r in _stdout_json(capsys)["reports"]}
        assert by_name["biholder"]["status"] == "not-certified"
        assert by_name["qmeasure"]["status"] == "not-certified"

    def test_writes_construction_files(self, tmp_path):
        assert main(["demo", "--preset", "cantor-relaxed", "--out", str(tmp_path)]) == EXIT_OK
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "construction.json", "demo.json", "schedule.json", "space.json",
            "stage_000.json", "stage_001.json", "stage_002.json", "stage_003.json",
        ]

    def test_reruns_are_byte_identical(self, tmp_path):
        main(["demo", "--preset", "five-point", "--out", str(tmp_path)])
        first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        main(["demo", "--preset", "five-point", "--out", str(tmp_path)])
        second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
        assert first == second
        assert all(text.endswith(b"\n") for text in first.values())

    def test_float64_precision(self, capsys):
        assert main(["demo", "--precision", "float64"]) == EXIT_OK
        by_name = {r["lemma"]: r for r in _stdout_json(capsys)["reports"]}
        assert "exact_rechecks" not in by_name["separation"]["details"]


# ── Embed and verify tests ────────────────────────────────────────────


class TestEmbedVerify:
    def test_embed_then_verify(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["embed", "--space", "points", "--values", "0", "2", "--out", str(out)]) == EXIT_OK
        assert (out / "construction.json").is_file()
        meta = json.loads((out / "construction.json").read_text())
        assert meta["stopReason"] == "stabilized"
        assert meta["coordinates"] == 2

        capsys.readouterr()
        assert main(["verify", "--input", str(out)]) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["stopReason"] == "stabilized"
        assert {r["lemma"] for r in data["reports"]} >= {"separation", "biholder", "simplex-minimum"}

    def test_verify_builds_when_no_input(self, capsys):
        assert main(["verify", "--space", "cantor", "--levels", "3", "--mode", "relaxed", "--N", "8"]) == EXIT_OK
        assert _stdout_json(capsys)["oracle"] is None

    def test_missing_input(self, tmp_path, capsys):
        assert main(["verify", "--input", str(tmp_path / "missing")]) == EXIT_USAGE
        assert _stdout_json(capsys)["error"] == "usage-error"

    def test_delta_max_rejects_run(self, capsys):
        code = main(["embed", "--space", "points", "--values", "0", "2", "--delta-max", "1e-9"])
        assert code == EXIT_USAGE
        assert "delta_max" in _stdout_json(capsys)["message"]


# ── Other subcommand tests ────────────────────────────────────────────


def test_space(capsys):
    assert main(["space", "--space", "harmonic", "--harmonic-M", "10"]) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["space"]["provenance"]["kind"] == "harmonic"
    assert data["axioms"]["errors"] == []
    assert "doubling" in data


def test_cover(capsys):
    argv = ["cover", "--space", "grid", "--grid-res", "33", "--delta", "0.25", "--sigma", "0.125", "--source", "greedy"]
    assert main(argv) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["report"]["errors"] == []
    assert data["report"]["multiplicity"] == 2


def test_cover_refined(capsys):
    argv = ["cover", "--space", "grid", "--grid-res", "33", "--delta", "0.25", "--sigma", "0.125",
            "--source", "greedy", "--refine-N", "2"]
    assert main(argv) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["sizeBoundLog2"] == pytest.approx(7.0)
    assert data["cover"]["provenance"] == "refined:greedy"


def test_schedule_csv(capsys):
    assert main(["schedule", "--mode", "relaxed", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "i,log2_eps,log2_delta"
    assert lines[1].startswith("0,")


def test_schedule_json(capsys):
    assert main(["schedule", "--N", "8"]) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["report"]["errors"] == []
    assert data["config"]["N"] == 8


def test_dims_csv(capsys):
    assert main(["dims", "--levels", "6", "--k-max", "4", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "scale,count,log_inv_scale,log_count"
    assert [int(line.split(",")[1]) for line in lines[1:]] == [2, 4, 8, 16]


def test_counterexample_fastgap(capsys):
    assert main(["counterexample", "--which", "fastgap"]) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["holds"] is True
    assert data["fastgap"]["k"] == 2


def test_counterexample_harmonic(capsys):
    assert main(["counterexample", "--which", "harmonic", "--sigma", "0.5"]) == EXIT_OK
    assert _stdout_json(capsys)["harmonic"]["n"] == 5


def test_counterexample_hypercurve(capsys):
    argv = ["counterexample", "--which", "hypercurve", "--nu", "1", "--levels", "4", "--grid-res", "17"]
    assert main(argv) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["projection"]["holds"] is True
    assert data["measures"]["holds"] is True


def test_certificate_error_exit(capsys):
    assert main(["counterexample", "--which", "harmonic", "--harmonic-M", "10"]) == EXIT_CERTIFICATE
    assert _stdout_json(capsys)["error"] == "certificate-error"


def test_counterexample_positional_name(capsys):
    assert main(["counterexample", "fastgap"]) == EXIT_OK
    assert _stdout_json(capsys)["config"]["counterexample"] == "fastgap"


def test_harmonic_truncation_follows_sigma(capsys):
    assert main(["counterexample", "--which", "harmonic", "--sigma", "0.25"]) == EXIT_OK
    data = _stdout_json(capsys)
    assert data["harmonic"]["n"] == 9
    assert data["harmonic"]["M"] == 72
    assert data["config"]["harmonic_M"] is None


# ── Space, cover and schedule flag tests ──────────────────────────────


class TestSpaceFlags:
    def test_kind_and_fastgap_gaps(self, capsys):
        assert main(["space", "--kind", "cantor", "--levels", "2", "--gaps", "fastgap"]) == EXIT_OK
        space = _stdout_json(capsys)["space"]
        assert space["provenance"]["cantor"]["name"] == "fastgap"
        assert len(space["points"]) == 8

    def test_custom_gaps_file(self, tmp_path, capsys):
        ratios = tmp_path / "ratios.json"
        ratios.write_text("[0.5]")
        assert main(["space", "--kind", "cantor", "--levels", "3", "--gaps", f"custom:{ratios}"]) == EXIT_OK
        cantor = _stdout_json(capsys)["space"]["provenance"]["cantor"]
        assert cantor["name"] == "custom"
        assert cantor["ratios"] == [0.5]

    def test_custom_gaps_file_missing(self, tmp_path, capsys):
        argv = ["space", "--kind", "cantor", "--gaps", f"custom:{tmp_path / 'nope.json'}"]
        assert main(argv) == EXIT_USAGE
        assert "gap-ratio" in _stdout_json(capsys)["message"]

    def test_unknown_gaps(self, capsys):
        assert main(["space", "--gaps", "quarter"]) == EXIT_USAGE
        assert _stdout_json(capsys)["errors"][0]["field"] == "gaps"


class TestCoverFlags:
    def test_space_file_with_greedy_mode(self, tmp_path, capsys):
        assert main(["space", "--kind", "grid", "--grid-res", "33", "--out", str(tmp_path)]) == EXIT_OK
        argv = ["cover", "--space", str(tmp_path / "space.json"), "--delta", "0.25", "--sigma", "0.125", "--mode", "greedy"]
        assert main(argv) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["report"]["multiplicity"] == 2
        assert data["config"]["input"] == str((tmp_path / "space.json").resolve())

    def test_refine_mode(self, capsys):
        argv = ["cover", "--space", "grid", "--grid-res", "33", "--delta", "0.25", "--sigma", "0.125",
                "--mode", "refine", "--N", "2"]
        assert main(argv) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["sizeBoundLog2"] == pytest.approx(7.0)
        assert data["cover"]["provenance"].startswith("refined:")

    def test_refine_mode_needs_N(self, capsys):
        assert main(["cover", "--space", "grid", "--mode", "refine"]) == EXIT_USAGE
        assert _stdout_json(capsys)["error"] == "validation-error"


class TestScheduleFlags:
    def test_auto_N_picks_smallest(self, capsys):
        assert main(["schedule", "--N", "auto"]) == EXIT_OK
        data = _stdout_json(capsys)
        assert data["config"]["N"] is None
        assert data["schedule"]["params"]["N"] == 5

    def test_N_must_be_integer_or_auto(self):
        with pytest.raises(SystemExit) as info:
            main(["schedule", "--N", "many"])
        assert info.value.code == 2


# ── Stage directory tests ─────────────────────────────────────────────


class TestStageDirectory:
    @pytest.fixture()
    def run_dir(self, tmp_path):
        sched = tmp_path / "sched"
        assert main(["schedule", "--N", "8", "--out", str(sched)]) == EXIT_OK
        run = tmp_path / "run"
        argv = ["embed", "--space", "points", "--values", "0", "2", "--schedule", str(sched / "schedule.json"),
                "--covers", "greedy", "--out", str(run)]
        assert main(argv) == EXIT_OK
        return run, sched / "schedule.json"

    def test_embed_uses_schedule_file_and_covers(self, run_dir):
        run, _ = run_dir
        meta = json.loads((run / "construction.json").read_text())
        assert meta["source"] == "greedy"
        schedule = json.loads((run / "schedule.json").read_text())["schedule"]
        assert schedule["params"]["N"] == 8

    def test_verify_selected_checks(self, run_dir, capsys):
        run, schedule = run_dir
        capsys.readouterr()
        argv = ["verify", "--stages", str(run), "--schedule", str(schedule), "--lemmas", "separation,simplex-minimum"]
        assert main(argv) == EXIT_OK
        data = _stdout_json(capsys)
        assert [r["lemma"] for r in data["reports"]] == ["separation", "simplex-minimum"]

    def test_verify_all_checks(self, run_dir, capsys):
        run, _ = run_dir
        capsys.readouterr()
        assert main(["verify", "--stages", str(run), "--lemmas", "all"]) == EXIT_OK
        names = {r["lemma"] for r in _stdout_json(capsys)["reports"]}
        assert names >= {"separation", "biholder", "qmeasure", "simplex-minimum"}

    def test_verify_unknown_check(self, run_dir, capsys):
        run, _ = run_dir
        capsys.readouterr()
        assert main(["verify", "--stages", str(run), "--lemmas", "telepathy"]) == EXIT_USAGE
        assert "Unknown checks" in _stdout_json(capsys)["message"]

    def test_verify_stage_dir_without_space(self, tmp_path, capsys):
        assert main(["verify", "--stages", str(tmp_path)]) == EXIT_USAGE
        assert "space.json" in _stdout_json(capsys)["message"]


def test_dims_scale_range(capsys):
    assert main(["dims", "--levels", "6", "--scales", "0.5:0.0625:4", "--format", "csv"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()[1:]
    assert [float(row.split(",")[0]) for row in rows] == pytest.approx([0.5, 0.25, 0.125, 0.0625])


# ── Validation tests ──────────────────────────────────────────────────


def test_sigma_out_of_range(capsys):
    assert main(["schedule", "--sigma", "1.5"]) == EXIT_USAGE
    data = _stdout_json(capsys)
    assert data["error"] == "validation-error"
    assert data["errors"][0]["field"] == "sigma"


def test_points_need_values(capsys):
    assert main(["space", "--space", "points"]) == EXIT_USAGE
    assert _stdout_json(capsys)["error"] == "validation-error"


def test_q_must_exceed_n(capsys):
    assert main(["schedule", "--n", "2", "--q", "1"]) == EXIT_USAGE


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["transmogrify"])
    assert info.value.code == 2


def test_demo_preset_fills_config():
    args = build_parser().parse_args(["demo", "--preset", "cantor-relaxed"])
    config = config_from_args(args)
    assert config.mode == "relaxed"
    assert config.stop_on_stabilization is False
    assert config.N == 8


@pytest.mark.parametrize("preset", ["two-point", "five-point"])
def test_exact_presets_pin_N(preset):
    config = config_from_args(build_parser().parse_args(["demo", "--preset", preset]))
    assert config.N == 8
    auto = config_from_args(build_parser().parse_args(["demo", "--preset", preset, "--N", "auto"]))
    assert auto.N is None


def test_explicit_flags_override_preset():
    args = build_parser().parse_args(["demo", "--seed", "7"])
    assert config_from_args(args).seed == 7


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1.5]}) == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
