"""ez-holder command line: build, embed, verify and certify from file artifacts.

Every JSON artifact carries the validated config and the library version,
is written with sorted keys and ends in a newline. Exit status is 0 when
every check passes, 1 on a certificate failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from pydantic import ValidationError

from .config import DEFAULT_HARMONIC_M, PipelineConfig
from .covers import size_bound_log2, size_controlled_refine, verify_cover
from .dimension import (
    box_dimension,
    capacity_refuter,
    dimension_to_csv,
    fastgap_certificate,
    geometric_scales,
    harmonic_truncation,
    hypercurve_certificate,
    hypercurve_sample_check,
    projection_surjectivity_check,
    scale_range,
    snowflake,
)
from .embedding import Construction, run_construction, stage_from_dict, stage_to_dict
from .errors import HolderError
from .metric import (
    CantorSpec,
    FiniteMetricSpace,
    build_cantor,
    build_cube_grid,
    build_harmonic,
    build_points,
    build_product_grid,
    check_metric_axioms,
    estimate_doubling,
    fastgap,
    from_ratios,
    middle_third,
    space_from_dict,
    space_to_dict,
)
from .parallel import set_default_threads
from .schedule import ScaleSchedule, ScheduleParams, build_schedule, choose_N, schedule_from_dict, schedule_to_dict, verify_schedule
from .sources import CoverSource, make_source
from .suite import default_suite
from .verify import LemmaReport, brute_force_oracle, check_simplex_minimum, set_exact_rechecks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_USAGE = 2
DOUBLING_POINT_LIMIT = 512
SIMPLEX_CHECK = "simplex-minimum"

DEMO_PRESETS: dict[str, dict[str, Any]] = {
    "two-point": {
        "space": "points", "values": [0.0, 2.0], "mode": "exact",
        "n": 0, "q": 1.0, "sigma": 0.5, "N": 8, "stages": 4, "base": 2.0, "k_min": 1, "k_max": 4,
    },
    "five-point": {
        "space": "points", "values": [0.0, 0.125, 0.375, 0.5, 1.0], "mode": "exact",
        "n": 0, "q": 1.0, "sigma": 0.5, "N": 8, "stages": 4, "base": 2.0, "k_min": 1, "k_max": 4,
    },
    "cantor-relaxed": {
        "space": "cantor", "levels": 4, "mode": "relaxed", "n": 0, "q": 1.0, "sigma": 0.5,
        "N": 8, "stages": 3, "stop_on_stabilization": False, "base": 3.0, "k_min": 1, "k_max": 4,
    },
}


# ── Artifacts ─────────────────────────────────────────────────────────


def _version() -> str:
    from . import __version__

    return __version__


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (Path, Fraction)):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps(data: Any) -> str:
    """Canonical artifact text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, default=_json_default) + "\n"


def _artifact(config: PipelineConfig, **payload: Any) -> dict[str, Any]:
    return {"version": _version(), "config": config.artifact_dict(), **payload}


def _emit(config: PipelineConfig, name: str, data: dict[str, Any] | str, *, primary: bool = True) -> None:
    """Write an artifact under --out, or the primary one to stdout."""
    text = data if isinstance(data, str) else dumps(data)
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / name).write_text(text)
        logger.info("wrote %s", config.out / name)
    elif primary:
        sys.stdout.write(text)


def _report_dicts(reports: Sequence[LemmaReport]) -> list[dict[str, Any]]:
    # timings vary run to run; artifacts must not
    out = []
    for r in reports:
        d = r.to_dict()
        d.pop("durationMs", None)
        out.append(d)
    return out


def _table(header: list[str], rows: list[list[Any]]) -> str:
    widths = [len(h) + 2 for h in header]
    for r in rows:
        for i, cell in enumerate(r):
            widths[i] = max(widths[i], len(str(cell)) + 2)

    def fmt_row(cells: Sequence[Any]) -> str:
        parts = []
        for i, cell in enumerate(cells):
            if i == 0:
                parts.append(f" {cell!s:<{widths[i] - 1}}")
            else:
                parts.append(f" {cell!s:>{widths[i] - 1}}")
        return "|" + "|".join(parts) + "|"

    sep = "|" + "|".join("-" * w for w in widths) + "|"
    return "\n".join([fmt_row(header), sep, *(fmt_row(r) for r in rows)])


def _echo(text: str) -> None:
    print(text, file=sys.stderr)


def _summarize_reports(reports: Sequence[LemmaReport]) -> None:
    rows = [
        [r.lemma, r.status, f"{r.worst_relative_slack:.3g}", r.pairs_checked, f"{r.duration_ms:.1f}"]
        for r in reports
    ]
    _echo(_table(["check", "status", "worst rel. slack", "pairs", "ms"], rows))


# ── Builders ──────────────────────────────────────────────────────────


def _load_json(path: Path) -> Any:
    return json.loads(path.read_text())


def _cantor_spec(config: PipelineConfig) -> CantorSpec:
    """Cantor factor from --gaps: third, fastgap or custom:<file> with a ratio list."""
    gaps = config.gaps or ("fastgap" if config.space == "fastgap" else "third")
    if gaps == "third":
        return middle_third(config.levels)
    if gaps == "fastgap":
        return fastgap(config.levels)
    path = Path(gaps.removeprefix("custom:")).expanduser()
    if not path.is_file():
        raise FileNotFoundError(f"no gap-ratio file at {path}")
    data = _load_json(path)
    ratios = data.get("ratios") if isinstance(data, dict) else data
    if not isinstance(ratios, list):
        raise ValueError(f"{path} must hold a list of gap ratios or {{\"ratios\": [...]}}")
    return from_ratios(ratios, config.levels)


def build_space(config: PipelineConfig) -> FiniteMetricSpace:
    """The configured space, or the one dumped in --input."""
    if config.input is not None and config.input.is_file():
        data = _load_json(config.input)
        space = space_from_dict(data.get("space", data))
    elif config.input is not None and (config.input / "space.json").is_file():
        data = _load_json(config.input / "space.json")
        space = space_from_dict(data.get("space", data))
    elif config.input is not None:
        raise FileNotFoundError(f"no space artifact at {config.input}")
    elif config.space in ("cantor", "fastgap"):
        space = build_cantor(_cantor_spec(config))
    elif config.space == "grid":
        space = build_cube_grid(config.cube_dim, config.grid_res)
    elif config.space == "product":
        space = build_product_grid(_cantor_spec(config), config.cube_dim, config.grid_res)
    elif config.space == "harmonic":
        space = build_harmonic(config.harmonic_M or DEFAULT_HARMONIC_M)
    else:
        space = build_points(config.values or [])
    return snowflake(space, config.snowflake)


def _load_schedule(path: Path) -> ScaleSchedule:
    if not path.is_file():
        raise FileNotFoundError(f"no schedule artifact at {path}")
    data = _load_json(path)
    return schedule_from_dict(data.get("schedule", data))


def build_schedule_from(config: PipelineConfig) -> ScaleSchedule:
    """The schedule in --schedule, or one computed from the options."""
    if config.schedule_file is not None:
        return _load_schedule(config.schedule_file)
    N = config.N if config.N is not None else choose_N(config.n, config.q, config.sigma)
    params = ScheduleParams(n=config.n, q=config.q, sigma=config.sigma, N=N, mode=config.mode)
    return build_schedule(params, config.stages, L_user=config.L_user, ratio=config.ratio)


def _source(config: PipelineConfig) -> CoverSource | None:
    if config.cover_source == "auto":
        return None
    return make_source(config.cover_source, config.sigma)


def _cover_source(config: PipelineConfig, space: FiniteMetricSpace) -> CoverSource:
    if config.cover_source != "auto":
        return make_source(config.cover_source, config.sigma)
    structured = space.kind in ("cantor", "grid", "product") and space.power == 1.0
    return make_source("structured" if structured else "greedy", config.sigma)


def build_construction(config: PipelineConfig, space: FiniteMetricSpace, schedule: ScaleSchedule) -> Construction:
    return run_construction(
        space,
        schedule,
        source=_source(config),
        stop_on_stabilization=config.stop_on_stabilization,
        delta_max=config.delta_max,
        threads=config.threads,
    )


def load_construction(
    directory: Path,
    *,
    space: FiniteMetricSpace | None = None,
    schedule: ScaleSchedule | None = None,
) -> Construction:
    """Rebuild a construction from the stage files ``embed`` writes.

    ``space`` and ``schedule`` replace ``space.json`` and ``schedule.json``
    in the directory. ``construction.json`` is optional.
    """
    if not directory.is_dir():
        raise FileNotFoundError(f"no stage directory at {directory}")
    if space is None:
        if not (directory / "space.json").is_file():
            raise FileNotFoundError(f"no space.json in {directory}; pass --input or --space <file>")
        space = space_from_dict(_load_json(directory / "space.json")["space"])
    if schedule is None:
        schedule = _load_schedule(directory / "schedule.json")
    meta_path = directory / "construction.json"
    meta = _load_json(meta_path) if meta_path.is_file() else {}
    stages = [stage_from_dict(space, _load_json(p)["stage"]) for p in sorted(directory.glob("stage_*.json"))]
    if not stages:
        raise ValueError(f"no stage files in {directory}")
    return Construction(
        space=space,
        schedule=schedule,
        stages=stages,
        stop_reason=meta.get("stopReason", "completed"),
        source=meta.get("source", "greedy"),
    )


def _oracle(construction: Construction) -> dict[str, Any] | None:
    """Exhaustive envelope of the last stage on tiny exact-mode spaces."""
    schedule = construction.schedule
    if schedule.mode != "exact" or len(construction.space) > 12 or len(construction.space) < 2:
        return None
    profile = brute_force_oracle(construction.space, construction.last.images)
    c = schedule.constants
    return {
        "alpha": profile.alpha,
        "beta": profile.beta,
        "lambda": profile.lam,
        "within": profile.within(c.lam, 2 * c.Q, 1.0 / (4 * c.Q), construction.tail_bound),
    }


def _verify(
    construction: Construction,
    lemmas: Sequence[str] | None = None,
) -> tuple[list[LemmaReport], dict[str, Any] | None, bool]:
    """Run the default suite, or only the checks named in ``lemmas``."""
    suite = default_suite()
    if lemmas is not None:
        suite = suite.filter(*(name for name in lemmas if name != SIMPLEX_CHECK))
    reports = suite.run_merged(construction)
    if lemmas is None or SIMPLEX_CHECK in lemmas:
        reports.append(check_simplex_minimum())
    oracle = _oracle(construction)
    ok = all(r.status != "fail" for r in reports) and (oracle is None or oracle["within"])
    return reports, oracle, ok


# ── Commands ──────────────────────────────────────────────────────────


def _cmd_space(config: PipelineConfig) -> int:
    space = build_space(config)
    axioms = check_metric_axioms(space, seed=config.seed)
    payload: dict[str, Any] = {"space": space_to_dict(space), "axioms": dataclasses.asdict(axioms)}
    if len(space) <= DOUBLING_POINT_LIMIT and len(space) > 1:
        payload["doubling"] = dataclasses.asdict(estimate_doubling(space, [0.5, 0.25, 0.125]))
    _emit(config, "space.json", _artifact(config, **payload))
    _echo(_table(["points", "kind", "metric"], [[len(space), space.kind, axioms.is_metric]]))
    return EXIT_OK if axioms.is_metric else EXIT_CERTIFICATE


def _cmd_cover(config: PipelineConfig) -> int:
    space = build_space(config)
    cover = _cover_source(config, space).cover_for(space, config.delta)
    payload: dict[str, Any] = {}
    if config.refine_N is not None:
        cover = size_controlled_refine(space, cover, config.refine_N)
        payload["sizeBoundLog2"] = size_bound_log2(config.refine_N, cover.sigma, config.delta)
    report = verify_cover(space, cover, threads=config.threads)
    payload.update(cover=cover.to_dict(), report=dataclasses.asdict(report))
    _emit(config, "cover.json", _artifact(config, **payload))
    _echo(_table(
        ["sets", "mesh", "lebesgue", "multiplicity", "colors", "certified"],
        [[len(cover), f"{report.mesh:.4g}", f"{report.lebesgue:.4g}", report.multiplicity, report.color_count, report.is_certified]],
    ))
    return EXIT_OK if report.is_certified else EXIT_CERTIFICATE


def _schedule_csv(schedule: ScaleSchedule) -> str:
    lines = ["i,log2_eps,log2_delta"]
    lines += [f"{i},{e!r},{d!r}" for i, (e, d) in enumerate(zip(schedule.log_eps, schedule.log_delta))]
    return "\n".join(lines) + "\n"


def _cmd_schedule(config: PipelineConfig) -> int:
    schedule = build_schedule_from(config)
    report = verify_schedule(schedule)
    if config.format == "csv":
        _emit(config, "schedule.csv", _schedule_csv(schedule))
    else:
        _emit(config, "schedule.json", _artifact(config, schedule=schedule_to_dict(schedule), report=dataclasses.asdict(report)))
    c = schedule.constants
    _echo(_table(["mode", "N", "Q", "log2 L", "log2 eps_1", "consistent"],
                 [[schedule.mode, schedule.params.N, f"{c.Q:.4g}", f"{c.log2_L:.4g}", f"{schedule.log_eps[1]:.4g}", report.is_consistent]]))
    return EXIT_OK if report.is_consistent else EXIT_CERTIFICATE


def _construction_meta(construction: Construction) -> dict[str, Any]:
    last = construction.last
    return {
        "stopReason": construction.stop_reason,
        "stages": len(construction) - 1,
        "source": construction.source,
        "tailBound": construction.tail_bound,
        "coordinates": last.coord_count,
        "images": {str(x): v.to_pairs() for x, v in enumerate(last.images)},
    }


def _write_construction(config: PipelineConfig, construction: Construction) -> None:
    _emit(config, "space.json", _artifact(config, space=space_to_dict(construction.space)), primary=False)
    _emit(config, "schedule.json", _artifact(config, schedule=schedule_to_dict(construction.schedule)), primary=False)
    for stage in construction.stages:
        _emit(config, f"stage_{stage.index:03d}.json", _artifact(config, stage=stage_to_dict(stage)), primary=False)
    _emit(config, "construction.json", _artifact(config, **_construction_meta(construction)))


def _cmd_embed(config: PipelineConfig) -> int:
    space = build_space(config)
    construction = build_construction(config, space, build_schedule_from(config))
    _write_construction(config, construction)
    _echo(_table(["stages", "stop", "coordinates", "source"],
                 [[len(construction) - 1, construction.stop_reason, construction.last.coord_count, construction.source]]))
    return EXIT_OK


def _stages_dir(config: PipelineConfig) -> Path | None:
    if config.stages_dir is not None:
        return config.stages_dir
    if config.input is not None and (config.input / "construction.json").is_file():
        return config.input
    return None


def _cmd_verify(config: PipelineConfig) -> int:
    stages_dir = _stages_dir(config)
    if stages_dir is not None:
        space = build_space(config) if config.input not in (None, stages_dir) else None
        schedule = _load_schedule(config.schedule_file) if config.schedule_file is not None else None
        construction = load_construction(stages_dir, space=space, schedule=schedule)
    else:
        space = build_space(config)
        construction = build_construction(config, space, build_schedule_from(config))
    reports, oracle, ok = _verify(construction, config.lemmas)
    _emit(config, "verify.json", _artifact(config, reports=_report_dicts(reports), oracle=oracle, stopReason=construction.stop_reason))
    _summarize_reports(reports)
    return EXIT_OK if ok else EXIT_CERTIFICATE


def _cmd_dims(config: PipelineConfig) -> int:
    space = build_space(config)
    scales = scale_range(*config.scales) if config.scales is not None else geometric_scales(config.base, config.k_min, config.k_max)
    report = box_dimension(
        space,
        scales,
        measure_exponent=config.measure_exponent,
        threads=config.threads,
    )
    if config.format == "csv":
        _emit(config, "dims.csv", dimension_to_csv(report))
    else:
        _emit(config, "dims.json", _artifact(config, dimension=report.to_dict()))
    _echo(_table(["scales", "slope", "residual", "method"],
                 [[len(report.scales), f"{report.slope:.4f}", f"{report.residual:.3g}", report.method]]))
    return EXIT_OK


def _cmd_counterexample(config: PipelineConfig) -> int:
    if config.counterexample == "fastgap":
        cert = fastgap_certificate(config.levels, config.alpha, config.beta, config.lam)
        payload = {"fastgap": cert.to_dict()}
        holds = cert.holds
    elif config.counterexample == "hypercurve":
        cert = hypercurve_certificate(config.lam, config.alpha, config.cube_dim, config.nu, beta=config.beta)
        space = build_product_grid(middle_third(config.levels), config.cube_dim, config.grid_res)
        projection = projection_surjectivity_check(space, lam=config.lam)
        measures = hypercurve_sample_check(space, cert)
        payload = {"hypercurve": cert.to_dict(), "projection": projection.to_dict(), "measures": measures.to_dict()}
        holds = projection.holds and measures.holds and cert.lower_bound > cert.n
    else:
        M = config.harmonic_M or max(DEFAULT_HARMONIC_M, harmonic_truncation(config.sigma))
        refuter = capacity_refuter(build_harmonic(M), config.sigma)
        payload = {"harmonic": refuter.to_dict()}
        holds = refuter.holds
    _emit(config, f"{config.counterexample}.json", _artifact(config, holds=holds, **payload))
    _echo(_table(["certificate", "holds"], [[config.counterexample, holds]]))
    return EXIT_OK if holds else EXIT_CERTIFICATE


def _cmd_demo(config: PipelineConfig) -> int:
    space = build_space(config)
    schedule = build_schedule_from(config)
    schedule_report = verify_schedule(schedule)
    construction = build_construction(config, space, schedule)
    reports, oracle, ok = _verify(construction, config.lemmas)
    dimension = box_dimension(space, geometric_scales(config.base, config.k_min, config.k_max), threads=config.threads)
    if config.out is not None:
        _write_construction(config, construction)
    _emit(config, "demo.json", _artifact(
        config,
        preset=config.preset,
        schedule=schedule_to_dict(schedule),
        scheduleReport=dataclasses.asdict(schedule_report),
        stopReason=construction.stop_reason,
        reports=_report_dicts(reports),
        oracle=oracle,
        dimension=dimension.to_dict(),
    ))
    _summarize_reports(reports)
    return EXIT_OK if ok and schedule_report.is_consistent else EXIT_CERTIFICATE


COMMANDS = {
    "space": _cmd_space,
    "cover": _cmd_cover,
    "schedule": _cmd_schedule,
    "embed": _cmd_embed,
    "verify": _cmd_verify,
    "dims": _cmd_dims,
    "counterexample": _cmd_counterexample,
    "demo": _cmd_demo,
}


def run_pipeline(config: PipelineConfig) -> int:
    """Run one subcommand and return its exit status.

    Domain failures (cover, precision and certificate errors) are written as
    error JSON and map to exit 1; invalid inputs map to exit 2.
    """
    set_default_threads(config.threads)
    set_exact_rechecks(config.precision == "rational")
    try:
        return COMMANDS[config.command](config)
    except HolderError as exc:
        logger.error("%s: %s", exc.kind, exc.message)
        sys.stdout.write(dumps({"version": _version(), "config": config.artifact_dict(), **exc.to_dict()}))
        return EXIT_CERTIFICATE
    except (ValueError, KeyError, FileNotFoundError) as exc:
        logger.error("usage error: %s", exc)
        sys.stdout.write(dumps({"error": "usage-error", "message": str(exc)}))
        return EXIT_USAGE


# ── Argument parsing ──────────────────────────────────────────────────


def _global_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--out", type=Path, help="Directory for artifacts (default: primary artifact to stdout)")
    p.add_argument("--input", type=Path, help="Artifact file or embed directory to read")
    p.add_argument("--seed", type=int, help="Seed for sampled checks (default: 0)")
    p.add_argument("--precision", choices=["float64", "rational"], help="Re-check near-zero slacks with rationals (default: rational)")
    p.add_argument("--threads", type=int, help="Worker thread cap")
    p.add_argument("--format", choices=["json", "csv"], help="Artifact format (default: json)")
    p.add_argument("-v", "--verbose", action="count", dest="verbose", help="-v for INFO, -vv for DEBUG")
    return p


def _doubling_bound(text: str) -> int | None:
    """--N value: an integer, or ``auto`` to pick the smallest valid N."""
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None


def _lemma_list(text: str) -> list[str] | None:
    """--lemmas value: ``all`` or a comma-separated list of check names."""
    if text == "all":
        return None
    names = [name.strip() for name in text.split(",") if name.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected 'all' or a comma-separated list of checks")
    return names


def _scale_triple(text: str) -> tuple[float, float, int]:
    """--scales value ``a:b:steps``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:steps, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:steps, got {text!r}") from None


def _space_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("space")
    g.add_argument("--space", "--kind", dest="space", metavar="KIND",
                   help="cantor, fastgap, grid, product, harmonic, points, or a space .json dump (default: cantor)")
    g.add_argument("--levels", type=int, help="Cantor levels (default: 4)")
    g.add_argument("--gaps", help="Cantor gaps: third, fastgap or custom:<file> with a ratio list (default: third)")
    g.add_argument("--cube-dim", type=int, dest="cube_dim", help="Cube dimension n for grid/product spaces")
    g.add_argument("--grid-res", type=int, dest="grid_res", help="Lattice points per axis (default: 9)")
    g.add_argument("--harmonic-M", type=int, dest="harmonic_M", help=f"Harmonic truncation M (default: {DEFAULT_HARMONIC_M})")
    g.add_argument("--values", type=float, nargs="+", help="Coordinates for --space points")
    g.add_argument("--snowflake", type=float, help="Snowflake power p in (0, 1]")
    return p


def _schedule_options(stage_count: str = "--stages") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("schedule")
    g.add_argument("--n", type=int, help="Capacity dimension (default: 0)")
    g.add_argument("--q", type=float, help="Target dimension q > n (default: 1)")
    g.add_argument("--sigma", type=float, help="Lebesgue coefficient in (0, 1) (default: 0.5)")
    g.add_argument("--N", type=_doubling_bound, dest="N", metavar="N|auto", help="Doubling bound (default: auto)")
    g.add_argument("--mode", choices=["exact", "relaxed"])
    g.add_argument(stage_count, type=int, dest="stages", help="Stages to build (default: 3)")
    g.add_argument("--L-user", type=float, dest="L_user", help="Relaxed-mode L")
    g.add_argument("--ratio", type=float, help="Relaxed-mode ε ratio")
    g.add_argument("--no-stop", action="store_false", dest="stop_on_stabilization", help="Keep building past stabilization")
    g.add_argument("--delta-max", type=float, dest="delta_max", help="Largest δ₁ covers are trusted at (default: 1)")
    g.add_argument("--source", "--covers", dest="source", choices=["auto", "greedy", "structured"], help="Cover source (default: auto)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common, space, schedule = _global_options(), _space_options(), _schedule_options()
    parser = argparse.ArgumentParser(prog="ez-holder", description="Bi-Hölder embeddings of finite metric spaces", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("space", parents=[common, space], help="Build a space and check the metric axioms")
    cover = sub.add_parser("cover", parents=[common, space], help="Build and certify a colored cover")
    cover.add_argument("--delta", type=float, default=argparse.SUPPRESS, help="Cover scale (default: 0.25)")
    cover.add_argument("--sigma", type=float, default=argparse.SUPPRESS, help="Lebesgue coefficient (default: 0.5)")
    cover.add_argument("--mode", choices=["greedy", "structured", "refine"], dest="cover_mode", default=argparse.SUPPRESS,
                       help="Cover builder; refine needs --N (default: structured where available)")
    cover.add_argument("--source", choices=["auto", "greedy", "structured"], default=argparse.SUPPRESS)
    cover.add_argument("--N", "--refine-N", type=int, dest="refine_N", default=argparse.SUPPRESS,
                       help="Size-controlled refinement with doubling bound N")
    sub.add_parser("schedule", parents=[common, schedule], help="Compute and check a scale schedule")
    embed = sub.add_parser("embed", parents=[common, space, schedule], help="Run the construction and dump its stages")
    embed.add_argument("--schedule", type=Path, dest="schedule_file", default=argparse.SUPPRESS,
                       help="Schedule artifact to use instead of the schedule options")

    verify = sub.add_parser("verify", parents=[common, space, _schedule_options("--stage-count")],
                            help="Run every check on a construction")
    verify.add_argument("--stages", type=Path, dest="stages_dir", default=argparse.SUPPRESS,
                        help="Directory of stage_NNN.json files written by embed")
    verify.add_argument("--schedule", type=Path, dest="schedule_file", default=argparse.SUPPRESS,
                        help="Schedule artifact (default: schedule.json in the stage directory)")
    verify.add_argument("--lemmas", type=_lemma_list, default=argparse.SUPPRESS, metavar="all|NAME,...",
                        help="Checks to run (default: all)")

    dims = sub.add_parser("dims", parents=[common, space], help="Box-counting dimension estimate")
    dims.add_argument("--base", type=float, default=argparse.SUPPRESS, help="Scale base (default: 3)")
    dims.add_argument("--k-min", type=int, dest="k_min", default=argparse.SUPPRESS)
    dims.add_argument("--k-max", type=int, dest="k_max", default=argparse.SUPPRESS)
    dims.add_argument("--scales", type=_scale_triple, default=argparse.SUPPRESS, metavar="a:b:steps",
                      help="Log-spaced scales from a to b, replacing --base/--k-min/--k-max")
    dims.add_argument("--measure-exponent", type=float, dest="measure_exponent", default=argparse.SUPPRESS)

    cx = sub.add_parser("counterexample", parents=[common], help="Counterexample certificates")
    cx.add_argument("which", nargs="?", default=None, help="Same as --which")
    cx.add_argument("--which", choices=["fastgap", "hypercurve", "harmonic"], dest="counterexample", default=argparse.SUPPRESS)
    for flag, kind in (("--alpha", float), ("--beta", float), ("--lam", float), ("--nu", float), ("--sigma", float)):
        cx.add_argument(flag, type=kind, default=argparse.SUPPRESS)
    cx.add_argument("--levels", type=int, default=argparse.SUPPRESS)
    cx.add_argument("--cube-dim", type=int, dest="cube_dim", default=argparse.SUPPRESS)
    cx.add_argument("--grid-res", type=int, dest="grid_res", default=argparse.SUPPRESS)
    cx.add_argument("--harmonic-M", type=int, dest="harmonic_M", default=argparse.SUPPRESS,
                    help=f"Harmonic truncation M (default: the larger of {DEFAULT_HARMONIC_M} and n(n-1) for the witness at --sigma)")

    demo = sub.add_parser("demo", parents=[common], help="Full pipeline on a preset")
    demo.add_argument("--preset", choices=sorted(DEMO_PRESETS), default="two-point")
    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Validate parsed arguments (demo presets fill in their parameters)."""
    values = {k: v for k, v in vars(args).items() if k not in ("verbose", "which")}
    if getattr(args, "which", None) is not None:
        values.setdefault("counterexample", args.which)
    if values.get("command") == "demo":
        values = {**DEMO_PRESETS[values["preset"]], **values}
    return PipelineConfig(**values)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(getattr(args, "verbose", 0) or 0)
    try:
        config = config_from_args(args)
    except ValidationError as exc:
        errors = [{"field": ".".join(str(p) for p in e["loc"]), "message": e["msg"]} for e in exc.errors()]
        sys.stdout.write(dumps({"error": "validation-error", "errors": errors}))
        return EXIT_USAGE
    return run_pipeline(config)


if __name__ == "__main__":
    sys.exit(main())
