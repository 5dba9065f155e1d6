"""Validated pipeline configuration for the command-line front end."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Command = Literal["space", "cover", "schedule", "embed", "verify", "dims", "counterexample", "demo"]
SpaceKind = Literal["cantor", "fastgap", "grid", "product", "harmonic", "points"]
SPACE_KINDS = frozenset(get_args(SpaceKind))
DEFAULT_HARMONIC_M = 20


class PipelineConfig(BaseModel):
    """Everything one CLI run needs. Embedded verbatim in every artifact.

    Paths are resolved to absolute form on validation, so an artifact records
    where it was written regardless of the working directory.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    out: Path | None = None
    input: Path | None = None
    preset: str | None = None
    seed: int = Field(0, ge=0)
    precision: Literal["float64", "rational"] = "rational"
    threads: int | None = Field(None, ge=1)
    format: Literal["json", "csv"] = "json"

    # space
    space: SpaceKind = "cantor"
    levels: int = Field(4, ge=1, le=16)
    gaps: str | None = None
    cube_dim: int = Field(1, ge=1)
    grid_res: int = Field(9, ge=2)
    harmonic_M: int | None = Field(None, ge=3)
    values: list[float] | None = None
    snowflake: float = Field(1.0, gt=0, le=1)

    # schedule
    n: int = Field(0, ge=0)
    q: float = Field(1.0, gt=0)
    sigma: float = Field(0.5, gt=0, lt=1)
    N: int | None = Field(None, ge=2)
    mode: Literal["exact", "relaxed"] = "exact"
    stages: int = Field(3, ge=1, le=512)
    L_user: float | None = Field(None, gt=0)
    ratio: float | None = Field(None, gt=0, lt=1)
    stop_on_stabilization: bool = True
    delta_max: float = Field(1.0, gt=0, le=1)
    schedule_file: Path | None = None

    # covers
    source: Literal["auto", "greedy", "structured"] = "auto"
    cover_mode: Literal["greedy", "structured", "refine"] | None = None
    delta: float = Field(0.25, gt=0, le=1)
    refine_N: int | None = Field(None, ge=2)

    # verification
    stages_dir: Path | None = None
    lemmas: list[str] | None = None

    # dimension
    base: float = Field(3.0, gt=1)
    k_min: int = Field(1, ge=0)
    k_max: int = Field(6, ge=1)
    scales: tuple[float, float, int] | None = None
    measure_exponent: float | None = Field(None, ge=0)

    # counterexamples
    counterexample: Literal["fastgap", "hypercurve", "harmonic"] = "fastgap"
    alpha: float = Field(1.0, ge=1)
    beta: float = Field(1.0, gt=0, le=1)
    lam: float = Field(1.0, ge=1)
    nu: float | None = Field(None, gt=0)

    @model_validator(mode="before")
    @classmethod
    def _space_file(cls, data: Any) -> Any:
        # --space <file> reads a dumped space, like --input
        if isinstance(data, dict):
            space = data.get("space")
            if isinstance(space, (str, Path)) and str(space) not in SPACE_KINDS and Path(space).suffix == ".json":
                if data.get("input") is not None:
                    raise ValueError("give the space file with --space or --input, not both")
                data = {**data, "input": Path(space)}
                del data["space"]
        return data

    @field_validator("out", "input", "schedule_file", "stages_dir")
    @classmethod
    def _resolve(cls, v: Path | None) -> Path | None:
        return None if v is None else v.expanduser().resolve()

    @field_validator("gaps")
    @classmethod
    def _check_gaps(cls, v: str | None) -> str | None:
        if v is None or v in ("third", "fastgap"):
            return v
        if v.startswith("custom:") and len(v) > len("custom:"):
            return v
        raise ValueError(f"gaps must be 'third', 'fastgap' or 'custom:<file>', got {v!r}")

    @field_validator("lemmas")
    @classmethod
    def _check_lemmas(cls, v: list[str] | None) -> list[str] | None:
        if v is not None and not v:
            raise ValueError("lemmas must name at least one check")
        return v

    @field_validator("scales")
    @classmethod
    def _check_scales(cls, v: tuple[float, float, int] | None) -> tuple[float, float, int] | None:
        if v is None:
            return v
        a, b, steps = v
        if not (0 < a <= 1 and 0 < b <= 1) or a == b:
            raise ValueError(f"scale endpoints must be distinct and lie in (0, 1], got {a}, {b}")
        if steps < 2:
            raise ValueError(f"scales needs at least 2 steps, got {steps}")
        return v

    @model_validator(mode="after")
    def _check_consistency(self) -> PipelineConfig:
        if self.q <= self.n:
            raise ValueError(f"q must exceed n={self.n}, got {self.q}")
        if self.k_max < self.k_min:
            raise ValueError(f"k_max={self.k_max} must be >= k_min={self.k_min}")
        if self.space == "points" and not self.values and self.command != "demo" and self.input is None:
            raise ValueError("space 'points' needs --values")
        if self.cover_mode == "refine" and self.refine_N is None:
            raise ValueError("cover mode 'refine' needs --N")
        if self.cover_mode in ("greedy", "structured") and self.source not in ("auto", self.cover_mode):
            raise ValueError(f"cover mode {self.cover_mode!r} conflicts with source {self.source!r}")
        if self.gaps is not None and self.space not in ("cantor", "fastgap", "product"):
            raise ValueError(f"--gaps applies to Cantor spaces, not {self.space!r}")
        if self.space == "fastgap" and self.gaps not in (None, "fastgap"):
            raise ValueError(f"space 'fastgap' conflicts with gaps {self.gaps!r}")
        return self

    @property
    def cover_source(self) -> Literal["auto", "greedy", "structured"]:
        """Cover source after --mode greedy|structured is folded in."""
        if self.cover_mode in ("greedy", "structured"):
            return self.cover_mode
        return self.source

    def artifact_dict(self) -> dict[str, Any]:
        """JSON-ready dump with paths as strings."""
        return self.model_dump(mode="json")
