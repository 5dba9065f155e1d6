"""ez-holder: Easy Hölder embeddings.

Desk-scale bi-Hölder embeddings of finite metric spaces into a coordinate
prefix of ℓ², with checks for every inequality the construction uses.
"""

from importlib.metadata import version as _version

from .check import Check, lemma_check
from .config import PipelineConfig
from .covers import (
    ColoredCover,
    CoverReport,
    CoverSet,
    build_greedy_cover,
    build_structured_cover,
    check_weight_bounds,
    size_controlled_refine,
    verify_cover,
    weight,
)
from .dimension import (
    DimensionReport,
    HypercurveCertificate,
    box_dimension,
    capacity_refuter,
    fastgap_certificate,
    hypercurve_certificate,
    projection_surjectivity_check,
    snowflake,
)
from .embedding import (
    Construction,
    EmbeddingStage,
    SimplexComplex,
    SparseVector,
    enumerate_simplices,
    evaluate_limit,
    initial_stage,
    refine_stage,
    run_construction,
)
from .errors import CertificateError, CoverError, HolderError, PrecisionError
from .metric import (
    CantorSpec,
    DoublingEstimate,
    FiniteMetricSpace,
    build_cantor,
    build_cube_grid,
    build_harmonic,
    build_points,
    build_product_grid,
    estimate_doubling,
    normalize,
)
from .schedule import (
    ScaleSchedule,
    ScheduleParams,
    choose_N,
    exact_schedule,
    next_delta,
    next_epsilon,
    relaxed_schedule,
)
from .sources import CoverSource, GreedyCovers, StructuredCovers
from .suite import CheckSuite, default_suite
from .verify import (
    LemmaReport,
    brute_force_oracle,
    check_biholder,
    check_cauchy_and_limit,
    check_local_lipschitz,
    check_qmeasure,
    check_separation,
)

__version__ = _version("ez-holder")

__all__ = [
    "__version__",
    "FiniteMetricSpace",
    "CantorSpec",
    "DoublingEstimate",
    "build_cantor",
    "build_cube_grid",
    "build_harmonic",
    "build_points",
    "build_product_grid",
    "estimate_doubling",
    "normalize",
    "CoverSet",
    "ColoredCover",
    "CoverReport",
    "weight",
    "build_greedy_cover",
    "build_structured_cover",
    "size_controlled_refine",
    "check_weight_bounds",
    "verify_cover",
    "CoverSource",
    "GreedyCovers",
    "StructuredCovers",
    "ScheduleParams",
    "ScaleSchedule",
    "choose_N",
    "next_epsilon",
    "next_delta",
    "exact_schedule",
    "relaxed_schedule",
    "SparseVector",
    "EmbeddingStage",
    "SimplexComplex",
    "Construction",
    "initial_stage",
    "refine_stage",
    "run_construction",
    "evaluate_limit",
    "enumerate_simplices",
    "Check",
    "lemma_check",
    "CheckSuite",
    "default_suite",
    "LemmaReport",
    "check_local_lipschitz",
    "check_separation",
    "check_cauchy_and_limit",
    "check_biholder",
    "check_qmeasure",
    "brute_force_oracle",
    "DimensionReport",
    "HypercurveCertificate",
    "box_dimension",
    "snowflake",
    "fastgap_certificate",
    "hypercurve_certificate",
    "projection_surjectivity_check",
    "capacity_refuter",
    "PipelineConfig",
    "HolderError",
    "CoverError",
    "PrecisionError",
    "CertificateError",
]
