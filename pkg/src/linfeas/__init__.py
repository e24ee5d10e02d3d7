"""Margins, certificates, and perceptron-family solvers for linear feasibility."""

from .algorithms import (
    AlgorithmConfig,
    Certificate,
    IterateTrace,
    loss,
    margin_estimate_np,
    perceptron_classic,
    perceptron_normalized,
    vng,
)
from .generators import GeneratorSpec, generate
from .instance import (
    ColumnSpaceBasis,
    IngestError,
    PrimalDirection,
    ProblemInstance,
    SimplexPoint,
    column_space_basis,
    combine,
    gram,
    gram_norm,
    ingest,
    load_instance,
    project_to_column_space,
    save_instance,
)
from .lp import (
    LinearProgram,
    LpSolution,
    LpTolerances,
    dist_l1_to_polyhedron,
    dist_l2_to_halfspaces,
    min_norm_on_face,
    solve,
)
from .margins import (
    BallReport,
    BudgetExceededError,
    MarginReport,
    margin_grid_estimate,
    margin_report,
    minimum_enclosing_ball,
    negative_margin_exact,
    positive_margin_exact,
    representable,
)
from .theorems import (
    GordanVerdict,
    HoffmanReport,
    IllPosedError,
    InapplicableError,
    gordan_decide,
    hoffman_dual,
    hoffman_primal,
    hoffman_simplex,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "Certificate",
    "IterateTrace",
    "loss",
    "margin_estimate_np",
    "perceptron_classic",
    "perceptron_normalized",
    "vng",
    "GeneratorSpec",
    "generate",
    "ColumnSpaceBasis",
    "IngestError",
    "PrimalDirection",
    "ProblemInstance",
    "SimplexPoint",
    "column_space_basis",
    "combine",
    "gram",
    "gram_norm",
    "ingest",
    "load_instance",
    "project_to_column_space",
    "save_instance",
    "LinearProgram",
    "LpSolution",
    "LpTolerances",
    "dist_l1_to_polyhedron",
    "dist_l2_to_halfspaces",
    "min_norm_on_face",
    "solve",
    "BallReport",
    "BudgetExceededError",
    "MarginReport",
    "margin_grid_estimate",
    "margin_report",
    "minimum_enclosing_ball",
    "negative_margin_exact",
    "positive_margin_exact",
    "representable",
    "GordanVerdict",
    "HoffmanReport",
    "IllPosedError",
    "InapplicableError",
    "gordan_decide",
    "hoffman_dual",
    "hoffman_primal",
    "hoffman_simplex",
]
