"""sparserank: fast rank estimation for high-dimensional sparse matrices.

The estimator reads a sparse matrix only through its in- and out-degree
distributions, solves a small self-consistent system of generating-function
equations, and converts the resulting unmatched-node density into a rank
estimate whose cost is essentially independent of the matrix size.  Exact
companions ship alongside it: maximum-matching structural rank, rank over a
large prime field, and small-n numerical rank, plus a benchmark harness and
figure rendering.
"""

from .algrank import DEFAULT_PRIME, FieldRankResult, field_rank, generic_rank, numerical_rank
from .bench import (
    BenchRecord,
    ComparisonRow,
    SweepResult,
    metrics,
    run_correlated,
    run_sweep_k,
    run_sweep_n,
)
from .cavity import (
    DEFAULT_VARIANT,
    SYMMETRIC_FULL,
    SYMMETRIC_HALF,
    CavityFixedPoint,
    FormulaVariant,
    RankEstimate,
    SolverConfig,
    calibrate_variant,
    estimate_rank,
    estimate_rank_from_distributions,
    eval_excess_gf,
    eval_gf,
    evaluate_nc_density,
    solve_fixed_point,
)
from .core import (
    DegreeDistribution,
    SparsityPattern,
    WeightedSparseMatrix,
    degree_distribution,
    degree_sequences,
    mean_row_degree,
    structuralize,
)
from .errors import (
    FormatError,
    GenerationError,
    InconsistentMeansError,
    NotRepresentableError,
    SparseRankError,
    ZeroMeanDegreeError,
)
from .gen import GenSpec, assign_weights, gen_matrix, gen_powerlaw, gen_uniform
from .io import read_degdist, read_matrix, write_degdist, write_matrix
from .matching import MatchingResult, brute_force_matching, max_matching, sprank

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRIME",
    "DEFAULT_VARIANT",
    "SYMMETRIC_FULL",
    "SYMMETRIC_HALF",
    "BenchRecord",
    "CavityFixedPoint",
    "ComparisonRow",
    "DegreeDistribution",
    "FieldRankResult",
    "FormatError",
    "FormulaVariant",
    "GenSpec",
    "GenerationError",
    "InconsistentMeansError",
    "MatchingResult",
    "NotRepresentableError",
    "RankEstimate",
    "SolverConfig",
    "SparseRankError",
    "SparsityPattern",
    "SweepResult",
    "WeightedSparseMatrix",
    "ZeroMeanDegreeError",
    "assign_weights",
    "brute_force_matching",
    "calibrate_variant",
    "degree_distribution",
    "degree_sequences",
    "estimate_rank",
    "estimate_rank_from_distributions",
    "eval_excess_gf",
    "eval_gf",
    "evaluate_nc_density",
    "field_rank",
    "gen_matrix",
    "gen_powerlaw",
    "gen_uniform",
    "generic_rank",
    "max_matching",
    "mean_row_degree",
    "metrics",
    "numerical_rank",
    "read_degdist",
    "read_matrix",
    "run_correlated",
    "run_sweep_k",
    "run_sweep_n",
    "solve_fixed_point",
    "sprank",
    "structuralize",
    "write_degdist",
    "write_matrix",
]
