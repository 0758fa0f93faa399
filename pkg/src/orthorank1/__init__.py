"""Closed-form SVD of an orthogonal matrix plus a rank-one update.

The closed form costs a handful of matrix-vector products; a one-sided
Jacobi SVD is bundled as an independent oracle, plus a seeded verification
harness and a small CLI (``orthorank1``).
"""

from .closed_form import (
    BRANCH_NON_PARALLEL,
    BRANCH_PARALLEL,
    BRANCH_ZERO_VECTOR,
    CAUCHY_SCHWARZ_SLACK,
    PARALLEL_TOL,
    NormalizedPair,
    SpecialEigenpair,
    Spectrum,
    full_svd,
    lemma1_gap,
    mixing_coefficients,
    normalize_pair,
    rank_revelation_residual,
    special_eigenpairs,
    special_eigenvalues,
    spectrum,
    theorem_residual,
)
from .core import (
    ORTHOGONALITY_TOL,
    DomainError,
    FullSvd,
    InvariantScalars,
    NonFiniteEntryError,
    NotOrthogonalError,
    NotSquareError,
    NotUnitError,
    OrthogonalMatrix,
    OrthogonalPlusRankOne,
    ZeroVectorError,
    identity_plus_outer,
    invariant_scalars,
    materialize,
    orthogonality_defect,
    orthonormality_defects,
    reconstruction_error,
    validate_orthogonal,
)
from .harness import (
    BENCH_CSV_HEADER,
    LEMMA1_DIMS,
    BenchRow,
    CampaignConfig,
    CampaignReport,
    ConfigError,
    Lemma1Report,
    bench_csv,
    bench_speedups,
    run_bench,
    run_lemma1,
    run_verify,
)
from .instance_io import (
    ParseError,
    dump_instance,
    format_instance,
    load_instance,
    parse_instance,
)
from .oracle import (
    NEAR_PARALLEL_EPSILON_DEFAULT,
    Q_MODES,
    SCALE_RANGE_DEFAULT,
    VECTOR_MODES,
    InstanceDistribution,
    JacobiConfig,
    NoConvergenceError,
    haar_orthogonal,
    jacobi_svd,
    make_rng,
    random_orthogonal,
    sample_instance,
    standard_gaussian,
)

__version__ = "0.1.0"

__all__ = [
    "BENCH_CSV_HEADER",
    "BRANCH_NON_PARALLEL",
    "BRANCH_PARALLEL",
    "BRANCH_ZERO_VECTOR",
    "BenchRow",
    "CAUCHY_SCHWARZ_SLACK",
    "CampaignConfig",
    "CampaignReport",
    "ConfigError",
    "DomainError",
    "FullSvd",
    "InstanceDistribution",
    "InvariantScalars",
    "JacobiConfig",
    "LEMMA1_DIMS",
    "Lemma1Report",
    "NEAR_PARALLEL_EPSILON_DEFAULT",
    "NoConvergenceError",
    "NonFiniteEntryError",
    "NormalizedPair",
    "NotOrthogonalError",
    "NotSquareError",
    "NotUnitError",
    "ORTHOGONALITY_TOL",
    "OrthogonalMatrix",
    "OrthogonalPlusRankOne",
    "PARALLEL_TOL",
    "ParseError",
    "Q_MODES",
    "SCALE_RANGE_DEFAULT",
    "SpecialEigenpair",
    "Spectrum",
    "VECTOR_MODES",
    "ZeroVectorError",
    "bench_csv",
    "bench_speedups",
    "dump_instance",
    "format_instance",
    "full_svd",
    "haar_orthogonal",
    "identity_plus_outer",
    "invariant_scalars",
    "jacobi_svd",
    "lemma1_gap",
    "load_instance",
    "make_rng",
    "materialize",
    "mixing_coefficients",
    "normalize_pair",
    "orthogonality_defect",
    "orthonormality_defects",
    "parse_instance",
    "random_orthogonal",
    "rank_revelation_residual",
    "reconstruction_error",
    "run_bench",
    "run_lemma1",
    "run_verify",
    "sample_instance",
    "special_eigenpairs",
    "special_eigenvalues",
    "spectrum",
    "theorem_residual",
    "validate_orthogonal",
    "__version__",
]
