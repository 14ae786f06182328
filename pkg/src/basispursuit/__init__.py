"""Matrix reconstruction by randomized basis pursuit, with k-stability tools."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    BasisPursuitError,
    DimensionError,
    RankDeficiencyError,
    RankMismatchError,
    SingularMatrixError,
    ToleranceError,
)
from .generators import (
    GeneratorSpec,
    gen_cauchy,
    gen_first_row,
    gen_generic,
    gen_random_orthogonal_model,
    gen_rank_two_odd,
    gen_stable_coherent,
    generate,
    haar_orthogonal,
)
from .harness import (
    ExperimentStats,
    degrees_of_freedom,
    run_experiment,
    svd_oracle,
    uniform_sampling_failure_demo,
)
from .linalg import (
    OrthonormalBasisTracker,
    SpanTest,
    find_independent_rows,
    project_onto_span,
    rank,
    read_matrix,
    solve_square,
    try_extend,
    write_matrix,
)
from .oracle import EntryOracle
from .rbp import RbpConfig, ReconstructionResult, geometric_tail, rbp_reconstruct, rbp_sampling_bound
from .rfrbp import RfRbpConfig, compute_lambda, rfrbp_reconstruct, success_probability_lower_bound
from .stability import (
    check_coherence_implies_stability,
    coherence_of_orthonormal,
    coherence_of_subspace,
    row_stability_index_exhaustive,
    stability_index_certified,
    stability_index_exhaustive,
)
