"""detnorm: bounded-height counting of rational matrix points whose
determinant is a norm from a cyclic field, with exact local-global
arithmetic, geometric exponent predictions, and asymptotic-fit diagnostics.
"""

__version__ = "0.1.0"

from .arithmetic import (
    INFINITE_PLACE,
    CyclicCharacter,
    Factorization,
    artin_symbol,
    factorize,
    hilbert_symbol,
    is_global_norm,
    is_local_norm,
    is_sum_of_two_squares,
    load_character,
    trivial_character,
)
from .brauer import (
    BoundaryPointError,
    BrauerClass,
    load_brauer_class,
    local_character_value,
    local_kernel_indicator,
    zero_locus_indicator,
)
from .enumeration import (
    CheckpointMismatchError,
    CountingJob,
    CountSeries,
    HeightWindow,
    MatrixPoint,
    OverflowGuardError,
    canonical_points,
    count_series,
    enumerate_count,
)
from .geometry import (
    BoundaryDatum,
    ManinInvariants,
    manin_invariants,
    pgl_boundary,
    predicted_asymptotic,
)
from .analytic import (
    CharacterGroup,
    SingularityEstimate,
    landau_constant,
    partial_euler_product,
    singularity_order_estimate,
    two_squares_count,
)
from .experiment import (
    ExperimentConfig,
    FitResult,
    RatioDiagnostic,
    fit_log_exponent,
    ratio_diagnostic,
    run_experiment,
)
