"""Finite-dimensional machinery for moment problems on seminormed spaces.

The package covers: Gram-matrix seminorms and their relative traces,
Gaussian sampling with certified tail/concentration bounds, graded seminorm
towers on polynomial algebras, moment functionals with growth diagnostics,
Chebyshev/Prokhorov concentration pipelines, and atomic measure recovery
from moment matrices.  The ``momentkit`` console script runs packaged
verification scenarios.
"""

from __future__ import annotations

from .errors import (
    ConfigError,
    DegreeOverflow,
    DimensionMismatch,
    HypothesisNotCertified,
    HypothesisUnverifiable,
    IllConditioned,
    IncompleteSystem,
    InfiniteTrace,
    KernelIssue,
    KernelNotContained,
    MomentkitError,
    NegativeEvenMoment,
    NotContinuous,
    NotHomogeneous,
    NotInScope,
    NotPSD,
    NotSquarePositive,
    NotSubset,
    RankNotFlat,
    SingularForm,
    ZeroNormDirection,
)
from .forms import (
    INFINITE,
    DualFunctional,
    GramForm,
    OrthonormalSystem,
    dual_norm,
    evaluate,
    gram_schmidt,
    is_infinite,
    kernel_basis,
    polarize,
    simultaneous_diagonalize,
    whitening_system,
)
from .traces import (
    SeminormTower,
    TraceMethod,
    TraceReport,
    dominance_check,
    nuclear_tower,
    trace,
    trace_restriction_check,
    trace_scaling_check,
    trace_value,
)
from .symalg import (
    AlgebraElement,
    GradedSeminormTower,
    character_norm_bound,
    evaluate_character,
    graded_norm,
    multiply,
    p_tilde,
    polarization_bound_check,
    q_tilde,
    tilde_trace_identity,
)
from .moments import (
    BksReport,
    CarlemanVerdict,
    DiscreteMeasure,
    MomentFunctional,
    QuadraticModuleSpec,
    bks_growth_sequences,
    carleman_diagnostic,
    cbs_check,
    continuity_constant,
    from_measure,
    localizing_matrix,
    moment_matrix,
    s_L,
    square_constant,
    square_positive_check,
)
from .gaussian import (
    GaussianMeasure,
    McConfig,
    chebyshev_outside_ball,
    fundamental_lemma_check,
    sample,
    second_moment_check,
    tail_lower_bound_check,
)
from .concentration import (
    MeasureFamily,
    SubalgebraIndex,
    concentration_check,
    concentration_equivalence_check,
    consistency_check,
    full_lattice,
    orthonormal_cap_check,
    prokhorov_mass_check,
    pushforward,
    reverse_seminorm_construction,
    verify_main_theorem_scenario,
)
from .solver import SolverResult, solve_multivariate, solve_univariate
from .scenarios import WeightSequence, construct_q

try:
    from importlib.metadata import version as _dist_version

    __version__ = _dist_version("artifact")
except Exception:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = [
    "AlgebraElement",
    "BksReport",
    "CarlemanVerdict",
    "ConfigError",
    "DegreeOverflow",
    "DimensionMismatch",
    "DiscreteMeasure",
    "DualFunctional",
    "GaussianMeasure",
    "GradedSeminormTower",
    "GramForm",
    "HypothesisNotCertified",
    "HypothesisUnverifiable",
    "IllConditioned",
    "INFINITE",
    "IncompleteSystem",
    "InfiniteTrace",
    "KernelIssue",
    "KernelNotContained",
    "McConfig",
    "MeasureFamily",
    "MomentFunctional",
    "MomentkitError",
    "NegativeEvenMoment",
    "NotContinuous",
    "NotHomogeneous",
    "NotInScope",
    "NotPSD",
    "NotSquarePositive",
    "NotSubset",
    "OrthonormalSystem",
    "QuadraticModuleSpec",
    "RankNotFlat",
    "SeminormTower",
    "SingularForm",
    "SolverResult",
    "SubalgebraIndex",
    "TraceMethod",
    "TraceReport",
    "WeightSequence",
    "ZeroNormDirection",
    "bks_growth_sequences",
    "carleman_diagnostic",
    "cbs_check",
    "character_norm_bound",
    "chebyshev_outside_ball",
    "concentration_check",
    "concentration_equivalence_check",
    "consistency_check",
    "construct_q",
    "continuity_constant",
    "dominance_check",
    "dual_norm",
    "evaluate",
    "evaluate_character",
    "from_measure",
    "full_lattice",
    "fundamental_lemma_check",
    "graded_norm",
    "gram_schmidt",
    "is_infinite",
    "kernel_basis",
    "localizing_matrix",
    "moment_matrix",
    "multiply",
    "nuclear_tower",
    "orthonormal_cap_check",
    "p_tilde",
    "polarization_bound_check",
    "polarize",
    "prokhorov_mass_check",
    "pushforward",
    "q_tilde",
    "reverse_seminorm_construction",
    "s_L",
    "sample",
    "second_moment_check",
    "simultaneous_diagonalize",
    "solve_multivariate",
    "solve_univariate",
    "square_constant",
    "square_positive_check",
    "tail_lower_bound_check",
    "tilde_trace_identity",
    "trace",
    "trace_restriction_check",
    "trace_scaling_check",
    "trace_value",
    "verify_main_theorem_scenario",
    "whitening_system",
]
