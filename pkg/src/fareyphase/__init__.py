"""Statistical models on the mediant-fraction lattice: exact level
enumeration, four partition functions, the transfer operator of the induced
interval map, ball geometry of the fraction gaps, and the thermodynamics of
the transition at inverse temperature 1.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    CrossCheckError,
    FareyPhaseError,
    LevelCapError,
    OverflowCapError,
    TruncationError,
)
from .farey_core import (
    MAX_LIST_LEVEL,
    MAX_STREAM_LEVEL,
    FareyFraction,
    farey_map,
    iter_new_triples,
    level_fractions,
    presentation,
    traverse_new_pairs,
)
from .partition import (
    Model,
    PartitionValue,
    dirichlet_coefficients,
    euler_totient,
    knauf_profile,
    verify_sandwich,
    verify_telescope,
    z_farey_chain,
    z_farey_tree,
    z_knauf,
    z_knauf_even,
    z_knauf_odd,
    zeta_ratio,
)
from .transfer import (
    SpectralResult,
    TransferMatrix,
    build_matrix,
    eigen_with_uncertainty,
    eigenfunction_eval,
    lambda_from_ratio,
    leading_eigen,
)
from .ball_geometry import (
    BallRecord,
    approx_partition,
    ball_by_composition,
    ball_derivative_approx,
    ball_exact,
    ball_records,
    diameter_sum,
    max_diameter,
    symbols_for_ball,
)
from .thermo import (
    HausdorffReport,
    HeatEstimate,
    LambdaSource,
    ThermoCurve,
    TransitionFit,
    f_spinchain,
    finite_size_free_energy,
    free_energy,
    hausdorff_check,
    internal_energy,
    prellberg_fit,
    specific_heat,
    thermo_curve,
)

__all__ = [
    "__version__",
    "ConvergenceError", "CrossCheckError", "FareyPhaseError",
    "LevelCapError", "OverflowCapError", "TruncationError",
    "MAX_LIST_LEVEL", "MAX_STREAM_LEVEL", "FareyFraction", "farey_map",
    "iter_new_triples", "level_fractions", "presentation",
    "traverse_new_pairs",
    "Model", "PartitionValue", "dirichlet_coefficients", "euler_totient",
    "knauf_profile", "verify_sandwich", "verify_telescope",
    "z_farey_chain", "z_farey_tree", "z_knauf", "z_knauf_even",
    "z_knauf_odd", "zeta_ratio",
    "SpectralResult", "TransferMatrix", "build_matrix",
    "eigen_with_uncertainty", "eigenfunction_eval", "lambda_from_ratio",
    "leading_eigen",
    "BallRecord", "approx_partition", "ball_by_composition",
    "ball_derivative_approx", "ball_exact", "ball_records", "diameter_sum",
    "max_diameter", "symbols_for_ball",
    "HausdorffReport", "HeatEstimate", "LambdaSource", "ThermoCurve",
    "TransitionFit", "f_spinchain", "finite_size_free_energy", "free_energy",
    "hausdorff_check", "internal_energy", "prellberg_fit", "specific_heat",
    "thermo_curve",
]
