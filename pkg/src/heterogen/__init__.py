"""Graphon graphs with stationary node features of controllable heterophily."""

__version__ = "0.1.0"

from .graphon import (  # noqa: E402
    Constant,
    GraphSample,
    Graphon,
    Parametric,
    StepFunction,
    degree_function,
    evaluate,
    graphon_from_dict,
    limit_heterophily,
    max_degree_deviation,
    sample_graph,
)
from .signal import (  # noqa: E402
    FeatureMatrix,
    PolyFilter,
    apply_filter,
    default_dimension,
    rescaled_laplacian_matvec,
    sample_white_features,
    validate_dimension,
)
from .heterophily import (  # noqa: E402
    HeterophilyReport,
    degree_moment,
    empirical_heterophily,
    empirical_heterophily_edge_sum,
    expected_heterophily_eigen,
    expected_heterophily_trace,
    spectral_moment,
)
from .calibrate import CalibrationResult, calibrate_gain, generate_with_target  # noqa: E402
