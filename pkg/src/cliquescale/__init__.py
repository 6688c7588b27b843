"""Maximal-clique scaling in dense and scale-free random graphs."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetExceeded,
    CalibrationError,
    CliqueScaleError,
    InfeasibleLayoutError,
    MalformedInputError,
    OracleRefusal,
    ParameterError,
    PartialCountError,
)
from .graph import Graph, build_graph, complement, induced_subgraph  # noqa: E402
from .mce import (  # noqa: E402
    CliqueCensus,
    brute_force_maximal_cliques,
    count_maximal_cliques,
    enumerate_maximal_cliques,
    maximal_cliques_of_size,
)
from .models import Family, ModelParams, WeightMode, WeightWindow, sample_graph, sample_window_subgraph  # noqa: E402

__all__ = [
    "__version__",
    "BudgetExceeded",
    "CalibrationError",
    "CliqueScaleError",
    "InfeasibleLayoutError",
    "MalformedInputError",
    "OracleRefusal",
    "ParameterError",
    "PartialCountError",
    "Graph",
    "build_graph",
    "complement",
    "induced_subgraph",
    "CliqueCensus",
    "brute_force_maximal_cliques",
    "count_maximal_cliques",
    "enumerate_maximal_cliques",
    "maximal_cliques_of_size",
    "Family",
    "ModelParams",
    "WeightMode",
    "WeightWindow",
    "sample_graph",
    "sample_window_subgraph",
]
