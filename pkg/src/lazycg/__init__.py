"""Lazified conditional gradient methods over weak separation oracles."""

from .activeset import ActiveSet
from .algorithms import (
    ConfigurationError,
    InvariantViolation,
    RunTrace,
    SolverConfig,
    lazy_cg_parameter_free,
    lazy_cg_textbook,
    lazy_local_cg,
    lazy_online_cg,
    lazy_pairwise_cg,
    run_adversarial,
    vanilla_fw,
)
from .augment import AugmentationOracle, augmenting_weak_separation, call_budget
from .domains import (
    Hypercube,
    ProbabilitySimplex,
    ShortestPathPolytope,
    SpanningTreePolytope,
    VertexList,
)
from .objectives import (
    LossStream,
    QuadraticObjective,
    adversarial_wrapper,
    generate_linear_stream,
    generate_regression_instance,
    line_search,
)
from .weaksep import LazyOracle, OracleCache, weak_local_separation, weak_separation

__version__ = "0.1.0"
from .estimator import LazyCGRegressor
