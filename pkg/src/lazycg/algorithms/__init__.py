"""Conditional gradient solvers, each returning a :class:`RunTrace`."""

from ._base import (
    BASE_COLUMNS,
    ConfigurationError,
    InvariantViolation,
    RunTrace,
    SolverConfig,
)
from .offline import (
    lazy_cg_parameter_free,
    lazy_cg_textbook,
    lazy_local_cg,
    lazy_pairwise_cg,
    start_vertex,
    vanilla_fw,
)
from .online import lazy_online_cg, run_adversarial

OFFLINE_SOLVERS = {
    "vanilla_fw": vanilla_fw,
    "lazy_cg_textbook": lazy_cg_textbook,
    "lazy_cg_parameter_free": lazy_cg_parameter_free,
    "lazy_pairwise_cg": lazy_pairwise_cg,
    "lazy_local_cg": lazy_local_cg,
}
ONLINE_SOLVERS = {
    "lazy_online_cg": lazy_online_cg,
    "run_adversarial": run_adversarial,
}

__all__ = [
    "BASE_COLUMNS", "ConfigurationError", "InvariantViolation", "RunTrace", "SolverConfig",
    "OFFLINE_SOLVERS", "ONLINE_SOLVERS", "start_vertex",
    "vanilla_fw", "lazy_cg_textbook", "lazy_cg_parameter_free", "lazy_pairwise_cg",
    "lazy_local_cg", "lazy_online_cg", "run_adversarial",
]
