import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .._validation import check_accuracy
from ..augment import AugmentationOracle
from ..weaksep import LazyOracle, OracleCache

BASE_COLUMNS = ("t", "f", "phi", "wolfe_gap", "lp_calls", "cache_hits", "answer", "elapsed_s")

PHI0_POLICIES = ("exact", "halving", "user")
STEP_RULES = ("schedule", "line_search", "short_step")


class ConfigurationError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """An iterate left the domain or its decomposition stopped matching it."""


@dataclass
class SolverConfig:
    """Run parameters shared by all solvers.

    Parameters irrelevant to a given solver are ignored by it.

    Attributes
    ----------
    K : float
        Accuracy of the weak separation oracle.
    max_iters : int
    time_limit_s : float or None
        Enforced separately on solver time and on oracle time.
    epsilon : float or None
        Stop once the gap drops to ``epsilon``; the primal gap when ``f_star``
        is known, the Wolfe gap otherwise.
    f_star : float or None
    phi0 : float or None
        Initial bound for ``phi0_policy="user"``.
    phi0_policy : {"exact", "halving", "user"}
    step_rule : {"schedule", "line_search", "short_step"} or None
        ``None`` picks the solver's own default.
    curvature, strong_convexity, smoothness : float or None
        Override the objective's metadata.
    alpha_card : float
        Declared bound on the number of non-zeros of the optimum (pairwise).
    phi_from_gap : bool
        After a negative answer set ``phi`` to half the exact dual gap.
    cache_enabled, cache_keep, cache_period
        Oracle cache policy.
    oracle : {"lmo", "augmentation"}
    record_wolfe_gap : bool
        Compute the Wolfe gap with an uncounted LMO call after every iteration.
    b, s : float
        Curvature and strong-convexity decay exponents of online losses.
    gamma_rule : {"stochastic", "strongly_convex"}
    """

    K: float = 1.0
    max_iters: int = 1000
    time_limit_s: float = None
    epsilon: float = None
    f_star: float = None
    phi0: float = None
    phi0_policy: str = "exact"
    step_rule: str = None
    curvature: float = None
    strong_convexity: float = None
    smoothness: float = None
    alpha_card: float = None
    phi_from_gap: bool = False
    cache_enabled: bool = True
    cache_keep: int = 100
    cache_period: int = 100
    oracle: str = "lmo"
    record_wolfe_gap: bool = True
    b: float = 0.0
    s: float = 0.0
    gamma_rule: str = "stochastic"

    def __post_init__(self):
        check_accuracy(self.K)
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")
        if self.phi0_policy not in PHI0_POLICIES:
            raise ConfigurationError(f"phi0_policy must be one of {PHI0_POLICIES}")
        if self.step_rule is not None and self.step_rule not in STEP_RULES:
            raise ConfigurationError(f"step_rule must be one of {STEP_RULES}")
        if self.oracle not in ("lmo", "augmentation"):
            raise ConfigurationError("oracle must be 'lmo' or 'augmentation'")
        if self.oracle == "augmentation" and self.K <= 1:
            raise ConfigurationError("the augmentation oracle needs K > 1")
        if self.max_iters < 0:
            raise ConfigurationError("max_iters must be non-negative")

    def replace(self, **changes):
        return replace(self, **changes)

    def make_oracle(self, domain):
        if self.oracle == "augmentation":
            return AugmentationOracle(domain, self.K)
        cache = OracleCache(self.cache_keep, self.cache_period, self.cache_enabled)
        return LazyOracle(domain, cache)


@dataclass
class RunTrace:
    """Per-iteration records of one solver run.

    Row ``t = 0`` describes the start point and initial bound; row ``t >= 1``
    describes the state after iteration ``t`` (so ``f`` is ``f(x_{t+1})`` and
    ``phi`` is ``phi_t``).
    """

    algorithm: str
    records: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    x: np.ndarray = None
    active: object = None
    stats: object = None
    truncated: bool = False
    step_truncations: int = 0

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([r.get(name, math.nan) for r in self.records])

    @property
    def columns(self):
        extra = []
        for r in self.records:
            for key in r:
                if key not in BASE_COLUMNS and key not in extra:
                    extra.append(key)
        return list(BASE_COLUMNS) + extra

    @property
    def positive_calls(self):
        return self.stats.positive_answers if self.stats else 0

    @property
    def negative_calls(self):
        return self.stats.negative_answers if self.stats else 0

    @property
    def cache_hit_rate(self):
        return self.stats.cache_hit_rate if self.stats else 0.0

    @property
    def iterations(self):
        return max(0, len(self.records) - 1)

    def summary(self):
        return {
            "cache_hit_rate": self.cache_hit_rate,
            "positive": self.positive_calls,
            "negative": self.negative_calls,
            "lp_calls": int(self.records[-1]["lp_calls"]) if self.records else 0,
            "iterations": self.iterations,
            "truncated": int(self.truncated),
            "step_truncations": self.step_truncations,
        }


class _Clock:
    """Wall-clock accounting with separate solver and oracle budgets."""

    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()
        self.oracle_time = 0.0

    def elapsed(self):
        return time.perf_counter() - self.start

    def timed(self, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.oracle_time += time.perf_counter() - t0

    def expired(self):
        if self.limit is None:
            return False
        return (self.elapsed() - self.oracle_time >= self.limit
                or self.oracle_time >= self.limit)


class _Recorder:
    """Builds rows and handles stopping rules for one run."""

    def __init__(self, name, f, domain, config, oracle=None):
        self.trace = RunTrace(name)
        self.trace.params.update(
            epsilon=config.epsilon, max_iters=config.max_iters,
            phi0_policy=config.phi0_policy, step_rule=config.step_rule or "default",
            phi_from_gap=config.phi_from_gap, oracle=config.oracle,
            cache_enabled=config.cache_enabled)
        self.f = f
        self.domain = domain
        self.config = config
        self.oracle = oracle
        self.trace.stats = oracle.stats if oracle is not None else None
        self.clock = _Clock(config.time_limit_s)
        self.extra_lp_calls = 0
        self.last_gap = math.nan

    def lp_calls(self):
        base = self.oracle.stats.lp_calls if self.oracle is not None else 0
        return base + self.extra_lp_calls

    def cache_hits(self):
        return self.oracle.stats.cache_hits if self.oracle is not None else 0

    def check_iterate(self, x, active):
        contains = getattr(self.domain, "contains", None)
        if contains is not None and not contains(x, 1e-9):
            raise InvariantViolation(f"{self.trace.algorithm}: iterate left {self.domain!r}")
        if active is not None:
            try:
                active.check(x)
            except AssertionError as exc:
                raise InvariantViolation(f"{self.trace.algorithm}: {exc}") from None

    def row(self, t, x, phi, answer, active=None, **extra):
        self.check_iterate(x, active)
        fx = self.f.value(x)
        if self.config.record_wolfe_gap:
            gap = self.domain.wolfe_gap(self.f.gradient(x), x)
        else:
            gap = math.nan
        self.last_f = fx
        self.last_gap = gap
        rec = {
            "t": t,
            "f": fx,
            "phi": math.nan if phi is None else float(phi),
            "wolfe_gap": gap,
            "lp_calls": self.lp_calls(),
            "cache_hits": self.cache_hits(),
            "answer": answer,
            "elapsed_s": self.clock.elapsed(),
        }
        rec.update(extra)
        self.trace.records.append(rec)
        return rec

    def converged(self):
        eps = self.config.epsilon
        if eps is None:
            return False
        if self.config.f_star is not None:
            return self.last_f - self.config.f_star <= eps
        return self.last_gap <= eps

    def out_of_time(self):
        if self.clock.expired():
            self.trace.truncated = True
            return True
        return False

    def finish(self, x, active, iters_done, optimal=False):
        """Close the trace; ``optimal`` marks a start point with zero gap bound."""
        if not optimal and iters_done >= self.config.max_iters and not self.converged():
            self.trace.truncated = True
        self.trace.x = np.array(x, dtype=float)
        self.trace.active = active
        return self.trace
