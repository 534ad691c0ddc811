"""Lazy online conditional gradient and its adversarial-loss wrapper."""

import math

import numpy as np

from ..activeset import ActiveSet
from ..objectives import RunningAggregate, adversarial_wrapper
from ._base import ConfigurationError, SolverConfig, _Recorder
from .schedules import locg_gamma, locg_h_first, locg_h_update, locg_phi_bar

# positive floor for a query threshold that the recurrence drove to zero
_PHI_FLOOR = 1e-300


def _stream_constants(stream, domain, config):
    """``(C, S)`` such that round ``t`` has curvature ``<= C t^-b`` and modulus ``>= S t^-s``."""
    C, S = config.curvature, config.strong_convexity
    D2 = domain.l2_diameter ** 2
    if C is None:
        C = 0.0 if stream.is_linear else max(
            loss.smoothness * D2 * t ** config.b for t, loss in enumerate(stream, 1))
    if S is None:
        S = 0.0 if stream.is_linear else min(
            loss.strong_convexity * t ** config.s for t, loss in enumerate(stream, 1))
    return float(C), float(S)


def _aggregate_minimum(domain, agg, minimizer):
    if not np.any(agg.Q):
        v = domain.lmo(agg.q)
        return agg.value(v)
    if minimizer is None:
        return math.nan
    return float(minimizer(agg.objective()))


def lazy_online_cg(stream, domain, config=None, x0=None, transform=None,
                   minimizer=None, oracle=None, C=None, S=None):
    """Lazy online conditional gradient over a stream of losses.

    Parameters
    ----------
    stream : LossStream
        Raw losses ``f_1, ..., f_T``; linear or quadratic.
    domain : Domain
    config : SolverConfig
        ``K``, the exponents ``b`` and ``s``, ``gamma_rule`` and optionally
        ``curvature`` (``C``) and ``strong_convexity`` (``S``).
    x0 : array_like, optional
        Start vertex; defaults to ``domain.lmo(0)``.
    transform : callable, optional
        ``transform(t, loss, x_t) -> loss`` replaces each raw loss before it
        enters the aggregate (used by :func:`run_adversarial`).
    minimizer : callable, optional
        ``minimizer(QuadraticObjective) -> float`` returning the minimum over
        the domain; needed for the ``agg_opt`` column when the aggregate is
        not linear.  Linear aggregates are minimized with the LMO.

    Returns
    -------
    RunTrace
        Row ``t`` describes round ``t``: ``f_pre = F_t(x_t)``,
        ``f = F_t(x_{t+1})``, ``h = h_t``, ``phi_bar`` the pre-call bound,
        ``phi`` the bound after the round, ``agg_opt = min F_t``, the raw loss
        ``f_t(x_t)`` and the running regret against the raw losses.  Regret
        and ``agg_opt`` use uncounted exact calls.
    """
    config = config or SolverConfig()
    if not (0.0 <= config.b < 1.0 and 0.0 <= config.s < 1.0):
        raise ConfigurationError("online exponents need 0 <= b, s < 1")
    if C is None or S is None:
        C0, S0 = _stream_constants(stream, domain, config)
        C = C0 if C is None else C
        S = S0 if S is None else S
    if config.gamma_rule == "strongly_convex" and not S > 0:
        raise ConfigurationError("the strongly convex step rule needs S > 0")
    K, D = config.K, domain.l2_diameter
    oracle = oracle or config.make_oracle(domain)
    agg = RunningAggregate(domain.dimension)
    raw = RunningAggregate(domain.dimension)
    rec = _Recorder("lazy_online_cg", agg, domain, config, oracle)
    rec.trace.params.update(K=K, C=C, S=S, b=config.b, s=config.s,
                            gamma_rule=config.gamma_rule, D=D, T=len(stream))
    x = np.array(x0, dtype=float) if x0 is not None else domain.lmo(np.zeros(domain.dimension))
    active = ActiveSet.from_vertex(x)
    rec.row(0, x, None, "init", active)
    phi = None
    raw_loss_sum = 0.0
    t = 0
    for t, loss in enumerate(stream, 1):
        if t > config.max_iters or rec.out_of_time():
            break
        raw.add(loss)
        loss_t = loss.value(x)
        raw_loss_sum += loss_t
        surrogate = transform(t, loss, x) if transform is not None else loss
        agg.add(surrogate)
        grad_norm = float(np.linalg.norm(surrogate.gradient(x)))
        if t == 1:
            h = locg_h_first(grad_norm, D, S)
        else:
            h = locg_h_update(phi, grad_norm, D, S, config.s, t)
        gamma = min(1.0, locg_gamma(t, config.b, config.s, config.gamma_rule))
        phi_bar = locg_phi_bar(h, C, config.b, gamma, t, K)
        f_pre = agg.value(x)
        answer = rec.clock.timed(oracle.separate, agg.gradient(x), x,
                                 max(phi_bar, _PHI_FLOOR), K, active=active)
        phi = phi_bar
        if answer.positive:
            v = answer.vertex
            x = (1.0 - gamma) * x + gamma * v
            active.frank_wolfe_step(v, gamma)
            phi = h - f_pre + agg.value(x)
        regret = raw_loss_sum - _aggregate_minimum(domain, raw, None)
        rec.row(t, x, phi, answer.kind, active, f_pre=f_pre, h=h, phi_bar=phi_bar,
                gamma=gamma, agg_opt=_aggregate_minimum(domain, agg, minimizer),
                loss=loss_t, regret=regret)
    rec.trace.x = x
    rec.trace.active = active
    rec.trace.truncated = t < len(stream)
    return rec.trace


def run_adversarial(stream, domain, config=None, x0=None, L=None, minimizer=None):
    """Online learning on arbitrary convex losses through quadratic surrogates.

    Round ``t`` feeds ``g_t x + (2L / sqrt(k)) t^(-1/4) ||x - x_1||^2`` with
    ``g_t`` the raw gradient at the current iterate, with ``b = s = 1/4``,
    ``C = L sqrt(k)`` and ``S = L / sqrt(k)``.  ``L`` defaults to
    ``stream.lipschitz``; when that is unknown too, the running maximum of
    the observed gradient norms is used and ``S`` is computed from the first
    positive estimate, which keeps it a valid lower bound on the aggregate's
    strong convexity.  Regret is measured against the raw losses.
    """
    config = (config or SolverConfig()).replace(b=0.25, s=0.25, gamma_rule="strongly_convex")
    k = domain.l1_diameter
    if L is None:
        L = stream.lipschitz
    fixed = L is not None and L > 0
    x0 = np.array(x0, dtype=float) if x0 is not None else domain.lmo(np.zeros(domain.dimension))
    state = {"L": float(L) if fixed else 0.0}
    if not fixed:
        first = float(np.linalg.norm(stream[0].gradient(x0)))
        state["L"] = first if first > 0 else 1.0
    C = state["L"] * math.sqrt(k)
    S = state["L"] / math.sqrt(k)

    def transform(t, loss, x):
        if not fixed:
            state["L"] = max(state["L"], float(np.linalg.norm(loss.gradient(x))))
        return adversarial_wrapper(loss, x0, x, state["L"], k, t)

    trace = lazy_online_cg(stream, domain, config, x0=x0, transform=transform,
                           minimizer=minimizer, C=C, S=S)
    trace.algorithm = "run_adversarial"
    trace.params["L"] = state["L"]
    return trace
