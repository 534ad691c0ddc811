"""Offline conditional gradient solvers: vanilla and lazified variants.

The lazy solvers stop early, without flagging truncation, once a negative
oracle answer reports an exact dual gap of zero.
"""

import math

import numpy as np

from ..activeset import ActiveSet
from ..objectives import line_search, short_step
from ._base import ConfigurationError, SolverConfig, _Recorder
from .schedules import (
    eta_round,
    lcg_phi_update,
    lcg_schedule_gamma,
    llcg_alpha,
    llcg_phi_update,
    llcg_radius,
    lpcg_parameters,
    lpcg_phi_update,
    vanilla_gamma,
)


def start_vertex(f, domain, x0=None):
    """``x0`` if given, else the LMO answer for the gradient at an arbitrary vertex."""
    if x0 is not None:
        return np.array(x0, dtype=float)
    v0 = domain.lmo(np.zeros(domain.dimension))
    return domain.lmo(f.gradient(v0))


def _metadata(config, f, name, required_for=None):
    value = getattr(config, name)
    if value is None:
        value = getattr(f, name, None)
    if value is None and required_for is not None:
        raise ConfigurationError(f"{required_for} needs the objective's {name}")
    return value


def _initial_gap_bound(rec, oracle, f, domain, config, x, active):
    """Upper bound on the Wolfe gap (hence the primal gap) at the start point.

    ``exact`` spends one counted LMO call, ``halving`` halves a conservative
    value until the oracle answers positively and doubles the last value,
    ``user`` trusts ``config.phi0``.
    """
    g = f.gradient(x)
    policy = config.phi0_policy
    if policy == "user":
        if config.phi0 is None:
            raise ConfigurationError("phi0_policy='user' needs phi0")
        return float(config.phi0)
    if policy == "exact":
        rec.extra_lp_calls += 1
        v = rec.clock.timed(domain.lmo, g)
        return max(0.0, float(g @ x - g @ v))
    phi = float(np.linalg.norm(g)) * domain.l2_diameter
    queries = 0
    while phi > 1e-300:
        queries += 1
        answer = rec.clock.timed(oracle.separate, g, x, phi, config.K, active=active)
        if answer.positive:
            break
        phi /= 2.0
    rec.trace.params["phi0_search_queries"] = queries
    return 2.0 * phi if phi > 1e-300 else 0.0


def _step(config, default, f, x, v, phi=None, C=None, scheduled=None):
    rule = config.step_rule or default
    if rule == "schedule":
        return scheduled
    if rule == "short_step":
        if C is None:
            raise ConfigurationError("short steps need the curvature C")
        return short_step(phi, config.K, C)
    return line_search(f, x, v)


def _certifies_optimum(answer):
    """A negative answer whose exact dual gap is zero proves the iterate optimal."""
    return not answer.positive and answer.exact_dual_gap == 0.0


def _iterations(rec, config):
    t = 0
    while t < config.max_iters and not rec.converged() and not rec.out_of_time():
        t += 1
        yield t


def vanilla_fw(f, domain, config=None, x0=None):
    """Frank-Wolfe with one exact LMO call per iteration.

    Step ``2 / (t + 2)`` by default; ``step_rule="line_search"`` for exact steps.
    """
    config = config or SolverConfig()
    rec = _Recorder("vanilla_fw", f, domain, config)
    x = start_vertex(f, domain, x0)
    active = ActiveSet.from_vertex(x)
    rec.row(0, x, None, "init", active)
    t = 0
    for t in _iterations(rec, config):
        g = f.gradient(x)
        v = rec.clock.timed(domain.lmo, g)
        rec.extra_lp_calls += 1
        gamma = _step(config, "schedule", f, x, v, scheduled=vanilla_gamma(t))
        x = (1.0 - gamma) * x + gamma * v
        active.frank_wolfe_step(v, gamma)
        rec.row(t, x, None, "lp", active, step=gamma)
    return rec.finish(x, active, t)


def lazy_cg_textbook(f, domain, config=None, x0=None, oracle=None):
    """Lazy conditional gradient with the predetermined schedule.

    ``phi_t = (phi_{t-1} + C gamma_t^2 / 2) / (1 + gamma_t / K)`` with
    ``gamma_t = 2 (K^2 + 1) / (K (t + K^2 + 2))``; the iterate only moves on
    positive oracle answers.
    """
    config = config or SolverConfig()
    C = _metadata(config, f, "curvature",
                  "lazy_cg_textbook (use lazy_cg_parameter_free when C is unknown)")
    oracle = oracle or config.make_oracle(domain)
    rec = _Recorder("lazy_cg_textbook", f, domain, config, oracle)
    x = start_vertex(f, domain, x0)
    active = ActiveSet.from_vertex(x)
    phi = _initial_gap_bound(rec, oracle, f, domain, config, x, active)
    rec.trace.params.update(K=config.K, C=C, phi0=phi)
    rec.row(0, x, phi, "init", active)
    t = 0
    if phi <= 0:
        return rec.finish(x, active, 0, optimal=True)
    for t in _iterations(rec, config):
        gamma = lcg_schedule_gamma(t, config.K)
        phi = lcg_phi_update(phi, C, gamma, config.K)
        answer = rec.clock.timed(oracle.separate, f.gradient(x), x, phi, config.K, active=active)
        step = 0.0
        if answer.positive:
            v = answer.vertex
            step = _step(config, "schedule", f, x, v, phi, C, scheduled=gamma)
            x = (1.0 - step) * x + step * v
            active.frank_wolfe_step(v, step)
        rec.row(t, x, phi, answer.kind, active, step=step)
        if _certifies_optimum(answer):
            return rec.finish(x, active, t, optimal=True)
    return rec.finish(x, active, t)


def lazy_cg_parameter_free(f, domain, config=None, x0=None, oracle=None):
    """Lazy conditional gradient that halves ``phi`` after every negative answer.

    No curvature is needed with line search (the default step rule).
    """
    config = config or SolverConfig()
    oracle = oracle or config.make_oracle(domain)
    rec = _Recorder("lazy_cg_parameter_free", f, domain, config, oracle)
    x = start_vertex(f, domain, x0)
    active = ActiveSet.from_vertex(x)
    bound = _initial_gap_bound(rec, oracle, f, domain, config, x, active)
    # exact: half the Wolfe gap; halving: the value the search settled on
    phi = bound / 2.0 if config.phi0_policy == "exact" else bound
    C = _metadata(config, f, "curvature")
    rec.trace.params.update(K=config.K, phi0=phi, C=C if C is not None else math.nan)
    rec.row(0, x, phi, "init", active)
    t = 0
    if phi <= 0:
        return rec.finish(x, active, 0, optimal=True)
    for t in _iterations(rec, config):
        answer = rec.clock.timed(oracle.separate, f.gradient(x), x, phi, config.K, active=active)
        step = 0.0
        if answer.positive:
            v = answer.vertex
            step = _step(config, "line_search", f, x, v, phi, C)
            x = (1.0 - step) * x + step * v
            active.frank_wolfe_step(v, step)
        elif config.phi_from_gap and answer.exact_dual_gap is not None:
            phi = answer.exact_dual_gap / 2.0
        else:
            phi = phi / 2.0
        rec.row(t, x, phi, answer.kind, active, step=step)
        if _certifies_optimum(answer):
            return rec.finish(x, active, t, optimal=True)
        if phi <= 0:
            break
    return rec.finish(x, active, t)


def lazy_pairwise_cg(f, domain, config=None, x0=None, oracle=None):
    """Lazy pairwise conditional gradient over a 0/1 polytope.

    Each round queries the product oracle at threshold ``phi_t / Delta_t`` and,
    on success, moves ``eta_round(eta_t)`` mass from the away vertex to the
    forward vertex.  If the away vertex is not an atom of the decomposition
    the best atom replaces it, and a step larger than the available weight is
    truncated; both events are counted in ``trace.step_truncations``.
    """
    config = config or SolverConfig()
    if not domain.is_zero_one:
        raise ConfigurationError("lazy_pairwise_cg needs a 0/1 polytope")
    if config.oracle != "lmo":
        raise ConfigurationError("lazy_pairwise_cg needs the cached LMO oracle")
    C = _metadata(config, f, "curvature", "lazy_pairwise_cg")
    S = _metadata(config, f, "strong_convexity", "lazy_pairwise_cg")
    if not S > 0:
        raise ConfigurationError("lazy_pairwise_cg needs a strongly convex objective")
    alpha_card = config.alpha_card or domain.dimension
    oracle = oracle or config.make_oracle(domain)
    rec = _Recorder("lazy_pairwise_cg", f, domain, config, oracle)
    x = start_vertex(f, domain, x0)
    active = ActiveSet.from_vertex(x)
    phi = _initial_gap_bound(rec, oracle, f, domain, config, x, active)
    rec.row(0, x, phi, "init", active)
    t = 0
    if phi <= 0:
        rec.trace.params.update(K=config.K, C=C, S=S, alpha_card=alpha_card, phi0=phi)
        return rec.finish(x, active, 0, optimal=True)
    m1, kappa, B = lpcg_parameters(S, alpha_card, config.K, C, phi)
    rec.trace.params.update(K=config.K, C=C, S=S, alpha_card=alpha_card, phi0=phi,
                            M1=m1, kappa=kappa, B=B)
    for t in _iterations(rec, config):
        eta = kappa * math.sqrt(phi)
        delta = math.sqrt(2.0 * alpha_card * phi / S)
        phi = lpcg_phi_update(phi, eta, C, config.K, delta)
        g = f.gradient(x)
        answer = rec.clock.timed(oracle.separate_pairwise, g, x, phi / delta, config.K)
        step = 0.0
        if answer.positive:
            eta_t = eta_round(eta)
            v_plus, v_minus = answer.vertex, answer.away_vertex
            if active.index_of(v_minus) is None:
                v_minus = max(active.vertices, key=lambda v: float(g @ v))
                rec.trace.step_truncations += 1
            step = min(eta_t, active.weight_of(v_minus))
            if step < eta_t:
                rec.trace.step_truncations += 1
            x = x + step * (v_plus - v_minus)
            active.move(v_minus, v_plus, step)
        rec.row(t, x, phi, answer.kind, active, step=step, delta=delta)
        if _certifies_optimum(answer):
            return rec.finish(x, active, t, optimal=True)
    return rec.finish(x, active, t)


def lazy_local_cg(f, domain, config=None, x0=None, oracle=None):
    """Lazy local conditional gradient via weak local separation.

    Needs ``domain.mu``, strong convexity ``S`` and smoothness ``beta``.  The
    extra columns ``radius``, ``local_step`` and ``local_bound`` record
    ``r_t``, ``||x_t - p_t||`` and ``sqrt(n) mu r_t``.
    """
    config = config or SolverConfig()
    if domain.mu is None:
        raise ConfigurationError(f"lazy_local_cg needs mu for {domain!r}")
    S = _metadata(config, f, "strong_convexity", "lazy_local_cg")
    beta = _metadata(config, f, "smoothness", "lazy_local_cg")
    if not S > 0:
        raise ConfigurationError("lazy_local_cg needs a strongly convex objective")
    n, mu, D, K = domain.dimension, domain.mu, domain.l2_diameter, config.K
    alpha = llcg_alpha(S, K, beta, n, mu)
    oracle = oracle or config.make_oracle(domain)
    rec = _Recorder("lazy_local_cg", f, domain, config, oracle)
    x = start_vertex(f, domain, x0)
    active = ActiveSet.from_vertex(x)
    phi = _initial_gap_bound(rec, oracle, f, domain, config, x, active)
    rec.trace.params.update(K=K, S=S, beta=beta, mu=mu, D=D, n=n, alpha=alpha, phi0=phi)
    rec.row(0, x, phi, "init", active)
    t = 0
    if phi <= 0:
        return rec.finish(x, active, 0, optimal=True)
    for t in _iterations(rec, config):
        r = llcg_radius(phi, S)
        phi = llcg_phi_update(phi, beta, alpha, n, mu, r, D, K)
        answer = rec.clock.timed(oracle.separate_local, f.gradient(x), active, r, phi, K)
        local_step = math.nan
        if answer.positive:
            local_step = float(np.linalg.norm(x - answer.point))
            x = x + alpha * (answer.point - x)
            for v, take in answer.transfers:
                active.weights[active.index_of(v)] -= alpha * take
            active.add(answer.vertex, alpha * answer.delta)
            active.prune()
        rec.row(t, x, phi, answer.kind, active, radius=r, local_step=local_step,
                local_bound=math.sqrt(n) * mu * r)
    return rec.finish(x, active, t)
