"""Step sizes, bound recurrences and convergence envelopes of the solvers.

Pure arithmetic, shared by the solvers and by the trace auditor.
"""

import math

from .._validation import check_accuracy, check_positive


def vanilla_gamma(t):
    """Classical Frank-Wolfe step ``2 / (t + 2)``."""
    return 2.0 / (t + 2.0)


def lcg_schedule_gamma(t, K):
    """``2 (K^2 + 1) / (K (t + K^2 + 2))``, clamped to 1."""
    if t < 1:
        raise ValueError("iteration counter starts at 1")
    K = check_accuracy(K)
    return min(1.0, 2.0 * (K * K + 1.0) / (K * (t + K * K + 2.0)))


def lcg_phi_update(phi_prev, C, gamma, K):
    """``(phi_prev + C gamma^2 / 2) / (1 + gamma / K)``."""
    return (phi_prev + C * gamma * gamma / 2.0) / (1.0 + gamma / K)


def textbook_bound(t, C, phi0, K):
    """Primal gap guarantee ``2 max(C, phi0) (K^2 + 1) / (t + K^2 + 2)`` at ``x_t``."""
    return 2.0 * max(C, phi0) * (K * K + 1.0) / (t + K * K + 2.0)


def negative_call_budget(phi0, eps):
    """``ceil(log2(phi0 / eps)) + 1``."""
    return math.ceil(math.log2(phi0 / eps)) + 1


def parameter_free_budget(phi0, eps, K, C):
    """Iterations the parameter-free method needs to reach primal gap ``eps``.

    The epoch term ``4K ceil(log2(phi0 / (K C)))`` only counts epochs with
    ``phi >= K C`` and is dropped when there are none.
    """
    epochs = max(0, math.ceil(math.log2(phi0 / (K * C))))
    return negative_call_budget(phi0, eps) + 4 * K * epochs + 16 * K * K * C / eps


def lpcg_parameters(S, alpha_card, K, C, phi0):
    """``(M1, kappa, B)`` of the lazy pairwise method."""
    for name, val in (("S", S), ("alpha_card", alpha_card), ("C", C), ("phi0", phi0)):
        check_positive(val, name)
    K = check_accuracy(K)
    m1 = math.sqrt(S / (8.0 * alpha_card))
    kappa = min(m1 / (K * C), 1.0 / math.sqrt(phi0))
    return m1, kappa, kappa * m1 / (2.0 * K)


def eta_round(eta):
    """Largest ``2^-d`` (``d >= 0`` integer) not exceeding ``eta``."""
    if not eta > 0:
        raise ValueError(f"step must be positive, got {eta}")
    if eta >= 1:
        return 1.0
    mantissa, exp = math.frexp(eta)  # eta = mantissa * 2**exp, mantissa in [0.5, 1)
    return math.ldexp(1.0, exp - 1)


def lpcg_phi_update(phi_prev, eta, C, K, delta):
    """``(2 phi_prev + eta^2 C) / (2 + eta / (K delta))``."""
    return (2.0 * phi_prev + eta * eta * C) / (2.0 + eta / (K * delta))


def lpcg_envelope(t, phi0, B):
    return phi0 * ((1.0 + B) / (1.0 + 2.0 * B)) ** t


def llcg_alpha(S, K, beta, n, mu):
    """``S / (2 K beta n mu^2)``, clamped to 1."""
    return min(1.0, S / (2.0 * K * beta * n * mu * mu))


def llcg_radius(phi_prev, S):
    return math.sqrt(2.0 * phi_prev / S)


def llcg_phi_update(phi_prev, beta, alpha, n, mu, r, D, K):
    step = min(n * mu * mu * r * r, D * D)
    return (phi_prev + beta / 2.0 * alpha * alpha * step) / (1.0 + alpha / K)


def llcg_envelope(t, phi0, alpha, K):
    return phi0 * ((1.0 + alpha / (2.0 * K)) / (1.0 + alpha / K)) ** t


def locg_h_first(grad_norm, D, S):
    """``min(|g| D, 2 |g|^2 / S)``; only the first term when ``S = 0``."""
    first = grad_norm * D
    if S <= 0:
        return first
    return min(first, 2.0 * grad_norm * grad_norm / S)


def locg_h_update(phi_prev, grad_norm, D, S, s, t):
    """Upper bound on the aggregate gap at round ``t >= 2``."""
    first = grad_norm * D
    if S <= 0:
        return phi_prev + first
    q = grad_norm * grad_norm / (2.0 * S * t ** (1.0 - s))
    second = 2.0 * q + 2.0 * math.sqrt(q * (q + phi_prev))
    return phi_prev + min(first, second)


def locg_gamma(t, b, s=None, rule="stochastic"):
    """``t^-((1-b)/2)`` for the stochastic rule, ``t^((b+s-2)/3)`` for the strongly convex one."""
    if rule == "stochastic":
        return t ** (-(1.0 - b) / 2.0)
    if rule == "strongly_convex":
        return t ** ((b + s - 2.0) / 3.0)
    raise ValueError(f"unknown step rule {rule!r}")


def locg_phi_bar(h, C, b, gamma, t, K):
    """``(h + C t^(1-b) gamma^2 / (2 (1 - b))) / (1 + gamma / K)``."""
    return (h + C * t ** (1.0 - b) * gamma * gamma / (2.0 * (1.0 - b))) / (1.0 + gamma / K)
