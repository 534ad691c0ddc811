"""Exact minimizers for small instances, used as reference values.

Nothing here is fast; everything is exhaustive and meant for domains with a
handful of coordinates or vertices.
"""

import itertools

import numpy as np

from .domains import Hypercube, ProbabilitySimplex

FEAS_TOL = 1e-10


def vertex_minimum(f, domain, cap=10**5):
    """``(value, vertex)`` minimizing ``f`` over the enumerated vertices."""
    best, arg = np.inf, None
    for v in domain.enumerate_vertices(cap):
        val = f.value(v)
        if val < best:
            best, arg = val, v
    return float(best), arg


def _simplex_face_minimum(Q, q, support):
    """Minimum of ``x Q x + q x`` on the relative interior of a simplex face, or None."""
    n = Q.shape[0]
    s = len(support)
    idx = list(support)
    kkt = np.zeros((s + 1, s + 1))
    kkt[:s, :s] = 2.0 * Q[np.ix_(idx, idx)]
    kkt[:s, s] = 1.0
    kkt[s, :s] = 1.0
    rhs = np.concatenate([-q[idx], [1.0]])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    if not np.allclose(kkt @ sol, rhs, atol=1e-9, rtol=0):
        return None
    if np.any(sol[:s] < -FEAS_TOL):
        return None
    x = np.zeros(n)
    x[idx] = np.clip(sol[:s], 0.0, None)
    x /= x.sum()
    return x


def _box_face_minimum(Q, q, fixed):
    """Stationary point of the quadratic with some coordinates pinned to 0 or 1."""
    n = Q.shape[0]
    free = [i for i in range(n) if fixed[i] is None]
    x = np.array([0.0 if v is None else float(v) for v in fixed])
    if free:
        pinned = [i for i in range(n) if fixed[i] is not None]
        A = 2.0 * Q[np.ix_(free, free)]
        rhs = -q[free] - 2.0 * Q[np.ix_(free, pinned)] @ x[pinned]
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if not np.allclose(A @ sol, rhs, atol=1e-9, rtol=0):
            return None
        if np.any(sol < -FEAS_TOL) or np.any(sol > 1.0 + FEAS_TOL):
            return None
        x[free] = np.clip(sol, 0.0, 1.0)
    return x


def quadratic_minimum(f, domain):
    """``(value, point)`` minimizing a convex quadratic over a small simplex or cube.

    Every face is visited and the stationary point of ``f`` restricted to its
    affine hull (if any, and if it lies in the face) is a candidate.  The
    face of minimal dimension containing a minimizer always yields it, so the
    result is exact up to the linear solves.
    """
    Q, q = np.asarray(f.Q, dtype=float), np.asarray(f.q, dtype=float)
    n = domain.dimension
    candidates = []
    if isinstance(domain, ProbabilitySimplex):
        for size in range(1, n + 1):
            for support in itertools.combinations(range(n), size):
                x = _simplex_face_minimum(Q, q, support)
                if x is not None:
                    candidates.append(x)
    elif isinstance(domain, Hypercube):
        for fixed in itertools.product((0, 1, None), repeat=n):
            x = _box_face_minimum(Q, q, fixed)
            if x is not None:
                candidates.append(x)
    else:
        return hull_quadratic_minimum(f, domain)
    best = min(candidates, key=f.value)
    return float(f.value(best)), best


def hull_quadratic_minimum(f, domain, max_vertices=16):
    """Quadratic minimum over ``conv(V)`` via the weights ``lambda`` on the vertices.

    ``x = V^T lambda`` turns the problem into a quadratic over the simplex of
    dimension ``|V|``, solved by face enumeration, so ``|V|`` must be small.
    """
    V = np.asarray(domain.enumerate_vertices(max_vertices))
    Q, q = np.asarray(f.Q, dtype=float), np.asarray(f.q, dtype=float)
    Ql, ql = V @ Q @ V.T, V @ q
    best, arg = np.inf, None
    for size in range(1, len(V) + 1):
        for support in itertools.combinations(range(len(V)), size):
            lam = _simplex_face_minimum(Ql, ql, support)
            if lam is None:
                continue
            x = V.T @ lam
            val = f.value(x)
            if val < best:
                best, arg = val, x
    return float(best), arg


def is_enumerable(f, domain):
    """Whether :func:`minimum` can handle ``f`` over ``domain`` in reasonable time."""
    try:
        count = domain.vertex_count_estimate()
    except NotImplementedError:
        return False
    if getattr(f, "is_linear", False):
        return count <= 10**4
    if isinstance(domain, ProbabilitySimplex):
        return domain.dimension <= 12
    if isinstance(domain, Hypercube):
        return domain.dimension <= 8
    return count <= 16


def minimum(f, domain):
    """Exact minimum of a linear or quadratic ``f`` over a small domain."""
    if getattr(f, "is_linear", False):
        return vertex_minimum(f, domain)
    return quadratic_minimum(f, domain)


def domain_minimizer(domain):
    """``minimizer(f) -> float`` returning the exact minimum over ``domain``."""

    def call(objective):
        return minimum(objective, domain)[0]

    return call


def exact_curvature(f, domain, cap=10**5):
    """Smallest valid curvature ``max_{v, w} 2 (v - w) Q (v - w)`` of a quadratic.

    For ``f = x Q x + ...`` the smoothness inequality along ``y - x`` is tight
    with constant ``2 (y - x) Q (y - x)``, a convex function of ``y - x``, so
    its maximum over the domain is attained at a pair of vertices.
    """
    V = np.asarray(domain.enumerate_vertices(cap))
    Q = np.asarray(f.Q, dtype=float)
    best = 0.0
    for i in range(len(V)):
        d = V[i + 1:] - V[i]
        if len(d):
            best = max(best, float(np.max(2.0 * np.einsum("ij,jk,ik->i", d, Q, d))))
    return best
