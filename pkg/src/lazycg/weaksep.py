"""Weak separation oracles built on an exact LMO plus a vertex cache.

A weak separation query ``(c, x, phi, K)`` must either return a vertex ``y``
with ``c @ (x - y) > phi / K`` (a *positive* answer) or certify that
``c @ (x - z) <= phi`` for every feasible ``z`` (a *negative* answer).  The
cache is scanned first; the LMO is only called when no cached vertex clears the
threshold, and a negative answer is only ever given after an LMO call.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_accuracy, check_positive, check_vector
from .activeset import ActiveSet
from .domains import SUPPORT_TOL


@dataclass
class SeparationAnswer:
    positive: bool
    vertex: np.ndarray = None
    served_from_cache: bool = False
    lp_called: bool = False
    exact_dual_gap: float = None
    # pairwise queries: the away vertex
    away_vertex: np.ndarray = None
    # augmentation backend: number of AUG calls and the potential after each
    aug_calls: int = 0
    potentials: list = field(default_factory=list)

    def __bool__(self):
        return self.positive

    @property
    def kind(self):
        if not self.positive:
            return "negative"
        return "cache" if self.served_from_cache else "positive"


@dataclass
class OracleStats:
    total_queries: int = 0
    cache_hits: int = 0
    lp_calls: int = 0
    positive_answers: int = 0
    negative_answers: int = 0

    @property
    def cache_hit_rate(self):
        return self.cache_hits / self.total_queries if self.total_queries else 0.0

    def record(self, answer, lp_calls):
        self.total_queries += 1
        self.lp_calls += lp_calls
        if answer.served_from_cache:
            self.cache_hits += 1
        if answer.positive:
            self.positive_answers += 1
        else:
            self.negative_answers += 1


class OracleCache:
    """Previously returned vertices with usage counts.

    Every ``eviction_period`` queries only the ``keep_size`` most used entries
    survive; among equal counts the more recently inserted entry wins.
    """

    def __init__(self, keep_size=100, eviction_period=100, enabled=True):
        if keep_size < 1 or eviction_period < 1:
            raise ValueError("keep_size and eviction_period must be positive")
        self.keep_size = int(keep_size)
        self.eviction_period = int(eviction_period)
        self.enabled = enabled
        self.vertices = []
        self.use_counts = []
        self._inserted = []
        self._keys = set()
        self._clock = 0
        self.calls_since_eviction = 0

    def __len__(self):
        return len(self.vertices)

    def tick(self):
        """Count one query; evict when the period is reached."""
        self.calls_since_eviction += 1
        if self.calls_since_eviction >= self.eviction_period:
            self.evict()
            self.calls_since_eviction = 0

    def insert(self, v):
        if not self.enabled:
            return
        key = v.tobytes()
        if key in self._keys:
            return
        self._keys.add(key)
        self.vertices.append(np.array(v, dtype=float))
        self.use_counts.append(0)
        self._inserted.append(self._clock)
        self._clock += 1

    def scores(self, c):
        """``c @ v`` for every cached vertex."""
        if not self.vertices:
            return np.empty(0)
        return np.asarray(self.vertices) @ c

    def mark_used(self, i):
        self.use_counts[i] += 1

    def evict(self):
        if len(self.vertices) <= self.keep_size:
            return
        order = sorted(range(len(self.vertices)),
                       key=lambda i: (self.use_counts[i], self._inserted[i]),
                       reverse=True)
        keep = sorted(order[: self.keep_size])
        self.vertices = [self.vertices[i] for i in keep]
        self.use_counts = [self.use_counts[i] for i in keep]
        self._inserted = [self._inserted[i] for i in keep]
        self._keys = {v.tobytes() for v in self.vertices}


def _check_query(domain, c, x, phi, K):
    c = check_vector(c, domain.dimension, "c")
    x = check_vector(x, domain.dimension, "x")
    check_positive(phi, "phi")
    return c, x, check_accuracy(K)


def weak_separation(cache, domain, c, x, phi, K, stats=None):
    """One weak separation query answered from ``cache`` or the domain LMO.

    Among cached vertices clearing ``phi / K`` the one with the largest
    ``c @ (x - y)`` is returned.
    """
    c, x, K = _check_query(domain, c, x, phi, K)
    threshold = phi / K
    cache.tick()
    cx = float(c @ x)
    if cache.enabled and len(cache):
        gains = cx - cache.scores(c)
        i = int(np.argmax(gains))
        if gains[i] > threshold:
            cache.mark_used(i)
            answer = SeparationAnswer(True, cache.vertices[i].copy(), served_from_cache=True)
            if stats is not None:
                stats.record(answer, 0)
            return answer
    y = domain.lmo(c)
    gap = cx - float(c @ y)
    if gap > threshold:
        cache.insert(y)
        answer = SeparationAnswer(True, y, lp_called=True, exact_dual_gap=max(0.0, gap))
    else:
        answer = SeparationAnswer(False, lp_called=True, exact_dual_gap=max(0.0, gap))
    if stats is not None:
        stats.record(answer, 1)
    return answer


def weak_separation_product(cache_plus, cache_minus, domain, grad, x, phi, K, stats=None):
    """Weak separation over ``P x P`` for pairwise steps.

    The forward vertex minimizes ``grad @ v`` over the domain; the away vertex
    maximizes ``grad @ v`` over vertices supported inside ``supp(x)``.  The
    score ``grad @ (v_minus - v_plus)`` must exceed ``phi / K`` for a positive
    answer.  Each of the two LMO calls counts as one LP call.
    """
    grad, x, K = _check_query(domain, grad, x, phi, K)
    threshold = phi / K
    support = x > SUPPORT_TOL
    cache_plus.tick()
    cache_minus.tick()
    if cache_plus.enabled and len(cache_plus) and len(cache_minus):
        plus_scores = cache_plus.scores(grad)
        ok = np.array([not np.any((v > SUPPORT_TOL) & ~support) for v in cache_minus.vertices])
        if ok.any():
            minus_scores = np.where(ok, cache_minus.scores(grad), -np.inf)
            i = int(np.argmin(plus_scores))
            j = int(np.argmax(minus_scores))
            if minus_scores[j] - plus_scores[i] > threshold:
                cache_plus.mark_used(i)
                cache_minus.mark_used(j)
                answer = SeparationAnswer(
                    True, cache_plus.vertices[i].copy(), served_from_cache=True,
                    away_vertex=cache_minus.vertices[j].copy())
                if stats is not None:
                    stats.record(answer, 0)
                return answer
    v_plus = domain.lmo(grad)
    v_minus = domain.lmo_restricted(grad, support)
    away = v_minus if v_minus is not None else x
    score = float(grad @ away - grad @ v_plus)
    if score > threshold:
        cache_plus.insert(v_plus)
        if v_minus is not None:
            cache_minus.insert(v_minus)
        answer = SeparationAnswer(True, v_plus, lp_called=True,
                                  exact_dual_gap=max(0.0, score), away_vertex=away.copy())
    else:
        answer = SeparationAnswer(False, lp_called=True, exact_dual_gap=max(0.0, score))
    if stats is not None:
        stats.record(answer, 2)
    return answer


@dataclass
class LocalSeparationAnswer:
    positive: bool
    point: np.ndarray = None
    vertex: np.ndarray = None
    delta: float = 0.0
    # (vertex, weight taken) for every donor atom of the decomposition
    transfers: list = field(default_factory=list)
    inner: SeparationAnswer = None

    def __bool__(self):
        return self.positive

    @property
    def kind(self):
        return self.inner.kind if self.inner is not None else "negative"


def local_delta(domain, r):
    """``min(sqrt(n) mu r / D, 1)``."""
    if domain.mu is None:
        raise ValueError(f"{domain!r} has no mu parameter; local separation needs one")
    return min(math.sqrt(domain.dimension) * domain.mu * r / domain.l2_diameter, 1.0)


def weak_local_separation(oracle, domain, c, active, r, phi, K):
    """Weak separation restricted to a neighbourhood of the current point.

    ``oracle`` answers plain weak separation queries (``oracle.separate``).
    Weight ``delta`` is taken greedily from the atoms of ``active`` with the
    largest ``c @ v``; the inner query is made at their normalized average.
    On a positive answer the returned point is ``x - p_minus + delta v``.
    """
    if not len(active):
        raise AssertionError("weak local separation needs a non-empty decomposition")
    check_positive(r, "r")
    c = check_vector(c, domain.dimension, "c")
    x = active.point()
    delta = local_delta(domain, r)
    values = [float(c @ v) for v in active.vertices]
    order = sorted(range(len(active)), key=lambda i: -values[i])
    remaining = delta
    transfers = []
    for i in order:
        if remaining <= 0:
            break
        take = min(active.weights[i], remaining)
        transfers.append((active.vertices[i], take))
        remaining -= take
    delta = sum(take for _, take in transfers)
    p_minus = sum(take * v for v, take in transfers)
    inner_active = ActiveSet([v for v, _ in transfers], [take / delta for _, take in transfers])
    inner = oracle.separate(c, p_minus / delta, phi / delta, K, active=inner_active)
    if not inner.positive:
        return LocalSeparationAnswer(False, delta=delta, inner=inner)
    y = x - p_minus + delta * inner.vertex
    return LocalSeparationAnswer(True, point=y, vertex=inner.vertex, delta=delta,
                                 transfers=transfers, inner=inner)


class LazyOracle:
    """Weak separation via cache + exact LMO, with call accounting.

    Parameters
    ----------
    domain : Domain
    cache : OracleCache, optional
        Defaults to the 100/100 eviction policy.
    """

    name = "lmo"

    def __init__(self, domain, cache=None, minus_cache=None):
        self.domain = domain
        self.cache = cache if cache is not None else OracleCache()
        # away vertices live in their own cache so wrongly supported ones never leak in
        self.minus_cache = minus_cache if minus_cache is not None else OracleCache(
            self.cache.keep_size, self.cache.eviction_period, self.cache.enabled)
        self.stats = OracleStats()

    def separate(self, c, x, phi, K, active=None):
        return weak_separation(self.cache, self.domain, c, x, phi, K, self.stats)

    def separate_pairwise(self, grad, x, phi, K):
        return weak_separation_product(self.cache, self.minus_cache, self.domain,
                                       grad, x, phi, K, self.stats)

    def separate_local(self, c, active, r, phi, K):
        return weak_local_separation(self, self.domain, c, active, r, phi, K)
