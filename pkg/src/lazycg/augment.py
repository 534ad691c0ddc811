"""Weak separation for 0/1 polytopes using only an augmentation oracle.

Starting from a vertex at least as good as ``x``, the objective is repeatedly
tilted by ``(phi - c (x - x_i)) / k`` times the l1 distance to the current
vertex and handed to the domain's augmentation oracle.  Either the progress
``c (x - x_i)`` reaches ``phi``, the oracle stalls (a certificate that no
vertex improves by more than ``phi``), or after ``N`` successful augmentations
the progress exceeds ``phi / K``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_accuracy, check_positive, check_vector
from .weaksep import OracleStats, SeparationAnswer


def call_budget(K, k):
    """Number of augmentation calls ``ceil(log(1 - 1/K) / log(1 - 1/k))``."""
    K = check_accuracy(K, strict=True)
    if k < 1:
        raise ValueError(f"l1 diameter k must be >= 1, got {k}")
    if k == 1:
        return 1
    return max(1, math.ceil(math.log(1.0 - 1.0 / K) / math.log(1.0 - 1.0 / k)))


def l1_distance_form(x):
    """``(w, offset)`` with ``w @ v + offset == ||v - x||_1`` for 0/1 ``x, v``."""
    x = np.asarray(x, dtype=float)
    return 1.0 - 2.0 * x, float(np.abs(x).sum())


def select_start(c, active):
    """First atom (insertion order) of ``active`` with ``c @ v <= c @ x``."""
    x = active.point()
    cx = float(c @ x)
    for v in active.vertices:
        if float(c @ v) <= cx:
            return v.copy()
    # a convex combination cannot be strictly beaten by every atom; only
    # rounding can land here, and then the best atom is the right answer
    best = min(active.vertices, key=lambda v: float(c @ v))
    assert float(c @ best) <= cx + 1e-9 * max(1.0, abs(cx)), "no atom below c @ x"
    return best.copy()


@dataclass(frozen=True)
class AugSeparationConfig:
    K: float
    k: float

    def __post_init__(self):
        check_accuracy(self.K, strict=True)
        if self.k < 1:
            raise ValueError("l1 diameter k must be >= 1")

    @property
    def budget(self):
        return call_budget(self.K, self.k)


def augmenting_weak_separation(domain, config, c, x, active, phi, stats=None):
    """Answer a weak separation query with at most ``config.budget`` AUG calls.

    ``active`` must decompose ``x`` into 0/1 vertices of ``domain``.  The
    returned answer lists the potentials ``phi - c (x - x_i)`` for
    ``i = 0, 1, ...`` in ``answer.potentials``.
    """
    if not domain.is_zero_one:
        raise NotImplementedError(f"{domain!r} is not a 0/1 polytope")
    c = check_vector(c, domain.dimension, "c")
    x = check_vector(x, domain.dimension, "x")
    check_positive(phi, "phi")
    k = float(config.k)
    cx = float(c @ x)
    current = select_start(c, active)
    potentials = [phi - (cx - float(c @ current))]
    calls = 0
    answer = None
    for _ in range(config.budget):
        if cx - float(c @ current) >= phi:
            answer = SeparationAnswer(True, current)
            break
        w, _ = l1_distance_form(current)
        tilted = c + (phi - (cx - float(c @ current))) / k * w
        nxt = domain.augment(tilted, current)
        calls += 1
        if np.array_equal(nxt, current):
            answer = SeparationAnswer(False)
            break
        current = nxt
        potentials.append(phi - (cx - float(c @ current)))
    if answer is None:
        answer = SeparationAnswer(True, current)
    answer.aug_calls = calls
    answer.lp_called = calls > 0
    answer.potentials = potentials
    if stats is not None:
        stats.record(answer, calls)
    return answer


class AugmentationOracle:
    """Drop-in replacement for :class:`~lazycg.weaksep.LazyOracle` on 0/1 domains.

    The accuracy ``K > 1`` is fixed at construction; queries asking for a
    larger ``K`` are answered at the fixed accuracy, which is stricter.
    """

    name = "augmentation"

    def __init__(self, domain, K, k=None):
        if not domain.is_zero_one:
            raise NotImplementedError(f"{domain!r} is not a 0/1 polytope")
        self.domain = domain
        self.config = AugSeparationConfig(K, domain.l1_diameter if k is None else k)
        self.stats = OracleStats()

    def separate(self, c, x, phi, K=None, active=None):
        if active is None:
            raise ValueError("the augmentation oracle needs the convex decomposition of x")
        if K is not None and K < self.config.K:
            raise ValueError(f"oracle runs at accuracy {self.config.K}, query asks for {K}")
        return augmenting_weak_separation(self.domain, self.config, c, x, active, phi, self.stats)

    def separate_local(self, c, active, r, phi, K):
        from .weaksep import weak_local_separation
        return weak_local_separation(self, self.domain, c, active, r, phi, K)
