"""Smooth convex objectives, step-size rules and random instance generators."""

import math

import numpy as np

from ._validation import check_accuracy, check_positive, check_vector

ARMIJO_CONSTANT = 0.1
BACKTRACK_FACTOR = 0.5
MIN_STEP = 2.0**-30


class SmoothObjective:
    """A differentiable convex function with curvature metadata.

    Subclasses implement ``value`` and ``gradient``.  The metadata are upper
    bounds (``curvature``, ``smoothness``, ``lipschitz``) or a lower bound
    (``strong_convexity``) valid over the feasible region the objective was
    built for.
    """

    curvature = None
    strong_convexity = 0.0
    smoothness = None
    lipschitz = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)


class QuadraticObjective(SmoothObjective):
    """``f(x) = x' Q x + q' x + const`` with ``Q`` symmetric positive semidefinite.

    Least-squares objectives ``||Ax - b||^2`` are built with
    :meth:`least_squares`, linear ones with :meth:`linear`.

    Parameters
    ----------
    Q : (n, n) array
    q : (n,) array
    const : float
    diameter : float, optional
        l2 diameter ``D`` of the feasible region; needed for ``curvature``.
    radius : float, optional
        Upper bound on ``||x||_2`` over the feasible region; needed for
        ``lipschitz``.
    """

    def __init__(self, Q, q, const=0.0, diameter=None, radius=None):
        Q = np.asarray(Q, dtype=float)
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise ValueError(f"Q must be square, got shape {Q.shape}")
        self.Q = 0.5 * (Q + Q.T)
        self.q = check_vector(q, n, "q")
        self.const = float(const)
        self.dimension = n
        if n and np.any(self.Q):
            eig = np.linalg.eigvalsh(self.Q)
            lam_max = max(float(eig[-1]), 0.0)
            lam_min = float(eig[0])
            if lam_min <= 1e-12 * max(lam_max, 1.0):
                lam_min = 0.0
        else:
            lam_max = lam_min = 0.0
        self.lambda_max = lam_max
        self.lambda_min = lam_min
        self.smoothness = 2.0 * lam_max
        self.strong_convexity = 2.0 * lam_min
        self.diameter = diameter
        self.curvature = None if diameter is None else self.smoothness * diameter**2
        self.radius = radius
        if radius is not None:
            self.lipschitz = self.smoothness * radius + float(np.linalg.norm(self.q))

    @classmethod
    def least_squares(cls, A, b, diameter=None, radius=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = check_vector(b, A.shape[0], "b")
        obj = cls(A.T @ A, -2.0 * A.T @ b, float(b @ b), diameter, radius)
        obj.A, obj.b = A, b
        return obj

    @classmethod
    def linear(cls, c, const=0.0, diameter=None, radius=None):
        c = check_vector(c, name="c")
        return cls(np.zeros((c.size, c.size)), c, const, diameter, radius)

    @classmethod
    def for_domain(cls, Q, q, const, domain):
        return cls(Q, q, const, domain.l2_diameter, domain.max_l2_norm)

    @property
    def is_linear(self):
        return not np.any(self.Q)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x + self.q @ x + self.const)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * self.Q @ x + self.q

    def __add__(self, other):
        if not isinstance(other, QuadraticObjective):
            return NotImplemented
        return QuadraticObjective(self.Q + other.Q, self.q + other.q,
                                  self.const + other.const,
                                  self.diameter, self.radius)


def least_squares_objective(A, b, domain):
    """``||Ax - b||^2`` with curvature metadata computed for ``domain``."""
    return QuadraticObjective.least_squares(A, b, domain.l2_diameter, domain.max_l2_norm)


def line_search(f, x, v):
    """Step ``gamma`` in [0, 1] minimizing ``f((1 - gamma) x + gamma v)``.

    Exact for quadratics; backtracking with an Armijo test otherwise.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(v, dtype=float) - x
    if not np.any(d):
        return 0.0
    g = f.gradient(x)
    slope = float(g @ d)
    if isinstance(f, QuadraticObjective):
        curv = float(d @ f.Q @ d)
        if curv <= 0:
            return 1.0 if slope < 0 else 0.0
        return min(max(-slope / (2.0 * curv), 0.0), 1.0)
    if slope >= 0:
        return 0.0
    fx = f.value(x)
    gamma = 1.0
    while gamma >= MIN_STEP:
        if f.value(x + gamma * d) <= fx + ARMIJO_CONSTANT * gamma * slope:
            return gamma
        gamma *= BACKTRACK_FACTOR
    return 0.0


def short_step(phi, K, C):
    """``min(1, phi / (K C))``."""
    check_positive(phi, "phi")
    check_positive(C, "C")
    K = check_accuracy(K)
    return min(1.0, phi / (K * C))


def generate_regression_instance(domain, density, m, seed):
    """Random ``||Ax - b||^2`` instance over ``domain``.

    Entries of ``A`` are non-zero with probability ``density`` and then
    uniform on [0, 1]; ``b = A w`` with ``w`` uniform on [0, 1]^n.
    """
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    if m < 1:
        raise ValueError("need at least one row")
    rng = np.random.default_rng(seed)
    n = domain.dimension
    mask = rng.random((m, n)) < density
    A = np.where(mask, rng.random((m, n)), 0.0)
    w = rng.random(n)
    return least_squares_objective(A, A @ w, domain)


def distance_objective(domain, seed):
    """``||x - b||^2`` with ``b`` uniform on [0, 1]^n."""
    rng = np.random.default_rng(seed)
    n = domain.dimension
    return least_squares_objective(np.eye(n), rng.random(n), domain)


class LossStream:
    """Sequence of per-round losses with a running aggregate.

    All losses are :class:`QuadraticObjective` instances (linear losses have
    ``Q = 0``), so the aggregate ``F_t = sum_{i <= t} f_i`` is kept in closed
    form by accumulating ``Q``, ``q`` and the constant.
    """

    def __init__(self, losses, lipschitz=None):
        self.losses = list(losses)
        if not self.losses:
            raise ValueError("a loss stream needs at least one loss")
        n = self.losses[0].dimension
        if any(loss.dimension != n for loss in self.losses):
            raise ValueError("all losses must share one dimension")
        self.dimension = n
        self.lipschitz = lipschitz

    def __len__(self):
        return len(self.losses)

    def __getitem__(self, t):
        return self.losses[t]

    def __iter__(self):
        return iter(self.losses)

    @property
    def is_linear(self):
        return all(loss.is_linear for loss in self.losses)


class RunningAggregate:
    """Incrementally maintained ``F_t``; owned by one solver run."""

    def __init__(self, dimension):
        self.Q = np.zeros((dimension, dimension))
        self.q = np.zeros(dimension)
        self.const = 0.0
        self.count = 0

    def add(self, loss):
        if not isinstance(loss, QuadraticObjective):
            raise TypeError("only linear or quadratic losses can be aggregated in closed form")
        self.Q += loss.Q
        self.q += loss.q
        self.const += loss.const
        self.count += 1

    def value(self, x):
        return float(x @ self.Q @ x + self.q @ x + self.const)

    def gradient(self, x):
        return 2.0 * self.Q @ x + self.q

    def objective(self):
        return QuadraticObjective(self.Q.copy(), self.q.copy(), self.const)


def generate_linear_stream(n, rounds, seed):
    """``rounds`` random losses ``c x + b`` with ``c ~ U[-1, 1]^n``, ``b ~ U[0, 1]``."""
    if rounds < 1:
        raise ValueError("need at least one round")
    rng = np.random.default_rng(seed)
    losses = []
    for _ in range(rounds):
        c = rng.uniform(-1.0, 1.0, n)
        b = rng.random()
        losses.append(QuadraticObjective.linear(c, b))
    lip = max(float(np.linalg.norm(loss.q)) for loss in losses)
    return LossStream(losses, lipschitz=lip)


def adversarial_wrapper(loss, anchor, iterate, L, k, t):
    """Surrogate ``g @ x + (2L / sqrt(k)) t^(-1/4) ||x - anchor||^2``.

    ``g`` is the gradient of ``loss`` at ``iterate``.  The metadata follow the
    exponents ``b = s = 1/4``: curvature ``L sqrt(k)``, strong convexity
    ``L / sqrt(k)`` and Lipschitz constant ``3 L`` (to be scaled by
    ``t^(-1/4)`` where the caller needs per-round values).
    """
    if t < 1:
        raise ValueError("round index starts at 1")
    check_positive(L, "L")
    check_positive(k, "k")
    g = loss.gradient(np.asarray(iterate, dtype=float))
    anchor = np.asarray(anchor, dtype=float)
    a = 2.0 * L / math.sqrt(k) * t**-0.25
    n = anchor.size
    wrapped = QuadraticObjective(a * np.eye(n), g - 2.0 * a * anchor, a * float(anchor @ anchor))
    wrapped.curvature = L * math.sqrt(k)
    wrapped.strong_convexity = L / math.sqrt(k)
    wrapped.lipschitz = 3.0 * L
    wrapped.weight = a
    return wrapped
