import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lazycg.domains import Hypercube, ProbabilitySimplex, SpanningTreePolytope
from lazycg.objectives import (
    LossStream,
    QuadraticObjective,
    RunningAggregate,
    adversarial_wrapper,
    distance_objective,
    generate_linear_stream,
    generate_regression_instance,
    least_squares_objective,
    line_search,
    short_step,
)


def _random_point(domain, rng):
    V = np.asarray(domain.enumerate_vertices())
    lam = rng.dirichlet(np.ones(len(V)))
    return lam @ V


INSTANCES = [
    (ProbabilitySimplex(4), 0.7, 6, 1),
    (Hypercube(3), 1.0, 5, 2),
    (SpanningTreePolytope.complete_graph(4), 0.5, 8, 3),
]


@pytest.mark.parametrize("domain,density,m,seed", INSTANCES)
def test_gradient_matches_finite_differences(domain, density, m, seed, rng):
    f = generate_regression_instance(domain, density, m, seed)
    for _ in range(100):
        x = _random_point(domain, rng)
        h = 1e-6 * (1.0 + np.linalg.norm(x))
        fd = np.array([(f.value(x + h * e) - f.value(x - h * e)) / (2 * h)
                       for e in np.eye(domain.dimension)])
        g = f.gradient(x)
        assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))


@pytest.mark.parametrize("domain,density,m,seed", INSTANCES)
def test_curvature_and_strong_convexity_metadata(domain, density, m, seed, rng):
    f = generate_regression_instance(domain, density, m, seed)
    C, S = f.curvature, f.strong_convexity
    for _ in range(1000):
        x, y = _random_point(domain, rng), _random_point(domain, rng)
        gamma = rng.random()
        lhs = f.value(x + gamma * (y - x))
        rhs = f.value(x) + gamma * f.gradient(x) @ (y - x) + C * gamma**2 / 2
        assert lhs <= rhs + 1e-9
        if S > 0:
            gap = f.value(y) - f.value(x) - f.gradient(x) @ (y - x)
            assert gap >= S / 2 * np.sum((y - x) ** 2) - 1e-9


def test_quadratic_metadata_formulas():
    A = np.array([[2.0, 0.0], [0.0, 1.0]])
    dom = ProbabilitySimplex(2)
    f = least_squares_objective(A, np.zeros(2), dom)
    assert f.smoothness == pytest.approx(8.0)
    assert f.strong_convexity == pytest.approx(2.0)
    assert f.curvature == pytest.approx(8.0 * 2.0)
    # rank deficient: no strong convexity
    g = least_squares_objective(np.array([[1.0, 1.0]]), np.zeros(1), dom)
    assert g.strong_convexity == 0.0


def test_line_search_examples():
    f = QuadraticObjective(np.eye(2), np.zeros(2))
    assert line_search(f, np.array([1.0, 0.0]), np.array([0.0, 0.0])) == 1.0
    g = QuadraticObjective(np.eye(2), np.array([-1.0, 0.0]), 0.25)  # ||x - (0.5, 0)||^2
    assert line_search(g, np.array([1.0, 0.0]), np.array([0.0, 0.0])) == pytest.approx(0.5)
    assert line_search(g, np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 0.0


class _Quartic:
    """Non-quadratic convex test function ``sum (x - a)^4``."""

    def __init__(self, a):
        self.a = np.asarray(a, dtype=float)

    def value(self, x):
        return float(np.sum((x - self.a) ** 4))

    def gradient(self, x):
        return 4.0 * (x - self.a) ** 3


def test_backtracking_line_search_decreases():
    f = _Quartic([0.3, 0.1])
    x, v = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    gamma = line_search(f, x, v)
    assert 0 < gamma <= 1
    assert f.value(x + gamma * (v - x)) <= f.value(x) + 1e-12
    # ascent direction: no step
    assert line_search(f, np.array([0.3, 0.1]) + 0.0, np.array([1.0, 1.0])) == 0.0


@given(st.integers(0, 10**6))
def test_line_search_is_optimal_on_quadratics(seed):
    rng = np.random.default_rng(seed)
    n = 3
    M = rng.normal(size=(n, n))
    f = QuadraticObjective(M.T @ M, rng.normal(size=n))
    x, v = rng.normal(size=n), rng.normal(size=n)
    gamma = line_search(f, x, v)
    best = f.value(x + gamma * (v - x))
    for g2 in rng.random(100):
        assert best <= f.value(x + g2 * (v - x)) + 1e-9


def test_short_step_examples():
    assert short_step(1, 1, 2) == 0.5
    assert short_step(5, 1, 1) == 1.0
    assert short_step(1, 2, 1) == 0.5
    with pytest.raises(ValueError):
        short_step(0, 1, 1)


def test_regression_instance_is_reproducible():
    dom = ProbabilitySimplex(5)
    f1 = generate_regression_instance(dom, 0.5, 7, 42)
    f2 = generate_regression_instance(dom, 0.5, 7, 42)
    f3 = generate_regression_instance(dom, 0.5, 7, 43)
    assert np.array_equal(f1.A, f2.A) and np.array_equal(f1.b, f2.b)
    assert not np.array_equal(f1.A, f3.A)
    dense = generate_regression_instance(ProbabilitySimplex(2), 1.0, 2, 0)
    assert np.all(dense.A > 0)


def test_regression_instance_structure(rng):
    dom = Hypercube(4)
    f = generate_regression_instance(dom, 0.5, 30, 5)
    assert f.A.shape == (30, 4)
    assert np.all((f.A >= 0) & (f.A <= 1))
    # b = A w with w in [0, 1]^n, so the optimum over the cube is 0
    w, *_ = np.linalg.lstsq(f.A, f.b, rcond=None)
    assert np.all((w >= -1e-9) & (w <= 1 + 1e-9))
    assert f.value(w) == pytest.approx(0.0, abs=1e-9)
    for _ in range(50):
        assert f.value(rng.random(4)) >= 0
    with pytest.raises(ValueError):
        generate_regression_instance(dom, 0.0, 3, 1)


def test_distance_objective():
    dom = ProbabilitySimplex(3)
    f = distance_objective(dom, 9)
    assert np.array_equal(f.A, np.eye(3))
    assert f.value(f.b) == pytest.approx(0.0)


def test_linear_stream_examples():
    s = generate_linear_stream(2, 1, 0)
    assert len(s) == 1 and s.is_linear
    agg = RunningAggregate(2)
    agg.add(s[0])
    x = np.array([0.3, 0.7])
    assert agg.value(x) == pytest.approx(s[0].value(x))
    zero = QuadraticObjective.linear(np.zeros(2))
    assert np.array_equal(zero.gradient(x), np.zeros(2))
    s2 = generate_linear_stream(3, 50, 1)
    assert s2.lipschitz == pytest.approx(max(np.linalg.norm(f.q) for f in s2))
    for f in s2:
        assert np.all(np.abs(f.q) <= 1) and 0 <= f.const <= 1


def test_aggregate_gradient_is_sum(rng):
    s = generate_linear_stream(4, 20, 3)
    agg = RunningAggregate(4)
    quad = QuadraticObjective(np.diag([1.0, 2.0, 0.5, 0.1]), np.ones(4))
    losses = list(s) + [quad]
    for f in losses:
        agg.add(f)
    x = rng.random(4)
    assert np.allclose(agg.gradient(x), sum(f.gradient(x) for f in losses))
    assert agg.value(x) == pytest.approx(sum(f.value(x) for f in losses))
    assert agg.count == 21


def test_aggregate_rejects_unknown_losses():
    with pytest.raises(TypeError):
        RunningAggregate(2).add(object())
    with pytest.raises(ValueError):
        LossStream([])


def test_adversarial_wrapper_examples():
    g = np.array([0.5, -1.0])
    loss = QuadraticObjective.linear(g)
    anchor = np.array([0.0, 1.0])
    w = adversarial_wrapper(loss, anchor, anchor, L=1.0, k=1.0, t=1)
    assert w.value(anchor) == pytest.approx(g @ anchor)
    assert np.allclose(w.gradient(anchor), g)
    x = anchor + np.array([1.0, 0.0])
    assert np.allclose(w.gradient(x) - g, [4.0, 0.0])
    w2 = adversarial_wrapper(loss, anchor, anchor, L=2.0, k=4.0, t=3)
    assert (w2.curvature, w2.strong_convexity, w2.lipschitz) == (4.0, 1.0, 6.0)


@given(st.integers(1, 500), st.floats(0.1, 10), st.floats(1, 16))
def test_adversarial_wrapper_gradient_formula(t, L, k):
    rng = np.random.default_rng(t)
    loss = QuadraticObjective(np.diag([1.0, 3.0]), np.array([1.0, -2.0]))
    anchor, it, x = rng.random(2), rng.random(2), rng.random(2)
    w = adversarial_wrapper(loss, anchor, it, L, k, t)
    expected = loss.gradient(it) + 4 * L * t**-0.25 * (x - anchor) / math.sqrt(k)
    assert np.allclose(w.gradient(x), expected)
