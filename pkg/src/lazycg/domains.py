"""Feasible regions with exact linear minimization oracles.

Every domain is a polytope given implicitly through its oracles:

* ``lmo(c)`` returns a vertex minimizing ``c @ v``,
* ``lmo_restricted(c, support)`` returns a vertex *maximizing* ``c @ v`` among
  vertices whose support lies inside ``support`` (``None`` when there is none),
* ``augment(c, x)`` returns a strictly better vertex than ``x`` or ``x`` itself,
* ``enumerate_vertices()`` lists all vertices (test oracle, capped).

Vertices are plain float arrays.  Ties are broken towards the lowest index so
that traces are reproducible.  Domains are immutable after construction.
"""

import itertools
import math
from collections import defaultdict, deque

import numpy as np

from ._validation import check_vector, support_mask

DEFAULT_VERTEX_CAP = 10**6
SUPPORT_TOL = 1e-12


class VertexCapExceeded(ValueError):
    """Raised when enumerating vertices would exceed the configured cap."""

    def __init__(self, estimate, cap):
        super().__init__(
            f"domain has about {estimate} vertices, more than the cap of {cap}"
        )
        self.estimate = estimate
        self.cap = cap


class Domain:
    """Base class for polytopes exposing an LMO.

    Attributes
    ----------
    dimension : int
        Ambient dimension ``n``.
    l2_diameter : float
        Upper bound ``D`` on ``||v - w||_2`` over vertex pairs.
    l1_diameter : float
        Upper bound ``k`` on ``||v - w||_1`` over vertex pairs.
    mu : float or None
        Geometric parameter used by the local conditional gradient method.
    is_zero_one : bool
        Whether all vertices are 0/1 vectors.
    """

    dimension: int
    l2_diameter: float
    l1_diameter: float
    mu = None
    is_zero_one = False

    def _check(self, c, name="c"):
        return check_vector(c, self.dimension, name)

    def lmo(self, c):
        raise NotImplementedError

    def lmo_restricted(self, c, support):
        raise NotImplementedError

    def augment(self, c, x):
        """Linear augmentation oracle.

        The default goes through the exact LMO: return the minimizer when it is
        strictly better than ``x``, otherwise ``x``.
        """
        self._require_zero_one()
        c = self._check(c)
        x = self._check(x, "x")
        y = self.lmo(c)
        if c @ y < c @ x:
            return y
        return x.copy()

    def vertex_count_estimate(self):
        raise NotImplementedError

    def _enumerate(self):
        raise NotImplementedError

    def enumerate_vertices(self, cap=DEFAULT_VERTEX_CAP):
        estimate = self.vertex_count_estimate()
        if estimate > cap:
            raise VertexCapExceeded(estimate, cap)
        return [np.asarray(v, dtype=float) for v in self._enumerate()]

    @property
    def max_l2_norm(self):
        """Upper bound on ``||v||_2`` over the domain."""
        raise NotImplementedError

    def wolfe_gap(self, grad, x):
        """``max_z grad @ (x - z)`` via one (uncounted) LMO call."""
        v = self.lmo(grad)
        return float(grad @ x - grad @ v)

    def _require_zero_one(self):
        if not self.is_zero_one:
            raise NotImplementedError(
                f"{type(self).__name__} is not a 0/1 polytope; augmentation unsupported"
            )

    def __repr__(self):
        return f"{type(self).__name__}(n={self.dimension})"


class ProbabilitySimplex(Domain):
    """``{x >= 0, sum(x) = 1}``; vertices are the unit vectors."""

    is_zero_one = True

    def __init__(self, n, mu=1.0):
        if n < 1:
            raise ValueError("simplex dimension must be >= 1")
        self.dimension = int(n)
        self.l2_diameter = math.sqrt(2.0)
        self.l1_diameter = 2.0
        self.mu = mu

    def _unit(self, i):
        v = np.zeros(self.dimension)
        v[i] = 1.0
        return v

    def lmo(self, c):
        c = self._check(c)
        return self._unit(int(np.argmin(c)))

    def lmo_restricted(self, c, support):
        c = self._check(c)
        mask = support_mask(support, self.dimension)
        if not mask.any():
            return None
        masked = np.where(mask, c, -np.inf)
        return self._unit(int(np.argmax(masked)))

    def vertex_count_estimate(self):
        return self.dimension

    def _enumerate(self):
        return [self._unit(i) for i in range(self.dimension)]

    @property
    def max_l2_norm(self):
        return 1.0

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)


class Hypercube(Domain):
    """``[0, 1]^n``; vertices are all 0/1 vectors."""

    is_zero_one = True

    def __init__(self, n, mu=None):
        if n < 1:
            raise ValueError("hypercube dimension must be >= 1")
        self.dimension = int(n)
        self.l2_diameter = math.sqrt(n)
        self.l1_diameter = float(n)
        self.mu = mu

    def lmo(self, c):
        c = self._check(c)
        return (c < 0).astype(float)

    def lmo_restricted(self, c, support):
        c = self._check(c)
        mask = support_mask(support, self.dimension)
        return ((c > 0) & mask).astype(float)

    def augment(self, c, x):
        """Flip the single improving coordinate with the largest ``|c_i|``."""
        c = self._check(c)
        x = self._check(x, "x")
        gain = np.where(x > 0.5, c, -c)
        if gain.max() <= 0:
            return x.copy()
        i = int(np.argmax(gain))
        y = x.copy()
        y[i] = 1.0 - y[i]
        return y

    def vertex_count_estimate(self):
        return 2**self.dimension

    def _enumerate(self):
        return [np.array(bits, dtype=float)
                for bits in itertools.product((0.0, 1.0), repeat=self.dimension)]

    @property
    def max_l2_norm(self):
        return math.sqrt(self.dimension)

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and np.all(x <= 1.0 + tol))


class VertexList(Domain):
    """Convex hull of an explicit vertex list (ground-truth oracle for tests)."""

    def __init__(self, vertices, mu=None):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.size == 0 or V.shape[0] == 0:
            raise ValueError("vertex list must be non-empty")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertex list contains non-finite entries")
        self.vertices = V
        self.vertices.setflags(write=False)
        self.dimension = V.shape[1]
        diff = V[:, None, :] - V[None, :, :]
        d2 = float(np.sqrt((diff**2).sum(-1)).max())
        d1 = float(np.abs(diff).sum(-1).max())
        self.l2_diameter = d2 if d2 > 0 else 1.0
        self.l1_diameter = d1 if d1 > 0 else 1.0
        self.is_zero_one = bool(np.all((V == 0) | (V == 1)))
        self.mu = mu

    def lmo(self, c):
        c = self._check(c)
        return self.vertices[int(np.argmin(self.vertices @ c))].copy()

    def lmo_restricted(self, c, support):
        c = self._check(c)
        mask = support_mask(support, self.dimension)
        ok = ~np.any((np.abs(self.vertices) > SUPPORT_TOL) & ~mask, axis=1)
        if not ok.any():
            return None
        scores = np.where(ok, self.vertices @ c, -np.inf)
        return self.vertices[int(np.argmax(scores))].copy()

    def augment(self, c, x):
        """Return the best vertex when it strictly improves on ``x``."""
        self._require_zero_one()
        c = self._check(c)
        x = self._check(x, "x")
        y = self.lmo(c)
        return y if c @ y < c @ x else x.copy()

    def vertex_count_estimate(self):
        return self.vertices.shape[0]

    def _enumerate(self):
        seen = set()
        out = []
        for v in self.vertices:
            key = v.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(v.copy())
        return out

    @property
    def max_l2_norm(self):
        return float(np.sqrt((self.vertices**2).sum(1)).max())


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _check_edges(n_nodes, edges):
    edges = [tuple(int(u) for u in e) for e in edges]
    for u, v in edges:
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise ValueError(f"edge ({u}, {v}) references a node outside 0..{n_nodes - 1}")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) not allowed")
    return edges


class SpanningTreePolytope(Domain):
    """Edge-incidence vectors of the spanning trees of a connected graph.

    The LMO is Kruskal's algorithm; edges are sorted stably by weight so that
    among equal weights the lower edge index is preferred.
    """

    is_zero_one = True

    def __init__(self, n_nodes, edges, mu=None):
        self.n_nodes = int(n_nodes)
        self.edges = _check_edges(self.n_nodes, edges)
        if self.n_nodes < 2:
            raise ValueError("spanning tree polytope needs at least 2 nodes")
        uf = _UnionFind(self.n_nodes)
        for u, v in self.edges:
            uf.union(u, v)
        if len({uf.find(i) for i in range(self.n_nodes)}) != 1:
            raise ValueError("graph is not connected")
        self.dimension = len(self.edges)
        self.tree_size = self.n_nodes - 1
        self.l1_diameter = float(min(2 * self.tree_size, self.dimension))
        self.l2_diameter = math.sqrt(self.l1_diameter)
        self.mu = mu

    @classmethod
    def complete_graph(cls, n_nodes, mu=None):
        return cls(n_nodes, list(itertools.combinations(range(n_nodes), 2)), mu=mu)

    def _kruskal(self, order, allowed=None):
        uf = _UnionFind(self.n_nodes)
        v = np.zeros(self.dimension)
        used = 0
        for j in order:
            if allowed is not None and not allowed[j]:
                continue
            a, b = self.edges[j]
            if uf.union(a, b):
                v[j] = 1.0
                used += 1
                if used == self.tree_size:
                    break
        return v if used == self.tree_size else None

    def lmo(self, c):
        c = self._check(c)
        return self._kruskal(np.argsort(c, kind="stable"))

    def lmo_restricted(self, c, support):
        c = self._check(c)
        mask = support_mask(support, self.dimension)
        return self._kruskal(np.argsort(-c, kind="stable"), allowed=mask)

    def augment(self, c, x):
        """Best single edge exchange ``T - f + e``; ``x`` if none improves."""
        c = self._check(c)
        x = self._check(x, "x")
        tree = [j for j in range(self.dimension) if x[j] > 0.5]
        best_gain, best = 0.0, None
        for f in tree:
            uf = _UnionFind(self.n_nodes)
            for j in tree:
                if j != f:
                    uf.union(*self.edges[j])
            for e in range(self.dimension):
                if x[e] > 0.5:
                    continue
                a, b = self.edges[e]
                if uf.find(a) == uf.find(b):
                    continue
                gain = c[f] - c[e]
                if gain > best_gain:
                    best_gain, best = gain, (f, e)
        if best is None:
            return x.copy()
        y = x.copy()
        y[best[0]] = 0.0
        y[best[1]] = 1.0
        return y

    def vertex_count_estimate(self):
        # Kirchhoff's matrix-tree theorem
        L = np.zeros((self.n_nodes, self.n_nodes))
        for u, v in self.edges:
            L[u, u] += 1
            L[v, v] += 1
            L[u, v] -= 1
            L[v, u] -= 1
        return int(round(np.linalg.det(L[1:, 1:])))

    def _enumerate(self):
        out = []
        for combo in itertools.combinations(range(self.dimension), self.tree_size):
            uf = _UnionFind(self.n_nodes)
            if all(uf.union(*self.edges[j]) for j in combo):
                v = np.zeros(self.dimension)
                v[list(combo)] = 1.0
                out.append(v)
        return out

    @property
    def max_l2_norm(self):
        return math.sqrt(self.tree_size)

    def __repr__(self):
        return f"SpanningTreePolytope(nodes={self.n_nodes}, edges={self.dimension})"


class ShortestPathPolytope(Domain):
    """Edge-incidence vectors of the source-sink paths of a DAG.

    Linear minimization is dynamic programming in topological order, so signed
    edge weights are fine.
    """

    is_zero_one = True

    def __init__(self, n_nodes, edges, source, sink, mu=None):
        self.n_nodes = int(n_nodes)
        self.edges = _check_edges(self.n_nodes, edges)
        self.source, self.sink = int(source), int(sink)
        self.dimension = len(self.edges)
        self.out_edges = defaultdict(list)
        indeg = [0] * self.n_nodes
        for j, (u, v) in enumerate(self.edges):
            self.out_edges[u].append(j)
            indeg[v] += 1
        queue = deque(i for i in range(self.n_nodes) if indeg[i] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for j in self.out_edges[u]:
                w = self.edges[j][1]
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) != self.n_nodes:
            raise ValueError("graph has a directed cycle")
        self.topo_order = order
        longest = self._best_path(np.ones(self.dimension), maximize=True)
        if longest is None:
            raise ValueError("no source-sink path exists")
        max_len = float(longest.sum())
        self.l1_diameter = float(min(2 * max_len, self.dimension))
        self.l2_diameter = math.sqrt(self.l1_diameter)
        self._max_len = max_len
        self.mu = mu

    def _best_path(self, c, maximize=False, allowed=None):
        sign = -1.0 if maximize else 1.0
        best = [math.inf] * self.n_nodes
        pred = [None] * self.n_nodes
        best[self.source] = 0.0
        for u in self.topo_order:
            if best[u] == math.inf:
                continue
            for j in self.out_edges[u]:
                if allowed is not None and not allowed[j]:
                    continue
                w = self.edges[j][1]
                val = best[u] + sign * c[j]
                if val < best[w]:
                    best[w] = val
                    pred[w] = j
        if best[self.sink] == math.inf:
            return None
        v = np.zeros(self.dimension)
        node = self.sink
        while node != self.source:
            j = pred[node]
            v[j] = 1.0
            node = self.edges[j][0]
        return v

    def lmo(self, c):
        c = self._check(c)
        return self._best_path(c)

    def lmo_restricted(self, c, support):
        c = self._check(c)
        mask = support_mask(support, self.dimension)
        return self._best_path(c, maximize=True, allowed=mask)

    def _paths(self):
        out = []
        stack = [(self.source, [])]
        while stack:
            node, path = stack.pop()
            if node == self.sink:
                v = np.zeros(self.dimension)
                v[path] = 1.0
                out.append(v)
                continue
            for j in reversed(self.out_edges[node]):
                stack.append((self.edges[j][1], path + [j]))
        return out

    def vertex_count_estimate(self):
        count = [0] * self.n_nodes
        count[self.source] = 1
        for u in self.topo_order:
            for j in self.out_edges[u]:
                count[self.edges[j][1]] += count[u]
        return count[self.sink]

    def _enumerate(self):
        return self._paths()

    @property
    def max_l2_norm(self):
        return math.sqrt(self._max_len)

    def __repr__(self):
        return f"ShortestPathPolytope(nodes={self.n_nodes}, edges={self.dimension})"
