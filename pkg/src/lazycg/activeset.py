"""Convex decompositions ``x = sum_i weight_i * vertex_i`` kept by the solvers."""

import numpy as np

DROP_TOL = 1e-12


class ActiveSet:
    """Vertices with positive weights summing to one.

    Vertices are keyed by their exact byte pattern, so adding a vertex that is
    already present merges the weights.
    """

    def __init__(self, vertices=(), weights=()):
        self.vertices = []
        self.weights = []
        self._index = {}
        for v, w in zip(vertices, weights):
            self.add(v, w)

    @classmethod
    def from_vertex(cls, v):
        return cls([v], [1.0])

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(zip(self.vertices, self.weights))

    def index_of(self, v):
        return self._index.get(np.asarray(v, dtype=float).tobytes())

    def weight_of(self, v):
        i = self.index_of(v)
        return 0.0 if i is None else self.weights[i]

    def add(self, v, weight):
        v = np.array(v, dtype=float)
        key = v.tobytes()
        i = self._index.get(key)
        if i is None:
            self._index[key] = len(self.vertices)
            self.vertices.append(v)
            self.weights.append(float(weight))
        else:
            self.weights[i] += float(weight)

    def scale(self, factor):
        self.weights = [w * factor for w in self.weights]

    def frank_wolfe_step(self, v, gamma):
        """Weights for ``(1 - gamma) x + gamma v``."""
        self.scale(1.0 - gamma)
        self.add(v, gamma)
        self.prune()

    def move(self, source, target, amount):
        """Shift ``amount`` of weight from vertex ``source`` to vertex ``target``."""
        i = self.index_of(source)
        if i is None:
            raise KeyError("source vertex is not in the active set")
        self.weights[i] -= amount
        self.add(target, amount)
        self.prune()

    def prune(self):
        keep = [i for i, w in enumerate(self.weights) if w >= DROP_TOL]
        if len(keep) == len(self.weights):
            return
        self.vertices = [self.vertices[i] for i in keep]
        self.weights = [self.weights[i] for i in keep]
        self._index = {v.tobytes(): i for i, v in enumerate(self.vertices)}

    def point(self):
        if not self.vertices:
            raise ValueError("empty active set")
        return np.asarray(self.weights) @ np.asarray(self.vertices)

    def total_weight(self):
        return float(sum(self.weights))

    def copy(self):
        return ActiveSet(self.vertices, self.weights)

    def check(self, x=None, tol=1e-8):
        """Raise ``AssertionError`` when the decomposition is invalid."""
        assert self.vertices, "empty active set"
        assert abs(self.total_weight() - 1.0) <= 1e-9, (
            f"weights sum to {self.total_weight()!r}")
        assert min(self.weights) > 0, "non-positive weight"
        if x is not None:
            err = float(np.max(np.abs(self.point() - x)))
            assert err <= tol, f"active set reconstructs x only within {err:.3g}"
