"""Scikit-learn style front end: constrained least squares over a polytope."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .algorithms import OFFLINE_SOLVERS, SolverConfig
from .domains import Hypercube, ProbabilitySimplex
from .objectives import least_squares_objective

_DOMAINS = {"simplex": ProbabilitySimplex, "hypercube": Hypercube}


class LazyCGRegressor(RegressorMixin, BaseEstimator):
    """Least squares ``min ||X w - y||^2`` with ``w`` constrained to a polytope.

    Parameters
    ----------
    domain : {"simplex", "hypercube"} or Domain
        Feasible set of the coefficients; a domain instance must match the
        number of features.
    algorithm : str
        Any offline solver name, e.g. ``"lazy_cg_parameter_free"``.
    K : float
        Oracle accuracy.
    max_iter : int
    tol : float or None
        Stop once the Wolfe gap falls to ``tol``.
    cache : bool
        Keep the oracle cache on.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    trace_ : RunTrace
    n_iter_ : int
    """

    def __init__(self, domain="simplex", algorithm="lazy_cg_parameter_free", K=1.0,
                 max_iter=1000, tol=1e-6, cache=True):
        self.domain = domain
        self.algorithm = algorithm
        self.K = K
        self.max_iter = max_iter
        self.tol = tol
        self.cache = cache

    def _make_domain(self, n):
        if isinstance(self.domain, str):
            if self.domain not in _DOMAINS:
                raise ValueError(f"domain must be one of {sorted(_DOMAINS)} or a Domain")
            return _DOMAINS[self.domain](n)
        if self.domain.dimension != n:
            raise ValueError(f"domain has dimension {self.domain.dimension}, X has {n} features")
        return self.domain

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.algorithm not in OFFLINE_SOLVERS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        domain = self._make_domain(X.shape[1])
        f = least_squares_objective(X, y, domain)
        config = SolverConfig(K=self.K, max_iters=self.max_iter, epsilon=self.tol,
                              cache_enabled=self.cache)
        self.trace_ = OFFLINE_SOLVERS[self.algorithm](f, domain, config)
        self.coef_ = self.trace_.x
        self.n_iter_ = self.trace_.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_

    def objective(self, X, y):
        """``||X coef_ - y||^2``."""
        r = self.predict(X) - np.asarray(y, dtype=float)
        return float(r @ r)
