"""scikit-learn style wrappers around the routers and the curve fit.

The estimators follow the usual conventions (constructor arguments stored
verbatim, learned state in trailing-underscore attributes, ``get_params`` /
``set_params`` from :class:`~sklearn.base.BaseEstimator`), so they compose
with ``clone`` and parameter grids.
"""

from __future__ import annotations

import networkx as nx
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import CostModel, makespan
from .experiments import fit_basis
from .graph_algorithms import graph_center, parse_graph, route_sparse_general
from .path_algorithms import ALGORITHMS, route

__all__ = [
    "check_permutation_rows", "check_lengths", "ReversalRouter", "RoutingTimeModel",
    "SparseGraphRouter",
]


def check_permutation_rows(X, n: int | None = None) -> np.ndarray:
    """Validate a 2-D integer array whose rows are permutations of ``0..n-1``."""
    X = check_array(X, dtype=np.int64, ensure_2d=True)
    if n is not None and X.shape[1] != n:
        raise ValueError(f"expected rows of length {n}, got {X.shape[1]}")
    ref = np.arange(X.shape[1])
    bad = np.flatnonzero(~(np.sort(X, axis=1) == ref).all(axis=1))
    if bad.size:
        raise ValueError(f"row {int(bad[0])} is not a permutation: {X[bad[0]].tolist()}")
    return X


def check_lengths(X) -> np.ndarray:
    """Validate permutation lengths given as a column or a flat vector."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError("lengths must be a single feature")
        X = X[:, 0]
    X = check_array(X.reshape(-1, 1), ensure_2d=True)[:, 0]
    if (X <= 0).any():
        raise ValueError("lengths must be positive")
    return X


class ReversalRouter(BaseEstimator):
    """Route path permutations with a fixed algorithm; ``predict`` gives makespans."""

    def __init__(self, algorithm: str = "gdc-tbs", model: str = "linear", verify: bool = True):
        self.algorithm = algorithm
        self.model = model
        self.verify = verify

    def fit(self, X=None, y=None):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        self.model_ = CostModel.coerce(self.model)
        if X is not None:
            self.n_features_in_ = check_permutation_rows(X).shape[1]
        return self

    def transform(self, X) -> list[list]:
        """One schedule per row of ``X``."""
        check_is_fitted(self, "model_")
        X = check_permutation_rows(X)
        return [route(row.tolist(), self.algorithm, verify=self.verify) for row in X]

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        X = check_permutation_rows(X)
        return np.array([float(makespan(route(row.tolist(), self.algorithm, verify=self.verify),
                                        self.model_, n=X.shape[1])) for row in X])


class RoutingTimeModel(RegressorMixin, BaseEstimator):
    """``y ≈ a n + b sqrt(n) + c`` fitted by least squares."""

    def fit(self, X, y):
        n = check_lengths(X)
        y = np.asarray(y, dtype=float).ravel()
        fit = fit_basis(n, y)
        self.coef_ = np.array([fit.a, fit.b, fit.c])
        self.r_squared_ = fit.r_squared
        self.fit_ = fit
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        n = check_lengths(X)
        return self.coef_[0] * n + self.coef_[1] * np.sqrt(n) + self.coef_[2]


class SparseGraphRouter(BaseEstimator):
    """Route vertex permutations on one connected graph.

    ``fit`` takes a :class:`networkx.Graph` or a graph spec string
    (``grid:RxC`` or an edge-list path) and caches its center.
    """

    def __init__(self, model: str = "linear"):
        self.model = model

    def fit(self, X, y=None):
        g = parse_graph(X) if isinstance(X, str) else X
        if not isinstance(g, nx.Graph):
            raise TypeError("fit expects a networkx Graph or a graph spec string")
        self.graph_ = g
        self.center_, self.radius_ = graph_center(g)
        self.model_ = CostModel.coerce(self.model)
        self.n_features_in_ = g.number_of_nodes()
        return self

    def transform(self, X) -> list[list]:
        check_is_fitted(self, "graph_")
        X = check_permutation_rows(X, self.n_features_in_)
        return [route_sparse_general(self.graph_, row.tolist(), center=self.center_) for row in X]

    def predict(self, X) -> np.ndarray:
        return np.array([float(makespan(ops, self.model_, n=self.n_features_in_))
                         for ops in self.transform(X)])
