"""scikit-learn style wrappers.

Each estimator is configured by the star-graph parameters, ``fit`` only
validates them, and ``transform`` maps rows of independent variables to a
column of values.  This lets the closed forms slot into pipelines and
parameter grids; the functional API in the other modules is the primary
interface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import make_dirichlet_graph, make_graph
from .kernels import ProblemKind, star_kernel
from .spectral import local_spectral_density
from .vacuum import Route, energy_density


class _StarGraphEstimator(TransformerMixin, BaseEstimator):
    n_features = None

    def __init__(self, n_edges=1, alpha=0.0, dirichlet=False, edge=1):
        self.n_edges = n_edges
        self.alpha = alpha
        self.dirichlet = dirichlet
        self.edge = edge

    def _graph(self):
        if self.dirichlet:
            return make_dirichlet_graph(self.n_edges)
        return make_graph(self.n_edges, self.alpha)

    def fit(self, X=None, y=None):
        self.graph_ = self._graph()
        self.graph_.check_edge(self.edge)
        if X is not None:
            self._validate(X)
        return self

    def _validate(self, X):
        X = check_array(X, dtype=float, ensure_min_samples=1)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} columns, got {X.shape[1]}")
        return X

    def transform(self, X):
        check_is_fitted(self, "graph_")
        X = self._validate(X)
        return np.asarray(self._evaluate(X), dtype=float).reshape(-1, 1)

    def predict(self, X):
        return self.transform(X).ravel()


class LocalSpectralDensity(_StarGraphEstimator):
    """Rows ``[omega, x]`` to ``sigma(omega, x, x)``."""

    n_features = 2

    def _evaluate(self, X):
        return local_spectral_density(self.graph_, X[:, 0], self.edge, X[:, 1])


class VacuumEnergyDensity(_StarGraphEstimator):
    """Rows ``[x]`` to ``T00(x)`` by the chosen route."""

    n_features = 1

    def __init__(self, n_edges=1, alpha=0.0, dirichlet=False, edge=1, route="closed-form"):
        super().__init__(n_edges, alpha, dirichlet, edge)
        self.route = route

    def _evaluate(self, X):
        route = Route(self.route)
        return [energy_density(self.graph_, x, self.edge, route).value for x in X[:, 0]]


class _KernelDiagonal(_StarGraphEstimator):
    kind = None
    n_features = 3

    def _evaluate(self, X):
        return [star_kernel(self.kind, self.graph_, t, self.edge, self.edge, x, y)
                for t, x, y in X]


class HeatKernel(_KernelDiagonal):
    """Rows ``[t, x, y]`` to the heat kernel between two points of one edge."""

    kind = ProblemKind.HEAT


class CylinderKernel(_KernelDiagonal):
    """Rows ``[t, x, y]`` to the cylinder kernel between two points of one edge."""

    kind = ProblemKind.CYLINDER
