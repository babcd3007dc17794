"""Transform between Dirichlet and delta-vertex problems on a star graph.

``T`` maps a vector of edge functions ``u`` to

    (T u)_j(x) = sum_k u_k'(x) - alpha u_j(x),

and its inverse on decaying data is

    (T^-1 v)_j(x) = (1/alpha) [ (1/N) sum_k v_k(x) - v_j(x) ]
                    - (1/N^2) int_x^inf exp(-alpha (s - x) / N) sum_k v_k(s) ds.

If ``v`` vanishes at the vertex on every edge, ``T^-1 v`` is continuous
at the vertex and obeys ``sum_j u_j'(0) = alpha u(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import EdgePoint, StarGraphConfig
from .errors import ContractError, DomainError
from .specialfn import integrate_damped_tail

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class EdgeVectorFunction:
    """Vector of functions, one per edge, with an exponential decay certificate.

    ``value_at(j, x)`` returns the component on edge ``j`` (1-based).  The
    derivative callables are optional; operations that need them raise
    ``ContractError`` when absent.  ``decay_rate`` promises
    ``|v_j(x)| <= C exp(-decay_rate x)``.  ``support``, if given, is an
    interval ``(lo, hi)`` outside of which every component vanishes.
    """

    n_edges: int
    value_at: Callable[[int, float], float]
    derivative_at: Optional[Callable[[int, float], float]] = None
    decay_rate: float = 1.0
    second_derivative_at: Optional[Callable[[int, float], float]] = None
    support: Optional[tuple] = None

    def __post_init__(self):
        if self.n_edges < 1:
            raise DomainError("n_edges must be >= 1")
        if not self.decay_rate > 0:
            raise DomainError("decay_rate must be positive")

    def total(self, x):
        """``sum_k v_k(x)``."""
        return sum(self.value_at(k, x) for k in range(1, self.n_edges + 1))

    def total_derivative(self, x):
        self.require_derivative()
        return sum(self.derivative_at(k, x) for k in range(1, self.n_edges + 1))

    def require_derivative(self):
        if self.derivative_at is None:
            raise ContractError("this operation needs derivative_at")

    @classmethod
    def uniform(cls, n_edges, value, derivative=None, decay_rate=1.0,
                second_derivative=None, support=None):
        """Same scalar function on every edge."""
        wrap = (lambda fn: None if fn is None else (lambda j, x: fn(x)))
        return cls(n_edges, wrap(value), wrap(derivative), decay_rate,
                   wrap(second_derivative), support)

    @classmethod
    def scaled(cls, weights: Sequence[float], value, derivative=None, decay_rate=1.0,
               second_derivative=None, support=None):
        """``v_j(x) = weights[j-1] * value(x)``."""
        w = tuple(float(c) for c in weights)
        wrap = (lambda fn: None if fn is None else (lambda j, x: w[j - 1] * fn(x)))
        return cls(len(w), wrap(value), wrap(derivative), decay_rate,
                   wrap(second_derivative), support)

    def __add__(self, other):
        return combine(1.0, self, 1.0, other)


def combine(a: float, v: EdgeVectorFunction, b: float, w: EdgeVectorFunction):
    """The linear combination ``a v + b w``."""
    if v.n_edges != w.n_edges:
        raise DomainError("edge counts differ")
    deriv = None
    if v.derivative_at is not None and w.derivative_at is not None:
        deriv = lambda j, x: a * v.derivative_at(j, x) + b * w.derivative_at(j, x)
    return EdgeVectorFunction(
        v.n_edges,
        lambda j, x: a * v.value_at(j, x) + b * w.value_at(j, x),
        deriv,
        min(v.decay_rate, w.decay_rate),
    )


def _check(graph: StarGraphConfig, fn: EdgeVectorFunction, point: EdgePoint):
    if fn.n_edges != graph.n_edges:
        raise DomainError(f"function has {fn.n_edges} edges, graph has {graph.n_edges}")
    point.validate_for(graph)


def apply_T(u: EdgeVectorFunction, graph: StarGraphConfig, point: EdgePoint) -> float:
    """``(T u)_j(x) = sum_k u_k'(x) - alpha u_j(x)``."""
    u.require_derivative()
    _check(graph, u, point)
    if graph.is_dirichlet:
        raise DomainError("T is not defined for a Dirichlet vertex")
    x = point.coordinate
    return u.total_derivative(x) - graph.alpha * u.value_at(point.edge, x)


def _require_invertible(graph: StarGraphConfig):
    if graph.is_dirichlet or not graph.alpha > 0:
        raise DomainError("T^-1 exists only for 0 < alpha < inf")


def tail_integral(v: EdgeVectorFunction, graph: StarGraphConfig, x: float,
                  tol: float = DEFAULT_TOL) -> float:
    """``int_x^inf exp(-alpha (s - x) / N) sum_k v_k(s) ds``."""
    a = graph.damping

    def integrand(s):
        return np.exp(-a * (s - x)) * v.total(s)

    rate = a + v.decay_rate
    return integrate_damped_tail(integrand, x, rate, tol).value


def apply_T_inverse(v: EdgeVectorFunction, graph: StarGraphConfig, point: EdgePoint,
                    tol: float = DEFAULT_TOL) -> float:
    """``(T^-1 v)_j(x)`` for ``alpha > 0``; the tail integral is done numerically."""
    _require_invertible(graph)
    _check(graph, v, point)
    n = graph.n_edges
    x = point.coordinate
    local = (v.total(x) / n - v.value_at(point.edge, x)) / graph.alpha
    return local - tail_integral(v, graph, x, tol) / n ** 2


def apply_T_inverse_derivative(v: EdgeVectorFunction, graph: StarGraphConfig,
                               point: EdgePoint, tol: float = DEFAULT_TOL) -> float:
    """x-derivative of ``(T^-1 v)_j`` by differentiating under the integral sign."""
    _require_invertible(graph)
    _check(graph, v, point)
    v.require_derivative()
    n = graph.n_edges
    x = point.coordinate
    j = point.edge
    local = (v.total_derivative(x) / n - v.derivative_at(j, x)) / graph.alpha
    tail = tail_integral(v, graph, x, tol)
    return local + v.total(x) / n ** 2 - graph.damping * tail / n ** 2


def inverse_function(v: EdgeVectorFunction, graph: StarGraphConfig,
                     tol: float = DEFAULT_TOL) -> EdgeVectorFunction:
    """``T^-1 v`` packaged as an edge function with analytic derivative."""
    _require_invertible(graph)
    return EdgeVectorFunction(
        graph.n_edges,
        lambda j, x: apply_T_inverse(v, graph, EdgePoint(j, x), tol),
        (lambda j, x: apply_T_inverse_derivative(v, graph, EdgePoint(j, x), tol))
        if v.derivative_at is not None else None,
        min(v.decay_rate, graph.damping),
    )


def roundtrip_residual(v: EdgeVectorFunction, graph: StarGraphConfig,
                       sample_points: Iterable[EdgePoint], tol: float = DEFAULT_TOL) -> float:
    """``max |T(T^-1 v) - v|`` over the sample points."""
    u = inverse_function(v, graph, tol)
    worst = 0.0
    for p in sample_points:
        worst = max(worst, abs(apply_T(u, graph, p) - v.value_at(p.edge, p.coordinate)))
    return worst


def vertex_condition_defects(v: EdgeVectorFunction, graph: StarGraphConfig,
                             tol: float = DEFAULT_TOL):
    """How far ``u = T^-1 v`` is from satisfying the vertex conditions.

    Returns ``(continuity, flux)``: the spread of ``u_j(0)`` over edges and
    ``|sum_j u_j'(0) - alpha u(0)|``.  Both vanish when ``v(0) = 0``.
    """
    n = graph.n_edges
    values = [apply_T_inverse(v, graph, EdgePoint(j, 0.0), tol) for j in range(1, n + 1)]
    slopes = [apply_T_inverse_derivative(v, graph, EdgePoint(j, 0.0), tol)
              for j in range(1, n + 1)]
    continuity = max(values) - min(values)
    flux = abs(sum(slopes) - graph.alpha * values[0])
    return continuity, flux
