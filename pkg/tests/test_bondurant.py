import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vertexkernels.bondurant import (EdgeVectorFunction, apply_T, apply_T_inverse,
                                     apply_T_inverse_derivative, combine, inverse_function,
                                     roundtrip_residual, vertex_condition_defects)
from vertexkernels.core import EdgePoint, make_dirichlet_graph, make_graph
from vertexkernels.errors import ContractError, DomainError

EXP = EdgeVectorFunction.uniform(1, lambda x: np.exp(-x), lambda x: -np.exp(-x))


def exp_on(n):
    return EdgeVectorFunction.uniform(n, lambda x: np.exp(-x), lambda x: -np.exp(-x))


def test_apply_T_examples():
    assert apply_T(EXP, make_graph(1, 1.0), EdgePoint(1, 0.0)) == pytest.approx(-2.0)
    g2 = make_graph(2, 1.0)
    assert apply_T(exp_on(2), g2, EdgePoint(1, math.log(2))) == pytest.approx(-1.5)


def test_apply_T_kirchhoff_is_derivative_sum():
    u = exp_on(3)
    x = 0.8
    assert apply_T(u, make_graph(3, 0.0), EdgePoint(2, x)) == pytest.approx(-3 * math.exp(-x))


def test_apply_T_needs_derivative():
    u = EdgeVectorFunction.uniform(1, lambda x: np.exp(-x))
    with pytest.raises(ContractError):
        apply_T(u, make_graph(1, 1.0), EdgePoint(1, 0.0))


def test_apply_T_rejects_dirichlet():
    with pytest.raises(DomainError):
        apply_T(EXP, make_dirichlet_graph(1), EdgePoint(1, 0.0))


@given(st.floats(0.05, 20.0), st.floats(0.0, 10.0))
def test_T_inverse_half_line(alpha, x):
    # T u = u' - alpha u = e^{-x} is solved by u = -e^{-x} / (alpha + 1)
    got = apply_T_inverse(EXP, make_graph(1, alpha), EdgePoint(1, x))
    assert abs(got + math.exp(-x) / (alpha + 1)) < 1e-12


def test_T_inverse_at_vertex():
    assert apply_T_inverse(EXP, make_graph(1, 1.0), EdgePoint(1, 0.0)) == pytest.approx(-0.5, rel=1e-12)


@pytest.mark.parametrize("graph", [make_graph(1, 0.0), make_graph(3, 0.0), make_dirichlet_graph(2)])
def test_T_inverse_needs_positive_alpha(graph):
    with pytest.raises(DomainError):
        apply_T_inverse(exp_on(graph.n_edges), graph, EdgePoint(1, 0.5))


def test_roundtrip_examples():
    pts = [EdgePoint(j, x) for j in (1, 2, 3) for x in np.linspace(0, 5, 7)]
    assert roundtrip_residual(exp_on(3), make_graph(3, 2.0), pts) < 1e-9
    zero = EdgeVectorFunction.uniform(3, lambda x: 0.0 * x, lambda x: 0.0 * x)
    assert roundtrip_residual(zero, make_graph(3, 2.0), pts) == 0.0
    xe = EdgeVectorFunction.uniform(1, lambda x: x * np.exp(-x), lambda x: (1 - x) * np.exp(-x))
    pts1 = [EdgePoint(1, x) for x in np.linspace(0, 5, 20)]
    assert roundtrip_residual(xe, make_graph(1, 1.0), pts1) < 1e-9


@given(st.integers(1, 5), st.floats(0.1, 10.0),
       st.lists(st.floats(-2, 2), min_size=5, max_size=5),
       st.floats(0.3, 3.0))
def test_roundtrip_property(n, alpha, weights, rate):
    v = EdgeVectorFunction.scaled(weights[:n], lambda x: np.sin(2 * x + 0.3) * np.exp(-rate * x),
                                  lambda x: (2 * np.cos(2 * x + 0.3) - rate * np.sin(2 * x + 0.3))
                                  * np.exp(-rate * x), decay_rate=rate)
    pts = [EdgePoint(j, x) for j in range(1, n + 1) for x in (0.0, 0.4, 2.5)]
    assert roundtrip_residual(v, make_graph(n, alpha), pts) < 1e-10


@given(st.integers(1, 5), st.floats(0.1, 10.0), st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_vertex_conditions_when_v_vanishes_at_vertex(n, alpha, weights):
    v = EdgeVectorFunction.scaled(weights[:n], lambda x: x * np.exp(-x),
                                  lambda x: (1 - x) * np.exp(-x))
    continuity, flux = vertex_condition_defects(v, make_graph(n, alpha))
    assert continuity < 1e-8 and flux < 1e-8


def test_vertex_conditions_fail_when_v_nonzero_at_vertex():
    v = EdgeVectorFunction.scaled([1.0, -1.0], lambda x: np.exp(-x), lambda x: -np.exp(-x))
    continuity, _ = vertex_condition_defects(v, make_graph(2, 1.0))
    assert continuity > 0.1


def test_linearity():
    g = make_graph(3, 1.5)
    v = EdgeVectorFunction.scaled([1, 2, 3], lambda x: np.exp(-x), lambda x: -np.exp(-x))
    w = EdgeVectorFunction.scaled([0, -1, 1], lambda x: np.exp(-2 * x), lambda x: -2 * np.exp(-2 * x),
                                  decay_rate=2.0)
    combo = combine(2.0, v, -0.5, w)
    for j in (1, 2, 3):
        p = EdgePoint(j, 0.7)
        lhs = apply_T_inverse(combo, g, p)
        rhs = 2.0 * apply_T_inverse(v, g, p) - 0.5 * apply_T_inverse(w, g, p)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_inverse_derivative_matches_finite_difference():
    g = make_graph(2, 0.7)
    v = EdgeVectorFunction.scaled([1, -0.4], lambda x: np.cos(x) * np.exp(-x),
                                  lambda x: -(np.sin(x) + np.cos(x)) * np.exp(-x))
    x, h = 1.1, 1e-4
    for j in (1, 2):
        fd = (apply_T_inverse(v, g, EdgePoint(j, x + h)) - apply_T_inverse(v, g, EdgePoint(j, x - h))) / (2 * h)
        assert apply_T_inverse_derivative(v, g, EdgePoint(j, x)) == pytest.approx(fd, abs=1e-7)


def test_inverse_function_decay_certificate():
    u = inverse_function(exp_on(2), make_graph(2, 1.0))
    assert u.decay_rate == pytest.approx(0.5)
    # honest at large x: |u(x)| <= C e^{-rate x}
    vals = [abs(u.value_at(1, x)) * math.exp(u.decay_rate * x) for x in (5.0, 10.0, 20.0)]
    assert max(vals) < 10


def test_edge_count_mismatch():
    with pytest.raises(DomainError):
        apply_T_inverse(exp_on(2), make_graph(3, 1.0), EdgePoint(1, 0.0))
