import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vertexkernels.core import (ConditionKind, EdgePoint, Grid, TabulatedSweep,
                                make_dirichlet_graph, make_graph)
from vertexkernels.errors import DomainError


def test_make_graph_exner_seba():
    g = make_graph(3, 1.0)
    assert (g.n_edges, g.alpha, g.condition_kind) == (3, 1.0, ConditionKind.EXNER_SEBA)


def test_make_graph_kirchhoff():
    g = make_graph(2, 0.0)
    assert g.condition_kind is ConditionKind.KIRCHHOFF
    assert g.is_kirchhoff and not g.is_dirichlet


@pytest.mark.parametrize("n, alpha", [(1, -0.5), (0, 1.0), (2, math.inf), (2, math.nan), (1.5, 1.0)])
def test_make_graph_rejects(n, alpha):
    with pytest.raises(DomainError):
        make_graph(n, alpha)


@pytest.mark.parametrize("n", [1, 4])
def test_dirichlet_graph(n):
    g = make_dirichlet_graph(n)
    assert g.is_dirichlet and g.n_edges == n
    assert g.condition_kind is ConditionKind.DIRICHLET


def test_dirichlet_graph_rejects_zero_edges():
    with pytest.raises(DomainError):
        make_dirichlet_graph(0)


@given(st.integers(1, 50), st.floats(0.0, 1e6, allow_nan=False))
def test_config_roundtrip(n, alpha):
    g = make_graph(n, alpha)
    assert (g.n_edges, g.alpha) == (n, alpha)
    assert g.is_kirchhoff == (alpha == 0)
    assert g.damping == alpha / n


def test_config_is_immutable():
    g = make_graph(2, 1.0)
    with pytest.raises(Exception):
        g.alpha = 3.0


def test_edge_point_validation():
    g = make_graph(2, 1.0)
    EdgePoint(2, 0.0).validate_for(g)
    with pytest.raises(DomainError):
        EdgePoint(3, 1.0).validate_for(g)
    with pytest.raises(DomainError):
        EdgePoint(1, -0.1)
    with pytest.raises(DomainError):
        EdgePoint(0, 1.0)


def test_grid_parse_and_points():
    g = Grid.parse("0.1:5:100")
    pts = g.points
    assert len(pts) == 100 and pts[0] == 0.1 and pts[-1] == 5.0
    assert np.all(np.diff(pts) > 0)
    assert g.spacing == pytest.approx(4.9 / 99)


@pytest.mark.parametrize("text", ["1:1:5", "2:1:5", "0:1:1", "0:1", "a:b:c", "0:inf:3"])
def test_grid_rejects(text):
    with pytest.raises(DomainError):
        Grid.parse(text)


def test_tabulated_sweep():
    s = TabulatedSweep.from_columns(["a", "b"], [[1, 2], [3, 4]], {"w": 0.5})
    assert s.rows == ((1.0, 3.0), (2.0, 4.0))
    assert list(s.column("b")) == [3.0, 4.0]
    assert s.metadata == {"w": 0.5}
    with pytest.raises(DomainError):
        TabulatedSweep(("a", "b"), ((1.0,),))
