import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import ParameterGrid
from sklearn.pipeline import make_pipeline

from vertexkernels.core import make_graph
from vertexkernels.errors import DomainError
from vertexkernels.estimators import (CylinderKernel, HeatKernel, LocalSpectralDensity,
                                      VacuumEnergyDensity)
from vertexkernels.kernels import cylinder_kernel, heat_kernel
from vertexkernels.spectral import local_spectral_density
from vertexkernels.vacuum import energy_density_closed


def test_params_and_clone():
    est = VacuumEnergyDensity(n_edges=3, alpha=1.5, route="small-t")
    params = est.get_params()
    assert params == {"n_edges": 3, "alpha": 1.5, "dirichlet": False, "edge": 1, "route": "small-t"}
    twin = clone(est)
    assert twin is not est and twin.get_params() == params
    est.set_params(alpha=2.0)
    assert est.alpha == 2.0


def test_local_density_transform():
    X = np.array([[1.0, 0.5], [2.0, 1.5], [0.3, 0.0]])
    out = LocalSpectralDensity(n_edges=2, alpha=1.0).fit(X).transform(X)
    assert out.shape == (3, 1)
    expect = local_spectral_density(make_graph(2, 1.0), X[:, 0], 1, X[:, 1])
    assert np.array_equal(out[:, 0], expect)


def test_energy_density_predict():
    X = np.array([[0.2], [1.0], [5.0]])
    est = VacuumEnergyDensity(n_edges=3, alpha=0.5).fit()
    got = est.predict(X)
    assert got.shape == (3,)
    assert np.allclose(got, [energy_density_closed(make_graph(3, 0.5), x) for x in X[:, 0]], rtol=1e-15)


def test_kernel_transforms():
    X = np.array([[0.5, 1.0, 2.0], [1.0, 0.2, 0.2]])
    g = make_graph(2, 0.7)
    heat = HeatKernel(n_edges=2, alpha=0.7, edge=2).fit_transform(X)
    cyl = CylinderKernel(n_edges=2, alpha=0.7).fit_transform(X)
    assert heat[:, 0] == pytest.approx([heat_kernel(g, t, 2, 2, x, y) for t, x, y in X])
    assert cyl[:, 0] == pytest.approx([cylinder_kernel(g, t, 1, 1, x, y) for t, x, y in X])


def test_dirichlet_flag():
    X = np.array([[2.0]])
    assert VacuumEnergyDensity(n_edges=3, dirichlet=True).fit().predict(X)[0] == 1 / (32 * np.pi)


def test_validation():
    with pytest.raises(NotFittedError):
        LocalSpectralDensity().transform([[1.0, 1.0]])
    with pytest.raises(ValueError):
        LocalSpectralDensity().fit().transform([[1.0, 1.0, 1.0]])
    with pytest.raises(ValueError):
        LocalSpectralDensity().fit().transform([[np.nan, 1.0]])
    with pytest.raises(DomainError):
        LocalSpectralDensity(n_edges=2, alpha=-1.0).fit()
    with pytest.raises(DomainError):
        LocalSpectralDensity(n_edges=2, edge=3).fit()


def test_parameter_grid_and_pipeline():
    X = np.array([[1.0]])
    values = {(p["n_edges"], p["alpha"]): VacuumEnergyDensity(**p).fit().predict(X)[0]
              for p in ParameterGrid({"n_edges": [1, 2], "alpha": [0.0, 1.0]})}
    assert len(values) == 4 and values[2, 0.0] == 0.0
    pipe = make_pipeline(VacuumEnergyDensity(n_edges=1, alpha=1.0))
    assert pipe.fit(X).transform(X).shape == (1, 1)
