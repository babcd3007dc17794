import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vertexkernels.bondurant import EdgeVectorFunction
from vertexkernels.core import make_dirichlet_graph, make_graph
from vertexkernels.errors import ContractError, DomainError
from vertexkernels.kernels import (KernelRow, ProblemKind, apply_kernel, cylinder_kernel,
                                   free_kernel, heat_kernel, quantum_kernel, star_kernel,
                                   wave_kernel_row, wave_kernel_slice)
from vertexkernels.specialfn import integrate_adaptive, integrate_damped_tail
from vertexkernels.spectral import global_density_regular, spectral_projection_kernel
from vertexkernels.wavesolve import InitialData, evolve_exact
from vertexkernels.core import EdgePoint

HEAT, CYL, QUANT = ProblemKind.HEAT, ProblemKind.CYLINDER, ProblemKind.QUANTUM

graphs = st.builds(make_graph, st.integers(1, 5), st.floats(0.0, 5.0))
coords = st.floats(0.0, 3.0)
times = st.floats(0.05, 3.0)


# ------------------------------------------------------------------ free kernels

def test_free_kernel_values():
    assert free_kernel(CYL, 1.0, 0.0) == pytest.approx(1 / math.pi)
    assert free_kernel(HEAT, 1.0, 0.0) == pytest.approx((4 * math.pi) ** -0.5)
    q = free_kernel(QUANT, 1.0, 0.0)
    assert q == pytest.approx(1 / np.sqrt(4j * math.pi))


@pytest.mark.parametrize("t", [0.1, 1.0])
def test_heat_normalisation(t):
    total = integrate_adaptive(lambda z: free_kernel(HEAT, t, z), -40, 40, 1e-13, initial_panels=8).value
    assert abs(total - 1) < 1e-10


def test_free_kernel_errors():
    with pytest.raises(DomainError):
        free_kernel(HEAT, 0.0, 1.0)
    with pytest.raises(ContractError):
        free_kernel(ProblemKind.WAVE, 1.0, 1.0)


# ------------------------------------------------------------------ star kernels

@given(st.integers(1, 5), times, coords, coords, st.integers(1, 5), st.integers(1, 5))
def test_kirchhoff_has_no_vertex_term(n, t, x, y, j, l):
    j, l = min(j, n), min(l, n)
    g = make_graph(n, 0.0)
    d = 1.0 if j == l else 0.0
    for kind in (HEAT, CYL):
        expect = d * free_kernel(kind, t, abs(x - y)) + (2 / n - d) * free_kernel(kind, t, x + y)
        assert star_kernel(kind, g, t, j, l, x, y) == pytest.approx(expect, rel=1e-15, abs=1e-300)


@given(graphs, times, coords, coords, st.integers(1, 5), st.integers(1, 5))
def test_symmetry(g, t, x, y, j, l):
    j, l = min(j, g.n_edges), min(l, g.n_edges)
    for kind in (HEAT, CYL, QUANT):
        a = star_kernel(kind, g, t, j, l, x, y)
        b = star_kernel(kind, g, t, l, j, y, x)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_heat_closed_vs_quadrature():
    g = make_graph(1, 1.0)
    a = star_kernel(HEAT, g, 0.5, 1, 1, 0.3, 0.7, method="closed")
    b = star_kernel(HEAT, g, 0.5, 1, 1, 0.3, 0.7, method="quadrature")
    assert abs(a - b) < 1e-9


@given(graphs, times, coords, coords)
def test_heat_and_cylinder_routes_agree(g, t, x, y):
    for kind in (HEAT, CYL):
        a = star_kernel(kind, g, t, 1, 1, x, y, method="closed")
        b = star_kernel(kind, g, t, 1, 1, x, y, method="quadrature")
        assert abs(a - b) < 1e-9


@given(st.builds(make_graph, st.integers(1, 5), st.floats(0.01, 5.0)), st.floats(0.1, 3.0), coords, coords)
def test_quantum_contour_vs_continued_erfc(g, t, x, y):
    a = star_kernel(QUANT, g, t, 1, 1, x, y, method="contour")
    b = star_kernel(QUANT, g, t, 1, 1, x, y, method="closed")
    assert abs(a - b) < 1e-6


@given(st.integers(1, 3), st.floats(0.5, 3.0), st.floats(0.3, 2.0), coords, coords)
def test_quantum_contour_vs_real_axis(n, ratio, t, x, y):
    # the real-axis route is only practical when alpha/N is not small
    g = make_graph(n, n * ratio)
    a = star_kernel(QUANT, g, t, 1, 1, x, y, method="contour")
    b = star_kernel(QUANT, g, t, 1, 1, x, y, method="quadrature")
    assert abs(a - b) < 1e-6


def test_quantum_real_axis_refuses_weak_damping():
    with pytest.raises(DomainError):
        star_kernel(QUANT, make_graph(1, 0.01), 1.0, 1, 1, 0.0, 0.0, method="quadrature")


def test_cylinder_reference_point():
    g = make_graph(3, 2.0)
    closed = cylinder_kernel(g, 0.4, 1, 1, 0.5, 1.0)
    quad = star_kernel(CYL, g, 0.4, 1, 1, 0.5, 1.0, method="quadrature")
    assert abs(closed - quad) < 1e-8
    assert closed == pytest.approx(0.2783060095285439, rel=1e-12)


def test_cylinder_vacuous_vertex():
    g = make_graph(2, 0.0)
    t, x = 0.7, 1.3
    assert cylinder_kernel(g, t, 1, 1, x, x) == pytest.approx(1 / (math.pi * t), rel=1e-15)


def test_cylinder_alpha_zero_first_two_terms():
    g = make_graph(3, 0.0)
    t, x, y = 0.5, 0.2, 0.9
    expect = (t / math.pi) / (t * t + (x - y) ** 2) + (2 / 3 - 1) * (t / math.pi) / (t * t + (x + y) ** 2)
    assert cylinder_kernel(g, t, 2, 2, x, y) == pytest.approx(expect, rel=1e-15)


def one_sided_derivative(f, h):
    # fifth-order accurate one-sided first derivative at 0
    return (-25 * f(0) + 48 * f(h) - 36 * f(2 * h) + 16 * f(3 * h) - 3 * f(4 * h)) / (12 * h)


@pytest.mark.parametrize("kind", [HEAT, CYL])
@pytest.mark.parametrize("n, alpha", [(1, 1.0), (3, 0.5), (4, 2.0), (2, 0.0)])
def test_vertex_conditions(kind, n, alpha):
    g = make_graph(n, alpha)
    t, l, y = 0.6, 1, 0.8
    values = [star_kernel(kind, g, t, j, l, 0.0, y) for j in range(1, n + 1)]
    assert max(values) - min(values) < 1e-14
    flux = sum(one_sided_derivative(lambda x, j=j: star_kernel(kind, g, t, j, l, x, y), 1e-3)
               for j in range(1, n + 1))
    assert abs(flux - alpha * values[0]) < 1e-6


def test_heat_semigroup():
    g = make_graph(3, 1.2)
    t1, t2, x, y = 0.3, 0.5, 0.4, 0.9
    total = 0.0
    for m in range(1, 4):
        f = lambda s, m=m: np.array([heat_kernel(g, t1, 1, m, x, si) * heat_kernel(g, t2, m, 2, si, y)
                                     for si in np.atleast_1d(s)])
        total += integrate_adaptive(f, 0.0, 12.0, 1e-11, initial_panels=6).value
    assert abs(total - heat_kernel(g, t1 + t2, 1, 2, x, y)) < 1e-6


@pytest.mark.parametrize("kind", [HEAT, CYL])
def test_large_alpha_approaches_dirichlet(kind):
    strong, dirichlet = make_graph(3, 1e6), make_dirichlet_graph(3)
    for x, y in [(0.05, 0.05), (0.3, 1.0), (2.0, 0.5)]:
        for j, l in [(1, 1), (1, 2)]:
            a = star_kernel(kind, strong, 0.5, j, l, x, y)
            b = star_kernel(kind, dirichlet, 0.5, j, l, x, y)
            assert abs(a - b) < 1e-4


@pytest.mark.parametrize("n, alpha, x, y", [(1, 1.0, 0.5, 0.5), (3, 0.5, 0.3, 1.2), (2, 4.0, 1.0, 1.0)])
def test_cylinder_is_laplace_transform_of_sigma(n, alpha, x, y):
    g = make_graph(n, alpha)
    t = 0.4

    def integrand(w):
        w = np.asarray(w, dtype=float)
        safe = np.where(w > 0, w, 1e-300)
        return np.exp(-w * t) * spectral_projection_kernel(g, safe, 1, 2 if n > 1 else 1, x, y)

    lap = integrate_damped_tail(integrand, 0.0, t, 1e-10, bound=4 / math.pi).value
    assert abs(lap - cylinder_kernel(g, t, 1, 2 if n > 1 else 1, x, y)) < 1e-6


def test_kernel_errors():
    g = make_graph(2, 1.0)
    with pytest.raises(DomainError):
        heat_kernel(g, -1.0, 1, 1, 0.1, 0.1)
    with pytest.raises(DomainError):
        heat_kernel(g, 1.0, 3, 1, 0.1, 0.1)
    with pytest.raises(ContractError):
        star_kernel(ProblemKind.WAVE, g, 1.0, 1, 1, 0.1, 0.1)
    with pytest.raises(ContractError):
        star_kernel(HEAT, g, 1.0, 1, 1, 0.1, 0.1, method="contour")


def test_dirichlet_kernel():
    g = make_dirichlet_graph(2)
    assert heat_kernel(g, 1.0, 1, 1, 0.0, 0.7) == 0.0
    assert heat_kernel(g, 1.0, 1, 2, 0.3, 0.7) == 0.0


# ------------------------------------------------------------------ application

def test_heat_recovers_initial_data():
    g = make_graph(2, 1.0)
    f = EdgeVectorFunction.scaled([1.0, 0.5], lambda y: np.exp(-(y - 2) ** 2), decay_rate=1.0)
    got = apply_kernel(KernelRow(HEAT, g, 1e-6, 1, 2.3), f)
    assert abs(got - math.exp(-0.09)) < 1e-4


def test_wave_slice_structure_before_vertex():
    sl = wave_kernel_slice(make_graph(3, 1.0), 0.5, 1, 1, 2.0)
    assert [(d.y_location, d.weight) for d in sl.dirac_terms] == [(1.5, 0.5), (2.5, 0.5)]
    assert sl.tail is None


def test_wave_slice_vacuous_vertex():
    g = make_graph(2, 0.0)
    same = wave_kernel_slice(g, 3.0, 1, 1, 1.0)
    other = wave_kernel_slice(g, 3.0, 1, 2, 1.0)
    assert [d.weight for d in same.dirac_terms if d.y_location == 2.0] == [0.0]
    assert [d.weight for d in other.dirac_terms if d.y_location == 2.0] == [0.5]
    assert same.tail is None


def test_wave_slice_tail():
    g = make_graph(2, 3.0)
    sl = wave_kernel_slice(g, 2.0, 1, 2, 0.5)
    assert sl.tail.upper == 1.5 and sl.tail.amplitude == -0.75 and sl.tail.rate == 1.5
    assert sl.tail(1.5) == pytest.approx(-0.75)


def test_wave_slice_dalembert_region():
    g = make_graph(2, 1.0)
    value, d1, _ = __import__("vertexkernels.wavesolve", fromlist=["smooth_bump"]).smooth_bump(2.5, 0.5)
    f = EdgeVectorFunction.scaled([1.0, 1.0], value, d1, support=(2.0, 3.0))
    got = apply_kernel(wave_kernel_row(g, 1.0, 1, 0.5), f)
    assert got == pytest.approx(0.5 * (0.0 + float(value(1.5))), abs=1e-15)


def test_robin_case_matches_half_line_formula():
    # N = 1: u = [f(x-t) + f(x+t) + f(t-x)]/2 - alpha int_0^{t-x} e^{-alpha e} f(t-x-e) de
    alpha = 1.0
    g = make_graph(1, alpha)
    f = lambda y: np.where(y >= 0, np.exp(-(y - 2.0) ** 2 * 4), 0.0)
    fn = EdgeVectorFunction.uniform(1, f, decay_rate=1.0)
    t, x = 3.0, 0.4
    s = t - x
    expect = 0.5 * (f(x - t) + f(x + t) + f(s)) - alpha * integrate_adaptive(
        lambda e: np.exp(-alpha * e) * f(s - e), 0, s, 1e-13).value
    assert apply_kernel(wave_kernel_row(g, t, 1, x), fn) == pytest.approx(float(expect), abs=1e-11)


@given(st.integers(1, 4), st.floats(0.0, 4.0), st.floats(0.1, 6.0), st.floats(0.0, 4.0))
def test_wave_kernel_equals_exact_evolution(n, alpha, t, x):
    g = make_graph(n, alpha)
    data = InitialData.bump(n, 2.0, 0.7, [1.0, -0.3, 0.5, 2.0][:n])
    for j in range(1, n + 1):
        a = apply_kernel(wave_kernel_row(g, t, j, x), data.f)
        b = evolve_exact(g, data, t, EdgePoint(j, x))
        assert abs(a - b) < 1e-9


@pytest.mark.parametrize("n, alpha", [(1, 1.0), (2, 0.0), (3, 0.5), (5, 2.0)])
@pytest.mark.parametrize("t", [0.1, 1.0])
def test_heat_trace_matches_staircase(n, alpha, t):
    # sum_j int_0^inf [G^{jj}(t, x, x) - G_free(t, 0)] dx = int e^{-t omega^2} dDeltaN(omega)
    g = make_graph(n, alpha)
    free = free_kernel(ProblemKind.HEAT, t, 0.0)

    def excess(x):
        return np.array([star_kernel(ProblemKind.HEAT, g, t, 1, 1, v, v) - free
                         for v in np.atleast_1d(x)])

    trace = n * integrate_damped_tail(excess, 0.0, 1.0 / t, 1e-12, bound=1.0).value
    dens = global_density_regular(g)
    cut = math.sqrt(40.0 / t)
    spectral = dens.delta_weight_at_zero + integrate_adaptive(
        lambda w: np.exp(-t * w * w) * dens.regular_at(w), 0.0, cut, 1e-12).value
    assert trace == pytest.approx(spectral, abs=1e-9)
