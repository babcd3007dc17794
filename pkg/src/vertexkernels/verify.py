"""Cross-route identity suite.

Every check compares a closed form against a route that shares none of its
formulas (quadrature, a scattering basis, a finite-difference evolution)
and reports the worst discrepancy against a fixed tolerance and a runtime
budget.  ``run_suite("quick")`` runs the checks that take seconds;
``run_suite("full")`` adds the vacuum, Laplace and wave checks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .bondurant import EdgeVectorFunction, roundtrip_residual, vertex_condition_defects
from .core import EdgePoint, Grid, make_dirichlet_graph, make_graph
from .kernels import ProblemKind, star_kernel
from .spectral import (INV_PI, global_density_regular, local_spectral_density,
                       scattering_reconstruction, spectral_projection_kernel,
                       staircase_increment)
from .specialfn import (EULER_GAMMA, erfc_real, expint_ei, expint_ei_complex,
                        integrate_adaptive, integrate_damped_tail)
from .vacuum import (energy_density_closed, energy_density_far, energy_density_from_density,
                     energy_density_near, energy_density_numeric)
from .wavesolve import InitialData, exact_snapshot, fd_convergence_study, robin_energy

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    runtime: float
    budget: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} {self.detail}  ({self.runtime:.2f}s / {self.budget:g}s)"


def _relative(a, b, floor=0.0):
    scale = abs(b)
    return abs(a - b) / scale if scale > floor else abs(a - b)


# ---------------------------------------------------------------------------
# individual checks; each returns (passed, detail)
# ---------------------------------------------------------------------------

def check_scattering():
    worst = 0.0
    xs = np.linspace(0.0, 5.0, 6)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    for n in (1, 2, 3, 5):
        for alpha in (0.0, 0.5, 2.0):
            g = make_graph(n, alpha)
            pairs = [(1, 1)] + ([(1, 2)] if n > 1 else [])
            for omega in np.linspace(0.1, 5.0, 10):
                for j, jp in pairs:
                    rec = scattering_reconstruction(g, omega, j, jp, X, Y)
                    ref = spectral_projection_kernel(g, omega, j, jp, X, Y)
                    worst = max(worst, float(np.max(np.abs(rec - ref))))
    return worst < 1e-12, f"max |scattering - sigma| = {worst:.2e} (tol 1e-12)"


def _bondurant_test_functions(n):
    weights = [1.0 + 0.5 * k for k in range(n)]
    return [
        EdgeVectorFunction.scaled(weights, lambda x: x * np.exp(-x),
                                  lambda x: (1.0 - x) * np.exp(-x), decay_rate=1.0),
        EdgeVectorFunction.scaled(weights[::-1], lambda x: x * x * np.exp(-2.0 * x),
                                  lambda x: (2.0 * x - 2.0 * x * x) * np.exp(-2.0 * x),
                                  decay_rate=2.0),
        EdgeVectorFunction.scaled([(-1.0) ** k for k in range(n)],
                                  lambda x: np.sin(x) * np.exp(-x),
                                  lambda x: (np.cos(x) - np.sin(x)) * np.exp(-x),
                                  decay_rate=1.0),
    ]


def check_bondurant():
    worst = 0.0
    for n in (1, 2, 3):
        for alpha in (0.5, 2.0):
            g = make_graph(n, alpha)
            points = [EdgePoint(j, x) for j in range(1, n + 1) for x in (0.0, 0.7, 3.0)]
            for v in _bondurant_test_functions(n):
                worst = max(worst, roundtrip_residual(v, g, points))
                worst = max(worst, *vertex_condition_defects(v, g))
    return worst < 1e-8, f"max round-trip / vertex defect = {worst:.2e} (tol 1e-8)"


def check_cylinder_quadrature():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 6))
        alpha = float(rng.uniform(0.0, 4.0))
        t, x, y = (float(v) for v in rng.uniform(0.05, 3.0, size=3))
        j, l = (int(v) for v in rng.integers(1, n + 1, size=2))
        g = make_graph(n, alpha)
        closed = star_kernel(ProblemKind.CYLINDER, g, t, j, l, x, y, method="closed")
        quad = star_kernel(ProblemKind.CYLINDER, g, t, j, l, x, y, method="quadrature")
        worst = max(worst, abs(closed - quad))
    return worst < 1e-8, f"max |closed - quadrature| = {worst:.2e} (tol 1e-8)"


def _density_integrand(g, x, weight):
    def f(omega):
        omega = np.asarray(omega, dtype=float)
        safe = np.where(omega > 0, omega, 1e-300)
        return weight(omega) * local_spectral_density(g, safe, 1, x)
    return f


def check_laplace():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    samples = [(int(rng.integers(1, 6)), float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.1, 3.0)))
               for _ in range(10)]
    for t in (0.1, 1.0):
        for n, alpha, x in samples:
            g = make_graph(n, alpha)
            heat = star_kernel(ProblemKind.HEAT, g, t, 1, 1, x, x)
            cut = math.sqrt(40.0 / t)
            panels = max(1, int(2.0 * x * cut / math.pi))
            heat_q = integrate_adaptive(_density_integrand(g, x, lambda w: np.exp(-t * w * w)),
                                        0.0, cut, 1e-10, initial_panels=panels).value
            cyl = star_kernel(ProblemKind.CYLINDER, g, t, 1, 1, x, x)
            cyl_q = integrate_damped_tail(_density_integrand(g, x, lambda w: np.exp(-t * w)),
                                          0.0, t, 1e-9, bound=2.0 * INV_PI).value
            worst = max(worst, abs(heat - heat_q), abs(cyl - cyl_q))
    return worst < 1e-6, f"max |kernel - Laplace integral| = {worst:.2e} (tol 1e-6)"


def check_vacuum():
    worst_num, worst_den = 0.0, 0.0
    for n in (1, 2, 3, 5):
        for alpha in (0.0, 0.5, 1.0, 4.0):
            g = make_graph(n, alpha)
            for x in (0.2, 1.0, 5.0):
                exact = energy_density_closed(g, x)
                worst_num = max(worst_num, _relative(energy_density_numeric(g, 1, x), exact, 1e-8))
                worst_den = max(worst_den,
                                _relative(energy_density_from_density(g, 1, x), exact, 1e-8))
    ok = worst_num < 1e-5 and worst_den < 1e-4
    return ok, (f"small-t extraction {worst_num:.2e} (tol 1e-5), "
                f"subtracted density {worst_den:.2e} (tol 1e-4)")


def check_limits():
    omegas = np.linspace(0.05, 10.0, 60)
    xs = np.linspace(0.0, 5.0, 11)
    W, X = np.meshgrid(omegas, xs, indexing="ij")
    strong = local_spectral_density(make_graph(3, 1e6), W, 1, X)
    dirichlet = INV_PI * (1.0 - np.cos(2.0 * W * X))
    err_strong = float(np.max(np.abs(strong - dirichlet)))
    also = float(np.max(np.abs(local_spectral_density(make_dirichlet_graph(3), W, 1, X) - dirichlet)))
    g = make_graph(2, 0.0)
    flat = np.max(np.abs(local_spectral_density(g, W, 1, X) - INV_PI))
    stair = max(abs(staircase_increment(g, w)) for w in (0.0, *omegas))
    t00 = max(abs(energy_density_closed(g, x)) for x in xs[1:])
    exact = flat == 0.0 and stair == 0.0 and t00 == 0.0
    ok = err_strong < 1e-4 and also == 0.0 and exact
    return ok, (f"alpha=1e6 vs Dirichlet {err_strong:.2e} (tol 1e-4); "
                f"N=2 Kirchhoff residuals {flat:.1e}/{stair:.1e}/{t00:.1e} (must be 0)")


def check_asymptotics():
    worst_near, worst_far = 0.0, 0.0
    for n in (1, 2, 3, 5):
        for alpha in (0.5, 1.0, 4.0):
            g = make_graph(n, alpha)
            x_near = 1e-3 * n / alpha
            worst_near = max(worst_near, _relative(energy_density_near(g, x_near),
                                                   energy_density_closed(g, x_near)))
            x_far = 100.0 / alpha
            worst_far = max(worst_far, _relative(energy_density_far(g, x_far),
                                                 energy_density_closed(g, x_far)))
    ok = worst_near < 0.01 and worst_far < 0.02
    return ok, f"near form {worst_near:.2e} (tol 1e-2), far form {worst_far:.2e} (tol 2e-2)"


def check_wave():
    orders = []
    for g, amps in ((make_graph(1, 1.0), [1.0]), (make_graph(3, 1.5), [1.0, -0.5, 0.3]),
                    (make_dirichlet_graph(2), [1.0, 0.5])):
        data = InitialData.bump(g.n_edges, 3.0, 1.5, amps)
        orders.extend(fd_convergence_study(g, data, 4.0, 10.0).orders)
    g1 = make_graph(1, 1.0)
    data1 = InitialData.bump(1, 2.0, 0.5)
    grid = Grid(0.0, 13.0, 2 ** 14 + 1)
    energies = [robin_energy(g1, exact_snapshot(g1, data1, t, grid), support_width=1.0)
                for t in np.linspace(0.0, 10.0, 41)]
    drift = (max(energies) - min(energies)) / abs(energies[0])
    ok = min(orders) >= 1.9 and drift < 1e-8
    return ok, f"min FD order {min(orders):.3f} (>= 1.9), energy drift {drift:.2e} (tol 1e-8)"


def _ei_oracle(x):
    if x > 0:
        # all terms positive: the series is accurate for any moderate x
        terms, term, k = [], 1.0, 1
        while True:
            term *= x / k
            terms.append(term / k)
            if term / k < 1e-18 * sum(terms):
                break
            k += 1
        return EULER_GAMMA + math.log(x) + math.fsum(terms)
    y = -x
    # E1(y) = e^{-y} int_0^inf e^{-u} / (u + y) du
    val = integrate_damped_tail(lambda u: np.exp(-u) / (u + y), 0.0, 1.0, 1e-16,
                                bound=1.0 / y, rel_tol=2e-14).value
    return -math.exp(-y) * val


def _ei_complex_oracle(z):
    w = -z
    f = lambda u: np.exp(-u) / (u + w)
    scale = 1.0 + abs(w)
    val = integrate_damped_tail(f, 0.0, 1.0, 1e-13 / scale, bound=1.0 / abs(w.imag or w.real),
                                rel_tol=1e-13).value
    return -np.exp(-w) * val


def _erfc_oracle(x):
    # e^{x^2} erfc(x) = (2/sqrt(pi)) int_0^inf exp(-u^2 - 2 x u) du, x >= 0
    ax = abs(x)
    # exp(-u^2 - 2 x u) <= e^{1/4} exp(-(2x + 1) u)
    val = integrate_damped_tail(lambda u: np.exp(-u * u - 2.0 * ax * u), 0.0, 2.0 * ax + 1.0,
                                5e-14 / (1.0 + 2.0 * ax), bound=math.exp(0.25)).value
    upper = 2.0 / math.sqrt(math.pi) * math.exp(-ax * ax) * val
    return upper if x >= 0 else 2.0 - upper


def check_special_functions():
    mags = np.logspace(-2, math.log10(40.0), 200)
    worst_ei = 0.0
    for k, m in enumerate(mags):
        x = float(m if k % 2 else -m)
        worst_ei = max(worst_ei, _relative(expint_ei(x), _ei_oracle(x)))
    worst_c = 0.0
    angles = np.linspace(-0.75 * math.pi, 0.75 * math.pi, 7)
    for k, m in enumerate(np.logspace(-1, math.log10(30.0), 200)):
        w = m * complex(math.cos(angles[k % 7]), math.sin(angles[k % 7]))
        if abs(w.imag) < 1e-3:
            w += 0.1j * m
        z = -w
        worst_c = max(worst_c, abs(expint_ei_complex(z) - _ei_complex_oracle(z)) / abs(_ei_complex_oracle(z)))
    worst_erfc = 0.0
    for k, m in enumerate(np.logspace(-3, math.log10(25.0), 200)):
        x = float(m if k % 3 else -m)
        worst_erfc = max(worst_erfc, _relative(erfc_real(x), _erfc_oracle(x)))
    ok = worst_ei < 1e-12 and worst_c < 1e-10 and worst_erfc < 1e-13
    return ok, (f"Ei {worst_ei:.1e} (1e-12), complex Ei {worst_c:.1e} (1e-10), "
                f"erfc {worst_erfc:.1e} (1e-13)")


def check_staircase():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 6))
        alpha = float(rng.uniform(0.05, 5.0))
        w1, w2 = sorted(float(v) for v in rng.uniform(0.01, 10.0, size=2))
        g = make_graph(n, alpha)
        diff = staircase_increment(g, w2) - staircase_increment(g, w1)
        integral = integrate_adaptive(global_density_regular(g).regular_at, w1, w2, 1e-13).value
        worst = max(worst, abs(diff - integral))
    return worst < 1e-8, f"max |Delta N difference - integral| = {worst:.2e} (tol 1e-8)"


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable
    budget: float
    quick: bool


CHECKS: List[Check] = [
    Check("1 scattering agreement", check_scattering, 1.0, True),
    Check("2 Bondurant round trip", check_bondurant, 5.0, True),
    Check("3 cylinder vs quadrature", check_cylinder_quadrature, 10.0, True),
    Check("4 Laplace identities", check_laplace, 30.0, False),
    Check("5 vacuum three routes", check_vacuum, 60.0, False),
    Check("6 limits", check_limits, 1.0, True),
    Check("7 asymptotics", check_asymptotics, 1.0, True),
    Check("8 wave oracle", check_wave, 60.0, False),
    Check("9 special functions", check_special_functions, 5.0, True),
    Check("10 staircase vs density", check_staircase, 2.0, True),
]


def run_check(check: Check) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = check.run()
    except ArithmeticError as exc:
        ok, detail = False, f"numerical failure: {exc}"
    elapsed = time.perf_counter() - start
    if elapsed > check.budget:
        ok = False
        detail += " [over time budget]"
    return CheckResult(check.name, ok, detail, elapsed, check.budget)


def run_suite(tier: str = "quick") -> List[CheckResult]:
    if tier not in ("quick", "full"):
        raise ValueError("tier must be 'quick' or 'full'")
    return [run_check(c) for c in CHECKS if tier == "full" or c.quick]
