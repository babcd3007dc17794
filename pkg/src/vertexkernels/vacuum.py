"""Vacuum energy density ``T00(x)`` near the vertex.

``T00(x)`` is minus one half of the coefficient of ``t`` in the small-``t``
expansion of the cylinder kernel diagonal ``G_S^{jj}(t, x, x)``.  Three
independent routes are provided:

* ``energy_density_closed``: the exact formula in terms of ``Ei``;
* ``energy_density_numeric``: the definition itself, extracting the linear
  coefficient of the closed-form cylinder diagonal by Richardson
  extrapolation after removing the free ``1/(pi t)`` singularity;
* ``energy_density_from_density``: ``(1/2) int omega e^{-omega t}
  [sigma(omega,x,x) - 1/pi] d omega`` by quadrature, extrapolated to ``t = 0``.

No total energy is computed: the ``x^-2`` singularity at the vertex is not
integrable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import StarGraphConfig
from .errors import DomainError
from .kernels import cylinder_kernel
from .spectral import INV_PI, local_spectral_density
from .specialfn import (_check_contracting, expint_e1_scaled, extract_linear_coefficient,
                        integrate_damped_tail, richardson_table)

# ratio-2 ladders, as fractions of the geometric scale
EXTRACTION_FRACTIONS = tuple(0.1 / 2 ** k for k in range(6))
DENSITY_FRACTIONS = (0.05, 0.025, 0.0125, 0.00625)
DENSITY_TOL = 1e-10


class Route(enum.Enum):
    CLOSED_FORM = "closed-form"
    SMALL_T_EXTRACTION = "small-t-extraction"
    SUBTRACTED_DENSITY = "subtracted-density"


@dataclass(frozen=True)
class EnergyDensityValue:
    value: float
    route: Route

    def __float__(self):
        return self.value


def _check_x(x):
    if not x > 0:
        raise DomainError(f"T00 is singular at the vertex; need x > 0, got {x!r}")


def energy_density_closed(graph: StarGraphConfig, x: float) -> float:
    """Exact ``T00(x)``.

    ``(1 - 2/N)/(8 pi x^2) + alpha/(2 pi N^2 x) + alpha^2/(pi N^3) e^{2 alpha x/N} Ei(-2 alpha x/N)``,
    and ``1/(8 pi x^2)`` for a Dirichlet vertex.
    """
    _check_x(x)
    if graph.is_dirichlet:
        return 1.0 / (8.0 * math.pi * x * x)
    n, a = graph.n_edges, graph.alpha
    value = (1.0 - 2.0 / n) / (8.0 * math.pi * x * x)
    if a > 0:
        value += a / (2.0 * math.pi * n * n * x)
        w = 2.0 * a * x / n
        if w > 0:
            # e^w Ei(-w) = -e^w E1(w); for underflowed w the a^2 term is below double precision
            value -= a * a / (math.pi * n ** 3) * expint_e1_scaled(w)
    return value


def energy_density_near(graph: StarGraphConfig, x: float) -> float:
    """Short-distance form, valid for ``alpha x / N << 1``.

    Keeps the Kirchhoff ``x^-2`` term, the ``x^-1`` term and the logarithm;
    the constant ``alpha^2 (gamma + ln(2/N)) / (pi N^3)`` and higher orders
    are dropped.
    """
    _check_x(x)
    if graph.is_dirichlet:
        raise DomainError("no short-distance expansion for a Dirichlet vertex")
    n, a = graph.n_edges, graph.alpha
    value = (1.0 - 2.0 / n) / (8.0 * math.pi * x * x)
    if a > 0:
        value += a / (2.0 * math.pi * n * n * x)
        if a * x > 0:
            value += a * a / (math.pi * n ** 3) * math.log(a * x)
    return value


def energy_density_far(graph: StarGraphConfig, x: float) -> float:
    """Large-distance form ``1/(8 pi x^2)``, the Dirichlet value."""
    _check_x(x)
    return 1.0 / (8.0 * math.pi * x * x)


def default_t_ladder(graph: StarGraphConfig, x: float):
    """Damping values below every geometric scale of the diagonal.

    The cylinder diagonal is analytic in ``t`` within radius ``2x``
    whatever ``alpha`` is, so the ladder scales with ``min(1, x)``.
    """
    scale = min(1.0, x)
    return tuple(f * scale for f in EXTRACTION_FRACTIONS)


def _cylinder_remainder(graph, j, x):
    def g(t):
        return cylinder_kernel(graph, t, j, j, x, x) - 1.0 / (math.pi * t)
    return g


def energy_density_numeric(graph: StarGraphConfig, j: int, x: float,
                           t_ladder: Optional[Sequence[float]] = None) -> float:
    """``T00`` from its definition: ``-1/2`` times the ``t``-coefficient of the cylinder diagonal.

    ``t_ladder`` must be a ratio-2 geometric sequence; its smallest and
    largest entries bound the sample points.
    """
    _check_x(x)
    graph.check_edge(j)
    ladder = sorted(t_ladder or default_t_ladder(graph, x))
    levels = len(ladder) - 1
    c1 = extract_linear_coefficient(_cylinder_remainder(graph, j, x), ladder[0], ladder[-1],
                                    levels=levels)
    return -0.5 * c1


def _subtracted_density_bound(graph):
    if graph.is_dirichlet:
        return INV_PI
    n = graph.n_edges
    extra = 3.0 / n if graph.alpha > 0 else 0.0
    return INV_PI * (abs(2.0 / n - 1.0) + extra)


def damped_energy_integral(graph: StarGraphConfig, j: int, x: float, t: float,
                           tol: float = DENSITY_TOL) -> float:
    """``(1/2) int_0^inf omega e^{-omega t} [sigma^{jj}(omega,x,x) - 1/pi] d omega``."""
    _check_x(x)
    if not t > 0:
        raise DomainError("damping t must be > 0")

    def integrand(omega):
        omega = np.asarray(omega, dtype=float)
        safe = np.where(omega > 0, omega, 1.0)
        excess = local_spectral_density(graph, safe, j, x) - INV_PI
        return 0.5 * omega * np.exp(-omega * t) * excess

    # omega e^{-omega t} <= (2/(e t)) e^{-omega t/2}
    bound = _subtracted_density_bound(graph) / (math.e * t)
    if bound == 0.0:
        return 0.0
    # the integral of |integrand| is about bound * 2/t; ask for 1e-13 of that
    tol = max(tol, 2e-13 * bound / t)
    rate = 0.5 * t
    length = math.log(10.0 * bound / (tol * min(1.0, rate)) + math.e) / rate
    panels = int(min(15000, 2 + 2.0 * length * x / math.pi))
    return integrate_damped_tail(integrand, 0.0, rate, tol, bound=bound,
                                 initial_panels=panels).value


def density_t_ladder(graph: StarGraphConfig, x: float):
    """Damping values for the density route; the integrand is analytic in ``t`` within ``2x``."""
    return tuple(f * x for f in DENSITY_FRACTIONS)


def energy_density_from_density(graph: StarGraphConfig, j: int, x: float,
                                t_damping: Optional[Sequence[float]] = None) -> float:
    """``T00`` from the Weyl-subtracted spectral density, damped by ``e^{-omega t}``.

    Each damped integral is done by quadrature with an analytic tail bound;
    the ``t -> 0`` limit is taken by Richardson extrapolation, so
    ``t_damping`` must be a ratio-2 geometric sequence.
    """
    _check_x(x)
    graph.check_edge(j)
    ts = sorted(t_damping or density_t_ladder(graph, x))
    ratios = [b / a for a, b in zip(ts[:-1], ts[1:])]
    if any(abs(r - 2.0) > 1e-9 for r in ratios):
        raise DomainError("t_damping must be a ratio-2 geometric sequence")
    diagonal = richardson_table([damped_energy_integral(graph, j, x, t) for t in ts])
    _check_contracting(diagonal, "the damped energy integral")
    return diagonal[-1]


def energy_density(graph: StarGraphConfig, x: float, j: int = 1,
                   route: Route = Route.CLOSED_FORM) -> EnergyDensityValue:
    """``T00(x)`` by the chosen route, tagged with that route."""
    if route is Route.CLOSED_FORM:
        value = energy_density_closed(graph, x)
    elif route is Route.SMALL_T_EXTRACTION:
        value = energy_density_numeric(graph, j, x)
    else:
        value = energy_density_from_density(graph, j, x)
    return EnergyDensityValue(value, route)
