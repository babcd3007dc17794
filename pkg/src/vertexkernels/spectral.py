"""Spectral resolution of ``H = -d^2/dx^2`` on the star graph.

The projection kernel ``sigma(omega, x, y)`` (derivative of the spectral
projection with respect to ``omega = sqrt(lambda)``), its diagonal (the
local spectral density), the Weyl-subtracted global density, the vertex's
contribution to the counting function, and the scattering basis used to
cross-check ``sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import StarGraphConfig
from .errors import DomainError, InternalConsistencyError
from .specialfn import integrate_adaptive

INV_PI = 1.0 / math.pi
IMAG_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RegularPlusDelta:
    """``delta_weight_at_zero * delta(omega) + regular_at(omega)`` for ``omega >= 0``."""

    delta_weight_at_zero: float
    regular_at: Callable[[float], float]

    def integrate(self, omega_hi: float, tol: float = 1e-12) -> float:
        """Integral over ``[0, omega_hi]``, the delta included."""
        if omega_hi < 0:
            return 0.0
        reg = integrate_adaptive(self.regular_at, 0.0, omega_hi, tol).value if omega_hi > 0 else 0.0
        return self.delta_weight_at_zero + reg


@dataclass(frozen=True)
class SpectralPoint:
    omega: float

    def __post_init__(self):
        if not self.omega >= 0:
            raise DomainError("omega must be >= 0")

    @property
    def eigenvalue(self) -> float:
        return self.omega ** 2


def _check(graph, omega, *edges):
    for e in edges:
        graph.check_edge(e)
    if not np.all(np.asarray(omega) > 0):
        raise DomainError(f"omega must be > 0, got {omega!r}")


def spectral_projection_kernel(graph: StarGraphConfig, omega: float, j: int, l: int,
                               x, y):
    """``sigma^{jl}(omega, x, y)``; arguments broadcast as numpy arrays."""
    _check(graph, omega, j, l)
    omega = np.asarray(omega, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    delta = 1.0 if j == l else 0.0
    incident = (2.0 / math.pi) * delta * np.sin(omega * x) * np.sin(omega * y)
    if graph.is_dirichlet:
        out = incident
    else:
        n, a = graph.n_edges, graph.alpha
        s = omega * (x + y)
        out = incident + (2.0 / math.pi) / (a * a + n * n * omega * omega) \
            * (n * omega * omega * np.cos(s) + a * omega * np.sin(s))
    return float(out) if out.ndim == 0 else out


def local_spectral_density(graph: StarGraphConfig, omega: float, j: int, x):
    """Diagonal ``sigma^{jj}(omega, x, x)``; independent of ``j``.

    Weyl term ``1/pi``, plus the Kirchhoff reflection ``(2/N - 1) cos(2 omega x)/pi``,
    plus the delta-interaction correction.
    """
    _check(graph, omega, j)
    omega = np.asarray(omega, dtype=float)
    x = np.asarray(x, dtype=float)
    c = np.cos(2.0 * omega * x)
    if graph.is_dirichlet:
        out = INV_PI * (1.0 - c)
    else:
        n, a = graph.n_edges, graph.alpha
        out = INV_PI + INV_PI * (2.0 / n - 1.0) * c
        if a > 0:
            out = out + (2.0 * a / math.pi) / (a * a + n * n * omega * omega) \
                * (omega * np.sin(2.0 * omega * x) - (a / n) * c)
    return float(out) if out.ndim == 0 else out


def global_density_regular(graph: StarGraphConfig) -> RegularPlusDelta:
    """Weyl-subtracted density ``int_0^inf sum_j [sigma^{jj} - 1/pi] dx``, split as delta + regular."""
    n = graph.n_edges
    if graph.is_dirichlet:
        return RegularPlusDelta(-n / 4.0, _zero)
    if graph.is_kirchhoff:
        return RegularPlusDelta((2.0 - n) / 4.0, _zero)
    a = graph.alpha

    def regular(omega):
        return (n * a / math.pi) / (a * a + n * n * np.asarray(omega) ** 2)

    return RegularPlusDelta(-n / 4.0, regular)


def _zero(omega):
    return np.zeros_like(np.asarray(omega, dtype=float))


def staircase_increment(graph: StarGraphConfig, omega: float) -> float:
    """Vertex contribution ``Delta N(omega)`` to the eigenvalue counting function.

    Zero for ``omega < 0``; at ``omega = 0`` the value is the limit from above.
    """
    if omega < 0:
        return 0.0
    n = graph.n_edges
    if graph.is_dirichlet:
        return -n / 4.0
    if graph.is_kirchhoff:
        return (2.0 - n) / 4.0
    return -n / 4.0 + math.atan(n * omega / graph.alpha) / math.pi


def scattering_eigenfunction(graph: StarGraphConfig, omega: float, j: int, l: int, x,
                             form: str = "simplified"):
    """Incoming scattering state ``psi_j^l(x)`` for an incoming wave on channel ``l``.

    ``form="incoming"`` evaluates the incident-plus-reflected representation
    with the arctangent phase; ``"simplified"`` the equivalent rational form.
    """
    _check(graph, omega, j, l)
    if graph.is_dirichlet:
        raise DomainError("scattering basis is defined here for finite alpha only")
    x = np.asarray(x, dtype=float)
    n, a = graph.n_edges, graph.alpha
    delta = 1.0 if j == l else 0.0
    if form == "incoming":
        phase = np.exp(-2j * math.atan(a / (n * omega)))
        out = delta * np.exp(-1j * omega * x) \
            + (-delta + (1.0 + phase) / n) * np.exp(1j * omega * x)
    elif form == "simplified":
        out = -2j * delta * np.sin(omega * x) \
            + 2.0 * omega * (n * omega - 1j * a) / (a * a + n * n * omega * omega) \
            * np.exp(1j * omega * x)
    else:
        raise DomainError(f"unknown form {form!r}")
    return complex(out) if out.ndim == 0 else out


def scattering_eigenfunction_derivative(graph: StarGraphConfig, omega: float, j: int, l: int, x):
    """``d/dx psi_j^l(x)`` of the simplified form."""
    _check(graph, omega, j, l)
    n, a = graph.n_edges, graph.alpha
    delta = 1.0 if j == l else 0.0
    x = np.asarray(x, dtype=float)
    out = -2j * delta * omega * np.cos(omega * x) \
        + 2.0 * omega * (n * omega - 1j * a) / (a * a + n * n * omega * omega) \
        * 1j * omega * np.exp(1j * omega * x)
    return complex(out) if out.ndim == 0 else out


def scattering_reconstruction(graph: StarGraphConfig, omega: float, j: int, jp: int,
                              x, y, return_residue: bool = False):
    """``(1/2pi) sum_l psi_j^l(x) conj(psi_jp^l(y))``, which must be real.

    ``x`` and ``y`` broadcast.  Raises ``InternalConsistencyError`` if the
    imaginary part exceeds ``IMAG_TOLERANCE``.  With ``return_residue`` the
    largest imaginary residue is returned alongside the value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for l in range(1, graph.n_edges + 1):
        total = total + scattering_eigenfunction(graph, omega, j, l, x) \
            * np.conj(scattering_eigenfunction(graph, omega, jp, l, y))
    total = total / (2.0 * math.pi)
    residue = float(np.max(np.abs(total.imag))) if total.size else 0.0
    if residue > IMAG_TOLERANCE:
        raise InternalConsistencyError(
            f"scattering reconstruction has imaginary part {residue:.3g}")
    value = total.real
    value = float(value) if value.ndim == 0 else value
    if return_residue:
        return value, residue
    return value


def cesaro_weight(x, L0: float, order: int = 1):
    """Weight ``W(x)`` turning Cesaro means of ``int_0^L e(x) dx`` into ``int e(x) W(x) dx``.

    ``order=1`` is the uniform mean over ``L in [L0, 2 L0]``.  ``order=2``
    additionally averages the lower limit of that window over ``[L0, 2 L0]``.
    """
    x = np.asarray(x, dtype=float)
    if order == 1:
        return np.clip((2.0 * L0 - np.maximum(x, L0)) / L0, 0.0, None)
    if order != 2:
        raise DomainError("order must be 1 or 2")
    # mean over lo in [L0, 2L0] of (1/lo) * int_lo^2lo 1[x <= L] dL
    flat = np.clip(2.0 * L0 - np.maximum(x, L0), 0.0, None)
    lo = np.maximum(L0, x / 2.0)
    hi = np.minimum(2.0 * L0, x)
    ramp = np.where(hi > lo, 2.0 * (hi - lo) - x * np.log(np.where(hi > lo, hi / lo, 1.0)), 0.0)
    return (flat + ramp) / L0


def global_density_from_local(graph: StarGraphConfig, omega: float, L0: float = 50.0,
                              order: int = 2, tol: float = 1e-11) -> float:
    """Spatial integral ``int_0^L sum_j [sigma^{jj} - 1/pi] dx``, Cesaro-averaged in ``L``.

    The oscillating part of the partial integral has no limit as
    ``L -> inf``; averaging over ``L in [L0, 2 L0]`` (``order=1``) or
    averaging twice (``order=2``) recovers the regular global density up to
    ``O(1/(omega^2 L0))`` or ``O(1/(omega^3 L0^2))`` respectively.
    """
    if not omega > 0:
        raise DomainError("omega must be > 0")
    n = graph.n_edges

    def integrand(x):
        return n * (local_spectral_density(graph, omega, 1, x) - INV_PI) \
            * cesaro_weight(x, L0, order)

    upper = 2.0 * order * L0
    panels = max(1, int(upper * omega / math.pi))
    return integrate_adaptive(integrand, 0.0, upper, tol, initial_panels=panels).value
