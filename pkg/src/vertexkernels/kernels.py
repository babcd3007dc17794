"""Free kernels on the line and Green functions on the star graph.

Every star-graph kernel comes from the free kernel ``G(t, z)`` through

    G_S^{jl}(t,x,y) = delta_jl G(t,|x-y|) + (2/N - delta_jl) G(t,x+y)
                      - (2 alpha/N^2) int_x^inf exp(-alpha (s-x)/N) G(t,s+y) ds.

The last ("vertex") term has closed forms for the heat kernel (erfc) and
the cylinder kernel (complex exponential integral).  For the Schrodinger
kernel it is computed by quadrature along a contour rotated by pi/4, where
the integrand is Gaussian-damped.  A literal quadrature of the formula
along the real axis is kept as an independent route for testing.

The wave kernel is a distribution, so it is returned in structured form
(Dirac terms plus an exponential tail) and only ever applied to data.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import special as _sc

from .bondurant import EdgeVectorFunction
from .core import StarGraphConfig
from .errors import ContractError, DomainError
from .specialfn import expint_e1_complex_scaled, integrate_adaptive, integrate_damped_tail

DEFAULT_TOL = 1e-13
QUANTUM_TOL = 1e-12


class ProblemKind(enum.Enum):
    WAVE = "wave"
    HEAT = "heat"
    QUANTUM = "quantum"
    CYLINDER = "cylinder"


def _check_time(t):
    if not t > 0:
        raise DomainError(f"kernels need t > 0, got {t!r}")


def free_kernel(kind: ProblemKind, t: float, z):
    """Whole-line kernel ``G(t, z)``; accepts scalar or array ``z``.

    Heat ``(4 pi t)^(-1/2) exp(-z^2/4t)``, Schrodinger
    ``(4 pi i t)^(-1/2) exp(-z^2/4it)`` (principal root, complex result),
    cylinder ``(t/pi) / (t^2 + z^2)``.
    """
    _check_time(t)
    z = np.asarray(z, dtype=float) if np.ndim(z) else float(z)
    if kind is ProblemKind.HEAT:
        return np.exp(-z * z / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    if kind is ProblemKind.CYLINDER:
        return (t / math.pi) / (t * t + z * z)
    if kind is ProblemKind.QUANTUM:
        return np.exp(1j * z * z / (4.0 * t)) / cmath.sqrt(4j * math.pi * t)
    if kind is ProblemKind.WAVE:
        raise ContractError("the free wave kernel is a distribution; use wave_kernel_slice")
    raise ContractError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# vertex term of the master formula
# ---------------------------------------------------------------------------

def _vertex_term_heat(graph, t, x, y):
    a = graph.damping
    sq = math.sqrt(t)
    arg = (x + y) / (2.0 * sq) + a * sq
    # exp(a(x+y) + a^2 t) erfc(arg) == exp(-(x+y)^2/4t) erfcx(arg)
    return -(graph.alpha / graph.n_edges ** 2) * math.exp(-(x + y) ** 2 / (4.0 * t)) \
        * float(_sc.erfcx(arg))


def _vertex_term_cylinder(graph, t, x, y):
    a = graph.damping
    w = complex(a * (x + y), -a * t)
    if abs(w) < 1e-300:
        # E1(w) ~ -gamma - ln w, so Im[e^w E1(w)] -> -arg w = atan2(t, x + y)
        return -(2.0 * graph.alpha / (math.pi * graph.n_edges ** 2)) * math.atan2(t, x + y)
    # (2 alpha/(pi N^2)) e^{a(x+y)} Im[e^{-iat} Ei(iat - a(x+y))] with Ei(-w) = -E1(w)
    return -(2.0 * graph.alpha / (math.pi * graph.n_edges ** 2)) \
        * expint_e1_complex_scaled(w).imag


def _vertex_term_quantum_contour(graph, t, x, y, tol=QUANTUM_TOL):
    a = graph.damping
    w0 = x + y
    rot = cmath.exp(0.25j * math.pi)
    pref = rot / cmath.sqrt(4j * math.pi * t)

    def integrand(r):
        w = w0 + r * rot
        return pref * np.exp(-a * r * rot + 1j * w * w / (4.0 * t))

    # |integrand| <= |pref| exp(-r^2/4t): stop where that is below ~e^-60
    r_max = math.sqrt(240.0 * t) + 1e-300
    scale = abs(pref)
    res = integrate_adaptive(integrand, 0.0, r_max, tol=tol * scale, initial_panels=4)
    return -(2.0 * graph.alpha / graph.n_edges ** 2) * complex(res.value)


def _vertex_term_quantum_erfc(graph, t, x, y):
    # analytic continuation t -> i t of the heat closed form
    a = graph.damping
    sq = cmath.sqrt(1j * t)
    arg = (x + y) / (2.0 * sq) + a * sq
    return -(graph.alpha / graph.n_edges ** 2) * cmath.exp(-(x + y) ** 2 / (4j * t)) \
        * complex(_sc.erfcx(arg))


def _vertex_term_quadrature(kind, graph, t, x, y, tol=DEFAULT_TOL):
    a = graph.damping
    pref = -(2.0 * graph.alpha / graph.n_edges ** 2)
    if kind is not ProblemKind.QUANTUM:
        # s = x + L v/(1-v) maps [x, inf) onto [0, 1); the heat and cylinder
        # kernels decay on their own, so this works for any alpha >= 0
        scale = max(x + y, t, math.sqrt(t))

        def mapped(v):
            v = np.asarray(v, dtype=float)
            u = scale * v / (1.0 - v)
            return np.exp(-a * u) * free_kernel(kind, t, x + y + u) * scale / (1.0 - v) ** 2

        res = integrate_adaptive(mapped, 0.0, 1.0, tol, initial_panels=8)
        return pref * res.value

    def integrand(s):
        return np.exp(-a * (s - x)) * free_kernel(kind, t, s + y)

    # the chirp exp(i s^2/4t) does not decay: only the vertex damping truncates it
    bound = 1.0 / math.sqrt(4.0 * math.pi * t)
    length = math.log(10.0 * bound / (tol * min(1.0, a)) + math.e) / a
    panels = ((x + y + length) ** 2 - (x + y) ** 2) / (8.0 * t)
    if panels > 20000:
        raise DomainError("real-axis quadrature of the quantum kernel needs alpha t/N larger; "
                          "use the contour or closed route")
    res = integrate_damped_tail(integrand, x, a, tol, bound=bound, initial_panels=int(4 + panels))
    return pref * res.value


def star_kernel(kind: ProblemKind, graph: StarGraphConfig, t: float, j: int, l: int,
                x: float, y: float, method: Optional[str] = None, tol: float = DEFAULT_TOL):
    """Green function ``G_S^{jl}(t, x, y)`` of the heat, cylinder or Schrodinger problem.

    ``method`` selects how the vertex term is computed:

    ``"closed"``
        erfc form (heat), Ei form (cylinder), continued erfc form (quantum).
    ``"contour"``
        rotated-contour quadrature; quantum only, and its default.
    ``"quadrature"``
        direct quadrature of the master formula along the real axis.
    """
    _check_time(t)
    if kind is ProblemKind.WAVE:
        raise ContractError("wave kernel is a distribution; use wave_kernel_slice")
    graph.check_edge(j)
    graph.check_edge(l)
    if not (x >= 0 and y >= 0):
        raise DomainError("edge coordinates must be >= 0")
    delta = 1.0 if j == l else 0.0
    if graph.is_dirichlet:
        return delta * (free_kernel(kind, t, x - y) - free_kernel(kind, t, x + y))
    n = graph.n_edges
    value = delta * free_kernel(kind, t, abs(x - y)) + (2.0 / n - delta) * free_kernel(kind, t, x + y)
    if graph.is_kirchhoff:
        return value
    if method is None:
        method = "contour" if kind is ProblemKind.QUANTUM else "closed"
    if method == "quadrature":
        return value + _vertex_term_quadrature(kind, graph, t, x, y, tol)
    if method == "contour":
        if kind is not ProblemKind.QUANTUM:
            raise ContractError("contour route exists only for the quantum kernel")
        return value + _vertex_term_quantum_contour(graph, t, x, y)
    if method == "closed":
        if kind is ProblemKind.HEAT:
            return value + _vertex_term_heat(graph, t, x, y)
        if kind is ProblemKind.CYLINDER:
            return value + _vertex_term_cylinder(graph, t, x, y)
        return value + _vertex_term_quantum_erfc(graph, t, x, y)
    raise ContractError(f"unknown method {method!r}")


def cylinder_kernel(graph: StarGraphConfig, t: float, j: int, l: int, x: float, y: float) -> float:
    """Closed-form cylinder kernel (Green function of ``u_tt = H u`` decaying as t grows)."""
    return star_kernel(ProblemKind.CYLINDER, graph, t, j, l, x, y, method="closed")


def heat_kernel(graph: StarGraphConfig, t: float, j: int, l: int, x: float, y: float) -> float:
    return star_kernel(ProblemKind.HEAT, graph, t, j, l, x, y, method="closed")


def quantum_kernel(graph: StarGraphConfig, t: float, j: int, l: int, x: float, y: float) -> complex:
    return star_kernel(ProblemKind.QUANTUM, graph, t, j, l, x, y, method="contour")


# ---------------------------------------------------------------------------
# wave kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracTerm:
    y_location: float
    weight: float


@dataclass(frozen=True)
class WaveTail:
    """``amplitude * exp(-rate (t - y - x))`` for ``lower <= y <= upper``."""

    lower: float
    upper: float
    amplitude: float
    rate: float
    t: float
    x: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y >= self.lower) & (y <= self.upper)
        return np.where(inside, self.amplitude * np.exp(-self.rate * (self.t - y - self.x)), 0.0)


@dataclass(frozen=True)
class WaveKernelSlice:
    """``G_S^{jl}(t, x, .)`` of the wave problem as a distribution in ``y``."""

    j: int
    l: int
    t: float
    x: float
    dirac_terms: tuple
    tail: Optional[WaveTail]


def wave_kernel_slice(graph: StarGraphConfig, t: float, j: int, l: int, x: float) -> WaveKernelSlice:
    """Wave kernel for fixed ``(t, x, j, l)``, with terms vanishing for ``t > 0`` dropped."""
    _check_time(t)
    graph.check_edge(j)
    graph.check_edge(l)
    if not x >= 0:
        raise DomainError("x must be >= 0")
    delta = 1.0 if j == l else 0.0
    terms = []
    if x - t >= 0:
        terms.append(DiracTerm(x - t, 0.5 * delta))
    terms.append(DiracTerm(x + t, 0.5 * delta))
    tail = None
    if t - x >= 0:
        if graph.is_dirichlet:
            reflected = -0.5 * delta
        else:
            reflected = 0.5 * (2.0 / graph.n_edges - delta)
        terms.append(DiracTerm(t - x, reflected))
        if not graph.is_dirichlet and graph.alpha > 0 and t > x:
            n = graph.n_edges
            tail = WaveTail(0.0, t - x, -graph.alpha / n ** 2, graph.alpha / n, t, x)
    return WaveKernelSlice(j, l, t, x, tuple(terms), tail)


def wave_kernel_row(graph: StarGraphConfig, t: float, j: int, x: float):
    """Slices for every source edge ``l``; applying the row gives ``u_j(t, x)``."""
    return [wave_kernel_slice(graph, t, j, l, x) for l in range(1, graph.n_edges + 1)]


@dataclass(frozen=True)
class KernelRow:
    """Smooth kernel ``G_S^{j.}(t, x, .)`` ready to be integrated against data."""

    kind: ProblemKind
    graph: StarGraphConfig
    t: float
    j: int
    x: float
    method: Optional[str] = None

    def __call__(self, l, y):
        return star_kernel(self.kind, self.graph, self.t, self.j, l, self.x, y, self.method)

    @property
    def width(self):
        if self.kind is ProblemKind.HEAT:
            return math.sqrt(self.t)
        return self.t


def _apply_slice(sl: WaveKernelSlice, f: EdgeVectorFunction, tol: float) -> float:
    total = 0.0
    for term in sl.dirac_terms:
        if term.weight != 0.0:
            total += term.weight * f.value_at(sl.l, term.y_location)
    if sl.tail is not None:
        lo, hi = sl.tail.lower, sl.tail.upper
        if f.support is not None:
            lo, hi = max(lo, f.support[0]), min(hi, f.support[1])
        if hi > lo:
            res = integrate_adaptive(lambda y: sl.tail(y) * f.value_at(sl.l, y), lo, hi, tol)
            total += res.value
    return total


def _apply_row(row: KernelRow, f: EdgeVectorFunction, tol: float):
    total = 0.0
    w = row.width
    x = row.x
    # panels concentrated around the peaks at y = x (incident) and y = 0 (reflected)
    cuts = sorted({0.0, max(0.0, x - 20 * w), x, x + 20 * w})
    for l in range(1, row.graph.n_edges + 1):
        def integrand(y, l=l):
            return row(l, y) * f.value_at(l, y)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi > lo:
                total += integrate_adaptive(integrand, lo, hi, tol, initial_panels=4).value
        total += integrate_damped_tail(integrand, cuts[-1], f.decay_rate, tol).value
    return total


def apply_kernel(kernel: Union[WaveKernelSlice, Sequence[WaveKernelSlice], KernelRow],
                 f: EdgeVectorFunction, tol: float = 1e-11):
    """``sum_l int_0^inf G^{jl}(t, x, y) f_l(y) dy``.

    A single ``WaveKernelSlice`` contributes only its own source edge; pass
    the list from ``wave_kernel_row`` (or a ``KernelRow``) for the full sum.
    """
    if isinstance(kernel, WaveKernelSlice):
        return _apply_slice(kernel, f, tol)
    if isinstance(kernel, KernelRow):
        if kernel.kind is ProblemKind.WAVE:
            raise ContractError("use wave_kernel_row for the wave problem")
        return _apply_row(kernel, f, tol)
    return sum(_apply_slice(sl, f, tol) for sl in kernel)
