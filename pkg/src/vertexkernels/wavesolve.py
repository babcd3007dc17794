"""Wave propagation through the vertex.

``evolve_exact`` evaluates the closed-form solution of ``u_tt = u_xx`` with
``u(0) = f`` and ``u_t(0) = 0``: the incident d'Alembert waves, the waves
reflected and transmitted at a Kirchhoff vertex, and the delayed response
``-(alpha/N^2) int_0^{t-x} exp(-alpha eps/N) sum_l f_l(t-x-eps) d eps``.

``evolve_fd_oracle`` is an independent leapfrog discretisation with a
ghost-point vertex closure, used to check the closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import integrate as _si

from .bondurant import EdgeVectorFunction
from .core import EdgePoint, Grid, StarGraphConfig
from .errors import AccuracyWarning, ContractError, DomainError
from .specialfn import integrate_adaptive

MIN_SAMPLES_ACROSS_SUPPORT = 200
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

def smooth_bump(center: float, half_width: float, amplitude: float = 1.0):
    """``C^inf`` bump ``A exp(1 - 1/(1 - r^2))``, ``r = (x - center)/half_width``.

    Returns ``(value, first_derivative, second_derivative)`` as vectorised
    callables; all vanish outside ``[center - half_width, center + half_width]``.
    """
    c, w, amp = float(center), float(half_width), float(amplitude)

    def parts(x):
        r = (np.asarray(x, dtype=float) - c) / w
        inside = np.abs(r) < 1.0
        q = np.where(inside, 1.0 - r * r, 1.0)
        phi = np.where(inside, amp * np.exp(1.0 - 1.0 / q), 0.0)
        return r, q, phi

    def value(x):
        return parts(x)[2]

    def first(x):
        r, q, phi = parts(x)
        return phi * (-2.0 * r / q ** 2) / w

    def second(x):
        r, q, phi = parts(x)
        g1 = -2.0 * r / q ** 2
        g2 = (-2.0 * q - 8.0 * r * r) / q ** 3
        return phi * (g1 * g1 + g2) / w ** 2

    return value, first, second


@dataclass(frozen=True)
class InitialData:
    """Initial displacement ``f`` on every edge; the initial velocity is zero."""

    f: EdgeVectorFunction

    @classmethod
    def bump(cls, n_edges: int, center: float, half_width: float, amplitudes=None):
        """Smooth bump on each edge, scaled by ``amplitudes`` (default: all ones)."""
        if amplitudes is None:
            amplitudes = [1.0] * n_edges
        if len(amplitudes) != n_edges:
            raise DomainError("need one amplitude per edge")
        if center - half_width < 0:
            raise DomainError("bump must lie on the edge")
        value, d1, d2 = smooth_bump(center, half_width)
        fn = EdgeVectorFunction.scaled(amplitudes, value, d1, decay_rate=1.0,
                                       second_derivative=d2,
                                       support=(center - half_width, center + half_width))
        return cls(fn)

    @property
    def n_edges(self):
        return self.f.n_edges

    @property
    def support(self):
        return self.f.support

    def component(self, j, s, order=0):
        """``f_j`` (or a derivative) extended by zero to negative arguments."""
        fn = (self.f.value_at, self.f.derivative_at, self.f.second_derivative_at)[order]
        if fn is None:
            raise ContractError(f"initial data lacks derivative of order {order}")
        s = np.asarray(s, dtype=float)
        out = np.where(s >= 0, fn(j, np.maximum(s, 0.0)), 0.0)
        return float(out) if out.ndim == 0 else out

    def total(self, s, order=0):
        return sum(self.component(l, s, order) for l in range(1, self.n_edges + 1))


@dataclass
class EdgeSamples:
    x: np.ndarray
    u: np.ndarray
    u_t: np.ndarray
    u_x: np.ndarray
    u_xx: Optional[np.ndarray] = None


@dataclass
class FieldSnapshot:
    """Field and derivatives on every edge at one instant, on a shared grid."""

    time: float
    grid: Grid
    samples: Dict[int, EdgeSamples] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# closed-form evolution
# ---------------------------------------------------------------------------

def _check(graph: StarGraphConfig, data: InitialData, t: float):
    if data.n_edges != graph.n_edges:
        raise DomainError(f"data has {data.n_edges} edges, graph has {graph.n_edges}")
    if not t >= 0:
        raise DomainError("t must be >= 0")


def _delayed_integral_scalar(graph, data, s, tol=1e-13):
    # int_0^s exp(-a (s - y)) F(y) dy, restricted to the support of F
    a = graph.damping
    lo, hi = 0.0, s
    if data.support is not None:
        lo, hi = max(lo, data.support[0]), min(hi, data.support[1])
    if hi <= lo:
        return 0.0
    res = integrate_adaptive(lambda y: np.exp(-a * (s - y)) * data.total(y), lo, hi, tol,
                             rel_tol=1e-13)
    return res.value


def evolve_exact(graph: StarGraphConfig, data: InitialData, t: float, point: EdgePoint) -> float:
    """``u_j(t, x)`` from the closed-form solution; the delayed term by adaptive quadrature."""
    _check(graph, data, t)
    point.validate_for(graph)
    j, x = point.edge, point.coordinate
    if t == 0:
        return data.component(j, x)
    s = t - x
    u = 0.5 * (data.component(j, x - t) + data.component(j, x + t))
    if graph.is_dirichlet:
        return u - 0.5 * data.component(j, s)
    n = graph.n_edges
    u += -0.5 * data.component(j, s) + data.total(s) / n
    if graph.alpha > 0 and s > 0:
        u -= graph.alpha / n ** 2 * _delayed_integral_scalar(graph, data, s)
    return u


def _gauss_pieces(graph, data, lefts, rights, anchors):
    """``int_{l}^{r} exp(-a (anchor - y)) F(y) dy`` for each triple, by 20-point Gauss rules."""
    a = graph.damping
    out = np.zeros(len(lefts))
    width = rights - lefts
    n_sub = np.maximum(1, np.ceil(width / 0.01).astype(int))
    for k in np.unique(n_sub):
        sel = np.nonzero(n_sub == k)[0]
        frac = np.linspace(0.0, 1.0, k + 1)
        edges = lefts[sel, None] + width[sel, None] * frac[None, :]
        mids = 0.5 * (edges[:, 1:] + edges[:, :-1])[..., None]
        halves = 0.5 * (edges[:, 1:] - edges[:, :-1])[..., None]
        y = mids + halves * _GL_NODES
        vals = np.exp(-a * (anchors[sel, None, None] - y)) * data.total(y)
        out[sel] = np.sum(halves * _GL_WEIGHTS * vals, axis=(1, 2))
    return out


def _delayed_integral_array(graph, data, s_values):
    """``I(s)`` on many points via the recursion ``I(s2) = e^{-a(s2-s1)} I(s1) + int_{s1}^{s2}``."""
    a = graph.damping
    s_values = np.asarray(s_values, dtype=float)
    out = np.zeros_like(s_values)
    order = np.argsort(s_values)
    s_sorted = s_values[order]
    keep = s_sorted > 0
    if not np.any(keep):
        return out
    s_pos = s_sorted[keep]
    lo = data.support[0] if data.support is not None else 0.0
    hi = data.support[1] if data.support is not None else math.inf
    prev = np.concatenate(([0.0], s_pos[:-1]))
    lefts = np.maximum(prev, lo)
    rights = np.minimum(s_pos, hi)
    pieces = np.zeros_like(s_pos)
    active = rights > lefts
    if np.any(active):
        pieces[active] = _gauss_pieces(graph, data, lefts[active], rights[active], s_pos[active])
    decay = np.exp(-a * (s_pos - prev)).tolist()
    pieces = pieces.tolist()
    acc, vals = 0.0, []
    for d, p in zip(decay, pieces):
        acc = d * acc + p
        vals.append(acc)
    sorted_out = np.zeros_like(s_sorted)
    sorted_out[keep] = vals
    out[order] = sorted_out
    return out


def exact_fields(graph: StarGraphConfig, data: InitialData, t: float, j: int, x):
    """``(u, u_t, u_x, u_xx)`` on edge ``j`` at the points ``x``, all from the closed form.

    Needs first and second derivatives of the data.
    """
    _check(graph, data, t)
    graph.check_edge(j)
    x = np.asarray(x, dtype=float)
    s = t - x
    f = lambda z, k=0: data.component(j, z, k)
    F = lambda z, k=0: data.total(z, k)
    u = 0.5 * (f(x - t) + f(x + t))
    u_t = 0.5 * (-f(x - t, 1) + f(x + t, 1))
    u_x = 0.5 * (f(x - t, 1) + f(x + t, 1))
    u_xx = 0.5 * (f(x - t, 2) + f(x + t, 2))
    if graph.is_dirichlet:
        return u - 0.5 * f(s), u_t - 0.5 * f(s, 1), u_x + 0.5 * f(s, 1), u_xx - 0.5 * f(s, 2)
    n = graph.n_edges
    u = u - 0.5 * f(s) + F(s) / n
    u_t = u_t - 0.5 * f(s, 1) + F(s, 1) / n
    u_x = u_x + 0.5 * f(s, 1) - F(s, 1) / n
    u_xx = u_xx - 0.5 * f(s, 2) + F(s, 2) / n
    if graph.alpha > 0:
        a = graph.damping
        c = graph.alpha / n ** 2
        active = s > 0
        I = np.where(active, _delayed_integral_array(graph, data, np.where(active, s, 0.0)), 0.0)
        dI = np.where(active, F(s) - a * I, 0.0)            # d/ds I
        d2I = np.where(active, F(s, 1) - a * dI, 0.0)
        u = u - c * I
        u_t = u_t - c * dI
        u_x = u_x + c * dI
        u_xx = u_xx - c * d2I
    return u, u_t, u_x, u_xx


def exact_snapshot(graph: StarGraphConfig, data: InitialData, t: float, grid: Grid) -> FieldSnapshot:
    xs = grid.points
    snap = FieldSnapshot(t, grid)
    for j in range(1, graph.n_edges + 1):
        u, u_t, u_x, u_xx = exact_fields(graph, data, t, j, xs)
        snap.samples[j] = EdgeSamples(xs, u, u_t, u_x, u_xx)
    return snap


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def _composite(values, grid: Grid):
    m = grid.count - 1
    if m >= 2 and m & (m - 1) == 0:
        return float(_si.romb(values, dx=grid.spacing))
    return float(_si.simpson(values, dx=grid.spacing))


def _sampling_check(snapshot: FieldSnapshot, support_width: Optional[float]):
    if support_width is None:
        return
    if support_width / snapshot.grid.spacing < MIN_SAMPLES_ACROSS_SUPPORT:
        warnings.warn(f"only {support_width / snapshot.grid.spacing:.0f} samples across the "
                      f"support; energy may be inaccurate", AccuracyWarning, stacklevel=3)


def _vertex_value(snapshot: FieldSnapshot):
    return snapshot.samples[1].u[0]


def field_energy(graph: StarGraphConfig, snapshot: FieldSnapshot,
                 support_width: Optional[float] = None) -> float:
    """``sum_j (1/2) int (u_t^2 + u_x^2) dx + (alpha/2) u(t, 0)^2``.

    Only proven conserved for one edge; for ``N >= 2`` treat conservation as
    something to check, not assume.
    """
    if snapshot.grid.lo != 0:
        raise DomainError("energy needs a grid starting at the vertex")
    _sampling_check(snapshot, support_width)
    total = 0.0
    for s in snapshot.samples.values():
        total += 0.5 * _composite(s.u_t ** 2 + s.u_x ** 2, snapshot.grid)
    if not graph.is_dirichlet:
        total += 0.5 * graph.alpha * _vertex_value(snapshot) ** 2
    return total


def field_energy_alt(graph: StarGraphConfig, snapshot: FieldSnapshot,
                     support_width: Optional[float] = None) -> float:
    """``sum_j (1/2) int (u_t^2 - u u_xx) dx``; equals ``field_energy`` under the vertex condition."""
    if snapshot.grid.lo != 0:
        raise DomainError("energy needs a grid starting at the vertex")
    _sampling_check(snapshot, support_width)
    total = 0.0
    for s in snapshot.samples.values():
        if s.u_xx is None:
            raise ContractError("snapshot has no second-derivative samples")
        total += 0.5 * _composite(s.u_t ** 2 - s.u * s.u_xx, snapshot.grid)
    return total


def _require_single_edge(graph):
    if graph.n_edges != 1:
        raise DomainError("the Robin energy is defined for N = 1; use field_energy")


def robin_energy(graph: StarGraphConfig, snapshot: FieldSnapshot,
                 support_width: Optional[float] = None) -> float:
    """Conserved energy of the half-line with a Robin end.

    Emits ``AccuracyWarning`` when ``support_width`` (the width of the
    initial data) is spanned by fewer than 200 grid points.
    """
    _require_single_edge(graph)
    return field_energy(graph, snapshot, support_width)


def robin_energy_alt(graph: StarGraphConfig, snapshot: FieldSnapshot,
                     support_width: Optional[float] = None) -> float:
    _require_single_edge(graph)
    return field_energy_alt(graph, snapshot, support_width)


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

def evolve_fd_oracle(graph: StarGraphConfig, data: InitialData, t_final: float, grid: Grid,
                     cfl: float = 0.5) -> FieldSnapshot:
    """Leapfrog solution on every edge of ``[0, grid.hi]``, returned at ``t_final``.

    The vertex is one shared node.  Eliminating one ghost value per edge from
    the centred flux balance ``sum_j (u_j(h) - u_j(-h)) / 2h = alpha u(0)``
    gives a second-order update for it.  The far ends are held at zero,
    which is harmless as long as the wave never reaches them.
    """
    if not 0 < cfl <= 1:
        raise DomainError(f"CFL number must be in (0, 1], got {cfl}")
    if not t_final > 0:
        raise DomainError("t_final must be > 0")
    if grid.lo != 0:
        raise DomainError("grid must start at the vertex")
    if data.support is not None and grid.hi <= data.support[1] + t_final:
        raise DomainError("grid too short: the wave would reach the far end")
    _check(graph, data, t_final)
    n = graph.n_edges
    h = grid.spacing
    steps = int(math.ceil(t_final / (cfl * h) - 1e-9))
    dt = t_final / steps
    c2 = (dt / h) ** 2
    xs = grid.points
    u = np.array([data.component(j, xs) for j in range(1, n + 1)])
    u[:, 0] = u[:, 0].mean()
    u[:, -1] = 0.0
    alpha = 0.0 if graph.is_dirichlet else graph.alpha

    def laplacian(v):
        lap = np.zeros_like(v)
        lap[:, 1:-1] = v[:, 2:] - 2.0 * v[:, 1:-1] + v[:, :-2]
        vertex = v[0, 0]
        lap[:, 0] = (2.0 * v[:, 1].sum() - 2.0 * n * vertex - 2.0 * h * alpha * vertex) / n
        return lap

    def enforce(v):
        if graph.is_dirichlet:
            v[:, 0] = 0.0
        v[:, -1] = 0.0
        return v

    prev = u
    cur = enforce(u + 0.5 * c2 * laplacian(u))
    for _ in range(steps - 1):
        prev, cur = cur, enforce(2.0 * cur - prev + c2 * laplacian(cur))
    nxt = enforce(2.0 * cur - prev + c2 * laplacian(cur))
    snap = FieldSnapshot(t_final, grid)
    for j in range(1, n + 1):
        row = cur[j - 1]
        snap.samples[j] = EdgeSamples(xs, row.copy(), (nxt[j - 1] - prev[j - 1]) / (2.0 * dt),
                                      np.gradient(row, h, edge_order=2))
    return snap


@dataclass(frozen=True)
class ConvergenceStudy:
    spacings: tuple
    errors: tuple

    @property
    def orders(self):
        return tuple(math.log(e0 / e1) / math.log(h0 / h1)
                     for (h0, e0), (h1, e1) in zip(zip(self.spacings, self.errors),
                                                   zip(self.spacings[1:], self.errors[1:])))


def fd_convergence_study(graph: StarGraphConfig, data: InitialData, t_final: float,
                         x_max: float, base_count: int = 1601, refinements: int = 3,
                         cfl: float = 0.5) -> ConvergenceStudy:
    """Max-norm error of the leapfrog solution against the closed form on nested grids."""
    spacings, errors = [], []
    for level in range(refinements):
        count = (base_count - 1) * 2 ** level + 1
        grid = Grid(0.0, x_max, count)
        snap = evolve_fd_oracle(graph, data, t_final, grid, cfl)
        err = 0.0
        for j, s in snap.samples.items():
            exact = exact_fields(graph, data, t_final, j, s.x)[0]
            err = max(err, float(np.max(np.abs(exact - s.u))))
        spacings.append(grid.spacing)
        errors.append(err)
    return ConvergenceStudy(tuple(spacings), tuple(errors))
