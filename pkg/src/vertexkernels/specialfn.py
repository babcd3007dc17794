"""Special functions and numerical utilities.

Exponential integrals (real and complex argument), the complementary
error function, adaptive Gauss-Kronrod quadrature, semi-infinite
integrals with an exponential decay certificate, and Richardson
extraction of the linear Taylor coefficient of a function at t = 0.

Conventions
-----------
``expint_ei(x)`` is the Cauchy principal value ``-PV int_{-x}^inf e^{-s}/s ds``.
For complex argument we use ``Ei(z) = -E1(-z)`` with ``E1`` on its principal
branch.  The cut of this ``Ei`` therefore lies on the *positive* real axis,
so the function is continuous across the negative real axis, where it equals
the real ``Ei``.  This is the branch needed by the star-graph cylinder
kernel, whose argument approaches the negative real axis from above as
``t -> 0+``.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sc

from .errors import AccuracyError, DomainError, RangeError

EULER_GAMMA = 0.57721566490153286060651209008240243
# positive zero of Ei (log of the Ramanujan-Soldner constant)
EI_ROOT = 0.37250741078136663446199186658010976

# Quadrature configuration.
MAX_PANELS = 20000
MAX_DEPTH = 60

# Richardson configuration.
LADDER_RATIO = 2.0
DEFAULT_LEVELS = 4
MIN_LADDER_T = 10.0 * np.finfo(float).eps ** (1.0 / 3.0)

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# exponential integral, real argument
# ---------------------------------------------------------------------------

def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), for small |x|
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= _EPS * abs(total) * 0.1 or k > 500:
            break
        k += 1
    return -EULER_GAMMA - np.log(x) - total


def _e1_scaled_cf(x, max_iter=1000):
    """e^x E1(x) by the even continued fraction (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 0.5 * _EPS:
            return h
    raise AccuracyError(f"E1 continued fraction did not converge at {x!r}", estimate=h)


def _ei_positive_series(x):
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= x / k
        contrib = term / k
        total += contrib
        if contrib <= _EPS * total * 0.1:
            break
        k += 1
    return EULER_GAMMA + math.log(x) + total


def _ei_positive_asymptotic_scaled(x):
    # x e^{-x} Ei(x) ~ sum k!/x^k, stopped at the smallest term
    total = 1.0
    term = 1.0
    k = 1
    while True:
        new = term * k / x
        if new > term or new < _EPS * total * 0.1:
            break
        term = new
        total += term
        k += 1
    return total / x


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _ei_near_root(x):
    # Ei(x) = int_{root}^{x} e^s / s ds keeps full relative accuracy near the zero
    half = 0.5 * (x - EI_ROOT)
    mid = 0.5 * (x + EI_ROOT)
    s = mid + half * _GL_NODES
    return float(half * np.sum(_GL_WEIGHTS * np.exp(s) / s))


def expint_e1_scaled(x: float) -> float:
    """``e^x E1(x)`` for real ``x > 0``; finite for arbitrarily large ``x``."""
    if not x > 0:
        raise DomainError(f"expint_e1_scaled needs x > 0, got {x!r}")
    if x <= 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def expint_ei(x: float) -> float:
    """Exponential integral Ei(x) for real nonzero ``x``.

    Raises
    ------
    DomainError
        At ``x = 0`` (logarithmic singularity).
    RangeError
        When ``Ei(x)`` overflows a double (``x`` above about 716).
    """
    x = float(x)
    if x == 0.0:
        raise DomainError("Ei has a logarithmic singularity at 0")
    if math.isnan(x):
        raise DomainError("Ei of NaN")
    if x < 0.0:
        y = -x
        if y <= 1.0:
            return -_e1_series(y)
        if y > 745.0:
            return -0.0
        return -math.exp(-y) * _e1_scaled_cf(y)
    if 0.25 <= x <= 0.55:
        return _ei_near_root(x)
    if x <= 40.0:
        return _ei_positive_series(x)
    scaled = _ei_positive_asymptotic_scaled(x)
    try:
        value = math.exp(x) * scaled
    except OverflowError:
        value = math.inf
    if math.isinf(value):
        log_value = x + math.log(scaled)
        if log_value >= 709.782712893384:
            raise RangeError(f"Ei({x}) overflows")
        value = math.exp(log_value)
    return value


# ---------------------------------------------------------------------------
# exponential integral, complex argument
# ---------------------------------------------------------------------------

def _e1c_series(w: complex) -> complex:
    total = 0j
    term = 1.0 + 0j
    k = 1
    while True:
        term *= -w / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= _EPS * 0.1 * max(abs(total), 1e-300) or k > 800:
            break
        k += 1
    return -EULER_GAMMA - cmath.log(w) - total


def _e1c_scaled_cf(w: complex, max_iter=20000) -> complex:
    tiny = 1e-300
    b = w + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise AccuracyError(f"complex E1 continued fraction did not converge at {w!r}", estimate=h)


def _e1c_scaled_asymptotic(w: complex) -> complex:
    total = 1.0 + 0j
    term = 1.0 + 0j
    k = 1
    while True:
        new = -term * k / w
        if abs(new) > abs(term) or abs(new) < _EPS * 0.1 * abs(total):
            break
        term = new
        total += term
        k += 1
    return total / w


def _e1c_route(w: complex) -> str:
    r = abs(w)
    if r >= 40.0:
        return "asymptotic"
    # near the negative real axis the power series has little cancellation
    if r <= 2.0 or r + w.real <= 5.0:
        return "series"
    return "cf"


def expint_e1_complex(w: complex) -> complex:
    """Principal-branch ``E1(w)``, cut along the negative real axis."""
    w = complex(w)
    if w == 0:
        raise DomainError("E1 has a logarithmic singularity at 0")
    route = _e1c_route(w)
    if route == "series":
        return _e1c_series(w)
    try:
        factor = cmath.exp(-w)
    except OverflowError:
        raise RangeError(f"E1({w}) overflows") from None
    if route == "cf":
        return factor * _e1c_scaled_cf(w)
    return factor * _e1c_scaled_asymptotic(w)


def expint_e1_complex_scaled(w: complex) -> complex:
    """``e^w E1(w)`` on the principal branch, free of overflow for large ``|w|``."""
    w = complex(w)
    if w == 0:
        raise DomainError("E1 has a logarithmic singularity at 0")
    route = _e1c_route(w)
    if route == "series":
        return cmath.exp(w) * _e1c_series(w)
    if route == "cf":
        return _e1c_scaled_cf(w)
    return _e1c_scaled_asymptotic(w)


def expint_ei_complex(z: complex) -> complex:
    """Ei(z) = -E1(-z), continuous across the negative real axis.

    On the negative real axis the value is real and equals ``expint_ei``.
    On the positive real axis (the cut) the result is the limit from the
    side selected by the sign of the zero imaginary part.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("Ei has a logarithmic singularity at 0")
    if z.imag == 0.0 and z.real < 0.0:
        return complex(expint_ei(z.real), 0.0)
    return -expint_e1_complex(-z)


# ---------------------------------------------------------------------------
# error function
# ---------------------------------------------------------------------------

def erfc_real(x: float) -> float:
    """Complementary error function of a real argument."""
    return math.erfc(x)


def erfcx_real(x: float) -> float:
    """Scaled complementary error function ``e^{x^2} erfc(x)``."""
    return float(_sc.erfcx(x))


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self):
        return float(self.value)


_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# 15 nodes on [-1, 1] and the matching Kronrod / Gauss weights
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:15:2] = _WG[:3][::-1]


class _Evaluator:
    """Calls the integrand on all 15 nodes of a panel at once if it can."""

    def __init__(self, f):
        self.f = f
        self.vectorized = None
        self.count = 0

    def __call__(self, xs):
        self.count += xs.size
        if self.vectorized is None:
            try:
                ys = np.asarray(self.f(xs))
                self.vectorized = ys.shape == xs.shape
            except (TypeError, ValueError):
                self.vectorized = False
            if self.vectorized:
                return ys
        if self.vectorized:
            return np.asarray(self.f(xs))
        return np.array([self.f(float(x)) for x in xs])


def _gk15(evaluate, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    ys = evaluate(mid + half * _NODES)
    kronrod = half * np.dot(_KRONROD, ys)
    gauss = half * np.dot(_GAUSS, ys)
    if not np.all(np.isfinite(ys)):
        raise AccuracyError(f"integrand not finite on [{lo}, {hi}]")
    # never claim more than the rounding floor of the panel sum
    floor = 50.0 * _EPS * abs(half) * np.dot(_KRONROD, np.abs(ys))
    return kronrod, max(abs(kronrod - gauss), floor)


def integrate_adaptive(f: Callable, a: float, b: float, tol: float = 1e-10, *,
                       rel_tol: float = 0.0, initial_panels: int = 1) -> QuadratureResult:
    """Adaptive 7/15-point Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    The panel with the largest error estimate is bisected until the summed
    estimate is below ``max(tol, rel_tol * |value|)``.  ``f`` may accept a
    numpy array (evaluated 15 nodes at a time) or a scalar; complex-valued
    integrands are allowed.  Endpoints are never evaluated, so integrable
    endpoint singularities are tolerated.

    Raises ``AccuracyError`` carrying the best estimate if ``MAX_PANELS``
    panels or ``MAX_DEPTH`` bisections are not enough.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    evaluate = _Evaluator(f)
    edges = np.linspace(a, b, max(1, int(initial_panels)) + 1)
    heap = []
    total = 0.0
    err_total = 0.0
    stuck = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(evaluate, lo, hi)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, lo, hi, val, 0))
    n_panels = len(heap)
    while heap:
        target = max(tol, rel_tol * abs(total))
        if err_total <= target:
            break
        neg_err, lo, hi, val, depth = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if depth >= MAX_DEPTH or n_panels >= MAX_PANELS or not lo < mid < hi:
            stuck.append((neg_err, lo, hi, val, depth))
            if n_panels >= MAX_PANELS:
                break
            continue
        v1, e1 = _gk15(evaluate, lo, mid)
        v2, e2 = _gk15(evaluate, mid, hi)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, depth + 1))
        n_panels += 1
    # resum to drop accumulated rounding in the running totals
    panels = heap + stuck
    total = sum(p[3] for p in panels)
    err_total = sum(-p[0] for p in panels)
    if err_total > max(tol, rel_tol * abs(total)):
        raise AccuracyError(
            f"adaptive quadrature on [{a}, {b}] stalled at error {err_total:.3g} > {max(tol, rel_tol * abs(total)):.3g}",
            estimate=sign * total, error_estimate=err_total)
    if isinstance(total, complex) or np.iscomplexobj(total):
        value = complex(sign * total)
    else:
        value = float(sign * total)
    return QuadratureResult(value, float(err_total), evaluate.count)


def integrate_damped_tail(f: Callable, a: float, decay_rate: float, tol: float = 1e-10, *,
                          bound: float | None = None, initial_panels: int = 1,
                          rel_tol: float = 0.0) -> QuadratureResult:
    """Integrate ``f`` over ``[a, inf)`` given ``|f(s)| <= C exp(-decay_rate (s - a))``.

    The range is truncated at ``a + L`` with ``C exp(-decay_rate L) / decay_rate``
    below ``tol / 10``.  If ``bound`` (the constant ``C``) is not given it is
    estimated from samples over the first few decay lengths; pass it
    explicitly when ``f`` starts out negligibly small.
    """
    if not decay_rate > 0 or not math.isfinite(decay_rate):
        raise DomainError(f"decay_rate must be positive and finite, got {decay_rate!r}")
    if bound is None:
        s = np.linspace(0.0, 12.0 / decay_rate, 49)
        samples = np.array([abs(f(a + si)) for si in s])
        bound = 2.0 * float(np.max(samples * np.exp(decay_rate * s)))
    if bound == 0.0:
        bound = tol
    length = math.log(max(10.0 * bound / (tol * min(1.0, decay_rate)), math.e)) / decay_rate
    res = integrate_adaptive(f, a, a + length, tol=0.9 * tol, rel_tol=rel_tol,
                             initial_panels=initial_panels)
    tail = bound * math.exp(-decay_rate * length) / decay_rate
    return QuadratureResult(res.value, res.error_estimate + tail, res.evaluations)


# ---------------------------------------------------------------------------
# Richardson extrapolation
# ---------------------------------------------------------------------------

def richardson_table(values, ratio=LADDER_RATIO):
    """Richardson tableau for samples ``values[i] = A(h_i)`` with ``h_i = h_0 ratio^i``.

    Assumes ``A(h) = A0 + a1 h + a2 h^2 + ...``.  Returns the list of
    diagonal estimates, each eliminating one more power of ``h``; the last
    one is the extrapolated ``A0``.
    """
    level = [float(v) for v in values]
    diagonal = [level[0]]
    m = 1
    while len(level) > 1:
        mult = ratio ** m
        level = [(mult * level[i] - level[i + 1]) / (mult - 1.0) for i in range(len(level) - 1)]
        diagonal.append(level[0])
        m += 1
    return diagonal


def _check_contracting(diagonal, what):
    diffs = [abs(b - a) for a, b in zip(diagonal[:-1], diagonal[1:])]
    scale = max(abs(diagonal[-1]), max(abs(d) for d in diagonal) * 1e-3, 1e-300)
    if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > 1e-7 * scale:
        raise AccuracyError(f"Richardson extrapolation of {what} is not contracting: "
                            f"successive changes {diffs}", estimate=diagonal[-1])


def extrapolate_to_zero(g: Callable, t_min: float, levels: int = DEFAULT_LEVELS,
                        ratio: float = LADDER_RATIO) -> float:
    """Limit of ``g(t)`` as ``t -> 0+`` from samples on ``t_min * ratio^k``, k = 0..levels-1."""
    ts = [t_min * ratio ** k for k in range(levels)]
    diagonal = richardson_table([g(t) for t in ts], ratio)
    _check_contracting(diagonal, "the t -> 0 limit")
    return diagonal[-1]


def extract_linear_coefficient(g: Callable, t_min: float, t_max: float,
                               levels: int = DEFAULT_LEVELS) -> float:
    """Coefficient ``c1`` of ``g(t) = c0 + c1 t + c2 t^2 + ...``.

    Uses difference quotients ``D(h) = (g(2h) - g(h)) / h = c1 + 3 c2 h + ...``
    on the ladder ``h = t_min, 2 t_min, ..., 2^(levels-1) t_min`` and removes
    the powers ``h, ..., h^(levels-1)`` by Richardson extrapolation, so the
    result is exact for polynomials of degree ``levels``.  All sample points
    must fit in ``[t_min, t_max]``.  The caller must have removed any
    singular Laurent part of ``g``.
    """
    if not 0 < t_min < t_max:
        raise DomainError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    if t_min < MIN_LADDER_T:
        raise DomainError(f"t_min={t_min} is below the round-off floor {MIN_LADDER_T:.2g}")
    if t_min * LADDER_RATIO ** levels > t_max * (1 + 1e-12):
        raise DomainError(f"{levels} levels from t_min={t_min} overrun t_max={t_max}")
    ts = [t_min * LADDER_RATIO ** k for k in range(levels + 1)]
    gs = [g(t) for t in ts]
    quotients = [(gs[k + 1] - gs[k]) / ts[k] for k in range(levels)]
    diagonal = richardson_table(quotients)
    _check_contracting(diagonal, "the linear coefficient")
    return diagonal[-1]
