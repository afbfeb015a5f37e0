"""Gamma at half-integers and Bessel functions of the first kind.

J_nu is available by three independent routes:

* ``bessel_j_series``: the power series, summed in double-double (and in
  exact fixed-point integers near the top of its window),
* ``bessel_j_poisson``: the Poisson integral
  ``J_nu(x) = (x/2)^nu / (Gamma(nu+1/2) Gamma(1/2)) * int_{-1}^{1} (1-s^2)^(nu-1/2) e^{ixs} ds``,
* ``bessel_j_half``: the closed form ``J_{1/2}(x) = sqrt(2/pi) x^{-1/2} sin x``.

``bessel_j`` is the vectorised evaluator used by the rest of the package: the
series for small arguments; beyond that Bessel's integral
``J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt`` for integer orders and
upward recurrence from the J_{1/2}, J_{-1/2} closed forms for half-integer
orders (stable while x exceeds the order).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from wavekit import _backend
from wavekit.errors import ConvergenceError, DomainError

SERIES_MAX_X = 60.0
# Above this the double-double significand cannot absorb the cancellation in
# the series; the route switches to exact fixed-point integers.
DD_MAX_X = 48.0
# bessel_j prefers the (cheaper) series below this argument.
SERIES_SWITCH_X = 20.0

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True, order=True)
class Order:
    """Bessel order nu stored as the integer 2*nu, so half-integers are exact."""

    twice_nu: int

    def __post_init__(self):
        if not isinstance(self.twice_nu, (int, np.integer)) or isinstance(self.twice_nu, bool):
            raise TypeError("twice_nu must be an integer")
        if self.twice_nu < 0:
            raise DomainError(f"Bessel order must be non-negative, got 2*nu={self.twice_nu}")
        object.__setattr__(self, "twice_nu", int(self.twice_nu))

    @classmethod
    def of(cls, value) -> "Order":
        """Coerce an int, half-integer float, Fraction, ``"3/2"`` or Order."""
        if isinstance(value, Order):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise DomainError(f"order {value!r} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def nu(self) -> float:
        return self.twice_nu / 2

    @property
    def is_integer(self) -> bool:
        return self.twice_nu % 2 == 0

    def shifted(self, steps: int) -> "Order":
        return Order(self.twice_nu + 2 * steps)

    def __str__(self):
        if self.is_integer:
            return str(self.twice_nu // 2)
        return f"{self.twice_nu}/2"


@dataclass(frozen=True)
class SeriesConfig:
    max_terms: int = 200
    tail_tolerance: float = 1e-16

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if not self.tail_tolerance > 0:
            raise DomainError("tail_tolerance must be > 0")


DEFAULT_SERIES = SeriesConfig()


def _gamma_half_exact(twice_a: int) -> tuple[Fraction, bool]:
    """Gamma(twice_a/2) as (rational part, carries a sqrt(pi) factor)."""
    if twice_a % 2 == 0:
        return Fraction(math.factorial(twice_a // 2 - 1)), False
    value = Fraction(1)
    a = Fraction(1, 2)
    while 2 * a < twice_a:
        value *= a
        a += 1
    return value, True


def gamma_half(a) -> float:
    """Gamma(a) for a positive integer or half-integer ``a``.

    Built from Gamma(1/2) = sqrt(pi), Gamma(1) = 1 and Gamma(a+1) = a Gamma(a);
    the rational part of the product is kept exact so the only rounding is
    the final multiplication by sqrt(pi).
    """
    try:
        twice = Fraction(a.twice_nu if isinstance(a, Order) else Fraction(a) * 2)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"gamma_half needs a half-integer, got {a!r}") from exc
    if twice.denominator != 1:
        raise DomainError(f"gamma_half needs 2a integral, got a={a!r}")
    if twice <= 0:
        raise DomainError(f"gamma_half needs a > 0, got a={a!r}")
    rational, has_sqrt_pi = _gamma_half_exact(int(twice))
    return float(rational) * SQRT_PI if has_sqrt_pi else float(rational)


def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return np.atleast_1d(arr), arr.ndim == 0


def _series_exact(twice_nu: int, x: float, cfg: SeriesConfig) -> float:
    """Power series summed in fixed-point integers (no cancellation loss)."""
    if x == 0.0:
        return 1.0 if twice_nu == 0 else 0.0
    num, den = x.as_integer_ratio()
    # T_k = T_{k-1} * (-x^2/2) / (k (2k + 2nu)); the largest term is below e^x.
    bits = 64 + int(x * 1.4427) + 64
    one = 1 << bits
    mag = one
    total = one
    tmax = one
    a2, b2 = num * num, 2 * den * den
    tol = Fraction(cfg.tail_tolerance)
    for k in range(1, cfg.max_terms + 1):
        denom = k * (2 * k + twice_nu)
        mag = (mag * a2) // (b2 * denom)
        total += -mag if k % 2 else mag
        tmax = max(tmax, mag)
        floor_ = max(abs(total), tmax >> 106)
        if denom * b2 > a2 and mag * tol.denominator < tol.numerator * floor_:
            break
    else:
        raise ConvergenceError(
            f"series for J_{twice_nu}/2({x}) missed tail tolerance after {cfg.max_terms} terms")
    s = total / one
    nu = twice_nu / 2
    return s * (0.5 * x) ** nu / gamma_half(nu + 1)


def bessel_j_series(nu, x, cfg: SeriesConfig | None = None):
    """J_nu(x) from its power series, for 0 <= x <= 60.

    Terms follow ``T_k = T_{k-1} * (-x^2/4) / (k (k + nu))``.  Summation stops
    once the next term falls below ``tail_tolerance`` times the running sum
    (terms are decreasing and alternating there, so the first omitted term
    bounds the error).  Terms and the running sum are carried in
    double-double, which keeps the absolute error below 1e-10 across the
    window; beyond x = 48 the sum is carried in exact integers instead.

    Accepts a scalar or an array; raises ``DomainError`` outside the window
    and ``ConvergenceError`` when ``max_terms`` is exhausted.
    """
    order = Order.of(nu)
    cfg = cfg or DEFAULT_SERIES
    xs, scalar = _as_array(x)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0) or np.any(xs > SERIES_MAX_X):
        raise DomainError(f"series route is valid for 0 <= x <= {SERIES_MAX_X}")
    out = np.empty_like(xs)
    small = xs <= DD_MAX_X
    if small.any():
        vals, used = _backend.series_dd(
            order.twice_nu, np.ascontiguousarray(xs[small]), gamma_half(order.nu + 1),
            cfg.tail_tolerance, cfg.max_terms)
        if np.any(used < 0):
            bad = xs[small][used < 0][0]
            raise ConvergenceError(
                f"series for J_{order}({bad}) missed tail tolerance after {cfg.max_terms} terms")
        out[small] = vals
    for i in np.nonzero(~small)[0]:
        out[i] = _series_exact(order.twice_nu, float(xs[i]), cfg)
    return float(out[0]) if scalar else out


def bessel_j_half(x):
    """J_{1/2}(x) = sqrt(2/pi) * sin(x) / sqrt(x), for x > 0."""
    xs, scalar = _as_array(x)
    if np.any(~(xs > 0)):
        raise DomainError("the closed form for J_{1/2} holds for x > 0")
    out = math.sqrt(2.0 / math.pi) / np.sqrt(xs) * np.sin(xs)
    return float(out[0]) if scalar else out


def poisson_points(nu, x: float) -> int:
    """Default node count for the Poisson route at argument ``x``.

    Chosen so the aliased Bessel harmonic (roughly J_{2m}(x)) is below double
    precision: ``m >= (x + 8 x^{1/3} + 24) / 2 + nu``, rounded up to a
    multiple of 8.
    """
    nu_f = Order.of(nu).nu
    need = (x + 8.0 * np.cbrt(x) + 24.0) / 2.0 + nu_f
    return int(8 * math.ceil(need / 8.0))


@lru_cache(maxsize=2048)
def _poisson_nodes(twice_nu: int, m: int):
    """Folded nodes s >= 0 and weights w with
    ``sum w cos(x s) ~ int_{-1}^{1} (1-s^2)^(nu-1/2) cos(x s) ds``.

    Integer nu: s = cos(theta), trapezoid in theta with m intervals; the
    integrand cos(x cos t) sin^{2nu} t is smooth and periodic, so the rule
    converges spectrally.  Half-integer nu: the weight is the polynomial
    (1-s^2)^(nu-1/2) and Gauss-Legendre in s converges spectrally instead.
    """
    from wavekit.quad import gauss_legendre

    if twice_nu % 2 == 0:
        if m % 2:
            m += 1
        theta = np.arange(m // 2 + 1) * (np.pi / m)
        fold = np.full(theta.size, 2.0)
        fold[0] = 1.0
        fold[-1] = 1.0
        s = np.cos(theta)
        w = (np.pi / m) * fold * np.sin(theta) ** twice_nu
    else:
        if m % 2:
            m += 1
        rule = gauss_legendre(m)
        half = rule.nodes > 0
        s = rule.nodes[half]
        w = 2.0 * rule.weights[half] * (1.0 - s * s) ** ((twice_nu - 1) // 2)
    s = np.ascontiguousarray(s)
    w = np.ascontiguousarray(w)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def _poisson_eval(order: Order, xs: np.ndarray, quad_points: int | None) -> np.ndarray:
    out = np.empty_like(xs)
    if quad_points is None:
        counts = np.array([poisson_points(order, float(v)) for v in xs]) if xs.size < 64 else (
            8 * np.ceil(((xs + 8.0 * np.cbrt(xs) + 24.0) / 2.0 + order.nu) / 8.0)).astype(int)
    else:
        counts = np.full(xs.shape, int(quad_points))
    norm = gamma_half(order.nu + 0.5) * SQRT_PI
    for m in np.unique(counts):
        sel = counts == m
        s, w = _poisson_nodes(order.twice_nu, int(m))
        integral = _backend.cos_sum(np.ascontiguousarray(xs[sel]), s, w)
        if order.twice_nu == 0:
            out[sel] = integral / norm
        else:
            out[sel] = np.power(0.5 * xs[sel], order.nu) / norm * integral
    return out


def bessel_j_poisson(nu, x, quad_points: int | None = None):
    """J_nu(x) from the Poisson integral, nu >= 0, x >= 0.

    Only the cosine part of e^{ixs} is integrated; the sine part is odd in s
    and vanishes.  ``quad_points`` defaults to ``poisson_points(nu, x)``.
    """
    order = Order.of(nu)
    if order.twice_nu < 0:
        raise DomainError("Poisson route requires nu >= 0")
    if quad_points is not None and quad_points < 2:
        raise DomainError("quad_points must be >= 2")
    xs, scalar = _as_array(x)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0):
        raise DomainError("Poisson route requires finite x >= 0")
    out = _poisson_eval(order, xs, quad_points)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=2048)
def _bessel_integral_nodes(n: int, m: int):
    """Folded trapezoid for (1/pi) int_0^pi cos(n t - x sin t) dt, m intervals.

    Pairing t with pi - t leaves a pure cosine sum (n even) or sine sum
    (n odd) in s = sin t.
    """
    if m % 2:
        m += 1
    theta = np.arange(m // 2 + 1) * (np.pi / m)
    fold = np.full(theta.size, 2.0)
    fold[0] = 1.0  # endpoints 0 and pi, half weight each
    fold[-1] = 1.0  # t = pi/2 pairs with itself
    if n % 2 == 0:
        w = fold * np.cos(n * theta) / m
    else:
        w = fold * np.sin(n * theta) / m
    s = np.ascontiguousarray(np.sin(theta))
    w = np.ascontiguousarray(w)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def _bessel_integral_eval(n: int, xs: np.ndarray) -> np.ndarray:
    out = np.empty_like(xs)
    counts = (8 * np.ceil((xs + n + 8.0 * np.cbrt(xs) + 24.0) / 16.0)).astype(int)
    kernel = _backend.cos_sum if n % 2 == 0 else _backend.sin_sum
    for m in np.unique(counts):
        sel = counts == m
        s, w = _bessel_integral_nodes(n, int(m))
        out[sel] = kernel(np.ascontiguousarray(xs[sel]), s, w)
    return out


def _half_integer_upward(twice_nu: int, xs: np.ndarray) -> np.ndarray:
    """J_{k+1/2}(x) by J_{mu+1} = (2 mu / x) J_mu - J_{mu-1}; needs x > nu."""
    amp = np.sqrt(2.0 / (np.pi * xs))
    prev = amp * np.cos(xs)  # J_{-1/2}
    cur = amp * np.sin(xs)  # J_{1/2}
    mu = 0.5
    while 2 * mu < twice_nu:
        prev, cur = cur, (2.0 * mu / xs) * cur - prev
        mu += 1.0
    return cur


def bessel_j(nu, x):
    """Vectorised J_nu(x) for any nu >= 0 and x >= 0.

    Uses the double-double series up to x = 20.  Beyond, integer orders go
    through Bessel's integral and half-integer orders through upward
    recurrence; neither carries the (x/2)^nu prefactor whose cancellation
    spoils the Poisson form at large x.
    """
    order = Order.of(nu)
    xs, scalar = _as_array(x)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0):
        raise DomainError("bessel_j requires finite x >= 0")
    out = np.empty_like(xs)
    small = xs <= max(SERIES_SWITCH_X, 2.0 * order.nu)
    if small.any():
        out[small] = bessel_j_series(order, xs[small])
    if (~small).any():
        if order.is_integer:
            out[~small] = _bessel_integral_eval(order.twice_nu // 2, xs[~small])
        else:
            out[~small] = _half_integer_upward(order.twice_nu, xs[~small])
    return float(out[0]) if scalar else out


def recurrence_residual(nu, x: float, h: float) -> float:
    """|central difference of x^nu J_nu at step h  -  x^nu J_{nu-1}(x)|.

    The residual of d/dx (x^nu J_nu(x)) = x^nu J_{nu-1}(x); it decays like h^2.
    """
    order = Order.of(nu)
    if order.twice_nu < 2:
        raise DomainError("recurrence check requires nu >= 1")
    if not (x > h > 0):
        raise DomainError("recurrence check requires x > h > 0")
    p = order.nu

    def g(v):
        return v**p * bessel_j_series(order, v)

    fd = (g(x + h) - g(x - h)) / (2.0 * h)
    return abs(fd - x**p * bessel_j_series(order.shifted(-1), x))
