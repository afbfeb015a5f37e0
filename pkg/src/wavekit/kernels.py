"""Propagator kernels and the identities that express them through spheres,
balls and Hankel-type sine integrals.

The central object is the multiplier ``sin(R|xi|)/|xi|``.  In odd dimension
n >= 3 it equals ``c_n (1/R d/dR)^{(n-3)/2}`` applied to the normalised
spherical mean of the plane wave ``e^{-i x.xi}``; in even dimension it equals
``d_n (1/R d/dR)^{(n-2)/2}`` applied to the normalised ball integral with
weight ``1/sqrt(R^2-|x|^2)``.  Every quantity here can be evaluated by at
least two independent numerical routes so the identities can be checked
rather than assumed.

Fourier convention: forward transform ``int f(x) e^{-i x.xi} dx``, inverse
with ``(2 pi)^{-n}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from wavekit.errors import ConvergenceError, DomainError, ValidationError
from wavekit.quad import (
    DEFAULT_LADDER,
    OscConfig,
    ball_singular_rule,
    gauss_legendre,
    osc_halfline_sine,
    sphere_area,
    sphere_rule,
)
from wavekit.specfun import Order, bessel_j, bessel_j_half, gamma_half

XI_SMALL = 1e-8
DIMENSIONS = range(2, 8)


# -- multipliers ---------------------------------------------------------------

def sine_kernel(R, xi_norm):
    """sin(R |xi|) / |xi|, with the removable singularity at |xi| = 0.

    Below |xi| = 1e-8 the two-term series R (1 - (R|xi|)^2 / 6) is used.
    Works elementwise on arrays.
    """
    R_arr = np.asarray(R, dtype=np.float64)
    xi = np.asarray(xi_norm, dtype=np.float64)
    small = xi <= XI_SMALL
    safe = np.where(small, 1.0, xi)
    z = R_arr * xi
    out = np.where(small, R_arr * (1.0 - z * z / 6.0), np.sin(R_arr * safe) / safe)
    return float(out) if out.ndim == 0 else out


def cosine_kernel(t, xi_norm):
    """cos(t |xi|), the t-derivative of ``sine_kernel(t, |xi|)``.  Even in t."""
    out = np.cos(np.asarray(t, dtype=np.float64) * np.asarray(xi_norm, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


# -- dimensional constants -------------------------------------------------------

@dataclass(frozen=True)
class DimensionalConstants:
    n: int
    omega_n: float  # surface measure of the unit sphere
    v_n: float  # volume of the unit ball
    c_n: float | None  # odd n: 1 / ((n-2)(n-4)...1)
    d_n: float | None  # even n: 1 / (n(n-2)...2)


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@lru_cache(maxsize=None)
def constants(n: int) -> DimensionalConstants:
    if n not in DIMENSIONS:
        raise DomainError(f"dimension must lie in 2..7, got {n}")
    omega = sphere_area(n)
    c = 1.0 / _double_factorial(n - 2) if n % 2 else None
    d = None if n % 2 else 1.0 / _double_factorial(n)
    return DimensionalConstants(n, omega, omega / n, c, d)


# -- queries ---------------------------------------------------------------------

@dataclass(frozen=True)
class KernelQuery:
    """Dimension, radius (or time) R and frequency vector xi.

    The identities depend only on |xi|; the vector matters for the direct
    quadrature routes.  ``KernelQuery.along_axis`` puts xi on the x_1 axis,
    where the product sphere rules can resolve it cheaply.
    """

    n: int
    R: float
    xi: tuple

    def __post_init__(self):
        if self.n not in DIMENSIONS:
            raise DomainError(f"dimension must lie in 2..7, got {self.n}")
        if not self.R > 0:
            raise DomainError(f"R must be positive, got {self.R}")
        xi = tuple(float(v) for v in np.ravel(self.xi))
        if len(xi) != self.n:
            raise DomainError(f"xi must have {self.n} components, got {len(xi)}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "R", float(self.R))

    @classmethod
    def along_axis(cls, n: int, R: float, xi_norm: float) -> "KernelQuery":
        return cls(n, R, (float(xi_norm),) + (0.0,) * (n - 1))

    @property
    def xi_norm(self) -> float:
        return float(np.linalg.norm(self.xi))

    @property
    def on_axis(self) -> bool:
        return all(v == 0.0 for v in self.xi[1:])

    def with_R(self, R: float) -> "KernelQuery":
        return replace(self, R=R)


def _axis_points(z: float) -> int:
    """Gauss points needed to integrate e^{i z s} on [-1, 1] to round-off."""
    return int(math.ceil(0.6 * abs(z) + 16))


def _sphere_plane_wave(n: int, xi: np.ndarray, radius, resolution: int | None = None):
    """int_{S^{n-1}} e^{-i r y.xi} dsigma(y) for each r in ``radius`` (complex)."""
    radius = np.atleast_1d(np.asarray(radius, dtype=np.float64))
    xi_norm = float(np.linalg.norm(xi))
    z = float(radius.max()) * xi_norm
    if resolution is not None:
        rule = sphere_rule(n, max(4, resolution) if n > 2 else resolution)
    elif np.all(xi[1:] == 0.0):
        rule = sphere_rule(n, 4, _axis_points(z))
    else:
        rule = sphere_rule(n, _axis_points(z))
    proj = rule.nodes @ xi
    # the integrand depends on y only through y.xi; merge equal projections
    uniq, inverse = np.unique(proj, return_inverse=True)
    wsum = np.bincount(inverse, weights=rule.weights)
    phase = np.exp(-1j * np.outer(radius, uniq))
    return phase @ wsum


# -- spherical means (odd dimensions) ------------------------------------------------

def _j_over_z_pow(order: Order, z: float) -> float:
    """J_nu(z) / z^nu, continuous at z = 0."""
    if z == 0.0:
        return 1.0 / (2.0**order.nu * gamma_half(order.nu + 1))
    return float(bessel_j(order, z)) / z**order.nu


def sphere_mean_plane_wave(q: KernelQuery, method: str = "bessel",
                           resolution: int | None = None) -> float:
    """(1 / (omega_n R)) int_{|x|=R} e^{-i x.xi} dsigma(x), by one of three routes.

    quadrature: product rule on the sphere (real part; the imaginary part
        vanishes by symmetry).
    reduction:  (omega_{n-1}/omega_n) R^{n-2} int_{-1}^{1} cos(R|xi| s) (1-s^2)^{(n-3)/2} ds
        with s = cos(theta) and Gauss-Legendre in theta; needs n >= 3.
    bessel:     Gamma(n/2) 2^{(n-2)/2} R^{n-2} J_nu(z) / z^nu, nu = (n-2)/2, z = R|xi|.
    """
    n, R = q.n, q.R
    xi_norm = q.xi_norm
    if method == "quadrature":
        total = _sphere_plane_wave(n, np.asarray(q.xi), R, resolution)[0]
        return float(total.real) * R ** (n - 2) / constants(n).omega_n
    if method == "reduction":
        if n < 3:
            raise DomainError("the one-dimensional reduction needs n >= 3")
        m = resolution or _axis_points(R * xi_norm) + 8
        rule = gauss_legendre(m, 0.0, math.pi)
        th = rule.nodes
        integral = float(np.dot(rule.weights,
                                np.cos(R * xi_norm * np.cos(th)) * np.sin(th) ** (n - 2)))
        ratio = sphere_area(n - 1) / constants(n).omega_n
        return ratio * R ** (n - 2) * integral
    if method == "bessel":
        order = Order(n - 2)
        return (gamma_half(n / 2) * 2.0 ** order.nu * R ** (n - 2)
                * _j_over_z_pow(order, R * xi_norm))
    raise DomainError(f"unknown method {method!r}")


def check_sphere_mean_routes(q: KernelQuery, tol: float = 1e-7) -> dict:
    """Evaluate every applicable route; raise ValidationError if any pair differs by > tol."""
    methods = ["quadrature", "bessel"] + (["reduction"] if q.n >= 3 else [])
    values = {m: sphere_mean_plane_wave(q, m) for m in methods}
    spread = max(values.values()) - min(values.values())
    if spread > tol:
        raise ValidationError(f"sphere-mean routes disagree by {spread:.3g} at {q}: {values}")
    return values


# -- (1/R d/dR) ladder -------------------------------------------------------------

def radial_derivative_power(g: Callable[[float], float], R: float, j: int, h: float) -> float:
    """(1/R d/dR)^j g at R by nested central differences of step h."""
    if not h > 0:
        raise DomainError("step h must be positive")
    if j < 0 or int(j) != j:
        raise DomainError("j must be a non-negative integer")
    if j == 0:
        return float(g(R))
    if not R > j * h:
        raise DomainError("need R > j*h so every stencil point stays positive")
    cache: dict = {}

    def base(r):
        if r not in cache:
            cache[r] = float(g(r))
        return cache[r]

    def apply(fn):
        return lambda r: (fn(r + h) - fn(r - h)) / (2.0 * h * r)

    fn = base
    for _ in range(int(j)):
        fn = apply(fn)
    return float(fn(R))


def ladder_fd(g: Callable[[float], float], R: float, j: int, h: float | None = None) -> float:
    """``radial_derivative_power`` with one Richardson halving (default h = 1e-3 R)."""
    if j == 0:
        return float(g(R))
    h = 1e-3 * R if h is None else h
    coarse = radial_derivative_power(g, R, j, h)
    fine = radial_derivative_power(g, R, j, h / 2)
    return (4.0 * fine - coarse) / 3.0


@dataclass(frozen=True)
class BesselLadderTerm:
    """coef * |xi|^{-2 mu} (R|xi|)^mu J_mu(R|xi|).

    The recurrence d/dz (z^mu J_mu) = z^mu J_{mu-1} makes (1/R d/dR) map this
    term to the same form with mu lowered by one and ``coef`` unchanged.
    """

    coef: float
    order: Order

    def step_down(self) -> "BesselLadderTerm":
        if self.order.twice_nu < 2:
            raise DomainError("cannot lower the order below zero")
        return BesselLadderTerm(self.coef, self.order.shifted(-1))

    def value(self, R: float, xi_norm: float, closed_form: bool = False) -> float:
        mu = self.order.nu
        z = R * xi_norm
        if closed_form:
            if self.order.twice_nu != 1:
                raise DomainError("closed form is available for mu = 1/2 only")
            j = bessel_j_half(z)
        else:
            j = float(bessel_j(self.order, z))
        return self.coef * xi_norm ** (-2 * mu) * z**mu * j


def sphere_mean_ladder_term(n: int) -> BesselLadderTerm:
    """The spherical mean of the plane wave written as a ladder term."""
    return BesselLadderTerm(gamma_half(n / 2) * 2.0 ** ((n - 2) / 2), Order(n - 2))


def odd_representation(q: KernelQuery, mode: str = "analytic", h: float | None = None,
                       resolution: int | None = None) -> float:
    """c_n (1/R d/dR)^{(n-3)/2} applied to the spherical mean, n in {3, 5, 7}.

    analytic: step the Bessel ladder term down (n-3)/2 times and land on
        J_{1/2} in closed form.
    finite_difference: nested central differences (plus one Richardson
        halving) of the sphere quadrature route.
    """
    if q.n % 2 == 0:
        raise DomainError("odd_representation needs odd n")
    if q.xi_norm <= 0:
        raise DomainError("odd_representation needs |xi| > 0")
    const = constants(q.n).c_n
    j = (q.n - 3) // 2
    if mode == "analytic":
        term = sphere_mean_ladder_term(q.n)
        for _ in range(j):
            term = term.step_down()
        return const * term.value(q.R, q.xi_norm, closed_form=True)
    if mode == "finite_difference":
        return const * ladder_fd(
            lambda r: sphere_mean_plane_wave(q.with_R(r), "quadrature", resolution), q.R, j, h)
    raise DomainError(f"unknown mode {mode!r}")


# -- ball integrals (even dimensions) -----------------------------------------------

def ball_plane_wave(q: KernelQuery, resolution: int | None = None) -> float:
    """(1/v_n) int_{|x|<R} e^{-i x.xi} / sqrt(R^2 - |x|^2) dx.

    Radial part by ``ball_singular_rule`` (r = R sin(theta)), angular part by
    the product sphere rule.  ``resolution`` fixes both rules' sizes; by
    default they are sized from R|xi|.
    """
    if q.n % 2:
        raise DomainError("ball_plane_wave is defined here for even n")
    z = q.R * q.xi_norm
    radial = ball_singular_rule(q.n, q.R, resolution or _axis_points(z) + 16)
    angular = _sphere_plane_wave(q.n, np.asarray(q.xi), radial.nodes, resolution)
    total = np.dot(radial.weights, angular)
    scale = max(1.0, abs(total.real))
    if abs(total.imag) > 1e-9 * scale:
        raise ValidationError(f"ball integral has imaginary part {total.imag:.3g}")
    return float(total.real) / constants(q.n).v_n


def ascent_factor(n: int) -> float:
    """Product n (n-2) ... 4: (1/R d/dR)^{(n-2)/2} B_n = ascent_factor(n) * B_2."""
    return float(math.prod(range(n, 3, -2)))


def even_representation(q: KernelQuery, mode: str = "finite_difference",
                        h: float | None = None, resolution: int | None = None) -> float:
    """d_n (1/R d/dR)^{(n-2)/2} applied to ``ball_plane_wave``, n in {2, 4, 6}.

    finite_difference: nested central differences with one Richardson halving.
    analytic: each (1/R d/dR) lowers the dimension of the ball mean by two,
        (1/R d/dR) B_{m+2} = (m+2) B_m, so the ladder collapses to
        ``ascent_factor(n) * B_2`` with B_2 from the singular planar quadrature.
    """
    if q.n % 2:
        raise DomainError("even_representation needs even n")
    if q.xi_norm <= 0:
        raise DomainError("even_representation needs |xi| > 0")
    const = constants(q.n).d_n
    j = (q.n - 2) // 2
    if mode == "finite_difference":
        return const * ladder_fd(
            lambda r: ball_plane_wave(q.with_R(r), resolution), q.R, j, h)
    if mode == "analytic":
        base = ball_plane_wave(KernelQuery.along_axis(2, q.R, q.xi_norm), resolution)
        return const * ascent_factor(q.n) * base
    raise DomainError(f"unknown mode {mode!r}")


def ascent_relation_residual(n: int, R: float, xi_norm: float, h: float | None = None) -> float:
    """|(1/R d/dR) B_{n+2}(R) - (n+2) B_n(R)| with the derivative by finite differences."""
    upper = ladder_fd(lambda r: ball_plane_wave(KernelQuery.along_axis(n + 2, r, xi_norm)), R, 1, h)
    lower = ball_plane_wave(KernelQuery.along_axis(n, R, xi_norm))
    return abs(upper - (n + 2) * lower)


# -- Hankel-type sine integrals ------------------------------------------------------

@dataclass(frozen=True)
class HankelSineResult:
    value: float
    region: str  # "inside" (t < R) or "outside" (t > R)
    error_estimate: float


class _BesselOnNodes:
    """rho^nu J_nu(t rho), memoised per node array (the node rules are cached)."""

    def __init__(self, order: Order, t: float):
        self.order = order
        self.t = t
        self._memo: dict = {}

    def __call__(self, rho):
        hit = self._memo.get(id(rho))
        if hit is not None and hit[0] is rho:
            return hit[1]
        vals = bessel_j(self.order, self.t * rho)
        if self.order.twice_nu:
            vals = vals * rho**self.order.nu
        if len(self._memo) > 8:
            self._memo.clear()
        self._memo[id(rho)] = (rho, vals)
        return vals


@lru_cache(maxsize=64)
def _integrand(twice_nu: int, t: float) -> _BesselOnNodes:
    return _BesselOnNodes(Order(twice_nu), t)


SUPPORTED_HANKEL_ORDERS = (0, 1, 2)


def default_hankel_config(R: float, t: float) -> OscConfig:
    """Default ladder, shrunk near R = t.

    The damped integral is analytic in eps only for |eps| < |R - t|, so the
    ladder is scaled towards |R - t| / 2.  The scale is floored at 1/4: the
    half-line cutoff grows like 1/eps, and so does the cost.
    """
    scale = min(1.0, max(0.25, abs(R - t) / (2.0 * DEFAULT_LADDER[0])))
    return OscConfig(epsilon_ladder=tuple(e * scale for e in DEFAULT_LADDER))


def hankel_sine(nu, R: float, t: float, cfg: OscConfig | None = None) -> HankelSineResult:
    """Abel-regularised int_0^inf sin(R rho) rho^nu J_nu(t rho) d rho, nu in {0, 1, 2}.

    Rejects |R - t| < 1e-6 max(R, t), where the limit is singular.
    """
    order = Order.of(nu)
    if not order.is_integer or order.twice_nu // 2 not in SUPPORTED_HANKEL_ORDERS:
        raise DomainError(f"hankel_sine supports nu in {SUPPORTED_HANKEL_ORDERS}, got {nu}")
    if not (R > 0 and t > 0):
        raise DomainError("hankel_sine requires R, t > 0")
    if abs(R - t) < 1e-6 * max(R, t):
        raise DomainError(f"(R, t) = ({R}, {t}) lies in the excluded band around R = t")
    if cfg is None:
        cfg = default_hankel_config(R, t)
    res = osc_halfline_sine(_integrand(order.twice_nu, float(t)), R, cfg,
                            bandwidth=t, growth=order.nu - 0.5)
    return HankelSineResult(res.value, "inside" if t < R else "outside", res.error_estimate)


def hankel_sine_limit(nu, R: float, t: float) -> float:
    """Closed form of the regularised integral.

    nu = 0: 1/sqrt(R^2 - t^2) for t < R and 0 for t > R.  Higher orders follow
    by applying t (1/R d/dR) nu times:
    ``t^nu (-1)^nu (2nu - 1)!! (R^2 - t^2)^{-nu - 1/2}`` inside, 0 outside.
    """
    k = Order.of(nu).twice_nu // 2
    if t > R:
        return 0.0
    return t**k * (-1) ** k * _double_factorial(2 * k - 1) * (R * R - t * t) ** (-k - 0.5)


@dataclass(frozen=True)
class AscentCheck:
    residual: float
    lhs: float
    rhs: float
    error_estimate: float


def ascent_step_check(nu, R: float, t: float, h: float = 1e-3,
                      cfg: OscConfig | None = None, steps: int = 1) -> AscentCheck:
    """Compare (1/R d/dR)^steps of the order (nu - steps) integral with the
    order nu integral divided by t^steps.

    The left side differentiates ``hankel_sine`` numerically in R (nested
    central differences); both sides are independent regularised integrals.
    """
    order = Order.of(nu)
    if order.twice_nu < 2 * steps or steps < 1:
        raise DomainError("need nu >= steps >= 1")
    if not h < 0.1 * abs(R - t):
        raise DomainError("step h must be small against |R - t|")
    lower = order.shifted(-steps)
    # one ladder for every stencil point, so they share nodes and errors
    cfg = cfg or default_hankel_config(R, t)
    errs = []

    def g(r):
        res = hankel_sine(lower, r, t, cfg)
        errs.append(res.error_estimate)
        return res.value

    lhs = radial_derivative_power(g, R, steps, h)
    top = hankel_sine(order, R, t, cfg)
    rhs = top.value / t**steps
    err = top.error_estimate / t**steps + max(errs) * (1.0 / (h * R)) ** steps
    return AscentCheck(abs(lhs - rhs), lhs, rhs, err)


# -- radial Fourier transform ---------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """A radial function f(|x|) with documented decay |f(rho)| <= C e^{-rho/decay_scale}.

    The bound is spot-checked at construction on [0, 30 decay_scale]; C is
    taken from the samples on [0, decay_scale] unless given.
    """

    evaluator: Callable
    decay_scale: float
    bound: float | None = None

    def __post_init__(self):
        if not self.decay_scale > 0:
            raise DomainError("decay_scale must be positive")
        rho = np.linspace(0.0, 30.0 * self.decay_scale, 301)
        ratio = np.abs(np.asarray(self.evaluator(rho), dtype=np.float64)) * np.exp(rho / self.decay_scale)
        C = self.bound if self.bound is not None else math.e * float(ratio[rho <= self.decay_scale].max())
        if np.any(ratio > C * (1 + 1e-9) + 1e-300):
            raise DomainError("profile does not decay at the declared scale")

    def __call__(self, rho):
        return self.evaluator(rho)


def radial_fourier(n: int, f: RadialProfile, xi_norm: float, tail_tol: float = 1e-12) -> float:
    """Fourier transform of a radial function on R^n at |xi|:

    (2 pi)^{n/2} |xi|^{-(n-2)/2} int_0^inf rho^{n/2} f(rho) J_{(n-2)/2}(|xi| rho) d rho,

    truncated at 40 decay scales; raises ConvergenceError if the tail
    estimate there exceeds ``tail_tol``.
    """
    if n not in DIMENSIONS:
        raise DomainError(f"dimension must lie in 2..7, got {n}")
    if not xi_norm > 0:
        raise DomainError("radial_fourier needs |xi| > 0")
    s = f.decay_scale
    rho_max = 40.0 * s
    tail = abs(float(f(np.array([rho_max]))[0])) * rho_max ** (n / 2) * s
    if tail > tail_tol:
        raise ConvergenceError(f"truncation tail {tail:.3g} exceeds {tail_tol:.3g}")
    width = min(s, math.pi / xi_norm)
    panels = int(math.ceil(rho_max / width))
    base = gauss_legendre(16, 0.0, rho_max / panels)
    rho = (np.arange(panels)[:, None] * (rho_max / panels) + base.nodes[None, :]).ravel()
    w = np.tile(base.weights, panels)
    order = Order(n - 2)
    integrand = rho ** (n / 2) * np.asarray(f(rho), dtype=np.float64) * bessel_j(order, xi_norm * rho)
    return (2 * math.pi) ** (n / 2) * xi_norm ** (-(n - 2) / 2) * float(np.dot(w, integrand))
