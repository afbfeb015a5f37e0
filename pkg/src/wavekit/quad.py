"""Quadrature rules: Gauss-Legendre, product rules on spheres, the singular
ball weight 1/sqrt(R^2 - r^2), and an Abel-regularised integrator for
half-line integrals of sin(R rho) g(rho)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from wavekit.errors import ConvergenceError, DomainError


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Rule1D:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def __call__(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=512)
def _legendre_unit(n: int):
    """Nodes/weights on [-1, 1] by Newton iteration on the three-term recurrence."""
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        if n == 1:
            p0 = np.ones_like(x)
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    # one more pass for the derivative at the converged nodes
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    if n == 1:
        p0 = np.ones_like(x)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return _frozen(x), _frozen(w)


def gauss_legendre(npoints: int, lo: float = -1.0, hi: float = 1.0) -> Rule1D:
    """n-point Gauss-Legendre rule on [lo, hi]; exact for degree <= 2n - 1."""
    if int(npoints) != npoints or npoints < 1:
        raise DomainError(f"npoints must be a positive integer, got {npoints!r}")
    if not lo < hi:
        raise DomainError("gauss_legendre requires lo < hi")
    x, w = _legendre_unit(int(npoints))
    half = 0.5 * (hi - lo)
    return Rule1D(_frozen(lo + half * (x + 1.0)), _frozen(half * w), (float(lo), float(hi)))


def _chebyshev2(m: int):
    """Gauss rule for weight sqrt(1 - s^2) on [-1, 1] (Chebyshev, second kind)."""
    i = np.arange(1, m + 1)
    t = i * np.pi / (m + 1)
    return np.cos(t)[::-1].copy(), (np.pi / (m + 1) * np.sin(t) ** 2)[::-1].copy()


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n, 2 pi^{n/2} / Gamma(n/2)."""
    from wavekit.specfun import gamma_half

    return 2.0 * math.pi ** (n / 2) / gamma_half(n / 2)


@dataclass(frozen=True)
class SphereRule:
    n: int
    nodes: np.ndarray  # (N, n) points on the unit sphere
    weights: np.ndarray  # (N,), sums to the sphere area

    def integrate(self, f) -> complex | float:
        """Sum of ``weights * f(nodes)``; ``f`` receives an (N, n) array."""
        return np.dot(self.weights, f(self.nodes))

    def mean(self, f):
        return self.integrate(f) / self.weights.sum()


def _polar_factor(p: int, m: int):
    """Rule in s = cos(phi) for int_0^pi F(phi) sin^p(phi) dphi.

    Returns (s, weight) with the Jacobian folded into the weight.  Odd p gives
    the polynomial weight (1-s^2)^((p-1)/2) (Gauss-Legendre in s); even p gives
    sqrt(1-s^2) times a polynomial (Chebyshev second kind).
    """
    if p % 2 == 1:
        rule = gauss_legendre(m)
        return np.asarray(rule.nodes), rule.weights * (1.0 - rule.nodes**2) ** ((p - 1) // 2)
    s, w = _chebyshev2(m)
    return s, w * (1.0 - s * s) ** ((p - 2) // 2)


@lru_cache(maxsize=64)
def sphere_rule(n: int, resolution: int, axis_resolution: int | None = None) -> SphereRule:
    """Product rule on the unit sphere of R^n, 2 <= n <= 7.

    Hyperspherical coordinates: x_1 = cos phi_1, x_2 = sin phi_1 cos phi_2, ...
    Each polar angle gets ``resolution`` Gauss points in its cosine (the first
    one gets ``axis_resolution`` if given) and the azimuth gets
    ``2 * resolution`` equispaced points.  A plane wave along x_1 only varies
    with phi_1, so a high ``axis_resolution`` with a small ``resolution``
    integrates it to full accuracy cheaply.
    """
    if n not in range(2, 8):
        raise DomainError(f"sphere rules are provided for 2 <= n <= 7, got n={n}")
    if resolution < 4:
        raise DomainError("resolution must be >= 4")
    axis_resolution = resolution if axis_resolution is None else int(axis_resolution)
    if axis_resolution < 4:
        raise DomainError("axis_resolution must be >= 4")
    n_az = 2 * resolution if n > 2 else 2 * axis_resolution
    az = 2.0 * np.pi * np.arange(n_az) / n_az
    az_w = np.full(n_az, 2.0 * np.pi / n_az)
    if n == 2:
        nodes = np.stack([np.cos(az), np.sin(az)], axis=1)
        return SphereRule(2, _frozen(nodes), _frozen(az_w))

    factors = []
    for k in range(1, n - 1):
        m = axis_resolution if k == 1 else resolution
        factors.append(_polar_factor(n - 1 - k, m))
    grids = [f[0] for f in factors] + [az]
    wgrids = [f[1] for f in factors] + [az_w]
    mesh = np.meshgrid(*grids, indexing="ij")
    wmesh = np.meshgrid(*wgrids, indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in wmesh]), axis=0)
    cos_polar = [g.ravel() for g in mesh[:-1]]
    phi_az = mesh[-1].ravel()
    pts = np.empty((weights.size, n))
    sin_prod = np.ones(weights.size)
    for k, c in enumerate(cos_polar):
        pts[:, k] = sin_prod * c
        sin_prod = sin_prod * np.sqrt(np.maximum(0.0, 1.0 - c * c))
    pts[:, n - 2] = sin_prod * np.cos(phi_az)
    pts[:, n - 1] = sin_prod * np.sin(phi_az)
    return SphereRule(n, _frozen(pts), _frozen(weights))


def ball_singular_rule(n: int, R: float, resolution: int = 48) -> Rule1D:
    """Radial rule on (0, R) for the measure r^{n-1} / sqrt(R^2 - r^2) dr.

    With r = R sin(theta) the measure becomes R^{n-1} sin^{n-1}(theta) dtheta
    on (0, pi/2), which has no endpoint singularity; Gauss-Legendre in theta
    then converges spectrally.  ``sum(weights * f(nodes))`` approximates
    ``int_0^R f(r) r^{n-1} / sqrt(R^2 - r^2) dr``.
    """
    if not R > 0:
        raise DomainError(f"ball radius must be positive, got R={R}")
    if n < 1:
        raise DomainError("dimension must be >= 1")
    rule = gauss_legendre(resolution, 0.0, 0.5 * np.pi)
    st = np.sin(rule.nodes)
    return Rule1D(_frozen(R * st), _frozen(rule.weights * (R * st) ** (n - 1)), (0.0, float(R)))


# -- Abel-regularised half-line integrals -------------------------------------

DEFAULT_LADDER = (0.2, 0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class OscConfig:
    """Settings for ``osc_halfline_sine``.

    epsilon_ladder: damping parameters of the Abel factor e^{-eps rho},
        strictly decreasing; the integral is extrapolated to eps = 0.
    rho_cutoff: explicit truncation of the half-line; ``None`` picks the point
        where the weakest damping has dropped below ``envelope_tol``.
    panel_points: Gauss points per panel.
    panels_per_period: panels per period of the fastest oscillation.
    """

    epsilon_ladder: tuple = DEFAULT_LADDER
    rho_cutoff: float | None = None
    panel_points: int = 8
    panels_per_period: int = 2
    envelope_tol: float = 1e-12

    def __post_init__(self):
        lad = tuple(float(e) for e in self.epsilon_ladder)
        object.__setattr__(self, "epsilon_ladder", lad)
        if len(lad) < 2:
            raise DomainError("epsilon_ladder needs at least two values")
        if any(e <= 0 for e in lad) or any(b >= a for a, b in zip(lad, lad[1:])):
            raise DomainError("epsilon_ladder must be positive and strictly decreasing")
        if self.panel_points < 2 or self.panels_per_period < 1:
            raise DomainError("panel_points >= 2 and panels_per_period >= 1 required")


@dataclass(frozen=True)
class OscResult:
    value: float
    error_estimate: float
    extrapolants: tuple = field(repr=False)
    damped_values: tuple = field(repr=False)


def neville_at_zero(eps, vals):
    """Diagonal of the Neville table: P_k(0) interpolating the first k+1 points."""
    eps = [float(e) for e in eps]
    table = [float(v) for v in vals]
    diag = [table[0]]
    for level in range(1, len(eps)):
        for i in range(len(eps) - 1, level - 1, -1):
            j = i - level
            table[i] = (eps[i] * table[i - 1] - eps[j] * table[i]) / (eps[i] - eps[j])
        diag.append(table[level])
    return diag


def _cutoff(eps_min: float, tol: float, growth: float) -> float:
    rho = math.log(1.0 / tol) / eps_min
    for _ in range(50):
        rho_new = (math.log(1.0 / tol) + growth * math.log(max(rho, 1.0))) / eps_min
        if abs(rho_new - rho) < 1e-9 * rho:
            break
        rho = rho_new
    return rho


@lru_cache(maxsize=32)
def halfline_rule(omega: float, rho_max: float, panel_points: int, panels_per_period: int):
    """Composite Gauss rule on [0, rho_max] with panels of width
    ``2 pi / (omega * panels_per_period)``."""
    width = 2.0 * math.pi / (omega * panels_per_period)
    n_panels = max(1, int(math.ceil(rho_max / width)))
    base = gauss_legendre(panel_points, 0.0, width)
    starts = np.arange(n_panels) * width
    nodes = (starts[:, None] + base.nodes[None, :]).ravel()
    weights = np.tile(base.weights, n_panels)
    return _frozen(nodes), _frozen(weights)


def osc_halfline_sine(g, R: float, cfg: OscConfig | None = None, *,
                      bandwidth: float = 0.0, growth: float = 0.0) -> OscResult:
    """Abel-regularised ``int_0^inf sin(R rho) g(rho) d rho``.

    For each eps on the ladder the damped integral
    ``int_0^inf e^{-eps rho} sin(R rho) g(rho) d rho`` is computed by a
    composite Gauss rule (one node set shared by all eps), then the values
    are extrapolated polynomially to eps = 0.  The error estimate is the
    spread of the last two extrapolants.

    ``g`` is vectorised.  ``bandwidth`` is the oscillation frequency of ``g``
    itself (panels resolve R + bandwidth) and ``growth`` the power-law growth
    of |g| used to place the cutoff.
    """
    cfg = cfg or OscConfig()
    if not R > 0:
        raise DomainError("osc_halfline_sine requires R > 0")
    # quantised so that nearby R (finite differences) share one node set
    omega = math.ceil(4.0 * (R + max(0.0, bandwidth))) / 4.0
    eps = np.asarray(cfg.epsilon_ladder)
    rho_max = _cutoff(eps[-1], cfg.envelope_tol, growth)
    if cfg.rho_cutoff is not None:
        wavelength = 2.0 * math.pi / omega
        if cfg.rho_cutoff < 10.0 * wavelength:
            raise DomainError("rho_cutoff must cover at least ten oscillation wavelengths")
        rho_max = float(cfg.rho_cutoff)
    nodes, weights = halfline_rule(omega, round(rho_max, 6), cfg.panel_points,
                                   cfg.panels_per_period)
    base = weights * np.sin(R * nodes) * np.asarray(g(nodes), dtype=np.float64)
    damped = np.exp(-np.outer(eps, nodes)) @ base
    diag = neville_at_zero(eps, damped)
    value = diag[-1]
    spread = abs(diag[-1] - diag[-2])
    prev = abs(diag[-2] - diag[-3]) if len(diag) >= 3 else math.inf
    scale = max(1.0, abs(value), float(np.max(np.abs(damped))))
    if spread > prev and spread > 1e-9 * scale:
        raise ConvergenceError(
            f"Abel extrapolants do not contract (last spreads {prev:.3g} -> {spread:.3g})")
    return OscResult(float(value), float(spread), tuple(diag), tuple(float(v) for v in damped))
