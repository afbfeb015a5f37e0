"""Solvers for the free wave equation u_tt = Laplacian(u), u(.,0) = phi, u_t(.,0) = psi.

Three independent routes:

* ``solve_spectral``: periodic FFT grid, multiplies the transformed data by
  ``cos(t|xi|)`` and ``sin(t|xi|)/|xi|``; dimensions 1 to 3.
* ``solve_kirchhoff_3d``: u = d/dt (t M_t phi) + t M_t psi with M_t the mean
  over the sphere of radius t about x.
* ``solve_poisson_2d``: u = d/dt (t N_t phi) + t N_t psi with
  t N_t g = (1/2 pi) int_{|y-x|<t} g(y) / sqrt(t^2 - |y-x|^2) dy.

The time derivative in the point solvers is a central difference of step
1e-4 t with one Richardson halving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from wavekit.errors import DomainError
from wavekit.kernels import cosine_kernel, sine_kernel
from wavekit.quad import SphereRule, ball_singular_rule, sphere_rule

# -- Cauchy data --------------------------------------------------------------


def _vec(v, n=None):
    out = tuple(float(c) for c in np.ravel(v))
    if n is not None and len(out) != n:
        raise DomainError(f"expected a {n}-vector, got {len(out)} components")
    return out


@dataclass(frozen=True)
class GaussianBump:
    """A exp(-|x - x0|^2 / (2 s^2))."""

    amplitude: float
    center: tuple
    width: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.width > 0:
            raise DomainError("Gaussian width must be positive")

    @property
    def n(self) -> int:
        return len(self.center)

    def __call__(self, x):
        d = np.asarray(x, dtype=np.float64) - np.asarray(self.center)
        return self.amplitude * np.exp(-np.sum(d * d, axis=-1) / (2.0 * self.width**2))

    def extent(self) -> float:
        return float(np.linalg.norm(self.center)) + 4.0 * self.width


@dataclass(frozen=True)
class WindowedCosine:
    """A cos(k.(x - x0)) exp(-|x - x0|^2 / (2 s^2)); ``width=None`` drops the window."""

    amplitude: float
    wavevector: tuple
    center: tuple
    width: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "wavevector", _vec(self.wavevector))
        object.__setattr__(self, "center", _vec(self.center, len(self.wavevector)))
        if self.width is not None and not self.width > 0:
            raise DomainError("window width must be positive")

    @property
    def n(self) -> int:
        return len(self.center)

    def __call__(self, x):
        d = np.asarray(x, dtype=np.float64) - np.asarray(self.center)
        out = self.amplitude * np.cos(d @ np.asarray(self.wavevector))
        if self.width is not None:
            out = out * np.exp(-np.sum(d * d, axis=-1) / (2.0 * self.width**2))
        return out

    def extent(self) -> float | None:
        if self.width is None:
            return None
        return float(np.linalg.norm(self.center)) + 4.0 * self.width


@dataclass(frozen=True)
class CauchyData:
    """Initial displacement and velocity as sums of family members."""

    n: int
    phi: tuple = ()
    psi: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))
        object.__setattr__(self, "psi", tuple(self.psi))
        for term in self.phi + self.psi:
            if term.n != self.n:
                raise DomainError(f"data term of dimension {term.n} in a dimension-{self.n} problem")

    @staticmethod
    def _sum(terms, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape[:-1])
        for term in terms:
            out = out + term(x)
        return out

    def phi_at(self, x):
        return self._sum(self.phi, x)

    def psi_at(self, x):
        return self._sum(self.psi, x)

    def scaled(self, a: float) -> "CauchyData":
        return CauchyData(self.n, tuple(_scale(t, a) for t in self.phi),
                          tuple(_scale(t, a) for t in self.psi))

    def __add__(self, other: "CauchyData") -> "CauchyData":
        if other.n != self.n:
            raise DomainError("cannot add data of different dimensions")
        return CauchyData(self.n, self.phi + other.phi, self.psi + other.psi)

    def sup_norm_bound(self) -> float:
        """Sum of amplitudes: an upper bound for max(|phi|, |psi|)."""
        return max(sum(abs(t.amplitude) for t in self.phi),
                   sum(abs(t.amplitude) for t in self.psi), 0.0)


def _scale(term, a):
    return type(term)(**{**term.__dict__, "amplitude": term.amplitude * a})


# -- periodic grid ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Periodic box [-L, L)^n with N points per axis (N a power of two, >= 16)."""

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("the spectral grid supports n = 1, 2, 3")
        if not self.L > 0:
            raise DomainError("L must be positive")
        if self.N < 16 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 16, got {self.N}")

    @classmethod
    def default(cls, n: int, L: float) -> "GridSpec":
        return cls(n, L, 64 if n == 3 else 128)

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    def axis(self) -> np.ndarray:
        return -self.L + self.spacing * np.arange(self.N)

    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.spacing)

    def points(self) -> np.ndarray:
        axes = [self.axis()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def wavevectors(self, drop_nyquist: bool = False) -> list:
        k = self.frequencies()
        if drop_nyquist:
            k = k.copy()
            k[self.N // 2] = 0.0
        return np.meshgrid(*([k] * self.n), indexing="ij", sparse=True)

    def xi_norm(self) -> np.ndarray:
        return np.sqrt(sum(k * k for k in self.wavevectors()))

    def on_lattice(self, k) -> bool:
        steps = np.asarray(k) * self.L / np.pi
        return bool(np.all(np.abs(steps - np.round(steps)) < 1e-9)
                    and np.all(np.abs(np.round(steps)) < self.N / 2))


@dataclass
class SolutionField:
    grid: GridSpec
    t: float
    values: np.ndarray
    dt_values: np.ndarray
    spectrum: np.ndarray = field(repr=False)

    def evaluate(self, points) -> np.ndarray:
        """Trigonometric interpolation of u(., t) at arbitrary points."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64)) + self.grid.L
        k = self.grid.frequencies()
        scale = self.spectrum.size
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            acc = self.spectrum
            for axis in range(self.grid.n - 1, -1, -1):
                acc = acc @ np.exp(1j * k * p[axis])
            out[i] = acc.real / scale
        return out


def check_margin(grid: GridSpec, data: CauchyData, t: float) -> None:
    """Enforce |x0| + 4 s + t <= L for windowed terms, lattice wavevectors otherwise."""
    for term in data.phi + data.psi:
        ext = term.extent()
        if ext is None:
            if not grid.on_lattice(term.wavevector):
                raise DomainError("an unwindowed cosine needs a wavevector on the grid lattice")
        elif ext + abs(t) > grid.L:
            raise DomainError(
                f"wraparound precondition violated: |x0| + 4s + t = {ext + abs(t):.6g} > L = {grid.L}")


def spectral_multipliers(grid: GridSpec, t: float):
    """cos(t|xi|), sin(t|xi|)/|xi| and their t-derivatives on the grid frequencies."""
    xi = grid.xi_norm()
    c = cosine_kernel(t, xi)
    s = sine_kernel(t, xi)
    return c, s, -xi * xi * s, c


def _evolve(grid: GridSpec, data: CauchyData, t: float) -> SolutionField:
    pts = grid.points()
    phi = data.phi_at(pts)
    phi_hat = np.fft.fftn(phi)
    psi_hat = np.fft.fftn(data.psi_at(pts))
    c, s, dc, ds = spectral_multipliers(grid, t)
    u_hat = c * phi_hat + s * psi_hat
    v_hat = dc * phi_hat + ds * psi_hat
    values = phi if t == 0 else np.fft.ifftn(u_hat).real
    return SolutionField(grid, float(t), values, np.fft.ifftn(v_hat).real, u_hat)


def solve_spectral(grid: GridSpec, data: CauchyData, t: float) -> SolutionField:
    if data.n != grid.n:
        raise DomainError("data and grid dimensions differ")
    if t < 0:
        raise DomainError("t must be non-negative")
    check_margin(grid, data, t)
    return _evolve(grid, data, t)


def energy(field_: SolutionField) -> float:
    """Grid sum of u_t^2 + |grad u|^2 times the cell volume (spectral gradient)."""
    grid = field_.grid
    total = np.sum(field_.dt_values**2)
    for k in grid.wavevectors(drop_nyquist=True):
        total += np.sum(np.fft.ifftn(1j * k * field_.spectrum).real ** 2)
    return float(total * grid.cell_volume)


def wave_residual(grid: GridSpec, data: CauchyData, t: float, dt: float) -> float:
    """max |second time difference of u - spectral Laplacian of u| on the grid."""
    if not 0 < dt < t:
        raise DomainError("need 0 < dt < t")
    check_margin(grid, data, t + dt)
    u_m = _evolve(grid, data, t - dt).values
    mid = _evolve(grid, data, t)
    u_p = _evolve(grid, data, t + dt).values
    lap = np.fft.ifftn(-grid.xi_norm() ** 2 * mid.spectrum).real
    return float(np.max(np.abs((u_p - 2.0 * mid.values + u_m) / dt**2 - lap)))


# -- point solvers ----------------------------------------------------------------


def _time_derivative(F, t: float) -> float:
    h = 1e-4 * t
    coarse = (F(t + h) - F(t - h)) / (2.0 * h)
    fine = (F(t + h / 2) - F(t - h / 2)) / h
    return (4.0 * fine - coarse) / 3.0


DEFAULT_SPHERE_RESOLUTION = 48


def solve_kirchhoff_3d(data: CauchyData, x, t: float, rule: SphereRule | None = None) -> float:
    if data.n != 3:
        raise DomainError("Kirchhoff's formula is for n = 3")
    if not t > 0:
        raise DomainError("t must be positive")
    rule = rule or sphere_rule(3, DEFAULT_SPHERE_RESOLUTION)
    if rule.n != 3:
        raise DomainError("need a rule on the 2-sphere")
    x = np.asarray(_vec(x, 3))
    w = rule.weights / rule.weights.sum()

    def t_mean(g, r):
        return r * float(np.dot(w, g(x + r * rule.nodes)))

    u = t_mean(data.psi_at, t) if data.psi else 0.0
    if data.phi:
        u += _time_derivative(lambda r: t_mean(data.phi_at, r), t)
    return u


DEFAULT_BALL_RESOLUTION = 48


def solve_poisson_2d(data: CauchyData, x, t: float, resolution: int = DEFAULT_BALL_RESOLUTION) -> float:
    if data.n != 2:
        raise DomainError("Poisson's formula is for n = 2")
    if not t > 0:
        raise DomainError("t must be positive")
    if resolution < 4:
        raise DomainError("resolution must be >= 4")
    x = np.asarray(_vec(x, 2))
    m = 2 * resolution
    theta = 2.0 * np.pi * np.arange(m) / m
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def t_mean(g, r):
        radial = ball_singular_rule(2, r, resolution)
        pts = x + radial.nodes[:, None, None] * dirs[None, :, :]
        return float(radial.weights @ g(pts).sum(axis=1)) / m

    u = t_mean(data.psi_at, t) if data.psi else 0.0
    if data.phi:
        u += _time_derivative(lambda r: t_mean(data.phi_at, r), t)
    return u


def random_gaussian_data(rng: np.random.Generator, n: int, terms: int = 2,
                         center_radius: float = 1.0, width=(0.7, 1.2)) -> CauchyData:
    """Random sums of Gaussians for phi and psi (used by sweeps and tests)."""

    def bump():
        c = rng.uniform(-center_radius, center_radius, size=n) / math.sqrt(n)
        return GaussianBump(float(rng.uniform(-1, 1)), c, float(rng.uniform(*width)))

    return CauchyData(n, tuple(bump() for _ in range(terms)), tuple(bump() for _ in range(terms)))
