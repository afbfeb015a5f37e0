import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavekit.errors import DomainError
from wavekit.quad import sphere_rule
from wavekit.solver import (
    CauchyData,
    GaussianBump,
    GridSpec,
    WindowedCosine,
    energy,
    random_gaussian_data,
    solve_kirchhoff_3d,
    solve_poisson_2d,
    solve_spectral,
    spectral_multipliers,
    wave_residual,
)


def gaussian(n, center=None, width=1.0, amplitude=1.0):
    return GaussianBump(amplitude, center if center is not None else (0.0,) * n, width)


EIGEN_GRID = GridSpec(2, math.pi, 32)
EIGEN_K = (2.0, 0.0)
EIGEN = CauchyData(2, (WindowedCosine(1.0, EIGEN_K, (0.0, 0.0)),))


class TestData:
    def test_decay_bound(self, rng):
        b = gaussian(2, (0.5, -0.3), 0.8, 2.0)
        x = rng.uniform(-5, 5, size=(200, 2))
        bound = 2.0 * np.exp(-np.maximum(np.linalg.norm(x, axis=1) - np.linalg.norm(b.center), 0) ** 2 / (2 * 0.64))
        assert np.all(np.abs(b(x)) <= bound + 1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            CauchyData(3, (gaussian(2),))

    def test_linear_combination(self):
        d = CauchyData(1, (gaussian(1),)).scaled(2.0) + CauchyData(1, (), (gaussian(1),))
        assert d.phi_at(np.array([[0.0]]))[0] == 2.0 and d.psi_at(np.array([[0.0]]))[0] == 1.0

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            GridSpec(2, 1.0, 24)
        with pytest.raises(DomainError):
            GridSpec(2, 1.0, 8)
        with pytest.raises(DomainError):
            GridSpec(4, 1.0, 16)
        assert GridSpec.default(2, 5.0).N == 128 and GridSpec.default(3, 5.0).N == 64


class TestSpectral:
    def test_t0_identity(self):
        grid = GridSpec(2, 10.0, 64)
        d = CauchyData(2, (gaussian(2, (0.3, 0.1)),), (gaussian(2, (-0.2, 0.0), 0.7),))
        f = solve_spectral(grid, d, 0.0)
        assert np.max(np.abs(f.values - d.phi_at(grid.points()))) <= 1e-12
        assert np.max(np.abs(f.dt_values - d.psi_at(grid.points()))) <= 1e-12

    def test_eigenmode(self):
        for t in (0.3, 1.0, 2.7):
            f = solve_spectral(EIGEN_GRID, EIGEN, t)
            exact = math.cos(2.0 * t) * np.cos(EIGEN_GRID.points() @ np.array(EIGEN_K))
            assert np.max(np.abs(f.values - exact)) <= 1e-10

    def test_dalembert(self):
        grid = GridSpec(1, 20.0, 256)
        d = CauchyData(1, (gaussian(1, (0.4,)),))
        x = grid.axis()[:, None]
        for t in (0.5, 2.0, 5.0):
            u = solve_spectral(grid, d, t).values
            assert np.max(np.abs(u - (d.phi_at(x - t) + d.phi_at(x + t)) / 2)) <= 1e-8

    def test_dalembert_velocity(self):
        grid = GridSpec(1, 20.0, 256)
        s = 1.0
        d = CauchyData(1, (), (gaussian(1, (0.0,), s),))
        x = grid.axis()
        t = 3.0
        # antiderivative of the Gaussian via erf
        prim = lambda y: s * math.sqrt(math.pi / 2) * np.vectorize(math.erf)(y / (s * math.sqrt(2)))
        exact = (prim(x + t) - prim(x - t)) / 2
        assert np.max(np.abs(solve_spectral(grid, d, t).values - exact)) <= 1e-8

    def test_margin_enforced(self):
        grid = GridSpec(2, 5.0, 64)
        with pytest.raises(DomainError):
            solve_spectral(grid, CauchyData(2, (gaussian(2, (1.0, 0.0)),)), 0.5)

    def test_unwindowed_needs_lattice(self):
        d = CauchyData(2, (WindowedCosine(1.0, (1.5, 0.0), (0.0, 0.0)),))
        with pytest.raises(DomainError):
            solve_spectral(EIGEN_GRID, d, 1.0)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            solve_spectral(EIGEN_GRID, EIGEN, -1.0)

    def test_cosine_path_even_in_time(self):
        for t in (0.4, 1.9):
            cp, _, _, _ = spectral_multipliers(EIGEN_GRID, t)
            cm, _, _, _ = spectral_multipliers(EIGEN_GRID, -t)
            assert np.array_equal(cp, cm)

    def test_evaluate_matches_grid(self):
        grid = GridSpec(2, 10.0, 64)
        d = CauchyData(2, (gaussian(2),))
        f = solve_spectral(grid, d, 1.5)
        pts = grid.points()
        idx = [(3, 40), (32, 32), (50, 7)]
        vals = f.evaluate(np.array([pts[i] for i in idx]))
        assert np.max(np.abs(vals - np.array([f.values[i] for i in idx]))) <= 1e-13

    def test_linearity(self, rng):
        grid = GridSpec(2, 12.0, 64)
        d1, d2 = random_gaussian_data(rng, 2), random_gaussian_data(rng, 2)
        combo = d1.scaled(0.7) + d2.scaled(-1.3)
        u = solve_spectral(grid, combo, 1.2).values
        ref = 0.7 * solve_spectral(grid, d1, 1.2).values - 1.3 * solve_spectral(grid, d2, 1.2).values
        assert np.max(np.abs(u - ref)) <= 1e-10


class TestEnergy:
    def test_zero(self):
        f = solve_spectral(GridSpec(2, 5.0, 16), CauchyData(2), 1.0)
        assert energy(f) == 0.0

    def test_eigenmode_constant(self):
        e = [energy(solve_spectral(EIGEN_GRID, EIGEN, t)) for t in (0.0, 0.4, 1.3)]
        assert max(abs(v / e[0] - 1) for v in e) <= 1e-10
        # exact: |k|^2 * (1/2) * (2 pi)^2 for cos(k.x) on the box
        assert e[0] == pytest.approx(4.0 * 0.5 * (2 * math.pi) ** 2, rel=1e-12)

    def test_gaussian_conserved(self, rng):
        grid = GridSpec(2, 12.0, 128)
        d = random_gaussian_data(rng, 2)
        e0 = energy(solve_spectral(grid, d, 0.0))
        for t in (0.5, 1.0, 2.0):
            assert abs(energy(solve_spectral(grid, d, t)) / e0 - 1) <= 1e-10


class TestResidual:
    def test_eigenmode(self):
        assert wave_residual(EIGEN_GRID, EIGEN, 1.0, 1e-3) <= 1e-5

    def test_second_order(self):
        r1 = wave_residual(EIGEN_GRID, EIGEN, 1.0, 1e-2)
        r2 = wave_residual(EIGEN_GRID, EIGEN, 1.0, 5e-3)
        assert r2 <= r1 / 3.5

    def test_zero_data(self):
        assert wave_residual(EIGEN_GRID, CauchyData(2), 1.0, 1e-2) == 0.0

    def test_rejects(self):
        with pytest.raises(DomainError):
            wave_residual(EIGEN_GRID, EIGEN, 1.0, 2.0)


class TestKirchhoff:
    def test_calibration(self):
        d = CauchyData(3, (), (gaussian(3, width=1e4),))
        assert abs(solve_kirchhoff_3d(d, (0.2, 0.0, -0.1), 1.7) - 1.7) <= 1e-4

    def test_matches_spectral(self):
        s = 0.8
        d = CauchyData(3, (gaussian(3, width=s),))
        grid = GridSpec(3, 10.0, 64)
        t = 3 * s
        u = solve_spectral(grid, d, t).evaluate(np.zeros(3))[0]
        assert abs(solve_kirchhoff_3d(d, (0, 0, 0), t) - u) <= 1e-4

    def test_finite_speed(self):
        d = CauchyData(3, (gaussian(3, width=0.3),), (gaussian(3, width=0.3),))
        assert abs(solve_kirchhoff_3d(d, (10.0, 0, 0), 4.0)) <= 1e-8

    def test_explicit_rule(self):
        d = CauchyData(3, (gaussian(3),))
        a = solve_kirchhoff_3d(d, (0.3, 0, 0), 1.0, sphere_rule(3, 40))
        b = solve_kirchhoff_3d(d, (0.3, 0, 0), 1.0)
        assert abs(a - b) <= 1e-10

    def test_rejects(self):
        with pytest.raises(DomainError):
            solve_kirchhoff_3d(CauchyData(2), (0, 0), 1.0)
        with pytest.raises(DomainError):
            solve_kirchhoff_3d(CauchyData(3), (0, 0, 0), 0.0)

    def test_linearity(self, rng):
        d1, d2 = random_gaussian_data(rng, 3), random_gaussian_data(rng, 3)
        x, t = (0.1, 0.2, -0.3), 1.4
        combo = solve_kirchhoff_3d(d1.scaled(2.0) + d2.scaled(-0.5), x, t)
        ref = 2.0 * solve_kirchhoff_3d(d1, x, t) - 0.5 * solve_kirchhoff_3d(d2, x, t)
        assert abs(combo - ref) <= 1e-6


class TestPoisson:
    def test_calibration(self):
        d = CauchyData(2, (), (gaussian(2, width=1e4),))
        assert abs(solve_poisson_2d(d, (0.2, -0.1), 1.7) - 1.7) <= 1e-4

    def test_matches_spectral(self):
        s = 0.8
        d = CauchyData(2, (gaussian(2, width=s),))
        grid = GridSpec(2, 10.0, 128)
        t = 2 * s
        u = solve_spectral(grid, d, t).evaluate(np.zeros(2))[0]
        assert abs(solve_poisson_2d(d, (0, 0), t) - u) <= 5e-4

    def test_finite_speed(self):
        d = CauchyData(2, (gaussian(2, width=0.3),), (gaussian(2, width=0.3),))
        assert abs(solve_poisson_2d(d, (10.0, 0), 4.0)) <= 1e-8

    def test_rejects(self):
        with pytest.raises(DomainError):
            solve_poisson_2d(CauchyData(3), (0, 0, 0), 1.0)
        with pytest.raises(DomainError):
            solve_poisson_2d(CauchyData(2), (0, 0), -1.0)
        with pytest.raises(DomainError):
            solve_poisson_2d(CauchyData(2), (0, 0), 1.0, resolution=2)


class TestHuygens:
    def test_odd_vanishes_even_tail(self):
        s, a = 0.3, 0.0
        t = a + 8 * s
        d3 = CauchyData(3, (gaussian(3, width=s),), (gaussian(3, width=s),))
        d2 = CauchyData(2, (gaussian(2, width=s),), (gaussian(2, width=s),))
        assert abs(solve_kirchhoff_3d(d3, (0, 0, 0), t)) <= 1e-6 * d3.sup_norm_bound()
        assert abs(solve_poisson_2d(d2, (0, 0), t)) > 1e-3 * d2.sup_norm_bound()


@given(st.floats(0.2, 2.5), st.floats(-1, 1), st.floats(-1, 1))
def test_kirchhoff_spectral_property(t, x1, x2):
    d = CauchyData(3, (gaussian(3, (0.2, -0.1, 0.0), 0.9),), (gaussian(3, (-0.3, 0.0, 0.1), 1.1, -0.5),))
    f = solve_spectral(_GRID3, d, t)
    x = np.array([x1, x2, 0.0]) / 2
    assert abs(f.evaluate(x)[0] - solve_kirchhoff_3d(d, x, t)) <= 1e-4


_GRID3 = GridSpec(3, 11.0, 64)
