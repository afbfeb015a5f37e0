"""Acceptance gate: nine criteria, each reported as one PASS/FAIL line."""
import math
import time

import numpy as np

from wavekit.cli import main
from wavekit.kernels import (
    KernelQuery,
    RadialProfile,
    ascent_step_check,
    even_representation,
    hankel_sine,
    hankel_sine_limit,
    odd_representation,
    radial_fourier,
    sine_kernel,
)
from wavekit.solver import (
    CauchyData,
    GaussianBump,
    GridSpec,
    energy,
    random_gaussian_data,
    solve_kirchhoff_3d,
    solve_poisson_2d,
    solve_spectral,
)
from wavekit.specfun import bessel_j_half, bessel_j_poisson, bessel_j_series, recurrence_residual


def sample_kernel_cases(seed, dims, count=50):
    rng = np.random.default_rng(seed)
    return [(int(rng.choice(dims)), float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.1, 5.0)))
            for _ in range(count)]


def sample_pairs(seed, count, inside, gap=0.25):
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        R, t = (float(v) for v in rng.uniform(0.5, 3.0, size=2))
        if abs(R - t) >= gap and (t < R) == inside:
            pairs.append((R, t))
    return pairs


def test_1_odd_representation(criterion):
    t0 = time.perf_counter()
    worst_a = worst_fd = 0.0
    for n, R, xi in sample_kernel_cases(1, [3, 5, 7]):
        q = KernelQuery.along_axis(n, R, xi)
        exact = sine_kernel(R, xi)
        worst_a = max(worst_a, abs(odd_representation(q, "analytic") - exact))
        worst_fd = max(worst_fd, abs(odd_representation(q, "finite_difference") - exact))
    wall = time.perf_counter() - t0
    ok = worst_a <= 1e-6 and worst_fd <= 1e-3 and wall < 30
    assert criterion(1, "odd-dimension representation", ok,
                     f"analytic max err {worst_a:.2e} (tol 1e-6), finite-difference {worst_fd:.2e} "
                     f"(tol 1e-3), {wall:.1f}s")


def test_2_even_representation(criterion):
    t0 = time.perf_counter()
    worst = {2: 0.0, 4: 0.0, 6: 0.0}
    for n, R, xi in sample_kernel_cases(2, [2, 4, 6]):
        q = KernelQuery.along_axis(n, R, xi)
        worst[n] = max(worst[n], abs(even_representation(q, "finite_difference") - sine_kernel(R, xi)))
    wall = time.perf_counter() - t0
    ok = worst[2] <= 1e-4 and max(worst[4], worst[6]) <= 1e-3 and wall < 60
    assert criterion(2, "even-dimension representation", ok,
                     f"max err n=2 {worst[2]:.2e} (tol 1e-4), n=4 {worst[4]:.2e}, n=6 {worst[6]:.2e} "
                     f"(tol 1e-3), {wall:.1f}s")


def test_3_hankel_order_zero(criterion):
    t0 = time.perf_counter()
    worst_ratio = 0.0
    worst_err = 0.0
    for inside in (True, False):
        for R, t in sample_pairs(3 if inside else 4, 20, inside):
            res = hankel_sine(0, R, t)
            assert res.region == ("inside" if inside else "outside")
            tol = max(5e-3, 3 * res.error_estimate)
            err = abs(res.value - (1 / math.sqrt(R * R - t * t) if inside else 0.0))
            worst_err = max(worst_err, err)
            worst_ratio = max(worst_ratio, err / tol)
    wall = time.perf_counter() - t0
    ok = worst_ratio <= 1 and wall < 30
    assert criterion(3, "Hankel sine integral, order 0", ok,
                     f"20 inside + 20 outside pairs, max err {worst_err:.2e}, "
                     f"max err/tol {worst_ratio:.2e}, {wall:.1f}s")


def test_4_ascent(criterion):
    t0 = time.perf_counter()
    pairs = sample_pairs(5, 5, True) + sample_pairs(6, 5, False)
    worst = 0.0
    for nu in (1, 2):
        for R, t in pairs:
            worst = max(worst, ascent_step_check(nu, R, t, h=1e-3).residual)
    wall = time.perf_counter() - t0
    ok = worst <= 1e-2 and wall < 60
    assert criterion(4, "ascent relation for orders 1, 2", ok,
                     f"10 pairs x 2 orders, max residual {worst:.2e} (tol 1e-2), {wall:.1f}s")


def test_5_special_functions(criterion):
    x = np.linspace(0.05, 30.0, 600)
    route = 0.0
    for nu in ("0", "1/2", "1", "3/2", "2", "5/2"):
        route = max(route, float(np.max(np.abs(bessel_j_series(nu, x) - bessel_j_poisson(nu, x)))))
    half = float(np.max(np.abs(bessel_j_half(x) - bessel_j_series("1/2", x))))
    route = max(route, half)
    ratios = []
    for nu, xv in [(1, 2.0), (2, 5.0), ("3/2", 7.5), ("5/2", 11.0)]:
        r = [recurrence_residual(nu, xv, h) for h in (1e-2, 5e-3, 2.5e-3)]
        ratios += [r[0] / r[1], r[1] / r[2]]
    ok = route <= 1e-9 and half <= 1e-10 and min(ratios) >= 3.5
    assert criterion(5, "special functions", ok,
                     f"route spread {route:.2e} (tol 1e-9), half-order closed form {half:.2e} "
                     f"(tol 1e-10), recurrence ratio min {min(ratios):.2f} (order 2 -> 4)")


def test_6_cross_solver(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = {3: 0.0, 2: 0.0}
    grids = {3: GridSpec(3, 11.0, 64), 2: GridSpec(2, 11.0, 128)}
    for n, solve in ((3, solve_kirchhoff_3d), (2, solve_poisson_2d)):
        for _ in range(10):
            data = random_gaussian_data(rng, n)
            for _ in range(5):
                x = rng.uniform(-1.0, 1.0, size=n)
                t = float(rng.uniform(0.5, 3.0))
                ref = solve_spectral(grids[n], data, t).evaluate(x)[0]
                worst[n] = max(worst[n], abs(solve(data, x, t) - ref))
    wall = time.perf_counter() - t0
    ok = worst[3] <= 1e-4 and worst[2] <= 5e-4 and wall < 60
    assert criterion(6, "cross-solver agreement", ok,
                     f"Kirchhoff vs spectral {worst[3]:.2e} (tol 1e-4), Poisson vs spectral "
                     f"{worst[2]:.2e} (tol 5e-4), {wall:.1f}s")


def test_7_physics(criterion):
    rng = np.random.default_rng(7)
    grid = GridSpec(2, 12.0, 128)
    data = random_gaussian_data(rng, 2)
    e0 = energy(solve_spectral(grid, data, 0.0))
    drift = max(abs(energy(solve_spectral(grid, data, t)) / e0 - 1) for t in np.linspace(0.0, 2.0, 9))
    s = 0.3
    t = 8 * s  # data effectively inside |x| <= 2 s; the sphere has left it
    d3 = CauchyData(3, (GaussianBump(1.0, (0, 0, 0), s),), (GaussianBump(1.0, (0, 0, 0), s),))
    d2 = CauchyData(2, (GaussianBump(1.0, (0, 0), s),), (GaussianBump(1.0, (0, 0), s),))
    u3 = abs(solve_kirchhoff_3d(d3, (0, 0, 0), t)) / d3.sup_norm_bound()
    u2 = abs(solve_poisson_2d(d2, (0, 0), t)) / d2.sup_norm_bound()
    ok = drift <= 1e-10 and u3 <= 1e-6 and u2 > 1e-3
    assert criterion(7, "energy and Huygens", ok,
                     f"energy drift {drift:.2e} (tol 1e-10), n=3 |u|/|data| {u3:.2e} (<= 1e-6), "
                     f"n=2 tail {u2:.2e} (> 1e-3)")


def test_8_oracles(criterion):
    grid = GridSpec(1, 20.0, 256)
    data = CauchyData(1, (GaussianBump(1.0, (0.4,), 1.0),))
    x = grid.axis()[:, None]
    dal = max(float(np.max(np.abs(solve_spectral(grid, data, t).values
                                  - (data.phi_at(x - t) + data.phi_at(x + t)) / 2)))
              for t in (0.5, 2.0, 5.0))
    gauss = RadialProfile(lambda r: np.exp(-np.asarray(r) ** 2 / 2), 1.0)
    rf = max(abs(radial_fourier(n, gauss, xi) - (2 * math.pi) ** (n / 2) * math.exp(-xi * xi / 2))
             for n in (2, 3) for xi in (0.5, 1.0, 2.5))
    ok = dal <= 1e-8 and rf <= 1e-6
    assert criterion(8, "oracle identities", ok,
                     f"d'Alembert {dal:.2e} (tol 1e-8), radial Fourier of Gaussian {rf:.2e} (tol 1e-6)")


def test_9_determinism(criterion, tmp_path):
    commands = [
        ["kernel-verify", "--dims", "2,3,4", "--samples", "6", "--seed", "9"],
        ["lemma-verify", "--nu", "0,1", "--samples", "2", "--seed", "9"],
        ["bessel-table", "--x-count", "5"],
        ["solve", "--dim", "3", "--method", "crosscheck", "--times", "1", "--points", "2", "--seed", "9"],
    ]
    identical = True
    compared = 0
    for i, cmd in enumerate(commands):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{i}{run}"
            main(cmd + ["--out", str(out)])
            outs.append(out)
        for path in sorted(outs[0].iterdir()):
            if path.name.endswith(".summary.json"):
                continue  # carries wall time by design
            compared += 1
            identical &= path.read_bytes() == (outs[1] / path.name).read_bytes()
    assert criterion(9, "determinism", identical,
                     f"{compared} report files byte-identical across repeated runs: {identical}")
