"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_core.py [--repeat 5]

Times the two hot kernels directly on representative sizes, then one
end-to-end Hankel sine integral per backend (each in a fresh interpreter,
since the backend is chosen at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from wavekit import _purepy

try:
    from wavekit import _core
except ImportError:
    _core = None


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases():
    rng = np.random.default_rng(0)
    x_series = np.linspace(0.0, 48.0, 20000)
    x_trig = rng.uniform(0.0, 200.0, 4000)
    s = np.cos(np.linspace(0.0, np.pi, 257))
    w = np.full(257, 1.0 / 257)
    return [
        ("series_dd   20000 args, nu=1", lambda m: m.series_dd(2, x_series, 1.0, 1e-16, 200)),
        ("cos_sum     4000 x 257", lambda m: m.cos_sum(x_trig, s, w)),
        ("sin_sum     4000 x 257", lambda m: m.sin_sum(x_trig, s, w)),
    ]


END_TO_END = ("import time; from wavekit.kernels import hankel_sine; t=time.perf_counter(); "
              "hankel_sine(1, 2.0, 1.3); print(time.perf_counter()-t)")


def end_to_end(pure):
    env = dict(os.environ, WAVEKIT_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core is None:
        print("compiled extension not built; only the fallback can be timed")
    print(f"{'kernel':34s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fn in kernel_cases():
        t_py = bench(lambda: fn(_purepy), args.repeat)
        if _core is None:
            print(f"{name:34s} {'-':>10s} {t_py * 1e3:9.2f}ms")
            continue
        t_c = bench(lambda: fn(_core), args.repeat)
        print(f"{name:34s} {t_c * 1e3:9.2f}ms {t_py * 1e3:9.2f}ms {t_py / t_c:7.1f}x")
    t_c = end_to_end(False)
    t_py = end_to_end(True)
    print(f"{'hankel_sine(nu=1, R=2, t=1.3)':34s} {t_c * 1e3:9.2f}ms {t_py * 1e3:9.2f}ms {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
