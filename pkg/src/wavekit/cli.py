"""Command-line harness: verification sweeps and the solvers.

Every subcommand writes, into ``--out``:

* ``<command>.jsonl``        one record per case (inputs, value, oracle, error, tolerance, status)
* ``<command>.summary.json`` counts, max error, wall time and the resolved config
* CSV tables or grids where the command produces them

Reports are deterministic for a fixed config and seed; wall time lives only
in the summary.  Exit status: 0 all cases pass, 1 any tolerance failure,
2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from wavekit import __version__, backend
from wavekit.errors import ConfigError, DomainError, WavekitError
from wavekit.kernels import (
    KernelQuery,
    ascent_step_check,
    even_representation,
    hankel_sine,
    hankel_sine_limit,
    odd_representation,
    sine_kernel,
)
from wavekit.specfun import Order, bessel_j_half, bessel_j_poisson, bessel_j_series

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


# -- serialisation ---------------------------------------------------------------

def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj) -> str:
    """Compact JSON with sorted keys and every float at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(obj[k])}" for k in sorted(obj)) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows, meta: dict) -> str:
    lines = [f"# {k}: {dumps(meta[k])}" for k in sorted(meta)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join("" if v is None else fmt_float(float(v)) if isinstance(v, (float, np.floating))
                              else str(v) for v in row))
    return "\n".join(lines) + "\n"


# -- reports ----------------------------------------------------------------------

def record(case: int, inputs: dict, value, oracle, tolerance: float, err=None, **extra) -> dict:
    err = abs(value - oracle) if err is None else err
    rec = {"case": case, "inputs": inputs, "value": value, "oracle": oracle,
           "abs_error": err, "tolerance": tolerance,
           "status": "pass" if err <= tolerance else "fail"}
    rec.update(extra)
    return rec


def skipped(case: int, inputs: dict, reason: str) -> dict:
    return {"case": case, "inputs": inputs, "status": "skipped", "reason": reason}


def summarize(records: list) -> dict:
    counts = {s: sum(r["status"] == s for r in records) for s in ("pass", "fail", "skipped")}
    errs = [r["abs_error"] for r in records if "abs_error" in r]
    return {"total": len(records), **counts, "max_abs_error": max(errs) if errs else 0.0}


def write_report(out: Path, name: str, records: list, config: dict, wall: float) -> dict:
    write_atomic(out / f"{name}.jsonl", "".join(dumps(r) + "\n" for r in records))
    summary = summarize(records)
    sidecar = {"command": name, "summary": summary, "config": config,
               "wall_time_s": wall, "backend": backend, "version": __version__}
    write_atomic(out / f"{name}.summary.json", dumps(sidecar) + "\n")
    return summary


def fan_out(fn, cases: list, jobs: int) -> list:
    """Run ``fn`` over ``cases`` preserving order; processes when jobs > 1."""
    if jobs <= 1 or len(cases) <= 1:
        return [fn(c) for c in cases]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cases, chunksize=max(1, len(cases) // (4 * jobs))))


# -- config handling ----------------------------------------------------------------

def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def resolve(defaults: dict, file_cfg: dict, flags: dict) -> dict:
    """defaults <- config file <- flags (flags win); unknown config keys are errors."""
    out = dict(defaults)
    for key, val in file_cfg.items():
        if key not in defaults:
            raise ConfigError(f"unknown config field {key!r}")
        out[key] = val
    for key, val in flags.items():
        if val is not None:
            out[key] = val
    return out


def _num(cfg, key, kind=float, lo=None, hi=None, strict_lo=False):
    val = cfg[key]
    try:
        if isinstance(val, bool):
            raise TypeError
        val = kind(val)
        if kind is int and float(cfg[key]) != val:
            raise ValueError
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} must be a{'n integer' if kind is int else ' number'}, "
                          f"got {cfg[key]!r}") from None
    if kind is float and not math.isfinite(val):
        raise ConfigError(f"field {key!r} must be finite")
    if lo is not None and (val <= lo if strict_lo else val < lo):
        raise ConfigError(f"field {key!r} must be {'>' if strict_lo else '>='} {lo}, got {val}")
    if hi is not None and val > hi:
        raise ConfigError(f"field {key!r} must be <= {hi}, got {val}")
    return val


def _list(cfg, key, parse):
    val = cfg[key]
    if isinstance(val, str):
        val = [v for v in val.split(",") if v.strip()]
    if not isinstance(val, (list, tuple)) or not val:
        raise ConfigError(f"field {key!r} must be a non-empty list")
    try:
        return [parse(v) for v in val]
    except (TypeError, ValueError, ZeroDivisionError, DomainError) as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _range(cfg, key, lo_bound=0.0):
    val = cfg[key]
    if isinstance(val, str):
        val = val.split(":")
    try:
        lo, hi = (float(v) for v in val)
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} must be a pair lo:hi") from None
    if not (lo_bound < lo <= hi and math.isfinite(hi)):
        raise ConfigError(f"field {key!r} must satisfy {lo_bound} < lo <= hi, got {lo}:{hi}")
    return lo, hi


def _order(v) -> Order:
    return Order.of(Fraction(str(v).strip()))


def _rng(seed) -> np.random.Generator:
    # PCG64 seeded from a single integer: reproducible across platforms
    return np.random.Generator(np.random.PCG64(int(seed)))


# -- bessel-table ---------------------------------------------------------------------

BESSEL_DEFAULTS = {"nu": ["0", "1/2", "1"], "x_min": 0.5, "x_max": 10.0, "x_count": 20,
                   "tol": 1e-9, "seed": 0, "jobs": 1}


def _bessel_row(args):
    order, x = args
    series = float(bessel_j_series(order, x))
    poisson = float(bessel_j_poisson(order, x))
    half = float(bessel_j_half(x)) if order.twice_nu == 1 else None
    vals = [series, poisson] + ([half] if half is not None else [])
    return series, poisson, half, max(vals) - min(vals)


def cmd_bessel_table(cfg: dict, out: Path) -> int:
    orders = _list(cfg, "nu", _order)
    x_min = _num(cfg, "x_min", lo=0.0, strict_lo=True)
    x_max = _num(cfg, "x_max", hi=60.0)
    count = _num(cfg, "x_count", int)
    tol = _num(cfg, "tol", lo=0.0, strict_lo=True)
    if count < 1 or x_max < x_min:
        raise ConfigError("field 'x_count'/'x_max': empty x range")
    xs = np.linspace(x_min, x_max, count) if count > 1 else np.array([x_min])
    cases = [(o, float(x)) for o in orders for x in xs]
    t0 = time.perf_counter()
    rows = fan_out(_bessel_row, cases, cfg["jobs"])
    records, table = [], []
    for i, ((order, x), (series, poisson, half, diff)) in enumerate(zip(cases, rows)):
        table.append((str(order), x, series, poisson, half, diff))
        values = {"series": series, "poisson": poisson}
        if half is not None:
            values["half_closed"] = half
        # the error is the largest pairwise spread, not just |poisson - series|
        records.append(record(i, {"nu": str(order), "x": x}, poisson, series, tol, err=diff,
                              values=values))
    meta = {"command": "bessel-table", "tol": tol, "version": __version__}
    write_atomic(out / "bessel_table.csv",
                 csv_text(["nu", "x", "series", "poisson", "half_closed", "max_pairwise_diff"], table, meta))
    return _finish(out, "bessel-table", records, cfg, t0)


# -- kernel-verify --------------------------------------------------------------------

KERNEL_DEFAULTS = {"dims": [3], "samples": 50, "r_range": [0.5, 3.0], "xi_range": [0.1, 5.0],
                   "mode": "auto", "resolution": None, "tol": 1e-6, "seed": 0, "jobs": 1}


def _kernel_case(args):
    n, R, xi, mode, resolution = args
    q = KernelQuery.along_axis(n, R, xi)
    if n % 2:
        mode = "analytic" if mode == "auto" else mode
        value = odd_representation(q, mode, resolution=resolution)
    else:
        mode = "finite_difference" if mode == "auto" else mode
        value = even_representation(q, mode, resolution=resolution)
    return value, mode


def cmd_kernel_verify(cfg: dict, out: Path) -> int:
    dims = _list(cfg, "dims", int)
    if any(n not in range(2, 8) for n in dims):
        raise ConfigError(f"field 'dims' must be a subset of 2..7, got {dims}")
    samples = _num(cfg, "samples", int, lo=1)
    r_lo, r_hi = _range(cfg, "r_range")
    x_lo, x_hi = _range(cfg, "xi_range")
    mode = cfg["mode"]
    if mode not in ("auto", "analytic", "finite_difference"):
        raise ConfigError(f"field 'mode' must be auto, analytic or finite_difference, got {mode!r}")
    resolution = None if cfg["resolution"] is None else _num(cfg, "resolution", int, lo=2)
    tol = _num(cfg, "tol", lo=0.0, strict_lo=True)
    rng = _rng(cfg["seed"])
    cases = []
    for _ in range(samples):
        n = int(dims[rng.integers(len(dims))])
        cases.append((n, float(rng.uniform(r_lo, r_hi)), float(rng.uniform(x_lo, x_hi)),
                      mode, resolution))
    t0 = time.perf_counter()
    results = fan_out(_safe(_kernel_case), cases, cfg["jobs"])
    records = []
    for i, ((n, R, xi, _, _), res) in enumerate(zip(cases, results)):
        inputs = {"n": n, "R": R, "xi_norm": xi}
        if isinstance(res, str):
            records.append({"case": i, "inputs": inputs, "status": "fail", "reason": res})
            continue
        value, used = res
        records.append(record(i, inputs, value, sine_kernel(R, xi), tol, mode=used))
    return _finish(out, "kernel-verify", records, cfg, t0)


class _safe:
    """Wrap a case function so numerical failures become per-case messages."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, args):
        try:
            return self.fn(args)
        except WavekitError as exc:
            return f"{type(exc).__name__}: {exc}"


# -- lemma-verify ---------------------------------------------------------------------

LEMMA_DEFAULTS = {"nu": [0, 1, 2], "pairs": None, "samples": 10, "r_range": [0.5, 3.0],
                  "min_gap": 0.5, "h": 1e-3, "tol": 5e-3, "ascent_tol": 1e-2, "seed": 0, "jobs": 1}


def _lemma_case(args):
    nu, R, t, h = args
    res = hankel_sine(nu, R, t)
    if nu == 0:
        return {"value": res.value, "oracle": hankel_sine_limit(0, R, t),
                "error_estimate": res.error_estimate, "region": res.region}
    chk = ascent_step_check(nu, R, t, h=min(h, 0.05 * abs(R - t)))
    return {"value": chk.lhs, "oracle": chk.rhs, "error_estimate": chk.error_estimate,
            "region": res.region, "integral": res.value,
            "closed_form": hankel_sine_limit(nu, R, t)}


def _parse_pair(v):
    if isinstance(v, str):
        v = v.split(":")
    R, t = (float(c) for c in v)
    if not (R > 0 and t > 0):
        raise ValueError(f"pair {R}:{t} must have positive entries")
    return R, t


def cmd_lemma_verify(cfg: dict, out: Path) -> int:
    nus = _list(cfg, "nu", int)
    if any(v not in (0, 1, 2) for v in nus):
        raise ConfigError(f"field 'nu' must be a subset of {{0, 1, 2}}, got {nus}")
    tol = _num(cfg, "tol", lo=0.0, strict_lo=True)
    ascent_tol = _num(cfg, "ascent_tol", lo=0.0, strict_lo=True)
    h = _num(cfg, "h", lo=0.0, strict_lo=True)
    if cfg["pairs"] is not None:
        pairs = _list(cfg, "pairs", _parse_pair)
    else:
        samples = _num(cfg, "samples", int, lo=1)
        lo, hi = _range(cfg, "r_range")
        gap = _num(cfg, "min_gap", lo=0.0)
        rng = _rng(cfg["seed"])
        pairs = []
        while len(pairs) < samples:
            R, t = (float(v) for v in rng.uniform(lo, hi, size=2))
            if abs(R - t) >= gap:
                pairs.append((R, t))
    cases = [(nu, R, t, h) for nu in nus for R, t in pairs]
    t0 = time.perf_counter()
    todo = [c for c in cases if abs(c[1] - c[2]) >= 1e-6 * max(c[1], c[2])]
    results = iter(fan_out(_safe(_lemma_case), todo, cfg["jobs"]))
    records = []
    for i, (nu, R, t, _) in enumerate(cases):
        inputs = {"nu": nu, "R": R, "t": t}
        if abs(R - t) < 1e-6 * max(R, t):
            records.append(skipped(i, inputs, "inside the boundary band |R - t| < 1e-6 max(R, t)"))
            continue
        res = next(results)
        if isinstance(res, str):
            records.append({"case": i, "inputs": inputs, "status": "fail", "reason": res})
            continue
        value, oracle = res.pop("value"), res.pop("oracle")
        limit = max(tol, 3.0 * res["error_estimate"]) if nu == 0 else ascent_tol
        records.append(record(i, inputs, value, oracle, limit,
                              check="closed_form" if nu == 0 else "ascent", **res))
    return _finish(out, "lemma-verify", records, cfg, t0)


# -- solve ----------------------------------------------------------------------------

SOLVE_DEFAULTS = {"dim": 2, "method": "spectral", "L": 12.0, "N": None, "times": [0.0, 1.0, 2.0],
                  "phi": [{"kind": "gaussian", "amplitude": 1.0, "center": [0.3], "width": 1.0}],
                  "psi": [], "points": 5, "tol": None, "resolution": None, "seed": 0, "jobs": 1}

POINT_TOL = {3: 1e-4, 2: 5e-4}


def _data_term(spec: dict, n: int):
    from wavekit.solver import GaussianBump, WindowedCosine

    if not isinstance(spec, dict):
        raise ConfigError("data terms must be objects")
    center = list(spec.get("center", [0.0] * n))
    center = (center + [0.0] * n)[:n]
    kind = spec.get("kind", "gaussian")
    try:
        if kind == "gaussian":
            return GaussianBump(float(spec.get("amplitude", 1.0)), center, float(spec["width"]))
        if kind == "windowed_cosine":
            width = spec.get("width")
            return WindowedCosine(float(spec.get("amplitude", 1.0)), spec["wavevector"], center,
                                  None if width is None else float(width))
    except KeyError as exc:
        raise ConfigError(f"data term missing field {exc.args[0]!r}") from None
    except DomainError as exc:
        raise ConfigError(f"data term: {exc}") from None
    raise ConfigError(f"unknown data kind {kind!r}")


def _point_case(args):
    from wavekit.solver import solve_kirchhoff_3d, solve_poisson_2d, sphere_rule

    data, x, t, resolution = args
    if data.n == 3:
        rule = sphere_rule(3, resolution) if resolution else None
        return solve_kirchhoff_3d(data, x, t, rule)
    return solve_poisson_2d(data, x, t, resolution or 48)


def cmd_solve(cfg: dict, out: Path) -> int:
    from wavekit.solver import CauchyData, GridSpec, energy, solve_spectral, wave_residual

    n = _num(cfg, "dim", int)
    method = cfg["method"]
    if method not in ("spectral", "kirchhoff", "poisson", "crosscheck"):
        raise ConfigError(f"field 'method' must be spectral, kirchhoff, poisson or crosscheck, got {method!r}")
    if method == "kirchhoff" and n != 3 or method == "poisson" and n != 2:
        raise ConfigError(f"field 'method': {method} is not available for dim={n}")
    if method == "crosscheck" and n not in (2, 3):
        raise ConfigError("field 'method': crosscheck needs dim 2 or 3")
    if n not in (1, 2, 3):
        raise ConfigError(f"field 'dim' must be 1, 2 or 3, got {n}")
    L = _num(cfg, "L", lo=0.0, strict_lo=True)
    times = _list(cfg, "times", float)
    if any(not (t >= 0 and math.isfinite(t)) for t in times):
        raise ConfigError("field 'times' must hold finite non-negative values")
    try:
        grid = GridSpec(n, L, GridSpec.default(n, L).N if cfg["N"] is None else _num(cfg, "N", int))
    except DomainError as exc:
        raise ConfigError(f"field 'N': {exc}") from None
    for key in ("phi", "psi"):
        if not isinstance(cfg[key], list):
            raise ConfigError(f"field {key!r} must be a list of data terms")
    data = CauchyData(n, tuple(_data_term(s, n) for s in cfg["phi"]),
                      tuple(_data_term(s, n) for s in cfg["psi"]))
    resolution = None if cfg["resolution"] is None else _num(cfg, "resolution", int, lo=4)
    t0 = time.perf_counter()
    try:
        fields = [solve_spectral(grid, data, t) for t in times]
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    e0 = energy(solve_spectral(grid, data, 0.0))
    records, diagnostics = [], []
    for i, (t, f) in enumerate(zip(times, fields)):
        e = energy(f)
        tol_e = cfg["tol"] if cfg["tol"] is not None and method == "spectral" else 1e-10
        drift = record(i, {"t": t, "quantity": "energy"}, e / e0 if e0 else 0.0, 1.0 if e0 else 0.0, tol_e)
        records.append(drift)
        diag = {"t": t, "energy": e}
        if t > 0:
            dt = min(1e-2, t / 4)
            diag["wave_residual"] = wave_residual(grid, data, max(t, 2 * dt), dt)
            diag["wave_residual_dt"] = dt
        diagnostics.append(diag)
    _write_grids(out, grid, times, fields)

    if method != "spectral":
        tol = cfg["tol"] if cfg["tol"] is not None else POINT_TOL[n]
        count = _num(cfg, "points", int, lo=1)
        rng = _rng(cfg["seed"])
        positive = [t for t in times if t > 0]
        if not positive:
            raise ConfigError("field 'times': point solvers need at least one t > 0")
        cases = []
        for _ in range(count):
            x = rng.uniform(-1.0, 1.0, size=n)
            cases.append((data, tuple(float(v) for v in x), float(positive[rng.integers(len(positive))]),
                          resolution))
        values = fan_out(_point_case, cases, cfg["jobs"])
        spectral = {t: f for t, f in zip(times, fields)}
        name = "kirchhoff" if n == 3 else "poisson"
        base = len(records)
        for k, ((_, x, t, _), v) in enumerate(zip(cases, values)):
            oracle = float(spectral[t].evaluate(np.array(x))[0])
            records.append(record(base + k, {"x": list(x), "t": t, "quantity": "u"}, v, oracle, tol,
                                  method=name, oracle_method="spectral"))
        errs = [r["abs_error"] for r in records[base:]]
        diagnostics.append({"crosscheck": f"spectral vs {name}", "max_discrepancy": max(errs)})
    write_atomic(out / "solve.diagnostics.json", dumps(diagnostics) + "\n")
    return _finish(out, "solve", records, cfg, t0)


def _write_grids(out: Path, grid, times, fields) -> None:
    axis = grid.axis()
    meta_base = {"n": grid.n, "L": grid.L, "N": grid.N}
    for t, f in zip(times, fields):
        meta = {**meta_base, "t": t}
        tag = format(t, ".6g").replace(".", "p").replace("-", "m")
        if grid.n == 1:
            rows = zip(axis, f.values)
            write_atomic(out / f"u_t{tag}.csv", csv_text(["x1", "u"], rows, meta))
        elif grid.n == 2:
            X, Y = np.meshgrid(axis, axis, indexing="ij")
            rows = zip(X.ravel(), Y.ravel(), f.values.ravel())
            write_atomic(out / f"u_t{tag}.csv", csv_text(["x1", "x2", "u"], rows, meta))
        else:
            mid = grid.N // 2  # the grid point x = 0
            slices = (f.values[:, mid, mid], f.values[mid, :, mid], f.values[mid, mid, :])
            rows = ((a, s0, s1, s2) for a, s0, s1, s2 in zip(axis, *slices))
            write_atomic(out / f"u_t{tag}.csv",
                         csv_text(["s", "u_axis1", "u_axis2", "u_axis3"], rows, meta))


# -- entry point --------------------------------------------------------------------------

def _finish(out: Path, name: str, records: list, cfg: dict, t0: float) -> int:
    summary = write_report(out, name, records, _jsonable(cfg), time.perf_counter() - t0)
    print(f"{name}: {summary['pass']} pass, {summary['fail']} fail, {summary['skipped']} skipped; "
          f"max abs error {summary['max_abs_error']:.3e}")
    for r in records:
        if r["status"] == "fail":
            detail = r.get("reason") or f"error {r['abs_error']:.3e} > tol {r['tolerance']:.3e}"
            print(f"  case {r['case']} {dumps(r['inputs'])}: {detail}")
    return EXIT_FAIL if summary["fail"] else EXIT_OK


def _jsonable(cfg: dict) -> dict:
    return {k: [str(v) if isinstance(v, Order) else v for v in val] if isinstance(val, list) else val
            for k, val in cfg.items()}


COMMANDS = {
    "bessel-table": (cmd_bessel_table, BESSEL_DEFAULTS),
    "kernel-verify": (cmd_kernel_verify, KERNEL_DEFAULTS),
    "lemma-verify": (cmd_lemma_verify, LEMMA_DEFAULTS),
    "solve": (cmd_solve, SOLVE_DEFAULTS),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with command parameters (flags override it)")
    common.add_argument("--out", default="wavekit-out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for random sweeps (PCG64)")
    common.add_argument("--tol", type=float, help="absolute tolerance")
    common.add_argument("--jobs", type=int, help="worker processes (default $WAVEKIT_JOBS or 1)")

    p = argparse.ArgumentParser(prog="wavekit", description="Wave propagator verification and solvers.")
    p.add_argument("--version", action="version", version=f"wavekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bessel-table", parents=[common], help="tabulate the Bessel routes")
    b.add_argument("--nu", help="comma-separated orders, e.g. 0,1/2,1")
    b.add_argument("--x-min", type=float, dest="x_min")
    b.add_argument("--x-max", type=float, dest="x_max")
    b.add_argument("--x-count", type=int, dest="x_count")

    k = sub.add_parser("kernel-verify", parents=[common], help="check the sphere/ball representations")
    k.add_argument("--dims", help="comma-separated dimensions in 2..7")
    k.add_argument("--samples", type=int)
    k.add_argument("--mode", choices=["auto", "analytic", "finite_difference"])
    k.add_argument("--resolution", type=int, help="fixed quadrature resolution")
    k.add_argument("--r-range", dest="r_range", help="lo:hi")
    k.add_argument("--xi-range", dest="xi_range", help="lo:hi")

    m = sub.add_parser("lemma-verify", parents=[common], help="check the Hankel sine integrals")
    m.add_argument("--nu", help="comma-separated orders in {0,1,2}")
    m.add_argument("--pairs", help="comma-separated R:t pairs")
    m.add_argument("--samples", type=int)
    m.add_argument("--h", type=float, help="finite-difference step of the ascent check")

    s = sub.add_parser("solve", parents=[common], help="solve the Cauchy problem")
    s.add_argument("--dim", type=int)
    s.add_argument("--method", choices=["spectral", "kirchhoff", "poisson", "crosscheck"])
    s.add_argument("--L", type=float, dest="L")
    s.add_argument("--N", type=int, dest="N")
    s.add_argument("--times", help="comma-separated times")
    s.add_argument("--points", type=int, help="random evaluation points for point solvers")
    s.add_argument("--resolution", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, defaults = COMMANDS[args.command]
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out")}
    try:
        jobs_env = os.environ.get("WAVEKIT_JOBS", "1")
        if not jobs_env.strip().isdigit():
            raise ConfigError(f"WAVEKIT_JOBS must be a positive integer, got {jobs_env!r}")
        defaults = dict(defaults, jobs=int(jobs_env))
        cfg = resolve(defaults, load_config(args.config), flags)
        cfg["jobs"] = _num(cfg, "jobs", int, lo=1)
        _num(cfg, "seed", int, lo=0)
        return fn(cfg, Path(args.out))
    except ConfigError as exc:
        print(f"wavekit {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
