"""Pure numpy implementations of the hot kernels.

Same signatures and, up to the last bit of the double-double tail, the same
results as the compiled ``_core`` module.  Selected automatically when the
extension is missing or when ``WAVEKIT_PURE=1``.
"""
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return _quick_two_sum(p, e)


def _dd_div_d(ah, al, b):
    q1 = ah / b
    p, e = _two_prod(q1, b)
    s, f = _two_sum(ah, -p)
    f = f - e
    f = f + al
    q2 = (s + f) / b
    return _quick_two_sum(q1, q2)


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e = e + t
    s, e = _quick_two_sum(s, e)
    e = e + f
    return _quick_two_sum(s, e)


def series_dd(twice_nu, x, prefactor_gamma, tail_tolerance, max_terms):
    x = np.ascontiguousarray(x, dtype=np.float64)
    m = int(twice_nu)
    p, e = _two_prod(x, x)
    yh, yl = -0.5 * p, -0.5 * e
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    sh = np.ones_like(x)
    sl = np.zeros_like(x)
    tmax = np.ones_like(x)
    used = np.full(x.shape, -1, dtype=np.int64)
    used[x == 0.0] = 0
    active = used < 0
    for k in range(1, max_terms + 1):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        denom = float(k) * float(2 * k + m)
        th_a, tl_a = _dd_mul(th[idx], tl[idx], yh[idx], yl[idx])
        th_a, tl_a = _dd_div_d(th_a, tl_a, denom)
        sh_a, sl_a = _dd_add(sh[idx], sl[idx], th_a, tl_a)
        th[idx], tl[idx], sh[idx], sl[idx] = th_a, tl_a, sh_a, sl_a
        a = np.abs(th_a)
        tmax[idx] = np.maximum(tmax[idx], a)
        floor_ = np.maximum(np.abs(sh_a), tmax[idx] * 1e-32)
        done = (denom > -yh[idx]) & (a < tail_tolerance * floor_)
        fin = idx[done]
        used[fin] = k
        active[fin] = False
    total = sh + sl
    if m == 0:
        return total / prefactor_gamma, used
    return total * np.power(0.5 * x, 0.5 * m) / prefactor_gamma, used


def cos_sum(x, s, w, chunk=1 << 22):
    return _trig_sum(np.cos, x, s, w, chunk)


def sin_sum(x, s, w, chunk=1 << 22):
    return _trig_sum(np.sin, x, s, w, chunk)


def _trig_sum(fn, x, s, w, chunk):
    x = np.ascontiguousarray(x, dtype=np.float64)
    s = np.ascontiguousarray(s, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty_like(x)
    rows = max(1, chunk // max(1, s.size))
    for start in range(0, x.size, rows):
        stop = min(x.size, start + rows)
        out[start:stop] = fn(np.outer(x[start:stop], s)) @ w
    return out
