"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def rolling_zscore(values, phi, ddof, rel_eps):
    n = values.shape[0]
    out = np.zeros(n, dtype=np.float64)
    valid = np.zeros(n, dtype=bool)
    if n <= phi:
        return out, valid
    windows = sliding_window_view(values, phi)[:-1]
    mean = windows.mean(axis=1)
    sigma = np.sqrt(((windows - mean[:, None]) ** 2).sum(axis=1) / (phi - ddof))
    scale = np.abs(windows).max(axis=1)
    ok = (sigma > rel_eps * scale) & (sigma != 0.0)
    target = values[phi:]
    out[phi:][ok] = (target[ok] - mean[ok]) / sigma[ok]
    valid[phi:] = ok
    return out, valid


def decay_recurrence(u, lams):
    n = len(u)
    out = np.empty(n, dtype=np.float64)
    if n == 0:
        return out
    prev = float(u[0])
    out[0] = prev
    for i in range(1, n):
        lam = lams[i]
        prev = (1.0 - lam) * u[i] + lam * prev
        out[i] = prev
    return out


def dominant(u, c):
    return np.where(np.abs(u) >= np.abs(c), u, c)


def wls_moments(x, y, w):
    sw = w.sum()
    xbar = (w * x).sum() / sw
    ybar = (w * y).sum() / sw
    dx = x - xbar
    dy = y - ybar
    return sw, xbar, ybar, (w * dx * dx).sum(), (w * dx * dy).sum(), (w * dy * dy).sum()


def resample_quantiles(sorted_vals, idx, level):
    m = idx.shape[1]
    h = (m - 1) * level
    k_lo = int(np.floor(h))
    frac = h - k_lo
    k_hi = k_lo + 1 if k_lo + 1 < m else k_lo
    draws = np.sort(sorted_vals[idx], axis=1)
    lo_v = draws[:, k_lo]
    hi_v = draws[:, k_hi]
    return lo_v + frac * (hi_v - lo_v)
