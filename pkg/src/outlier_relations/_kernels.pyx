# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and results mirror ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, floor

cnp.import_array()


def rolling_zscore(const double[::1] values, Py_ssize_t phi, Py_ssize_t ddof, double rel_eps):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, j
    cdef double mean, acc, d, sigma, scale, v
    out = np.zeros(n, dtype=np.float64)
    valid = np.zeros(n, dtype=np.uint8)
    cdef double[::1] o = out
    cdef unsigned char[::1] ok = valid
    for i in range(phi, n):
        acc = 0.0
        scale = 0.0
        for j in range(i - phi, i):
            v = values[j]
            acc += v
            if fabs(v) > scale:
                scale = fabs(v)
        mean = acc / phi
        acc = 0.0
        for j in range(i - phi, i):
            d = values[j] - mean
            acc += d * d
        sigma = sqrt(acc / (phi - ddof))
        if sigma <= rel_eps * scale or sigma == 0.0:
            continue
        o[i] = (values[i] - mean) / sigma
        ok[i] = 1
    return out, valid.astype(bool)


def decay_recurrence(const double[::1] u, const double[::1] lams):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef double lam
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] c = out
    if n == 0:
        return out
    c[0] = u[0]
    for i in range(1, n):
        lam = lams[i]
        c[i] = (1.0 - lam) * u[i] + lam * c[i - 1]
    return out


def dominant(const double[::1] u, const double[::1] c):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] d = out
    for i in range(n):
        d[i] = u[i] if fabs(u[i]) >= fabs(c[i]) else c[i]
    return out


def wls_moments(const double[::1] x, const double[::1] y, const double[::1] w):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef double sw = 0.0, sx = 0.0, sy = 0.0
    cdef double xbar, ybar, dx, dy, sxx = 0.0, sxy = 0.0, syy = 0.0
    for i in range(n):
        sw += w[i]
        sx += w[i] * x[i]
        sy += w[i] * y[i]
    xbar = sx / sw
    ybar = sy / sw
    for i in range(n):
        dx = x[i] - xbar
        dy = y[i] - ybar
        sxx += w[i] * dx * dx
        sxy += w[i] * dx * dy
        syy += w[i] * dy * dy
    return sw, xbar, ybar, sxx, sxy, syy


def resample_quantiles(const double[::1] sorted_vals, const cnp.int64_t[:, ::1] idx, double level):
    # Order statistics from per-row index counts; O(n) per resample, no sort.
    cdef Py_ssize_t n = sorted_vals.shape[0]
    cdef Py_ssize_t n_rows = idx.shape[0]
    cdef Py_ssize_t m = idx.shape[1]
    cdef Py_ssize_t b, j, k_lo, k_hi, seen
    cdef double h = (m - 1) * level
    cdef double frac
    cdef double lo_v, hi_v
    cdef bint got_lo
    k_lo = <Py_ssize_t>floor(h)
    frac = h - k_lo
    k_hi = k_lo + 1 if k_lo + 1 < m else k_lo
    out = np.empty(n_rows, dtype=np.float64)
    counts_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] o = out
    cdef cnp.int64_t[::1] counts = counts_arr
    for b in range(n_rows):
        for j in range(n):
            counts[j] = 0
        for j in range(m):
            counts[idx[b, j]] += 1
        seen = 0
        got_lo = False
        lo_v = 0.0
        hi_v = 0.0
        for j in range(n):
            seen += counts[j]
            if not got_lo and seen > k_lo:
                lo_v = sorted_vals[j]
                got_lo = True
            if seen > k_hi:
                hi_v = sorted_vals[j]
                break
        o[b] = lo_v + frac * (hi_v - lo_v)
    return out
