"""Reference summation backend.

Terms are built as numpy arrays and reduced with math.fsum, which returns the
correctly rounded value of the exact sum. That makes this backend the accuracy
reference for the jit path and trivially deterministic, at the cost of speed.

The `chunked` flags are accepted for interface parity with the numba backend;
fsum is at least as accurate as any chunking scheme, so they are ignored.

Sum conventions (shared by both backends):
  cos-family sums run over precomputed tables logs[i], invs[i] and return
  sum_i coeff_i * cos(th - t*logs[i]) * invs[i] together with the t-derivative
  sum_i coeff_i * sin(th - t*logs[i]) * (logs[i] - dth) * invs[i];
  power_sum(sigma, tau, m_max) returns sum_{k=1}^{m_max-1} k^(-sigma - i*tau).
"""

from __future__ import annotations

import math

import numpy as np

NAME = "numpy"


def _cfsum(a) -> complex:
    return complex(math.fsum(a.real), math.fsum(a.imag))


def cos_sum(th, t, logs, invs, chunked=False):
    return math.fsum(np.cos(th - t * logs) * invs)


def cos_sum_vd(th, dth, t, logs, invs, chunked=False):
    ph = th - t * logs
    v = math.fsum(np.cos(ph) * invs)
    d = math.fsum(np.sin(ph) * (logs - dth) * invs)
    return v, d


def weighted_cos_sum(th, t, logs, invs, coeffs, chunked=False):
    return math.fsum(np.cos(th - t * logs) * invs * coeffs)


def weighted_cos_sum_vd(th, dth, t, logs, invs, coeffs, chunked=False):
    ph = th - t * logs
    w = invs * coeffs
    v = math.fsum(np.cos(ph) * w)
    d = math.fsum(np.sin(ph) * (logs - dth) * w)
    return v, d


def cos_sum_c(th, t, logs, invs):
    return _cfsum(np.cos(th - t * logs) * invs)


def cos_sum_vd_c(th, dth, t, logs, invs):
    ph = th - t * logs
    v = _cfsum(np.cos(ph) * invs)
    d = _cfsum(np.sin(ph) * (logs - dth) * invs)
    return v, d


def weighted_cos_sum_c(th, t, logs, invs, coeffs):
    return _cfsum(np.cos(th - t * logs) * invs * coeffs)


def weighted_cos_sum_vd_c(th, dth, t, logs, invs, coeffs):
    ph = th - t * logs
    w = invs * coeffs
    v = _cfsum(np.cos(ph) * w)
    d = _cfsum(np.sin(ph) * (logs - dth) * w)
    return v, d


def power_sum(sigma, tau, m_max, chunked=False):
    if m_max <= 1:
        return 0j
    k = np.arange(1, m_max, dtype=np.float64)
    lk = np.log(k)
    amp = np.exp(-sigma * lk)
    ang = tau * lk
    return complex(math.fsum(amp * np.cos(ang)), -math.fsum(amp * np.sin(ang)))


def warmup():
    """No-op; present for interface parity with the jit backend."""
