"""JIT summation backend.

Same interface and sum conventions as numpy_backend (see its docstring), with
numba-compiled kernels. Sequential kernels use Kahan compensation; the chunked
variants split the index range into fixed 4096-term blocks, Kahan-sum each
block (in parallel), and combine the block partials in index order, so results
are bit-identical run to run regardless of thread count. fastmath stays off:
it would license reassociation that defeats the compensation.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit, prange

NAME = "numba"

CHUNK = 4096


@njit(cache=True)
def _cos_sum_seq(th, t, logs, invs):
    acc = 0.0
    comp = 0.0
    for i in range(logs.shape[0]):
        term = math.cos(th - t * logs[i]) * invs[i]
        y = term - comp
        nxt = acc + y
        comp = (nxt - acc) - y
        acc = nxt
    return acc


@njit(cache=True, parallel=True)
def _cos_sum_par(th, t, logs, invs):
    n = logs.shape[0]
    nchunks = (n + CHUNK - 1) // CHUNK
    partials = np.zeros(nchunks)
    for c in prange(nchunks):
        lo = c * CHUNK
        hi = lo + CHUNK
        if hi > n:
            hi = n
        acc = 0.0
        comp = 0.0
        for i in range(lo, hi):
            term = math.cos(th - t * logs[i]) * invs[i]
            y = term - comp
            nxt = acc + y
            comp = (nxt - acc) - y
            acc = nxt
        partials[c] = acc
    total = 0.0
    comp = 0.0
    for c in range(nchunks):
        y = partials[c] - comp
        nxt = total + y
        comp = (nxt - total) - y
        total = nxt
    return total


@njit(cache=True)
def _cos_sum_vd_seq(th, dth, t, logs, invs):
    av = 0.0
    cv = 0.0
    ad = 0.0
    cd = 0.0
    for i in range(logs.shape[0]):
        ph = th - t * logs[i]
        v = math.cos(ph) * invs[i]
        d = math.sin(ph) * (logs[i] - dth) * invs[i]
        y = v - cv
        nxt = av + y
        cv = (nxt - av) - y
        av = nxt
        y = d - cd
        nxt = ad + y
        cd = (nxt - ad) - y
        ad = nxt
    return av, ad


@njit(cache=True, parallel=True)
def _cos_sum_vd_par(th, dth, t, logs, invs):
    n = logs.shape[0]
    nchunks = (n + CHUNK - 1) // CHUNK
    pv = np.zeros(nchunks)
    pd = np.zeros(nchunks)
    for c in prange(nchunks):
        lo = c * CHUNK
        hi = lo + CHUNK
        if hi > n:
            hi = n
        av = 0.0
        cv = 0.0
        ad = 0.0
        cd = 0.0
        for i in range(lo, hi):
            ph = th - t * logs[i]
            v = math.cos(ph) * invs[i]
            d = math.sin(ph) * (logs[i] - dth) * invs[i]
            y = v - cv
            nxt = av + y
            cv = (nxt - av) - y
            av = nxt
            y = d - cd
            nxt = ad + y
            cd = (nxt - ad) - y
            ad = nxt
        pv[c] = av
        pd[c] = ad
    tv = 0.0
    cv = 0.0
    td = 0.0
    cd = 0.0
    for c in range(nchunks):
        y = pv[c] - cv
        nxt = tv + y
        cv = (nxt - tv) - y
        tv = nxt
        y = pd[c] - cd
        nxt = td + y
        cd = (nxt - td) - y
        td = nxt
    return tv, td


@njit(cache=True)
def _wcos_sum_seq(th, t, logs, invs, coeffs):
    acc = 0.0
    comp = 0.0
    for i in range(logs.shape[0]):
        term = math.cos(th - t * logs[i]) * invs[i] * coeffs[i]
        y = term - comp
        nxt = acc + y
        comp = (nxt - acc) - y
        acc = nxt
    return acc


@njit(cache=True, parallel=True)
def _wcos_sum_par(th, t, logs, invs, coeffs):
    n = logs.shape[0]
    nchunks = (n + CHUNK - 1) // CHUNK
    partials = np.zeros(nchunks)
    for c in prange(nchunks):
        lo = c * CHUNK
        hi = lo + CHUNK
        if hi > n:
            hi = n
        acc = 0.0
        comp = 0.0
        for i in range(lo, hi):
            term = math.cos(th - t * logs[i]) * invs[i] * coeffs[i]
            y = term - comp
            nxt = acc + y
            comp = (nxt - acc) - y
            acc = nxt
        partials[c] = acc
    total = 0.0
    comp = 0.0
    for c in range(nchunks):
        y = partials[c] - comp
        nxt = total + y
        comp = (nxt - total) - y
        total = nxt
    return total


@njit(cache=True)
def _wcos_sum_vd_seq(th, dth, t, logs, invs, coeffs):
    av = 0.0
    cv = 0.0
    ad = 0.0
    cd = 0.0
    for i in range(logs.shape[0]):
        ph = th - t * logs[i]
        w = invs[i] * coeffs[i]
        v = math.cos(ph) * w
        d = math.sin(ph) * (logs[i] - dth) * w
        y = v - cv
        nxt = av + y
        cv = (nxt - av) - y
        av = nxt
        y = d - cd
        nxt = ad + y
        cd = (nxt - ad) - y
        ad = nxt
    return av, ad


@njit(cache=True, parallel=True)
def _wcos_sum_vd_par(th, dth, t, logs, invs, coeffs):
    n = logs.shape[0]
    nchunks = (n + CHUNK - 1) // CHUNK
    pv = np.zeros(nchunks)
    pd = np.zeros(nchunks)
    for c in prange(nchunks):
        lo = c * CHUNK
        hi = lo + CHUNK
        if hi > n:
            hi = n
        av = 0.0
        cv = 0.0
        ad = 0.0
        cd = 0.0
        for i in range(lo, hi):
            ph = th - t * logs[i]
            w = invs[i] * coeffs[i]
            v = math.cos(ph) * w
            d = math.sin(ph) * (logs[i] - dth) * w
            y = v - cv
            nxt = av + y
            cv = (nxt - av) - y
            av = nxt
            y = d - cd
            nxt = ad + y
            cd = (nxt - ad) - y
            ad = nxt
        pv[c] = av
        pd[c] = ad
    tv = 0.0
    cv = 0.0
    td = 0.0
    cd = 0.0
    for c in range(nchunks):
        y = pv[c] - cv
        nxt = tv + y
        cv = (nxt - tv) - y
        tv = nxt
        y = pd[c] - cd
        nxt = td + y
        cd = (nxt - td) - y
        td = nxt
    return tv, td


@njit(cache=True)
def _cos_sum_seq_c(th, t, logs, invs):
    acc = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for i in range(logs.shape[0]):
        term = cmath.cos(th - t * logs[i]) * invs[i]
        y = term - comp
        nxt = acc + y
        comp = (nxt - acc) - y
        acc = nxt
    return acc


@njit(cache=True)
def _cos_sum_vd_seq_c(th, dth, t, logs, invs):
    av = 0.0 + 0.0j
    cv = 0.0 + 0.0j
    ad = 0.0 + 0.0j
    cd = 0.0 + 0.0j
    for i in range(logs.shape[0]):
        ph = th - t * logs[i]
        v = cmath.cos(ph) * invs[i]
        d = cmath.sin(ph) * (logs[i] - dth) * invs[i]
        y = v - cv
        nxt = av + y
        cv = (nxt - av) - y
        av = nxt
        y = d - cd
        nxt = ad + y
        cd = (nxt - ad) - y
        ad = nxt
    return av, ad


@njit(cache=True)
def _wcos_sum_seq_c(th, t, logs, invs, coeffs):
    acc = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for i in range(logs.shape[0]):
        term = cmath.cos(th - t * logs[i]) * (invs[i] * coeffs[i])
        y = term - comp
        nxt = acc + y
        comp = (nxt - acc) - y
        acc = nxt
    return acc


@njit(cache=True)
def _wcos_sum_vd_seq_c(th, dth, t, logs, invs, coeffs):
    av = 0.0 + 0.0j
    cv = 0.0 + 0.0j
    ad = 0.0 + 0.0j
    cd = 0.0 + 0.0j
    for i in range(logs.shape[0]):
        ph = th - t * logs[i]
        w = invs[i] * coeffs[i]
        v = cmath.cos(ph) * w
        d = cmath.sin(ph) * (logs[i] - dth) * w
        y = v - cv
        nxt = av + y
        cv = (nxt - av) - y
        av = nxt
        y = d - cd
        nxt = ad + y
        cd = (nxt - ad) - y
        ad = nxt
    return av, ad


@njit(cache=True)
def _power_sum_seq(sigma, tau, m_max):
    ar = 0.0
    cr = 0.0
    ai = 0.0
    ci = 0.0
    for k in range(1, m_max):
        lk = math.log(float(k))
        amp = math.exp(-sigma * lk)
        ang = tau * lk
        tr = amp * math.cos(ang)
        ti = -amp * math.sin(ang)
        y = tr - cr
        nxt = ar + y
        cr = (nxt - ar) - y
        ar = nxt
        y = ti - ci
        nxt = ai + y
        ci = (nxt - ai) - y
        ai = nxt
    return complex(ar, ai)


@njit(cache=True, parallel=True)
def _power_sum_par(sigma, tau, m_max):
    n = m_max - 1
    if n <= 0:
        return 0.0 + 0.0j
    nchunks = (n + CHUNK - 1) // CHUNK
    pr = np.zeros(nchunks)
    pi = np.zeros(nchunks)
    for c in prange(nchunks):
        lo = 1 + c * CHUNK
        hi = lo + CHUNK
        if hi > m_max:
            hi = m_max
        ar = 0.0
        cr = 0.0
        ai = 0.0
        ci = 0.0
        for k in range(lo, hi):
            lk = math.log(float(k))
            amp = math.exp(-sigma * lk)
            ang = tau * lk
            tr = amp * math.cos(ang)
            ti = -amp * math.sin(ang)
            y = tr - cr
            nxt = ar + y
            cr = (nxt - ar) - y
            ar = nxt
            y = ti - ci
            nxt = ai + y
            ci = (nxt - ai) - y
            ai = nxt
        pr[c] = ar
        pi[c] = ai
    tr = 0.0
    cr = 0.0
    ti = 0.0
    ci = 0.0
    for c in range(nchunks):
        y = pr[c] - cr
        nxt = tr + y
        cr = (nxt - tr) - y
        tr = nxt
        y = pi[c] - ci
        nxt = ti + y
        ci = (nxt - ti) - y
        ti = nxt
    return complex(tr, ti)


def cos_sum(th, t, logs, invs, chunked=False):
    if chunked:
        return _cos_sum_par(th, t, logs, invs)
    return _cos_sum_seq(th, t, logs, invs)


def cos_sum_vd(th, dth, t, logs, invs, chunked=False):
    if chunked:
        return _cos_sum_vd_par(th, dth, t, logs, invs)
    return _cos_sum_vd_seq(th, dth, t, logs, invs)


def weighted_cos_sum(th, t, logs, invs, coeffs, chunked=False):
    if chunked:
        return _wcos_sum_par(th, t, logs, invs, coeffs)
    return _wcos_sum_seq(th, t, logs, invs, coeffs)


def weighted_cos_sum_vd(th, dth, t, logs, invs, coeffs, chunked=False):
    if chunked:
        return _wcos_sum_vd_par(th, dth, t, logs, invs, coeffs)
    return _wcos_sum_vd_seq(th, dth, t, logs, invs, coeffs)


def cos_sum_c(th, t, logs, invs):
    return _cos_sum_seq_c(complex(th), complex(t), logs, invs)


def cos_sum_vd_c(th, dth, t, logs, invs):
    return _cos_sum_vd_seq_c(complex(th), complex(dth), complex(t), logs, invs)


def weighted_cos_sum_c(th, t, logs, invs, coeffs):
    return _wcos_sum_seq_c(complex(th), complex(t), logs, invs, coeffs)


def weighted_cos_sum_vd_c(th, dth, t, logs, invs, coeffs):
    return _wcos_sum_vd_seq_c(
        complex(th), complex(dth), complex(t), logs, invs, coeffs
    )


def power_sum(sigma, tau, m_max, chunked=False):
    if m_max <= 1:
        return 0j
    if chunked:
        return _power_sum_par(sigma, tau, m_max)
    return _power_sum_seq(sigma, tau, m_max)


def warmup():
    """Compile every kernel on tiny inputs; compiled code is disk-cached."""
    logs = np.array([0.0, 0.6931471805599453])
    invs = np.array([1.0, 0.7071067811865476])
    co = np.array([0.5, 1.5])
    for chunked in (False, True):
        cos_sum(0.3, 2.0, logs, invs, chunked)
        cos_sum_vd(0.3, 1.1, 2.0, logs, invs, chunked)
        weighted_cos_sum(0.3, 2.0, logs, invs, co, chunked)
        weighted_cos_sum_vd(0.3, 1.1, 2.0, logs, invs, co, chunked)
        power_sum(0.5, 2.0, 3, chunked)
    zc = 0.3 + 0.01j
    cos_sum_c(zc, 2.0 + 0.01j, logs, invs)
    cos_sum_vd_c(zc, 1.1 + 0.0j, 2.0 + 0.01j, logs, invs)
    weighted_cos_sum_c(zc, 2.0 + 0.01j, logs, invs, co)
    weighted_cos_sum_vd_c(zc, 1.1 + 0.0j, 2.0 + 0.01j, logs, invs, co)
