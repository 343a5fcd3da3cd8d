"""Numba skip-gram negative-sampling kernel (default hot path).

Same update rule and RNG stream as :mod:`emergekg._sgns_numpy`; scalar
loops compile to machine code and release the GIL so multi-worker training
gets real parallelism.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._sgns_numpy import LCG_INC, LCG_MUL

_LCG_MUL = np.uint64(LCG_MUL)
_LCG_INC = np.uint64(LCG_INC)
_SHIFT32 = np.uint64(32)
_INV_TWO32 = 1.0 / 4294967296.0


@njit(cache=True, nogil=True, inline="always")
def _bisect_left(cum: np.ndarray, r: np.int64) -> np.int64:
    lo = np.int64(0)
    hi = np.int64(cum.shape[0])
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] < r:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def train_job(sents, offsets, syn0, syn1, keep_prob, cum_table, window, negative, alpha0, alpha_min, t, t_total, state):
    D = syn0.shape[1]
    nsent = offsets.shape[0] - 1
    maxlen = 0
    for s in range(nsent):
        length = offsets[s + 1] - offsets[s]
        if length > maxlen:
            maxlen = length
    kept = np.empty(maxlen, dtype=np.int64)
    dv = np.empty(D, dtype=np.float64)
    domain = cum_table[cum_table.shape[0] - 1]
    for s in range(nsent):
        beg = offsets[s]
        end = offsets[s + 1]
        if t_total > 0:
            alpha = alpha0 - (alpha0 - alpha_min) * (np.float64(t) / np.float64(t_total))
            if alpha < alpha_min:
                alpha = alpha_min
        else:
            alpha = alpha0
        m = 0
        for j in range(beg, end):
            w = sents[j]
            state = state * _LCG_MUL + _LCG_INC
            u = np.float64(np.int64(state >> _SHIFT32)) * _INV_TWO32
            if u < keep_prob[w]:
                kept[m] = w
                m += 1
        t += end - beg
        for i in range(m):
            cen = kept[i]
            state = state * _LCG_MUL + _LCG_INC
            b = np.int64(state >> _SHIFT32) % window
            win = window - b
            lo = i - win
            if lo < 0:
                lo = 0
            hi = i + win + 1
            if hi > m:
                hi = m
            for jj in range(lo, hi):
                if jj == i:
                    continue
                ctx = kept[jj]
                # positive pair: label 1
                z = 0.0
                for d in range(D):
                    z += syn0[cen, d] * syn1[ctx, d]
                if z > 60.0:
                    z = 60.0
                elif z < -60.0:
                    z = -60.0
                g = alpha * (1.0 - 1.0 / (1.0 + np.exp(-z)))
                for d in range(D):
                    tmp = syn1[ctx, d]
                    dv[d] = g * tmp
                    syn1[ctx, d] = tmp + g * syn0[cen, d]
                # sampled noise words: label 0, redrawn when they hit the context
                for k in range(negative):
                    state = state * _LCG_MUL + _LCG_INC
                    r = np.int64(state >> _SHIFT32) % domain
                    cand = _bisect_left(cum_table, r)
                    tries = 0
                    while cand == ctx and tries < 100:
                        state = state * _LCG_MUL + _LCG_INC
                        r = np.int64(state >> _SHIFT32) % domain
                        cand = _bisect_left(cum_table, r)
                        tries += 1
                    z = 0.0
                    for d in range(D):
                        z += syn0[cen, d] * syn1[cand, d]
                    if z > 60.0:
                        z = 60.0
                    elif z < -60.0:
                        z = -60.0
                    g = -alpha / (1.0 + np.exp(-z))
                    for d in range(D):
                        tmp = syn1[cand, d]
                        dv[d] += g * tmp
                        syn1[cand, d] = tmp + g * syn0[cen, d]
                for d in range(D):
                    syn0[cen, d] += dv[d]
    return t, state
