"""Pure-numpy skip-gram negative-sampling kernel (fallback path).

This mirrors the numba kernel in :mod:`emergekg._sgns_numba` update for
update.  Both consume the same 64-bit LCG stream, so the sequence of
subsampling decisions, window sizes and negative draws is identical across
backends; vectors differ only by floating-point summation order inside dot
products.
"""

from __future__ import annotations

import bisect

import numpy as np

MASK64 = (1 << 64) - 1
LCG_MUL = 6364136223846793005
LCG_INC = 1442695040888963407
_INV_TWO32 = 1.0 / 4294967296.0


def splitmix64(x: int) -> int:
    """Seed scrambler; spreads small seeds over the full 64-bit state space."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def lcg_next(state: int) -> int:
    return (state * LCG_MUL + LCG_INC) & MASK64


def _sigmoid(z: float) -> float:
    if z > 60.0:
        z = 60.0
    elif z < -60.0:
        z = -60.0
    return 1.0 / (1.0 + np.exp(-z))


def train_job(
    sents: np.ndarray,
    offsets: np.ndarray,
    syn0: np.ndarray,
    syn1: np.ndarray,
    keep_prob: np.ndarray,
    cum_table: np.ndarray,
    window: int,
    negative: int,
    alpha0: float,
    alpha_min: float,
    t: int,
    t_total: int,
    state: int,
) -> tuple[int, int]:
    """Train over the sentences described by ``offsets``; in-place updates.

    ``t`` counts scheduled center-word presentations so far; the learning
    rate decays linearly from ``alpha0`` to ``alpha_min`` over ``t_total``
    presentations, updated once per sentence.  Returns the advanced
    ``(t, state)`` pair.
    """
    domain = int(cum_table[-1])
    for s in range(len(offsets) - 1):
        beg, end = int(offsets[s]), int(offsets[s + 1])
        if t_total > 0:
            alpha = alpha0 - (alpha0 - alpha_min) * (t / t_total)
            if alpha < alpha_min:
                alpha = alpha_min
        else:
            alpha = alpha0
        kept = []
        for j in range(beg, end):
            w = int(sents[j])
            state = (state * LCG_MUL + LCG_INC) & MASK64
            if (state >> 32) * _INV_TWO32 < keep_prob[w]:
                kept.append(w)
        t += end - beg
        m = len(kept)
        for i in range(m):
            cen = kept[i]
            state = (state * LCG_MUL + LCG_INC) & MASK64
            win = window - (state >> 32) % window
            lo = i - win if i - win > 0 else 0
            hi = i + win + 1 if i + win + 1 < m else m
            v = syn0[cen]
            for jj in range(lo, hi):
                if jj == i:
                    continue
                ctx = kept[jj]
                # positive pair: label 1
                row = syn1[ctx]
                g = alpha * (1.0 - _sigmoid(v @ row))
                dv = g * row  # gradient uses the pre-update row
                row += g * v
                # sampled noise words: label 0, redrawn when they hit the context
                for _ in range(negative):
                    state = (state * LCG_MUL + LCG_INC) & MASK64
                    cand = bisect.bisect_left(cum_table, (state >> 32) % domain)
                    tries = 0
                    while cand == ctx and tries < 100:
                        state = (state * LCG_MUL + LCG_INC) & MASK64
                        cand = bisect.bisect_left(cum_table, (state >> 32) % domain)
                        tries += 1
                    row = syn1[cand]
                    g = -alpha * _sigmoid(v @ row)
                    dv += g * row
                    row += g * v
                v += dv
    return t, state
