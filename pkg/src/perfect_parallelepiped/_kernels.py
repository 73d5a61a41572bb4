"""Compiled inner loops for the two hot stages of the search.

Every value tested for squareness is at most 9 N^2 for edge bound N, which
stays below 2**52 for all N up to ``MAX_EDGE_BUDGET``.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .exact import QR64


@njit(cache=True, inline="always")
def square_root(n):
    """sqrt(n) for a positive perfect square n < 2**52, else -1.

    Below 2**52 the correctly rounded float sqrt of a square is exact, so no
    correction step is needed. Only the mod-64 mask is applied here: the
    other moduli cost more than the sqrt they would save.
    """
    if n <= 0 or not QR64[n & 63]:
        return -1
    r = np.int64(math.sqrt(n))
    if r * r == n:
        return r
    return -1


@njit(cache=True)
def square_roots(values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        out[i] = square_root(values[i])
    return out


@njit(cache=True, inline="always")
def floor_sqrt(n):
    r = np.int64(math.sqrt(n))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def enumerate_parallelograms(x1_lo, x1_hi, min_edge):
    """All (x1, x2, d, D) with x1_lo <= x1 <= x1_hi, min_edge <= x2 <= x1.

    Rows come out in ascending (x1, x2, d) order.
    """
    cap = 1024
    out = np.empty((cap, 4), dtype=np.int64)
    n = 0
    for x1 in range(x1_lo, x1_hi + 1):
        for x2 in range(min_edge, x1 + 1):
            s = x1 * x1 + x2 * x2
            hi = floor_sqrt(s)
            for d in range(x1 - x2 + 1, hi + 1):
                big = square_root(2 * s - d * d)
                if big < 0:
                    continue
                if n == cap:
                    grown = np.empty((cap * 2, 4), dtype=np.int64)
                    grown[:cap] = out
                    out = grown
                    cap *= 2
                out[n, 0] = x1
                out[n, 1] = x2
                out[n, 2] = d
                out[n, 3] = big
                n += 1
    return out[:n].copy()


@njit(cache=True)
def scan_x1_into(x1, stride, offsets, diagonals, hist, surv):
    """Run the body-diagonal funnel over every canonical triple with largest edge x1.

    ``hist[k]`` is incremented for each configuration satisfying exactly k of
    the four body-diagonal conditions. Rows (x2, x3, d12, d13, d23, m1..m4) of
    all-four survivors are written to ``surv`` in ascending order while it has
    room; the return value is the total number of survivors.
    """
    cap = surv.shape[0]
    n = 0
    s1 = x1 * x1
    row1 = x1 * stride
    for x2 in range(1, x1 + 1):
        a0 = offsets[row1 + x2]
        a1 = offsets[row1 + x2 + 1]
        if a0 == a1:
            continue
        s2 = x2 * x2
        row2 = x2 * stride
        for x3 in range(1, x2 + 1):
            b0 = offsets[row1 + x3]
            b1 = offsets[row1 + x3 + 1]
            if b0 == b1:
                continue
            c0 = offsets[row2 + x3]
            c1 = offsets[row2 + x3 + 1]
            if c0 == c1:
                continue
            s3 = x3 * x3
            k1 = -s1 + s2 + s3
            k2 = s1 - s2 + s3
            k3 = s1 + s2 - s3
            k4 = 3 * (s1 + s2 + s3)
            for i in range(a0, a1):
                d12 = diagonals[i]
                a = d12 * d12
                for j in range(b0, b1):
                    d13 = diagonals[j]
                    b = d13 * d13
                    for k in range(c0, c1):
                        d23 = diagonals[k]
                        c = d23 * d23
                        v1 = k1 + a + b - c
                        v2 = k2 + a - b + c
                        v3 = k3 - a + b + c
                        v4 = k4 - a - b - c
                        r1 = square_root(v1)
                        r2 = square_root(v2)
                        r3 = square_root(v3)
                        r4 = square_root(v4)
                        hits = (r1 > 0) + (r2 > 0) + (r3 > 0) + (r4 > 0)
                        hist[hits] += 1
                        if hits == 4:
                            if n >= cap:
                                n += 1
                                continue
                            surv[n, 0] = x2
                            surv[n, 1] = x3
                            surv[n, 2] = d12
                            surv[n, 3] = d13
                            surv[n, 4] = d23
                            surv[n, 5] = r1
                            surv[n, 6] = r2
                            surv[n, 7] = r3
                            surv[n, 8] = r4
                            n += 1
    return n


def scan_x1(x1, stride, offsets, diagonals):
    """Histogram and survivor rows for one x1 (see :func:`scan_x1_into`)."""
    cap = 64
    while True:
        hist = np.zeros(5, dtype=np.int64)
        surv = np.empty((cap, 9), dtype=np.int64)
        n = scan_x1_into(x1, stride, offsets, diagonals, hist, surv)
        if n <= cap:
            return hist, surv[:n].copy()
        cap = n
