"""Pure-Python (numpy) counting kernels: the fallback backend.

Same unit semantics as the compiled kernels in `_kernel.pyx`, implemented
with dense 2-D grids over the two innermost coordinates and boolean masks
instead of band loops and Moebius counts.  Exact (integer arithmetic and
table lookups throughout), roughly two orders of magnitude slower; the
import-time selection in `kernels.py` prefers the compiled core.
"""

from __future__ import annotations

import math

import numpy as np

_CHUNK_CELLS = 1 << 22  # cap per-row grid memory


def _hist_to_cumulative(pred_hist, base_hist):
    return np.cumsum(pred_hist), np.cumsum(base_hist)


def count_unit_n2(rows, thresholds, table, K, spf=None):
    """Counts for one unit of folded first rows (a, b >= 0), n = 2."""
    rows = np.asarray(rows, dtype=np.int64)
    thr = np.asarray(thresholds, dtype=np.int64)
    T = len(thr)
    thrmax = int(thr[-1])
    pred_hist = np.zeros(T, dtype=np.int64)
    base_hist = np.zeros(T, dtype=np.int64)
    for a, b in rows:
        a = int(a)
        b = int(b)
        s2 = a * a + b * b
        if s2 > thrmax:
            continue
        w = 2 if (a >= 1 and b >= 1) else 1
        g2 = math.gcd(a, b)
        cmax = math.isqrt(thrmax - s2)
        dmax_all = math.isqrt(thrmax - s2)
        d = np.arange(-dmax_all, dmax_all + 1, dtype=np.int64)
        dsq = d * d
        gd = np.abs(d)
        c_all = np.arange(-cmax, cmax + 1, dtype=np.int64)
        step = max(1, _CHUNK_CELLS // max(1, len(d)))
        for i in range(0, len(c_all), step):
            c = c_all[i : i + step]
            s3 = s2 + c * c
            g3 = np.gcd(g2, np.abs(c))
            h = s3[:, None] + dsq[None, :]
            valid = h <= thrmax
            det = a * d[None, :] - (b * c)[:, None]
            tab = table[K + np.where(valid, det, 0)]
            ok = valid & (np.gcd.outer(g3, gd) == 1)
            band = np.searchsorted(thr, h)
            pm = ok & (tab != 0)
            bm = ok & (det != 0)
            pred_hist += w * np.bincount(band[pm], minlength=T)[:T]
            base_hist += w * np.bincount(band[bm], minlength=T)[:T]
    return _hist_to_cumulative(pred_hist, base_hist)


def count_unit_n3(rows, thresholds, table, K, spf=None):
    """Counts for one unit of canonical first rows (e0, e1, e2), n = 3."""
    rows = np.asarray(rows, dtype=np.int64)
    thr = np.asarray(thresholds, dtype=np.int64)
    T = len(thr)
    thrmax = int(thr[-1])
    pred_hist = np.zeros(T, dtype=np.int64)
    base_hist = np.zeros(T, dtype=np.int64)
    for e0, e1, e2 in rows:
        e0, e1, e2 = int(e0), int(e1), int(e2)
        s_row = e0 * e0 + e1 * e1 + e2 * e2
        if s_row > thrmax:
            continue
        g_row = math.gcd(math.gcd(e0, e1), e2)
        m3 = math.isqrt(thrmax - s_row)
        for e3 in range(0, m3 + 1):
            z3 = e3 == 0
            s3 = s_row + e3 * e3
            g3 = math.gcd(g_row, e3)
            m4 = math.isqrt(thrmax - s3)
            for e4 in range(0 if z3 else -m4, m4 + 1):
                z4 = z3 and e4 == 0
                s4 = s3 + e4 * e4
                g4 = math.gcd(g3, abs(e4))
                m5 = math.isqrt(thrmax - s4)
                for e5 in range(0 if z4 else -m5, m5 + 1):
                    z5 = z4 and e5 == 0
                    s5 = s4 + e5 * e5
                    g5 = math.gcd(g4, abs(e5))
                    c8 = e0 * e4 - e1 * e3
                    c7 = e2 * e3 - e0 * e5
                    c6 = e1 * e5 - e2 * e4
                    m6 = math.isqrt(thrmax - s5)
                    for e6 in range(0 if z5 else -m6, m6 + 1):
                        z6 = z5 and e6 == 0
                        s6 = s5 + e6 * e6
                        g6 = math.gcd(g5, abs(e6))
                        part6 = e6 * c6
                        m7 = math.isqrt(thrmax - s6)
                        e7 = np.arange(0 if z6 else -m7, m7 + 1, dtype=np.int64)
                        m8 = math.isqrt(thrmax - s6)
                        e8 = np.arange(-m8, m8 + 1, dtype=np.int64)
                        h = s6 + (e7 * e7)[:, None] + (e8 * e8)[None, :]
                        valid = h <= thrmax
                        if z6:
                            valid &= ~((e7[:, None] == 0) & (e8[None, :] < 0))
                        det = part6 + c7 * e7[:, None] + c8 * e8[None, :]
                        tab = table[K + np.where(valid, det, 0)]
                        g7 = np.gcd(g6, np.abs(e7))
                        ok = valid & (np.gcd.outer(g7, np.abs(e8)) == 1)
                        band = np.searchsorted(thr, h)
                        pm = ok & (tab != 0)
                        bm = ok & (det != 0)
                        pred_hist += 2 * np.bincount(band[pm], minlength=T)[:T]
                        base_hist += 2 * np.bincount(band[bm], minlength=T)[:T]
    return _hist_to_cumulative(pred_hist, base_hist)
