# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled counting kernels for bounded-height primitive matrix points.

A unit is a slice of the canonical first-row list.  For each row the kernel
scans the remaining coordinates with incremental norm/gcd tracking, resolves
the multi-threshold structure into bands of the innermost coordinate, and
counts predicate hits via a byte table indexed by determinant (the table
holds 0 at determinant 0, so boundary points drop out for free).  Baseline
counts (nonzero determinant only) use a closed form per band: a Moebius sum
over the divisors of the running gcd, minus the at-most-one determinant zero.

The n=2 scan folds the determinant-preserving symmetry
(a, b, c, d) -> (a, -b, -c, d) by iterating b >= 0 and doubling rows with
a >= 1, b >= 1.  The n=3 scan folds simultaneous negation of rows 2 and 3
by constraining the first nonzero coordinate after the first row to be
positive and doubling everything (the fixed points have determinant 0).
"""

import numpy as np

from libc.math cimport sqrt


cdef inline long long c_gcd(long long a, long long b) nogil:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline long long c_isqrt(long long x) nogil:
    if x < 0:
        return -1
    cdef long long r = <long long>sqrt(<double>x)
    while r > 0 and r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


cdef inline int prime_factors(long long g, long long[:] spf, long long* pf) nogil:
    """Distinct primes of g (g <= len(spf)-1) into pf; returns the count."""
    cdef int np_ = 0
    cdef long long p
    while g > 1:
        p = spf[g]
        pf[np_] = p
        np_ += 1
        while g % p == 0:
            g //= p
    return np_


cdef inline long long coprime_count(long long x, long long y, long long* pf, int np_) nogil:
    """#{d in [x..y] : gcd(d, prod pf) = 1} for 0 <= x, via Moebius."""
    if y < x:
        return 0
    cdef long long total = 0, e
    cdef int mask, i, bits
    cdef long long extra = 0
    if x == 0:
        if np_ == 0:
            extra = 1  # d = 0 counts only against a trivial gcd
        x = 1
        if y < 1:
            return extra
    for mask in range(1 << np_):
        e = 1
        bits = 0
        for i in range(np_):
            if mask & (1 << i):
                e *= pf[i]
                bits += 1
        if bits & 1:
            total -= y // e - (x - 1) // e
        else:
            total += y // e - (x - 1) // e
    return total + extra


cdef inline long long pred_run(const unsigned char[:] table, long long idx0,
                               long long stride, long long nsteps) nogil:
    """Sum table[idx0 + k*stride] for k in [0, nsteps)."""
    cdef long long acc = 0, idx = idx0, k
    for k in range(nsteps):
        acc += table[idx]
        idx += stride
    return acc


cdef inline long long pred_run_coprime(const unsigned char[:] table, long long idx0,
                                       long long stride, long long d0, long long dstep,
                                       long long nsteps, long long* pf, int np_) nogil:
    """Same, but only at offsets whose d-value is coprime to the pf primes."""
    cdef long long acc = 0, idx = idx0, d = d0, k
    cdef int i, ok
    for k in range(nsteps):
        ok = 1
        for i in range(np_):
            if d % pf[i] == 0:
                ok = 0
                break
        if ok:
            acc += table[idx]
        idx += stride
        d += dstep
    return acc


def count_unit_n2(long long[:, :] rows,
                  long long[:] thresholds,
                  const unsigned char[:] table,
                  long long K,
                  long long[:] spf):
    """Counts for one unit of folded first rows (a, b >= 0), n = 2.

    Returns (pred, base): cumulative int64 counts per threshold.
    """
    cdef Py_ssize_t T = thresholds.shape[0]
    pred_np = np.zeros(T, dtype=np.int64)
    base_np = np.zeros(T, dtype=np.int64)
    cdef long long[:] pred = pred_np
    cdef long long[:] base = base_np
    cdef long long thrmax = thresholds[T - 1]
    cdef long long pf[8]
    cdef Py_ssize_t r
    cdef long long a, b, w, s2, g2, cmax, c, s3, g3, bc, dprev, dmax
    cdef long long lo, hi, lon, cp, cb, d0
    cdef Py_ssize_t t, t0
    cdef int np_
    cdef bint has_d0

    for r in range(rows.shape[0]):
        a = rows[r, 0]
        b = rows[r, 1]
        s2 = a * a + b * b
        if s2 > thrmax:
            continue
        w = 2 if (a >= 1 and b >= 1) else 1
        g2 = c_gcd(a, b)
        cmax = c_isqrt(thrmax - s2)
        for c in range(-cmax, cmax + 1):
            s3 = s2 + c * c
            g3 = c_gcd(g2, c)
            bc = b * c
            np_ = 0
            if g3 > 1:
                np_ = prime_factors(g3, spf, pf)
            t0 = 0
            while thresholds[t0] < s3:
                t0 += 1
            has_d0 = False
            d0 = 0
            if a > 0:
                if bc % a == 0:
                    has_d0 = True
                    d0 = bc // a
            dprev = -1
            for t in range(t0, T):
                dmax = c_isqrt(thresholds[t] - s3)
                lo = dprev + 1
                hi = dmax
                dprev = dmax
                if hi < lo:
                    continue
                # predicate hits: positive side [lo..hi], negative [-hi..-lon]
                lon = lo if lo > 0 else 1
                if np_ == 0:
                    cp = pred_run(table, K + a * lo - bc, a, hi - lo + 1)
                    if hi >= lon:
                        cp += pred_run(table, K - a * hi - bc, a, hi - lon + 1)
                else:
                    cp = pred_run_coprime(table, K + a * lo - bc, a, lo, 1,
                                          hi - lo + 1, pf, np_)
                    if hi >= lon:
                        cp += pred_run_coprime(table, K - a * hi - bc, a, -hi, 1,
                                               hi - lon + 1, pf, np_)
                # baseline: closed form
                if a == 0 and bc == 0:
                    cb = 0
                else:
                    cb = coprime_count(lo, hi, pf, np_) + coprime_count(lon, hi, pf, np_)
                    if has_d0:
                        if (lo <= d0 <= hi) or (-hi <= d0 <= -lon):
                            if c_gcd(d0, g3) == 1:
                                cb -= 1
                pred[t] += w * cp
                base[t] += w * cb
    # cumulative: a point in band t has height <= every larger threshold
    for t in range(1, T):
        pred[t] += pred[t - 1]
        base[t] += base[t - 1]
    return pred_np, base_np


def count_unit_n3(long long[:, :] rows,
                  long long[:] thresholds,
                  const unsigned char[:] table,
                  long long K,
                  long long[:] spf):
    """Counts for one unit of canonical first rows (e0, e1, e2), n = 3."""
    cdef Py_ssize_t T = thresholds.shape[0]
    pred_np = np.zeros(T, dtype=np.int64)
    base_np = np.zeros(T, dtype=np.int64)
    cdef long long[:] pred = pred_np
    cdef long long[:] base = base_np
    cdef long long thrmax = thresholds[T - 1]
    cdef long long pf[8]
    cdef Py_ssize_t r
    cdef long long e0, e1, e2, e3, e4, e5, e6, e7
    cdef long long s_row, g_row, rem3, m3, m4, m5, m6, m7
    cdef long long s3, s4, s5, s6, s7, g3, g4, g5, g6, g7
    cdef long long C6, C7, C8, part6, bdet
    cdef long long dprev, dmax, lo, hi, lon, cp, cb, e8z
    cdef Py_ssize_t t, t0
    cdef int np_
    cdef bint z3, z4, z5, z6, z7, has_z
    cdef long long lo4, lo5, lo6, lo7

    for r in range(rows.shape[0]):
        e0 = rows[r, 0]
        e1 = rows[r, 1]
        e2 = rows[r, 2]
        s_row = e0 * e0 + e1 * e1 + e2 * e2
        if s_row > thrmax:
            continue
        g_row = c_gcd(c_gcd(e0, e1), e2)
        m3 = c_isqrt(thrmax - s_row)
        for e3 in range(0, m3 + 1):
            z3 = e3 == 0
            s3 = s_row + e3 * e3
            g3 = c_gcd(g_row, e3)
            m4 = c_isqrt(thrmax - s3)
            lo4 = 0 if z3 else -m4
            for e4 in range(lo4, m4 + 1):
                z4 = z3 and e4 == 0
                s4 = s3 + e4 * e4
                g4 = c_gcd(g3, e4)
                m5 = c_isqrt(thrmax - s4)
                lo5 = 0 if z4 else -m5
                for e5 in range(lo5, m5 + 1):
                    z5 = z4 and e5 == 0
                    s5 = s4 + e5 * e5
                    g5 = c_gcd(g4, e5)
                    C8 = e0 * e4 - e1 * e3
                    C7 = e2 * e3 - e0 * e5
                    C6 = e1 * e5 - e2 * e4
                    m6 = c_isqrt(thrmax - s5)
                    lo6 = 0 if z5 else -m6
                    for e6 in range(lo6, m6 + 1):
                        z6 = z5 and e6 == 0
                        s6 = s5 + e6 * e6
                        g6 = c_gcd(g5, e6)
                        part6 = e6 * C6
                        m7 = c_isqrt(thrmax - s6)
                        lo7 = 0 if z6 else -m7
                        for e7 in range(lo7, m7 + 1):
                            z7 = z6 and e7 == 0
                            s7 = s6 + e7 * e7
                            g7 = c_gcd(g6, e7)
                            bdet = part6 + e7 * C7
                            np_ = 0
                            if g7 > 1:
                                np_ = prime_factors(g7, spf, pf)
                            has_z = False
                            e8z = 0
                            if C8 != 0:
                                if bdet % C8 == 0:
                                    has_z = True
                                    e8z = -(bdet // C8)
                            t0 = 0
                            while thresholds[t0] < s7:
                                t0 += 1
                            dprev = -1
                            for t in range(t0, T):
                                dmax = c_isqrt(thresholds[t] - s7)
                                lo = dprev + 1
                                hi = dmax
                                dprev = dmax
                                if hi < lo:
                                    continue
                                lon = lo if lo > 0 else 1
                                if np_ == 0:
                                    cp = pred_run(table, K + bdet + C8 * lo, C8, hi - lo + 1)
                                    if hi >= lon and not z7:
                                        cp += pred_run(table, K + bdet - C8 * hi, C8, hi - lon + 1)
                                else:
                                    cp = pred_run_coprime(table, K + bdet + C8 * lo, C8,
                                                          lo, 1, hi - lo + 1, pf, np_)
                                    if hi >= lon and not z7:
                                        cp += pred_run_coprime(table, K + bdet - C8 * hi, C8,
                                                               -hi, 1, hi - lon + 1, pf, np_)
                                if C8 == 0 and bdet == 0:
                                    cb = 0
                                else:
                                    cb = coprime_count(lo, hi, pf, np_)
                                    if not z7:
                                        cb += coprime_count(lon, hi, pf, np_)
                                    if has_z:
                                        if (lo <= e8z <= hi) or ((not z7) and -hi <= e8z <= -lon):
                                            if c_gcd(e8z, g7) == 1:
                                                cb -= 1
                                pred[t] += 2 * cp
                                base[t] += 2 * cb
    for t in range(1, T):
        pred[t] += pred[t - 1]
        base[t] += base[t - 1]
    return pred_np, base_np
