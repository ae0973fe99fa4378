"""Independent brute-force oracles used across the test suite.

These deliberately share no iteration structure with the package kernels:
they scan coordinate boxes (pruned only by the height constraint itself),
apply per-point gcd/sign/determinant filters computed from scratch, and
evaluate predicates through pointwise is_global_norm calls.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from detnorm.arithmetic import is_global_norm


def quadruple_loop_count_n2(B, chi=None):
    """Scalar quadruple loop over the full box, n=2 (tiny B only)."""
    bsq = int(B * B)
    m = math.isqrt(bsq)
    count = 0
    for a, b, c, d in itertools.product(range(-m, m + 1), repeat=4):
        if a * a + b * b + c * c + d * d > bsq:
            continue
        det = a * d - b * c
        if det == 0:
            continue
        if math.gcd(math.gcd(abs(a), abs(b)), math.gcd(abs(c), abs(d))) != 1:
            continue
        first = a if a else b if b else c if c else d
        if first < 0:
            continue
        if chi is not None and not is_global_norm(det, chi):
            continue
        count += 1
    return count


def _pred_lut(K, chi):
    """lut[K + det] = predicate(det), built by pointwise norm tests."""
    lut = np.zeros(2 * K + 1, dtype=np.int64)
    if chi is None:
        lut[:] = 1
        lut[K] = 0
        return lut
    for v in range(1, K + 1):
        lut[K + v] = 1 if is_global_norm(v, chi) else 0
        lut[K - v] = 1 if is_global_norm(-v, chi) else 0
    return lut


def boxed_count_n2(B, chi=None, lut=None):
    """Exhaustive box scan with a vectorized (c, d) plane, n=2 (B <= ~100)."""
    bsq = int(B * B)
    m = math.isqrt(bsq)
    K = bsq // 2 + 1
    if lut is None:
        lut = _pred_lut(K, chi)
    else:
        assert len(lut) >= 2 * K + 1
        K = (len(lut) - 1) // 2
    axis = np.arange(-m, m + 1, dtype=np.int64)
    c_grid, d_grid = np.meshgrid(axis, axis, indexing="ij")
    cd_norm = c_grid * c_grid + d_grid * d_grid
    cd_gcd = np.gcd(np.abs(c_grid), np.abs(d_grid))
    total = 0
    for a in range(0, m + 1):
        for b in range(-m, m + 1):
            s2 = a * a + b * b
            if s2 > bsq:
                continue
            if a == 0 and b <= 0:
                continue  # sign canonicality (b < 0) or det = 0 (row zero)
            det = a * d_grid - b * c_grid
            mask = (cd_norm <= bsq - s2) & (det != 0)
            mask &= np.gcd(math.gcd(a, abs(b)), cd_gcd) == 1
            total += int(lut[K + det[mask]].sum())
    return total


def boxed_series_n2(b_values, chi=None):
    """Oracle version of count_series: one boxed scan per threshold."""
    K = int(b_values[-1]) ** 2 // 2 + 1
    lut = _pred_lut(K, chi)
    base_lut = _pred_lut(K, None)
    pred = tuple(boxed_count_n2(B, chi, lut) for B in b_values)
    base = tuple(boxed_count_n2(B, None, base_lut) for B in b_values)
    return pred, base


def boxed_count_n3(B, chi=None):
    """Exhaustive scan for n=3 (B <= ~5): nested loops over the first seven
    coordinates pruned by the height constraint alone, numpy grid over the
    last two, all filters per point."""
    bsq = int(B * B)
    m = math.isqrt(bsq)
    K = math.isqrt(bsq**3 // 27) + 1
    lut = _pred_lut(K, chi)
    axis = np.arange(-m, m + 1, dtype=np.int64)
    e7g, e8g = np.meshgrid(axis, axis, indexing="ij")
    tail_norm = e7g * e7g + e8g * e8g
    tail_gcd = np.gcd(np.abs(e7g), np.abs(e8g))
    total = 0

    def rng(rem):
        r = math.isqrt(rem)
        return range(-r, r + 1)

    for e0 in rng(bsq):
        s0 = e0 * e0
        for e1 in rng(bsq - s0):
            s1 = s0 + e1 * e1
            for e2 in rng(bsq - s1):
                s2 = s1 + e2 * e2
                for e3 in rng(bsq - s2):
                    s3 = s2 + e3 * e3
                    for e4 in rng(bsq - s3):
                        s4 = s3 + e4 * e4
                        for e5 in rng(bsq - s4):
                            s5 = s4 + e5 * e5
                            for e6 in rng(bsq - s5):
                                s7 = s5 + e6 * e6
                                head = (e0, e1, e2, e3, e4, e5, e6)
                                first = next((v for v in head if v != 0), 0)
                                if first < 0:
                                    continue
                                hg = 0
                                for v in head:
                                    hg = math.gcd(hg, abs(v))
                                mask = tail_norm <= bsq - s7
                                if first == 0:
                                    mask &= (e7g > 0) | ((e7g == 0) & (e8g > 0))
                                mask &= np.gcd(hg, tail_gcd) == 1
                                det = (
                                    e0 * (e4 * e8g - e5 * e7g)
                                    - e1 * (e3 * e8g - e5 * e6)
                                    + e2 * (e3 * e7g - e4 * e6)
                                )
                                mask &= det != 0
                                total += int(lut[K + det[mask]].sum())
    return total
