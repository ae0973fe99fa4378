"""High-throughput enumeration of bounded-height primitive matrix points.

Counts canonical primitive integer representatives of points of
PGL_n(Q) inside P^{n^2-1}(Q) with Euclidean height at most B, excluding
the determinant hypersurface, under a determinant predicate.  The search
space is partitioned into work units keyed by the first matrix row; units
are independent pure computations whose int-vector results are summed, so
counts are exact and identical for any worker count and any execution
order.  Completed units are checkpointed (JSONL, one record per unit,
fingerprint-guarded) for kill-and-resume.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .brauer import BrauerClass, det_is_norm
from .kernels import get_backend

__all__ = [
    "MatrixPoint",
    "HeightWindow",
    "CountSeries",
    "CountingJob",
    "OverflowGuardError",
    "CheckpointMismatchError",
    "height_squared",
    "enumerate_count",
    "count_series",
    "canonical_points",
    "write_counts_csv",
    "read_counts_csv",
]

KERNEL_SCHEMA = 1  # bump on any change to row order / unit semantics


class OverflowGuardError(RuntimeError):
    """Determinants (or their lookup table) would exceed safe bounds."""


class CheckpointMismatchError(RuntimeError):
    """Checkpoint file belongs to a different configuration."""


# ---------------------------------------------------------------------------
# points

def _bareiss_det(mat: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free Gaussian elimination."""
    m = [row[:] for row in mat]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class MatrixPoint:
    """Canonical primitive integer representative of a projective matrix point.

    Entries are row-major; gcd of all entries is 1 and the first nonzero
    entry is positive, so each point of P^{n^2-1}(Q) has exactly one
    representative.
    """

    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        nn = self.n * self.n
        if self.n < 2 or len(self.entries) != nn:
            raise ValueError(f"need {nn} entries for n={self.n}")
        g = 0
        first = 0
        for e in self.entries:
            if first == 0 and e != 0:
                first = e
            g = math.gcd(g, abs(e))
        if g != 1:
            raise ValueError("entries are not primitive (gcd != 1)" if g else "zero point")
        if first < 0:
            raise ValueError("first nonzero entry must be positive")

    @classmethod
    def from_entries(cls, entries: Sequence[int]) -> "MatrixPoint":
        """Canonicalize arbitrary (not all zero) integer entries."""
        n = math.isqrt(len(entries))
        if n * n != len(entries):
            raise ValueError("entry count is not a square")
        g = 0
        for e in entries:
            g = math.gcd(g, abs(e))
        if g == 0:
            raise ValueError("zero point")
        vec = [e // g for e in entries]
        for e in vec:
            if e != 0:
                if e < 0:
                    vec = [-x for x in vec]
                break
        return cls(n, tuple(vec))

    @classmethod
    def identity(cls, n: int) -> "MatrixPoint":
        return cls(n, tuple(1 if i % (n + 1) == 0 else 0 for i in range(n * n)))

    def height_squared(self) -> int:
        return sum(e * e for e in self.entries)

    def rows(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n : (i + 1) * n]) for i in range(n)]

    def det(self) -> int:
        e = self.entries
        if self.n == 2:
            return e[0] * e[3] - e[1] * e[2]
        if self.n == 3:
            return (
                e[0] * (e[4] * e[8] - e[5] * e[7])
                - e[1] * (e[3] * e[8] - e[5] * e[6])
                + e[2] * (e[3] * e[7] - e[4] * e[6])
            )
        return _bareiss_det(self.rows())


def height_squared(point: MatrixPoint) -> int:
    return point.height_squared()


@dataclass(frozen=True)
class HeightWindow:
    """Height bound B >= 1; comparisons use the exact integer floor(B^2)."""

    B: int | float | Fraction

    def __post_init__(self):
        if Fraction(self.B) < 1:
            raise ValueError("height bound must be at least 1")

    @property
    def bound_squared(self) -> int:
        sq = Fraction(self.B) ** 2
        return sq.numerator // sq.denominator


def _threshold(B) -> int:
    return HeightWindow(B).bound_squared


# ---------------------------------------------------------------------------
# count series

@dataclass(frozen=True)
class CountSeries:
    """Counts N(B_i) under the predicate and under the trivial predicate."""

    b_values: tuple
    counts: tuple[int, ...]
    baseline: tuple[int, ...]

    def __post_init__(self):
        k = len(self.b_values)
        if len(self.counts) != k or len(self.baseline) != k:
            raise ValueError("length mismatch")
        for i in range(k):
            if self.counts[i] > self.baseline[i]:
                raise ValueError("predicate count exceeds baseline")
            if i and (self.counts[i] < self.counts[i - 1] or self.baseline[i] < self.baseline[i - 1]):
                raise ValueError("counts must be nondecreasing in B")


def write_counts_csv(path, series: CountSeries) -> None:
    lines = ["# schema: detnorm.counts/1", "B,N,N_baseline"]
    for B, c, b in zip(series.b_values, series.counts, series.baseline):
        lines.append(f"{B},{c},{b}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_counts_csv(path) -> CountSeries:
    bs, cs, bl = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("B,"):
                continue
            b, c, base = line.split(",")
            bs.append(int(b) if "." not in b else float(b))
            cs.append(int(c))
            bl.append(int(base))
    return CountSeries(tuple(bs), tuple(cs), tuple(bl))


# ---------------------------------------------------------------------------
# determinant predicate table

def det_bound(n: int, thrmax: int) -> int:
    """Exact integer Hadamard bound on |det| over the height ball."""
    return math.isqrt(thrmax**n // n**n)


def build_det_table(n: int, thrmax: int, brauer_class: BrauerClass | None,
                    table_limit: int = 1 << 28) -> tuple[np.ndarray, int]:
    """Byte table t with t[K + det] = predicate(det), t[K] = 0 (boundary).

    The trivial predicate table is all ones off the center, so baseline
    counts can reuse the same kernels.
    """
    K = det_bound(n, thrmax)
    if K >= 2**62:
        raise OverflowGuardError(
            f"determinant bound {K} for height^2 <= {thrmax}, n={n} exceeds 63-bit integers"
        )
    if 2 * K + 1 > table_limit:
        raise OverflowGuardError(
            f"determinant table of {2 * K + 1} bytes exceeds the limit {table_limit} "
            f"(height^2 <= {thrmax}, n={n})"
        )
    table = np.zeros(2 * K + 1, dtype=np.uint8)
    if brauer_class is None:
        table[:] = 1
        table[K] = 0
        return table, K
    for m in range(1, K + 1):
        if det_is_norm(m, brauer_class):
            table[K + m] = 1
        if det_is_norm(-m, brauer_class):
            table[K - m] = 1
    return table, K


# ---------------------------------------------------------------------------
# work units: canonical first rows, folded under the sign symmetry

def first_rows(n: int, thrmax: int) -> np.ndarray:
    """Deterministic row-key array partitioning the search space.

    n=2: pairs (a, b) with b >= 0; rows with a >= 1, b >= 1 carry weight 2
    inside the kernel (fold of (a,b,c,d) -> (a,-b,-c,d)).
    n=3: canonical first rows (first nonzero positive); the fold acts on
    the remaining six coordinates inside the kernel.
    """
    m = math.isqrt(thrmax)
    if n == 2:
        rows = [(0, b) for b in range(1, m + 1)]
        for a in range(1, m + 1):
            bm = math.isqrt(thrmax - a * a)
            rows.extend((a, b) for b in range(0, bm + 1))
        return np.array(rows, dtype=np.int64)
    if n == 3:
        rows = []
        for e0 in range(0, m + 1):
            r0 = thrmax - e0 * e0
            m1 = math.isqrt(r0)
            for e1 in range(0 if e0 == 0 else -m1, m1 + 1):
                r1 = r0 - e1 * e1
                m2 = math.isqrt(r1)
                lo2 = -m2 if (e0 > 0 or e1 > 0) else 1  # zero row excluded
                rows.extend((e0, e1, e2) for e2 in range(lo2, m2 + 1))
        return np.array(rows, dtype=np.int64)
    raise NotImplementedError(f"fast kernels cover n in (2, 3); got n={n}")


def _config_fingerprint(n, thresholds, predicate_id, rows_per_unit) -> str:
    blob = json.dumps(
        {
            "schema": "detnorm.checkpoint/1",
            "kernel": KERNEL_SCHEMA,
            "n": n,
            "thresholds": list(thresholds),
            "predicate": predicate_id,
            "rows_per_unit": rows_per_unit,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# worker-process state (populated by the pool initializer; fork keeps the
# arrays shared copy-on-write)
_W: dict = {}


def _init_worker(backend_name, n, rows, thresholds, table, K, spf):
    _, mod = get_backend(backend_name)
    _W["fn"] = mod.count_unit_n2 if n == 2 else mod.count_unit_n3
    _W["rows"] = rows
    _W["args"] = (thresholds, table, K, spf)


def _run_unit(task):
    uid, start, end = task
    thresholds, table, K, spf = _W["args"]
    pred, base = _W["fn"](_W["rows"][start:end], thresholds, table, K, spf)
    return uid, [int(x) for x in pred], [int(x) for x in base]


class CountingJob:
    """One enumeration pass over all thresholds with checkpointed units."""

    def __init__(
        self,
        n: int,
        b_values: Sequence,
        brauer_class: BrauerClass | None = None,
        *,
        rows_per_unit: int = 512,
        checkpoint_path: str | None = None,
        backend: str = "auto",
        table_limit: int = 1 << 28,
    ):
        if n not in (2, 3):
            raise NotImplementedError("CountingJob supports n in (2, 3); use canonical_points otherwise")
        if brauer_class is not None and brauer_class.n != n:
            raise ValueError("brauer class is for a different n")
        bs = list(b_values)
        if not bs or any(Fraction(bs[i]) >= Fraction(bs[i + 1]) for i in range(len(bs) - 1)):
            raise ValueError("b_values must be nonempty and strictly increasing")
        self.n = n
        self.b_values = tuple(bs)
        self.thresholds = np.array([_threshold(B) for B in bs], dtype=np.int64)
        if len(set(self.thresholds.tolist())) != len(bs):
            raise ValueError("height bounds collide after squaring")
        self.brauer_class = brauer_class
        self.backend_name, _ = get_backend(backend)
        self.table, self.K = build_det_table(n, int(self.thresholds[-1]), brauer_class, table_limit)
        self.rows = first_rows(n, int(self.thresholds[-1]))
        self.rows_per_unit = max(1, int(rows_per_unit))
        self.units = [
            (i, s, min(s + self.rows_per_unit, len(self.rows)))
            for i, s in enumerate(range(0, len(self.rows), self.rows_per_unit))
        ]
        pid = brauer_class.fingerprint() if brauer_class else "baseline"
        self.fingerprint = _config_fingerprint(n, self.thresholds.tolist(), pid, self.rows_per_unit)
        self.checkpoint_path = checkpoint_path
        # smallest-prime-factor table over possible gcd values
        g = math.isqrt(int(self.thresholds[-1]))
        spf = np.arange(g + 1, dtype=np.int64)
        for p in range(2, math.isqrt(g) + 1):
            if spf[p] == p:
                sl = spf[p * p :: p]
                np.minimum(sl, p, out=sl)
        self.spf = spf

    # -- checkpointing ------------------------------------------------------

    def _load_checkpoint(self) -> dict[int, tuple[list[int], list[int]]]:
        done: dict[int, tuple[list[int], list[int]]] = {}
        path = self.checkpoint_path
        if not path or not os.path.exists(path):
            return done
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
        lines = [ln for ln in lines if ln]
        for i, line in enumerate(lines):
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    break  # torn final record from a kill mid-write: redo it
                raise CheckpointMismatchError(
                    f"checkpoint {path} is corrupt at record {i + 1}"
                ) from None
            if rec.get("fp") != self.fingerprint:
                raise CheckpointMismatchError(
                    f"checkpoint {path} was written for fingerprint {rec.get('fp')}, "
                    f"this configuration is {self.fingerprint}"
                )
            done[int(rec["unit"])] = (rec["pred"], rec["base"])
        return done

    def _append_checkpoint(self, fh, uid, pred, base) -> None:
        fh.write(json.dumps({"unit": uid, "pred": pred, "base": base, "fp": self.fingerprint}) + "\n")
        fh.flush()

    # -- execution ----------------------------------------------------------

    def run(self, workers: int = 1, max_units: int | None = None) -> CountSeries | None:
        """Process pending units; returns the series, or None if stopped early.

        Results are independent of `workers` and of resume boundaries: units
        are pure functions and aggregation is exact integer addition.
        """
        done = self._load_checkpoint()
        pending = [u for u in self.units if u[0] not in done]
        if max_units is not None:
            pending = pending[:max_units]
        ck = None
        if self.checkpoint_path:
            ck = open(self.checkpoint_path, "a", encoding="utf-8")
        try:
            if pending:
                init = (self.backend_name, self.n, self.rows, self.thresholds,
                        self.table, self.K, self.spf)
                if workers <= 1:
                    _init_worker(*init)
                    results = map(_run_unit, pending)
                    for uid, pred, base in results:
                        done[uid] = (pred, base)
                        if ck:
                            self._append_checkpoint(ck, uid, pred, base)
                else:
                    import multiprocessing as mp

                    # fork shares the tables copy-on-write; spawn (the only
                    # option elsewhere) pickles them through the initializer
                    method = "fork" if "fork" in mp.get_all_start_methods() else None
                    ctx = mp.get_context(method)
                    with ctx.Pool(workers, initializer=_init_worker, initargs=init) as pool:
                        for uid, pred, base in pool.imap_unordered(_run_unit, pending, chunksize=1):
                            done[uid] = (pred, base)
                            if ck:
                                self._append_checkpoint(ck, uid, pred, base)
        finally:
            if ck:
                ck.close()
        if len(done) < len(self.units):
            return None
        T = len(self.thresholds)
        pred_tot = [0] * T
        base_tot = [0] * T
        for uid, (pred, base) in done.items():
            for t in range(T):
                pred_tot[t] += pred[t]
                base_tot[t] += base[t]
        return CountSeries(self.b_values, tuple(pred_tot), tuple(base_tot))


# ---------------------------------------------------------------------------
# public operations

def count_series(
    n: int,
    b_values: Sequence,
    brauer_class: BrauerClass | None = None,
    *,
    workers: int = 1,
    rows_per_unit: int = 512,
    checkpoint_path: str | None = None,
    backend: str = "auto",
) -> CountSeries:
    """Counts at every threshold in one pass (baseline alongside)."""
    if n in (2, 3):
        job = CountingJob(
            n, b_values, brauer_class,
            rows_per_unit=rows_per_unit, checkpoint_path=checkpoint_path, backend=backend,
        )
        series = job.run(workers=workers)
        assert series is not None
        return series
    # generic exact path for larger n (no fast kernel; desk-scale B only)
    thresholds = [_threshold(B) for B in b_values]
    if sorted(set(thresholds)) != thresholds:
        raise ValueError("b_values must be strictly increasing")
    guard = det_bound(n, thresholds[-1])
    if guard >= 2**62:
        raise OverflowGuardError(
            f"determinant bound {guard} for n={n}, height^2 <= {thresholds[-1]} exceeds 63 bits"
        )
    T = len(thresholds)
    pred = [0] * T
    base = [0] * T
    import bisect

    for pt in canonical_points(n, thresholds[-1]):
        d = pt.det()
        if d == 0:
            continue
        t = bisect.bisect_left(thresholds, pt.height_squared())
        base[t] += 1
        if brauer_class is None or det_is_norm(d, brauer_class):
            pred[t] += 1
    for t in range(1, T):
        pred[t] += pred[t - 1]
        base[t] += base[t - 1]
    return CountSeries(tuple(b_values), tuple(pred), tuple(base))


def enumerate_count(
    n: int,
    window: HeightWindow | int | float,
    predicate: Callable[[MatrixPoint], bool] | None = None,
    *,
    brauer_class: BrauerClass | None = None,
    workers: int = 1,
    backend: str = "auto",
) -> int:
    """Number of canonical primitive points with det != 0, height <= B,
    satisfying the predicate.

    A `brauer_class` routes through the fast kernels; an arbitrary callable
    predicate forces the generic per-point path (exact, small B only).
    """
    if not isinstance(window, HeightWindow):
        window = HeightWindow(window)
    if predicate is not None:
        if brauer_class is not None:
            raise ValueError("give either a callable predicate or a brauer_class")
        cnt = 0
        for pt in canonical_points(n, window.bound_squared):
            if pt.det() != 0 and predicate(pt):
                cnt += 1
        return cnt
    series = count_series(n, [window.B], brauer_class, workers=workers, backend=backend)
    return series.counts[0]


def canonical_points(n: int, bound_squared: int) -> Iterator[MatrixPoint]:
    """Yield every canonical primitive point with height^2 <= bound.

    Reference-quality generator (incremental norm/gcd/sign tracking, no
    tables); the fast kernels are tested against it and the naive oracles.
    """
    nn = n * n
    entries = [0] * nn

    def rec(i: int, rem: int, g: int, seen: bool):
        if i == nn:
            if g == 1:
                yield MatrixPoint(n, tuple(entries))
            return
        m = math.isqrt(rem)
        lo = -m if seen else 0
        for v in range(lo, m + 1):
            entries[i] = v
            yield from rec(i + 1, rem - v * v, math.gcd(g, abs(v)), seen or v != 0)
        entries[i] = 0

    yield from rec(0, bound_squared, 0, False)
