"""Backend benchmark: compiled kernel vs numpy fallback on the same job."""

from __future__ import annotations

import time

from .brauer import BrauerClass
from .enumeration import count_series
from .kernels import DEFAULT_BACKEND, get_backend


def run_benchmark(n: int = 2, B: int = 80, brauer_class: BrauerClass | None = None,
                  workers: int = 1) -> dict:
    """Time both backends on one series; verifies their counts agree."""
    results = {}
    for name in ("compiled", "python"):
        try:
            get_backend(name)
        except ValueError:
            results[name] = None
            continue
        t0 = time.perf_counter()
        series = count_series(n, [B], brauer_class, workers=workers, backend=name)
        dt = time.perf_counter() - t0
        results[name] = {
            "seconds": dt,
            "count": series.counts[0],
            "baseline": series.baseline[0],
            "points_per_second": series.baseline[0] / dt if dt > 0 else None,
        }
    out = {"n": n, "B": B, "workers": workers, "default_backend": DEFAULT_BACKEND,
           "backends": results}
    both = [r for r in results.values() if r]
    if len(both) == 2:
        a, b = both
        out["counts_agree"] = a["count"] == b["count"] and a["baseline"] == b["baseline"]
        out["speedup"] = b["seconds"] / a["seconds"] if a["seconds"] else None
    return out
