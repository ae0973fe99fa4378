"""Statistical verification layer: exponent fits, ratio diagnostics, reports.

The dominant exponent a is always fixed to the geometric prediction; only
the power of log B is fitted.  Over desk-scale height ranges, log log B
spans a few tenths, so a joint fit of both exponents is hopelessly
ill-conditioned, while a itself is the proven baseline.  Least squares is
unweighted: counts in range are large enough that counting noise is
negligible against the slowly varying model error.
"""

from __future__ import annotations

import json
import math
import os
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from .brauer import BrauerClass, load_brauer_class
from .enumeration import CountingJob, CountSeries, write_counts_csv
from .geometry import manin_invariants, pgl_boundary

__all__ = [
    "FitResult",
    "RatioDiagnostic",
    "ExperimentConfig",
    "fit_log_exponent",
    "ratio_diagnostic",
    "run_experiment",
]

REPORT_SCHEMA = "detnorm.report/1"
CONFIG_SCHEMA = "detnorm.config/1"
WORKERS_ENV = "DETNORM_WORKERS"


@dataclass(frozen=True)
class FitResult:
    """OLS estimate of the log-exponent with the height exponent pinned."""

    a: Fraction
    t_hat: float
    stderr: float
    rss: float
    n_points: int
    b_range: tuple

    def as_dict(self) -> dict:
        return {
            "a": str(self.a),
            "t_hat": self.t_hat,
            "stderr": self.stderr,
            "rss": self.rss,
            "n_points": self.n_points,
            "b_range": list(self.b_range),
        }


def _series_columns(series, column: str):
    if isinstance(series, CountSeries):
        ns = series.counts if column == "counts" else series.baseline
        return series.b_values, ns
    bs, ns = series
    return tuple(bs), tuple(ns)


def fit_log_exponent(series, a, *, column: str = "counts") -> FitResult:
    """Slope of log(N / B^a) against log log B.

    Accepts a CountSeries or a (b_values, counts) pair; zero counts are
    dropped with a warning; at least four surviving points are required.
    The model N ~ c B^a (log B)^t makes the slope an estimate of t.
    """
    bs, ns = _series_columns(series, column)
    a = Fraction(a)
    xs, ys, kept = [], [], []
    for B, N in zip(bs, ns):
        if N <= 0:
            warnings.warn(f"dropping B={B}: count is zero")
            continue
        xs.append(math.log(math.log(float(B))))
        ys.append(math.log(float(N)) - float(a) * math.log(float(B)))
        kept.append(B)
    k = len(xs)
    if k < 4:
        raise ValueError(f"need at least 4 positive data points, have {k}")
    x = np.array(xs)
    y = np.array(ys)
    xbar, ybar = x.mean(), y.mean()
    sxx = float(((x - xbar) ** 2).sum())
    slope = float(((x - xbar) * (y - ybar)).sum() / sxx)
    resid = y - (ybar + slope * (x - xbar))
    rss = float((resid**2).sum())
    stderr = math.sqrt(rss / (k - 2) / sxx) if k > 2 else 0.0
    return FitResult(a=a, t_hat=slope, stderr=stderr, rss=rss,
                     n_points=k, b_range=(kept[0], kept[-1]))


@dataclass(frozen=True)
class RatioDiagnostic:
    """Ratios N / (B^a (log B)^t); stable ratios mean the model fits and
    their level estimates the (theoretically untargeted) constant."""

    rows: tuple[tuple[object, float], ...]
    top_half_spread: float
    top_half_mean: float

    def as_dict(self) -> dict:
        return {
            "rows": [[b, r] for b, r in self.rows],
            "top_half_spread": self.top_half_spread,
            "top_half_mean": self.top_half_mean,
        }


def ratio_diagnostic(series, a, t_predicted, *, column: str = "counts") -> RatioDiagnostic:
    """Ratio table at the predicted exponents; spread = (max-min)/mean over
    the top half of the height range."""
    bs, ns = _series_columns(series, column)
    a = float(Fraction(a))
    t = float(t_predicted)
    rows = []
    for B, N in zip(bs, ns):
        if N <= 0:
            continue
        rows.append((B, float(N) / (float(B) ** a * math.log(float(B)) ** t)))
    if not rows:
        raise ValueError("no positive counts to diagnose")
    top = [r for _, r in rows[len(rows) // 2 :]]
    mean = sum(top) / len(top)
    spread = (max(top) - min(top)) / mean if mean else float("inf")
    return RatioDiagnostic(rows=tuple(rows), top_half_spread=spread, top_half_mean=mean)


# ---------------------------------------------------------------------------
# experiment orchestration

@dataclass
class ExperimentConfig:
    """Declarative description of one counting experiment."""

    n: int
    b_list: list
    brauer_class: BrauerClass | None = None
    workers: int = 1
    checkpoint_path: str | None = None
    output_csv: str | None = None
    report_path: str | None = None
    rows_per_unit: int = 512
    backend: str = "auto"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(Fraction(self.b_list[i]) >= Fraction(self.b_list[i + 1]) for i in range(len(self.b_list) - 1)):
            raise ValueError("b_list must be strictly increasing")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("schema") not in (None, CONFIG_SCHEMA):
            raise ValueError(f"unsupported config schema {data.get('schema')!r}")
        bclass = None
        if data.get("brauer_class"):
            spec = dict(data["brauer_class"])
            if "character_file" in spec and not os.path.isabs(spec["character_file"]):
                spec["character_file"] = os.path.join(os.path.dirname(os.fspath(path)),
                                                      spec["character_file"])
            bclass = load_brauer_class(spec)
        return cls(
            n=int(data["n"]),
            b_list=list(data["b_list"]),
            brauer_class=bclass,
            workers=int(data.get("workers", 1)),
            checkpoint_path=data.get("checkpoint_path"),
            output_csv=data.get("output_csv"),
            report_path=data.get("report_path"),
            rows_per_unit=int(data.get("rows_per_unit", 512)),
            backend=data.get("backend", "auto"),
        )

    def effective_workers(self) -> int:
        env = os.environ.get(WORKERS_ENV)
        return int(env) if env else self.workers


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Predicted exponents -> enumeration (resumable) -> fit -> report.

    Writes the counts CSV (byte-deterministic across reruns) and a JSON
    report; returns the report dict.
    """
    from .arithmetic import trivial_character

    bclass = cfg.brauer_class
    geom_class = bclass if bclass is not None else BrauerClass(cfg.n, trivial_character())
    inv = manin_invariants(pgl_boundary(cfg.n, geom_class))
    predicted_t = inv.log_exponent

    job = CountingJob(
        cfg.n,
        cfg.b_list,
        bclass,
        rows_per_unit=cfg.rows_per_unit,
        checkpoint_path=cfg.checkpoint_path,
        backend=cfg.backend,
    )
    t0 = time.perf_counter()
    series = job.run(workers=cfg.effective_workers())
    elapsed = time.perf_counter() - t0
    assert series is not None

    def _try_fit(column):
        try:
            return fit_log_exponent(series, inv.a, column=column).as_dict()
        except ValueError as exc:  # short series: counts still valid, no fit
            return {"error": str(exc)}

    fit = _try_fit("counts")
    base_fit = _try_fit("baseline")
    ratios = ratio_diagnostic(series, inv.a, predicted_t)
    base_ratios = ratio_diagnostic(series, inv.a, 0.0, column="baseline")

    report = {
        "schema": REPORT_SCHEMA,
        "config_fingerprint": job.fingerprint,
        "n": cfg.n,
        "b_list": list(cfg.b_list),
        "predicate": bclass.fingerprint() if bclass else "baseline",
        "workers": cfg.effective_workers(),
        "predicted": {
            "a": str(inv.a),
            "log_exponent": str(predicted_t),
            "face": list(inv.face),
            "b": inv.b,
            "m": str(inv.m),
            "delta": str(inv.delta),
        },
        "fit": fit,
        "baseline_fit": base_fit,
        "ratio": ratios.as_dict(),
        "baseline_ratio": base_ratios.as_dict(),
        "empirical_constant": {
            "value": ratios.top_half_mean,
            "note": "mean of top-half ratio column; empirical, no theoretical target",
        },
        "tolerances_note": (
            "the counting law carries no error term, so fit/ratio acceptance "
            "windows are engineering judgments, not theory-backed bounds"
        ),
        "counts": {
            "B": list(series.b_values),
            "N": list(series.counts),
            "N_baseline": list(series.baseline),
        },
        "timing": {
            "seconds": elapsed,
            "points_per_second": series.baseline[-1] / elapsed if elapsed > 0 else None,
        },
    }
    if cfg.output_csv:
        write_counts_csv(cfg.output_csv, series)
    if cfg.report_path:
        with open(cfg.report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report
