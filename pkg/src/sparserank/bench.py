"""Benchmark harness: timed rank computations over generated ensembles.

Three experiments are provided.  ``sweep-n`` varies the matrix size at fixed
mean row degree, ``sweep-k`` varies the mean row degree at fixed size, and
``corr`` is the correlated-weights stress test where every nonzero is 1 and
the structural-vs-algebraic gap becomes visible.

Each (setting, rep) pair generates one instance; every requested method then
runs on that same pre-built instance and is timed with a monotonic clock,
with a single warm-up run excluded, so generation cost never leaks into
T_cost.  Records append to a schema-stable CSV (column order below); rank
columns are reproducible for a fixed base seed, timing columns of course
are not.  Rows that fail (bad setting, oracle error) are recorded as error
strings and the sweep continues.

Instances within a sweep are independent and could be generated
concurrently, but timed runs are kept sequential to avoid contention skew;
CSV appends assume a single writer.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .algrank import field_rank, numerical_rank
from .cavity import DEFAULT_CONFIG, DEFAULT_VARIANT, estimate_rank
from .core import WeightedSparseMatrix
from .errors import SparseRankError
from .gen import GenSpec, gen_matrix
from .io import append_bench_record
from .matching import sprank

__all__ = [
    "BENCH_COLUMNS",
    "METHODS",
    "BenchRecord",
    "ComparisonRow",
    "SweepResult",
    "metrics",
    "run_sweep_n",
    "run_sweep_k",
    "run_correlated",
    "mean_delta_by_setting",
]

logger = logging.getLogger(__name__)

BENCH_COLUMNS = (
    "experiment",
    "method",
    "dist",
    "n",
    "k_avg",
    "gamma",
    "weight_mode",
    "seed",
    "rank",
    "r_m",
    "t_seconds",
    "converged",
)

METHODS = ("fer", "sprank", "fieldrank", "numrank")


@dataclass(frozen=True)
class BenchRecord:
    """One timed rank computation; maps 1:1 onto a CSV line."""

    experiment: str
    method: str
    dist: str
    n: int
    k_avg: float
    gamma: float | None
    weight_mode: str
    seed: int
    rank: int
    r_m: float
    t_seconds: float
    converged: bool | None

    def __post_init__(self):
        if not (math.isfinite(self.t_seconds) and self.t_seconds >= 0):
            raise ValueError(f"t_seconds must be finite and non-negative, got {self.t_seconds!r}")
        if abs(self.r_m - self.rank / self.n) > 1e-12:
            raise ValueError("r_m must equal rank / n")

    def to_csv_row(self) -> list:
        return [
            self.experiment,
            self.method,
            self.dist,
            self.n,
            self.k_avg,
            "" if self.gamma is None else self.gamma,
            self.weight_mode,
            self.seed,
            self.rank,
            self.r_m,
            self.t_seconds,
            "" if self.converged is None else str(self.converged).lower(),
        ]


@dataclass(frozen=True)
class ComparisonRow:
    """Per-instance normalized ranks and relative errors against a baseline.

    ``delta_r_m[m]`` is |r_m[m] - r_m[baseline]| / r_m[baseline], or None
    when the baseline rank is 0.  ``gap`` is (sprank - fieldrank)/n for the
    correlated experiment, None elsewhere.
    """

    experiment: str
    dist: str
    n: int
    k_avg: float
    seed: int
    baseline: str
    r_m: dict[str, float]
    delta_r_m: dict[str, float | None]
    gap: float | None = None


@dataclass
class SweepResult:
    rows: list[ComparisonRow] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


def metrics(r_est: int, r_base: int, n: int) -> tuple[float, float, float | None]:
    """Normalized ranks and relative error of an estimate against a baseline.

    Returns (r_m_est, r_m_base, delta_r_m) with delta None when the baseline
    rank is 0 (the ratio is undefined there, not infinite).

    Examples
    --------
    >>> metrics(2994, 3000, 3000)
    (0.998, 1.0, 0.002)
    """
    if n <= 0:
        raise ValueError("n must be positive")
    r_m_est = r_est / n
    r_m_base = r_base / n
    delta = None if r_base == 0 else abs(r_est - r_base) / r_base
    return r_m_est, r_m_base, delta


def _instance_seed(base_seed: int, setting_index: int, rep: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), int(setting_index), int(rep)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_method(method: str, matrix: WeightedSparseMatrix, cfg, variant):
    if method == "fer":
        est = estimate_rank(matrix.pattern, cfg, variant)
        return est.rank_est, est.fixed_point.converged
    if method == "sprank":
        return sprank(matrix.pattern), None
    if method == "fieldrank":
        return field_rank(matrix).rank, None
    if method == "numrank":
        return numerical_rank(matrix), None
    raise ValueError(f"unknown method {method!r}")


def _timed(method, matrix, cfg, variant):
    _run_method(method, matrix, cfg, variant)  # warm-up, excluded
    t0 = time.perf_counter()
    result = _run_method(method, matrix, cfg, variant)
    return result, time.perf_counter() - t0


def _check_methods(methods):
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    if "fer" not in methods:
        raise ValueError("methods must include 'fer'")
    if not ({"sprank", "numrank"} & set(methods)):
        raise ValueError("methods must include a baseline ('sprank' or 'numrank')")


def _sweep(
    experiment,
    settings,
    dist,
    weight_mode,
    reps,
    methods,
    out_path,
    base_seed,
    gamma,
    cfg,
    variant,
    baseline,
) -> SweepResult:
    result = SweepResult()
    gamma_out = gamma if dist == "powerlaw" else None
    for idx, (n, k_avg) in enumerate(settings):
        for rep in range(reps):
            seed = _instance_seed(base_seed, idx, rep)
            label = f"{experiment} n={n} k_avg={k_avg} rep={rep}"
            try:
                spec = GenSpec(
                    n=n, k_avg=k_avg, dist=dist, gamma=gamma,
                    weight_mode=weight_mode, seed=seed,
                )
                matrix = gen_matrix(spec)
            except (SparseRankError, ValueError) as exc:
                result.errors.append(f"{label}: {exc}")
                logger.warning("skipping %s: %s", label, exc)
                continue
            ranks: dict[str, int] = {}
            r_ms: dict[str, float] = {}
            failed = False
            for method in methods:
                try:
                    (rank, converged), seconds = _timed(method, matrix, cfg, variant)
                except (SparseRankError, ValueError, np.linalg.LinAlgError) as exc:
                    result.errors.append(f"{label} [{method}]: {exc}")
                    logger.warning("method %s failed on %s: %s", method, label, exc)
                    failed = True
                    continue
                ranks[method] = rank
                r_ms[method] = rank / n
                rec = BenchRecord(
                    experiment=experiment,
                    method=method,
                    dist=dist,
                    n=n,
                    k_avg=k_avg,
                    gamma=gamma_out,
                    weight_mode=weight_mode,
                    seed=seed,
                    rank=rank,
                    r_m=rank / n,
                    t_seconds=seconds,
                    converged=converged,
                )
                if out_path is not None:
                    append_bench_record(rec, out_path)
            if failed or baseline not in ranks:
                continue
            deltas = {
                m: metrics(ranks[m], ranks[baseline], n)[2]
                for m in methods
                if m != baseline
            }
            gap = None
            if experiment == "correlated" and "sprank" in ranks and "fieldrank" in ranks:
                gap = (ranks["sprank"] - ranks["fieldrank"]) / n
            result.rows.append(
                ComparisonRow(
                    experiment=experiment,
                    dist=dist,
                    n=n,
                    k_avg=k_avg,
                    seed=seed,
                    baseline=baseline,
                    r_m=r_ms,
                    delta_r_m=deltas,
                    gap=gap,
                )
            )
    if out_path is not None and result.rows:
        _write_summary(out_path, result.rows, methods)
    return result


def _summary_path(out_path: str) -> str:
    stem = str(out_path)
    if stem.endswith(".csv"):
        stem = stem[: -len(".csv")]
    return stem + ".summary.csv"


def _write_summary(out_path, rows, methods):
    import csv as _csv

    path = _summary_path(out_path)
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        header = ["experiment", "dist", "n", "k_avg", "seed", "baseline"]
        header += [f"r_m_{m}" for m in methods]
        header += [f"delta_{m}" for m in methods if m != rows[0].baseline]
        header += ["gap"]
        writer.writerow(header)
        for row in rows:
            line = [row.experiment, row.dist, row.n, row.k_avg, row.seed, row.baseline]
            line += [row.r_m.get(m, "") for m in methods]
            for m in methods:
                if m == row.baseline:
                    continue
                d = row.delta_r_m.get(m)
                line.append("" if d is None else d)
            line.append("" if row.gap is None else row.gap)
            writer.writerow(line)


def run_sweep_n(
    n_values,
    k_avg,
    dist="uniform",
    weight_mode="random-iid",
    reps=10,
    methods=("fer", "sprank"),
    out_path=None,
    base_seed=0,
    gamma=3.0,
    cfg=DEFAULT_CONFIG,
    variant=DEFAULT_VARIANT,
) -> SweepResult:
    """Vary the matrix size at fixed mean row degree.

    The baseline for relative errors is sprank when requested, else numrank:
    sprank is exact and fast, and with independent random weights it agrees
    with the algebraic rank, so it stands in for the much slower dense
    factorization at large n.
    """
    _check_methods(methods)
    baseline = "sprank" if "sprank" in methods else "numrank"
    settings = [(int(n), float(k_avg)) for n in n_values]
    return _sweep(
        "sweep-n", settings, dist, weight_mode, reps, tuple(methods),
        out_path, base_seed, gamma, cfg, variant, baseline,
    )


def run_sweep_k(
    n,
    k_values,
    dist="uniform",
    weight_mode="random-iid",
    reps=10,
    methods=("fer", "sprank"),
    out_path=None,
    base_seed=0,
    gamma=3.0,
    cfg=DEFAULT_CONFIG,
    variant=DEFAULT_VARIANT,
) -> SweepResult:
    """Vary the mean row degree at fixed matrix size."""
    _check_methods(methods)
    baseline = "sprank" if "sprank" in methods else "numrank"
    settings = [(int(n), float(k)) for k in k_values]
    return _sweep(
        "sweep-k", settings, dist, weight_mode, reps, tuple(methods),
        out_path, base_seed, gamma, cfg, variant, baseline,
    )


def run_correlated(
    n,
    k_values,
    dist="uniform",
    reps=10,
    out_path=None,
    base_seed=0,
    gamma=3.0,
    cfg=DEFAULT_CONFIG,
    variant=DEFAULT_VARIANT,
    weight_mode="all-ones",
) -> SweepResult:
    """Correlated-weights stress test: every nonzero forced to 1.

    Methods are fixed to fer, sprank and fieldrank; relative errors are
    measured against fieldrank (the algebraic truth for these matrices) and
    each row carries the structural-vs-algebraic gap (sprank - fieldrank)/n,
    the quantity that correlation inflates.  Passing random-iid weights
    instead is allowed for the control experiment where the gap collapses
    to zero.
    """
    methods = ("fer", "sprank", "fieldrank")
    settings = [(int(n), float(k)) for k in k_values]
    return _sweep(
        "correlated", settings, dist, weight_mode, reps, methods,
        out_path, base_seed, gamma, cfg, variant, "fieldrank",
    )


def mean_delta_by_setting(rows, method="fer"):
    """Mean delta_r_m of one method per (n, k_avg) setting, rep-averaged.

    Rows whose baseline rank was 0 (delta None) are skipped.
    """
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        d = row.delta_r_m.get(method)
        if d is None:
            continue
        groups.setdefault((row.n, row.k_avg), []).append(d)
    return {key: sum(v) / len(v) for key, v in sorted(groups.items())}
