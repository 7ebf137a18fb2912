"""Render figures from a benchmark records CSV.

The CSV written by the bench sweeps stays the machine contract; this module
is the human-facing report path.  It groups records by experiment and draws,
per experiment, a timing panel, a normalized-rank panel and a relative-error
panel against the best available exact baseline, writing image files next to
(or wherever requested relative to) the delimited output.
"""

from __future__ import annotations

import csv
import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["render_report"]

_BASELINE_PREFERENCE = ("sprank", "fieldrank", "numrank")
_METHOD_STYLE = {
    "fer": dict(color="tab:red", marker="o"),
    "sprank": dict(color="tab:blue", marker="s"),
    "fieldrank": dict(color="tab:green", marker="^"),
    "numrank": dict(color="tab:purple", marker="d"),
}


def _read_records(csv_path):
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{csv_path}: no benchmark records")
    records = []
    for raw in rows:
        records.append(
            dict(
                experiment=raw["experiment"],
                method=raw["method"],
                dist=raw["dist"],
                n=int(raw["n"]),
                k_avg=float(raw["k_avg"]),
                seed=int(raw["seed"]),
                rank=int(raw["rank"]),
                r_m=float(raw["r_m"]),
                t_seconds=float(raw["t_seconds"]),
            )
        )
    return records


def _x_axis(experiment):
    # sweep-n varies n; the k sweeps and the correlated stress vary k_avg
    return "n" if experiment == "sweep-n" else "k_avg"


def _series(records, value_key, x_key):
    """method -> (sorted xs, mean value per x)."""
    acc: dict[str, dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        acc[r["method"]][r[x_key]].append(r[value_key])
    out = {}
    for method, by_x in acc.items():
        xs = sorted(by_x)
        out[method] = (xs, [sum(by_x[x]) / len(by_x[x]) for x in xs])
    return out


def _delta_series(records, x_key, baseline):
    """method -> mean |r - r_base| / r_base per x, instance-matched."""
    by_instance: dict[tuple, dict[str, int]] = defaultdict(dict)
    for r in records:
        by_instance[(r[x_key], r["seed"])][r["method"]] = r["rank"]
    acc: dict[str, dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    for (x, _seed), ranks in by_instance.items():
        base = ranks.get(baseline)
        if not base:
            continue
        for method, rank in ranks.items():
            if method != baseline:
                acc[method][x].append(abs(rank - base) / base)
    out = {}
    for method, by_x in acc.items():
        xs = sorted(by_x)
        out[method] = (xs, [sum(by_x[x]) / len(by_x[x]) for x in xs])
    return out


def _save(fig, out_dir, name, formats):
    paths = []
    for ext in formats:
        path = os.path.join(out_dir, f"{name}.{ext}")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        paths.append(path)
    plt.close(fig)
    return paths


def _plot_series(series, xlabel, ylabel, title, logx=False, logy=False):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for method in sorted(series):
        xs, ys = series[method]
        ax.plot(xs, ys, label=method, **_METHOD_STYLE.get(method, {}))
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def render_report(csv_path, out_dir, formats=("png",)) -> list[str]:
    """Draw timing, rank and error figures for every experiment in the CSV.

    Returns the list of files written.  Error panels need at least one exact
    method among the records and are skipped otherwise.
    """
    records = _read_records(csv_path)
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    by_experiment: dict[str, list] = defaultdict(list)
    for r in records:
        by_experiment[r["experiment"]].append(r)

    for experiment, recs in sorted(by_experiment.items()):
        x_key = _x_axis(experiment)
        xlabel = "matrix size n" if x_key == "n" else "mean row degree"
        many_x = len({r[x_key] for r in recs}) > 1

        timing = _series(recs, "t_seconds", x_key)
        positive = all(y > 0 for _, ys in timing.values() for y in ys)
        fig = _plot_series(
            timing, xlabel, "T_cost (s)", f"{experiment}: time cost",
            logx=x_key == "n" and many_x, logy=positive,
        )
        written += _save(fig, out_dir, f"{experiment}_timing", formats)

        ranks = _series(recs, "r_m", x_key)
        fig = _plot_series(
            ranks, xlabel, "normalized rank", f"{experiment}: normalized rank",
            logx=x_key == "n" and many_x,
        )
        written += _save(fig, out_dir, f"{experiment}_rank", formats)

        methods = {r["method"] for r in recs}
        baseline = next((b for b in _BASELINE_PREFERENCE if b in methods), None)
        if baseline is not None and methods - {baseline}:
            deltas = _delta_series(recs, x_key, baseline)
            deltas = {m: s for m, s in deltas.items() if s[0]}
            if deltas:
                logy = all(
                    y > 0 and math.isfinite(y) for _, ys in deltas.values() for y in ys
                )
                fig = _plot_series(
                    deltas, xlabel, f"relative error vs {baseline}",
                    f"{experiment}: relative error",
                    logx=x_key == "n" and many_x, logy=logy,
                )
                written += _save(fig, out_dir, f"{experiment}_error", formats)

    return written
