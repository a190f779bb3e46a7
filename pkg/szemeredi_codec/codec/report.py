"""Result files: CSV tables, matrix snapshots and summary figures."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Mapping, Optional

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns
import seaborn.objects as so

from .errors import InvalidArgumentError
from .experiment import RUN_KEYS, TIMING_COLUMNS, ExperimentResult, summarize
from .fileio import write_pgm
from .graph import Graph
from .trend import ThresholdTrend

logger = logging.getLogger(__name__)

SNAPSHOT_ORDER = ("G", "SZE", "FSZE", "UFSZE")


def _successful(table: pd.DataFrame) -> pd.DataFrame:
    if "error" not in table:
        return table
    return table[table["error"].fillna("") == ""]


def plot_threshold_density(table: pd.DataFrame, seed: Optional[int] = 0) -> so.Plot:
    """Optimal threshold of every run against its density, with a LOWESS trend and band."""
    frac = max(0.6, min(1.0, 2 / table["density"].nunique()))
    trend = ThresholdTrend(frac=frac, num_bootstrap=100, seed=seed)
    return (
        so.Plot(table, x="density", y="threshold")
        .add(so.Dot(alpha=0.5))
        .add(so.Line(), trend)
        .add(so.Band(), trend)
        .label(title="Optimal unweighting threshold", x="Graph density", y="t*")
    )


def plot_noise(table: pd.DataFrame) -> so.Plot:
    """Mean and spread of l2(FSZE, GT) and KVS-ARI across internoise levels."""
    metrics = [m for m in ("l2", "kvs_ari") if table[m].notna().any()]
    long = table.melt(
        id_vars=["internoise"], value_vars=metrics, var_name="metric", value_name="value"
    )
    return (
        so.Plot(long, x="internoise", y="value")
        .facet(col="metric")
        .share(y=False)
        .add(so.Line(marker="o"), so.Agg())
        .add(so.Range(), so.Est(errorbar="sd"))
        .label(x="Internoise", y="")
    )


def plot_ari_heatmap(table: pd.DataFrame) -> plt.Figure:
    """Mean KVS-ARI over the internoise x intranoise grid."""
    grid = table.pivot_table(
        index="intranoise", columns="internoise", values="kvs_ari", aggfunc="mean"
    ).sort_index(ascending=False)
    fig, ax = plt.subplots(figsize=(6, 5))
    sns.heatmap(grid, annot=True, fmt=".2f", vmin=0.0, vmax=1.0, cmap="viridis", ax=ax)
    ax.set(title="KVS-ARI", xlabel="Internoise", ylabel="Intranoise")
    return fig


def emit_report(
    results: pd.DataFrame | ExperimentResult,
    path: str | Path,
    snapshots: Optional[Mapping[str, Graph]] = None,
) -> list[Path]:
    """
    Write the result files of a run or an experiment into the directory ``path``.

    Always writes ``results.csv``. Wall-clock columns go to ``timings.csv``
    instead, so reruns with one seed give identical bytes. Writes
    ``summary.csv`` (mean/sd per noise cell) for more than one row, one PGM
    per snapshot matrix (G, SZE, FSZE, UFSZE), and the figures the data
    supports: ``threshold_density.png`` (three or more distinct densities),
    ``noise.png`` (two or more internoise levels) and ``ari_heatmap.png``
    (two or more levels of both noises).
    """
    if isinstance(results, ExperimentResult):
        table, snapshots = results.table, snapshots or results.snapshots
    else:
        table = results
    if table.empty:
        raise InvalidArgumentError("there are no results to report.")

    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    timing = [c for c in TIMING_COLUMNS if c in table]
    table.drop(columns=timing).to_csv(out / "results.csv", index=False)
    written.append(out / "results.csv")
    if timing:
        keys = [c for c in RUN_KEYS if c in table]
        table[keys + timing].to_csv(out / "timings.csv", index=False)
        written.append(out / "timings.csv")
    if len(table) > 1 and {"n", "internoise", "intranoise"} <= set(table.columns):
        summarize(table).to_csv(out / "summary.csv", index=False)
        written.append(out / "summary.csv")

    for name in SNAPSHOT_ORDER:
        if snapshots and name in snapshots:
            written.append(write_pgm(snapshots[name], out / f"{name}.pgm"))

    ok = _successful(table)
    if {"density", "threshold"} <= set(ok.columns):
        usable = ok.dropna(subset=["density", "threshold"])
        if usable["density"].nunique() >= 3:
            target = out / "threshold_density.png"
            plot_threshold_density(usable).save(target, bbox_inches="tight")
            written.append(target)
    if "internoise" in ok and ok["internoise"].nunique() >= 2:
        target = out / "noise.png"
        plot_noise(ok).save(target, bbox_inches="tight")
        written.append(target)
        if (
            "kvs_ari" in ok
            and ok["kvs_ari"].notna().any()
            and ok["intranoise"].nunique() >= 2
        ):
            target = out / "ari_heatmap.png"
            fig = plot_ari_heatmap(ok)
            fig.savefig(target, bbox_inches="tight")
            plt.close(fig)
            written.append(target)

    for item in written:
        logger.info("wrote %s", item)
    return written


__all__ = [
    "emit_report",
    "plot_threshold_density",
    "plot_noise",
    "plot_ari_heatmap",
]
