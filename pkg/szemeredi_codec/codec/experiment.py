"""Experiment harness: synthetic noise sweeps and repeated runs on real networks."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from .errors import CodecError, InvalidArgumentError
from .graph import Graph
from .measures import l2_dist
from .pipeline import CodecConfig, resolve_workers, run_codec, threshold_search
from .synthgen import SynthParams, generate

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "n",
    "internoise",
    "intranoise",
    "repetition",
    "seed",
    "density",
    "eps",
    "k",
    "sze_index",
    "irregular_count",
    "kvs_ari",
    "kvs_k",
    "l1",
    "l2",
    "l1_sze",
    "l2_sze",
    "threshold",
    "l2_ufsze",
    "t_compress",
    "t_decompress",
    "t_filter",
    "error",
]
CELL_KEYS = ["n", "internoise", "intranoise"]
RUN_KEYS = CELL_KEYS + ["repetition", "seed"]
TIMING_COLUMNS = ["t_compress", "t_decompress", "t_filter"]
SUMMARY_METRICS = [
    "density",
    "eps",
    "k",
    "sze_index",
    "irregular_count",
    "kvs_ari",
    "l1",
    "l2",
    "l1_sze",
    "l2_sze",
    "threshold",
    "l2_ufsze",
]
NETWORK_METRICS = [
    "eps",
    "k",
    "sze_index",
    "irregular_count",
    "l1",
    "l2",
    "l1_sze",
    "l2_sze",
    "t_compress",
    "t_decompress",
    "t_filter",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Grid of synthetic runs.

    Every combination of ``sizes``, ``internoise_levels`` and
    ``intranoise_levels`` is generated and compressed ``repetitions`` times.
    Cell seeds are spawned from ``seed`` in grid order.
    """

    sizes: tuple[int, ...] = (1000,)
    internoise_levels: tuple[float, ...] = (0.2, 0.4, 0.5, 0.6, 0.8)
    intranoise_levels: tuple[float, ...] = (0.0,)
    clusters: int = 10
    balanced: bool = True
    weighted: bool = False
    repetitions: int = 1
    codec: CodecConfig = field(default_factory=CodecConfig)
    output_dir: Optional[Path] = None
    seed: int = 0
    processes: Optional[int] = None

    def __post_init__(self):
        for name in ("sizes", "internoise_levels", "intranoise_levels"):
            values = tuple(getattr(self, name))
            if not values:
                raise InvalidArgumentError(f"{name} must not be empty.")
            object.__setattr__(self, name, values)
        if self.repetitions < 1:
            raise InvalidArgumentError("repetitions must be at least 1.")
        levels = self.internoise_levels + self.intranoise_levels
        if any(not 0.0 <= level <= 1.0 for level in levels):
            raise InvalidArgumentError("noise levels must lie in [0, 1].")
        if any(n < self.clusters for n in self.sizes):
            raise InvalidArgumentError("every size must be at least the cluster count.")
        if self.output_dir is not None:
            object.__setattr__(self, "output_dir", Path(self.output_dir))


class Cell(NamedTuple):
    n: int
    internoise: float
    intranoise: float
    repetition: int
    seed: int
    codec_seed: int
    clusters: int
    balanced: bool
    weighted: bool
    codec: CodecConfig
    keep_snapshots: bool


class ExperimentResult(NamedTuple):
    """Result rows in grid order and the matrices of the first cell."""

    table: pd.DataFrame
    snapshots: dict[str, Graph]


def cells(spec: ExperimentSpec) -> list[Cell]:
    grid = [
        (n, inter, intra, rep)
        for n in spec.sizes
        for inter in spec.internoise_levels
        for intra in spec.intranoise_levels
        for rep in range(spec.repetitions)
    ]
    streams = np.random.SeedSequence(spec.seed).spawn(len(grid))
    out = []
    for index, ((n, inter, intra, rep), stream) in enumerate(zip(grid, streams)):
        synth_seed, codec_seed = (int(s) for s in stream.generate_state(2))
        out.append(
            Cell(
                n=n,
                internoise=inter,
                intranoise=intra,
                repetition=rep,
                seed=synth_seed,
                codec_seed=codec_seed,
                clusters=spec.clusters,
                balanced=spec.balanced,
                weighted=spec.weighted,
                codec=spec.codec,
                keep_snapshots=index == 0,
            )
        )
    return out


def _run_cell(cell: Cell) -> tuple[dict, Optional[dict[str, Graph]]]:
    row = {column: np.nan for column in RESULT_COLUMNS}
    row.update(
        n=cell.n,
        internoise=cell.internoise,
        intranoise=cell.intranoise,
        repetition=cell.repetition,
        seed=cell.seed,
        error="",
    )
    snapshots = None
    try:
        params = SynthParams(
            n=cell.n,
            clusters=cell.clusters,
            internoise=cell.internoise,
            intranoise=cell.intranoise,
            balanced=cell.balanced,
            weighted=cell.weighted,
            seed=cell.seed,
        )
        g, gt, labels = generate(params)
        row["density"] = g.density()
        cfg = replace(cell.codec, seed=cell.codec_seed)
        result = run_codec(g, cfg, reference=gt, labels=labels)
        threshold, ufsze = threshold_search(result.fsze, gt, cfg.threshold_step)
        report = result.report
        row.update(
            eps=report.eps,
            k=report.k_classes,
            sze_index=report.sze_index,
            irregular_count=report.irregular_count,
            kvs_ari=report.kvs_ari,
            kvs_k=report.kvs_k,
            l1=report.l1,
            l2=report.l2,
            l1_sze=report.l1_sze,
            l2_sze=report.l2_sze,
            threshold=threshold,
            l2_ufsze=l2_dist(ufsze, gt),
            t_compress=report.t_compress,
            t_decompress=report.t_decompress,
            t_filter=report.t_filter,
        )
        if cell.keep_snapshots:
            snapshots = {"G": g, "SZE": result.sze, "FSZE": result.fsze, "UFSZE": ufsze}
    except Exception as err:
        log = logger.warning if isinstance(err, CodecError) else logger.exception
        log(
            "cell n=%d internoise=%.2f intranoise=%.2f rep=%d failed: %s",
            cell.n,
            cell.internoise,
            cell.intranoise,
            cell.repetition,
            err,
        )
        row["error"] = f"{type(err).__name__}: {err}"
    return row, snapshots


def run_experiment(spec: ExperimentSpec, progress: bool = True) -> ExperimentResult:
    """
    Run every cell of ``spec`` and collect one row per cell.

    Cells run in a process pool (``spec.processes``, capped by
    ``CODEC_THREADS``) and rows come back in grid order. A failing cell keeps
    its parameters, gets NaN metrics and the error message.
    """
    todo = cells(spec)
    processes = min(resolve_workers(spec.processes), len(todo))
    if processes > 1:
        todo = [cell._replace(codec=replace(cell.codec, workers=1)) for cell in todo]
    bar = tqdm(total=len(todo), desc="experiment", unit="run", disable=not progress)
    outputs = []
    if processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            for output in pool.map(_run_cell, todo):
                outputs.append(output)
                bar.update()
    else:
        for cell in todo:
            outputs.append(_run_cell(cell))
            bar.update()
    bar.close()

    table = pd.DataFrame([row for row, _ in outputs], columns=RESULT_COLUMNS)
    snapshots = next((snap for _, snap in outputs if snap is not None), {})
    failed = int((table["error"] != "").sum())
    if failed:
        logger.warning("%d of %d runs failed", failed, len(table))
    return ExperimentResult(table, snapshots)


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """
    Mean and standard deviation of every metric per (n, internoise, intranoise).

    Failed runs are left out; ``runs`` counts the successful ones. The
    deviation of a single run is 0.
    """
    ok = results[results["error"].fillna("") == ""]
    grouped = ok.groupby(CELL_KEYS, sort=False)[SUMMARY_METRICS]
    mean = grouped.mean().add_suffix("_mean")
    sd = grouped.std(ddof=1).fillna(0.0).add_suffix("_sd")
    summary = pd.concat([mean, sd], axis=1)
    ordered = [f"{m}_{stat}" for m in SUMMARY_METRICS for stat in ("mean", "sd")]
    summary = summary[ordered]
    summary.insert(0, "runs", ok.groupby(CELL_KEYS, sort=False).size())
    return summary.reset_index()


def run_network(
    g: Graph,
    codec: Optional[CodecConfig] = None,
    repetitions: int = 1,
    seed: Optional[int] = None,
    progress: bool = False,
) -> pd.DataFrame:
    """Compress a real network ``repetitions`` times, comparing reconstructions with ``g``."""
    if repetitions < 1:
        raise InvalidArgumentError("repetitions must be at least 1.")
    codec = codec or CodecConfig()
    rows = []
    streams = np.random.SeedSequence(seed).spawn(repetitions)
    for repetition, stream in enumerate(tqdm(streams, disable=not progress, unit="run")):
        run_seed = int(stream.generate_state(1)[0])
        row = run_codec(g, replace(codec, seed=run_seed)).report.as_row()
        row["k"] = row.pop("k_classes")
        rows.append(
            {"repetition": repetition, "seed": run_seed, **{m: row[m] for m in NETWORK_METRICS}}
        )
    return pd.DataFrame(rows)


def describe_runs(table: pd.DataFrame) -> pd.DataFrame:
    """Min, average, standard deviation and max of every network metric."""
    stats = table[NETWORK_METRICS].agg(["min", "mean", "std", "max"])
    stats = stats.rename(index={"mean": "avg", "std": "sd"})
    stats.loc["sd"] = stats.loc["sd"].fillna(0.0)
    return stats


__all__ = [
    "RESULT_COLUMNS",
    "TIMING_COLUMNS",
    "ExperimentSpec",
    "ExperimentResult",
    "cells",
    "run_experiment",
    "summarize",
    "run_network",
    "describe_runs",
]
