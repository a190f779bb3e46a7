"""Tests for result files and figures."""

import numpy as np
import pandas as pd
import pytest

from szemeredi_codec.codec.errors import InvalidArgumentError
from szemeredi_codec.codec.experiment import RESULT_COLUMNS, TIMING_COLUMNS, ExperimentResult
from szemeredi_codec.codec.graph import Graph
from szemeredi_codec.codec.report import emit_report


def results_table(internoise=(0.2, 0.5, 0.8), intranoise=(0.0,), repetitions=2):
    rng = np.random.default_rng(0)
    rows = []
    for inter in internoise:
        for intra in intranoise:
            for repetition in range(repetitions):
                row = {column: float(rng.random()) for column in RESULT_COLUMNS}
                row.update(
                    n=100,
                    internoise=inter,
                    intranoise=intra,
                    repetition=repetition,
                    density=0.1 + inter / 2 + rng.random() / 20,
                    threshold=0.3 + inter / 3,
                    error="",
                )
                rows.append(row)
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def test_noise_grid(tmp_path):
    written = emit_report(results_table(), tmp_path / "out")
    names = {p.name for p in written}
    assert names == {
        "results.csv",
        "timings.csv",
        "summary.csv",
        "threshold_density.png",
        "noise.png",
    }
    assert all(p.exists() and p.stat().st_size > 0 for p in written)
    table = pd.read_csv(tmp_path / "out" / "results.csv", keep_default_na=False)
    assert [c for c in RESULT_COLUMNS if c not in TIMING_COLUMNS] == list(table.columns)
    assert len(table) == 6
    timings = pd.read_csv(tmp_path / "out" / "timings.csv")
    keys = ["n", "internoise", "intranoise", "repetition", "seed"]
    assert list(timings.columns) == keys + TIMING_COLUMNS


def test_heatmap_with_both_noises(tmp_path):
    table = results_table(internoise=(0.2, 0.8), intranoise=(0.0, 0.2), repetitions=1)
    names = {p.name for p in emit_report(table, tmp_path)}
    assert "ari_heatmap.png" in names


def test_snapshots(tmp_path):
    snapshots = {"G": Graph.empty(4), "FSZE": Graph(np.full((4, 4), 0.5) - 0.5 * np.eye(4))}
    result = ExperimentResult(results_table(repetitions=1).iloc[:1], snapshots)
    written = emit_report(result, tmp_path)
    assert [p.name for p in written] == ["results.csv", "timings.csv", "G.pgm", "FSZE.pgm"]
    assert (tmp_path / "G.pgm").read_bytes().startswith(b"P5\n4 4\n255\n")


def test_single_row_table(tmp_path):
    row = pd.DataFrame([{"l1": 0.1, "l2": 0.2, "eps": 0.3}])
    assert [p.name for p in emit_report(row, tmp_path)] == ["results.csv"]


def test_failed_rows_left_out_of_figures(tmp_path):
    table = results_table(internoise=(0.2, 0.5), repetitions=1)
    table.loc[1, "error"] = "NoPartitionFoundError: x"
    names = {p.name for p in emit_report(table, tmp_path)}
    assert "noise.png" not in names


def test_empty_table(tmp_path):
    with pytest.raises(InvalidArgumentError):
        emit_report(pd.DataFrame(columns=RESULT_COLUMNS), tmp_path)
