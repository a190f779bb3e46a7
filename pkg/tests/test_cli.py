"""Tests for the szemeredi-codec command line."""

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from szemeredi_codec.cli import cli
from szemeredi_codec.codec.fileio import load_compressed

GLOBAL = ["--seed", "1", "--eps-grid", "0.4,0.5"]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def planted(runner, tmp_path):
    out = tmp_path / "planted"
    result = runner.invoke(
        cli, GLOBAL + ["generate", str(out), "-n", "96", "-c", "4", "--internoise", "0.1"]
    )
    assert result.exit_code == 0, result.output
    return out


def test_generate(planted):
    assert np.load(planted / "graph.npy").shape == (96, 96)
    assert np.load(planted / "gt.npy").shape == (96, 96)
    labels = pd.read_csv(planted / "labels.csv")
    assert list(labels.columns) == ["vertex", "label"]
    assert sorted(labels["label"].unique()) == [1, 2, 3, 4]


def test_generate_output(runner, tmp_path):
    args = ["--seed", "0", "generate", str(tmp_path), "-n", "40", "-c", "4"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    assert result.output.startswith("n=40 density=")


def test_round_trip_flow(runner, planted, tmp_path):
    codc = tmp_path / "graph.codc"
    result = runner.invoke(cli, GLOBAL + ["compress", str(planted / "graph.npy"), str(codc)])
    assert result.exit_code == 0, result.output
    assert "k=" in result.output
    assert "ratio=" in result.output
    assert load_compressed(codc).n == 96

    sze = tmp_path / "sze.npy"
    result = runner.invoke(cli, ["decompress", str(codc), str(sze)])
    assert result.exit_code == 0, result.output
    weights = np.load(sze)
    np.testing.assert_array_equal(weights, weights.T)

    fsze = tmp_path / "fsze.npy"
    result = runner.invoke(cli, ["--kernel", "5", "filter", str(sze), str(fsze)])
    assert result.exit_code == 0, result.output
    assert "kernel=5" in result.output

    ufsze = tmp_path / "ufsze.npy"
    gt = planted / "gt.npy"
    result = runner.invoke(cli, ["threshold", str(fsze), str(ufsze), "--gt", str(gt)])
    assert result.exit_code == 0, result.output
    assert "t*=" in result.output
    assert set(np.unique(np.load(ufsze))) <= {0.0, 1.0}

    result = runner.invoke(
        cli, ["measure", str(fsze), str(gt), "--labels", str(planted / "labels.csv")]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert [line.split("=")[0] for line in lines] == ["l1", "l2", "l2_error", "kvs_ari"]
    assert lines[-1].endswith(("k=5", "k=7", "k=9"))


def test_threshold_from_rule(runner, planted, tmp_path):
    rule = tmp_path / "results.csv"
    pd.DataFrame({"density": [0.1, 0.2, 0.3, 0.4], "threshold": [0.3] * 4}).to_csv(
        rule, index=False
    )
    out = tmp_path / "ufsze.npy"
    result = runner.invoke(
        cli, ["threshold", str(planted / "graph.npy"), str(out), "--rule", str(rule)]
    )
    assert result.exit_code == 0, result.output
    assert "t=0.3000" in result.output
    np.testing.assert_array_equal(np.load(out), np.load(planted / "graph.npy"))


def test_threshold_rejects_non_finite_rule(runner, planted, tmp_path, monkeypatch):
    monkeypatch.setattr("szemeredi_codec.cli.ThresholdRule.rule", lambda self, density: np.nan)
    rule = tmp_path / "results.csv"
    pd.DataFrame({"density": [0.1, 0.2, 0.3], "threshold": [0.3] * 3}).to_csv(rule, index=False)
    out = tmp_path / "ufsze.npy"
    result = runner.invoke(
        cli, ["threshold", str(planted / "graph.npy"), str(out), "--rule", str(rule)]
    )
    assert result.exit_code == 1
    assert "finite" in result.output
    assert not out.exists()


@pytest.mark.parametrize("extra", [[], ["--gt", "GT", "--rule", "GT"]])
def test_threshold_needs_one_source(runner, planted, tmp_path, extra):
    extra = [str(planted / "gt.npy") if e == "GT" else e for e in extra]
    result = runner.invoke(
        cli, ["threshold", str(planted / "graph.npy"), str(tmp_path / "o.npy")] + extra
    )
    assert result.exit_code == 2
    assert "exactly one" in result.output


def test_codec(runner, planted, tmp_path):
    out = tmp_path / "run"
    args = [
        "codec",
        str(planted / "graph.npy"),
        str(out),
        "--gt",
        str(planted / "gt.npy"),
        "--labels",
        str(planted / "labels.csv"),
    ]
    result = runner.invoke(cli, GLOBAL + args)
    assert result.exit_code == 0, result.output
    assert "k=" in result.output
    for name in ("compressed.codc", "sze.npy", "fsze.npy", "ufsze.npy", "results.csv"):
        assert (out / name).exists()
    for name in ("G", "SZE", "FSZE", "UFSZE"):
        assert (out / f"{name}.pgm").exists()
    row = pd.read_csv(out / "results.csv")
    assert {"threshold", "kvs_ari", "k_classes"} <= set(row.columns)
    assert not (out / "ids.csv").exists()


@pytest.fixture
def sparse_ids(tmp_path):
    """A 40-vertex ring whose vertex ids are 100, 105, ..., 295."""
    path = tmp_path / "ring.txt"
    ids = 100 + 5 * np.arange(40)
    path.write_text("".join(f"{u} {v}\n" for u, v in zip(ids, np.roll(ids, -1))))
    return path, ids


def test_ids_written_for_sparse_vertex_ids(runner, sparse_ids, tmp_path):
    path, ids = sparse_ids
    result = runner.invoke(cli, GLOBAL + ["codec", str(path), str(tmp_path / "run")])
    assert result.exit_code == 0, result.output
    written = pd.read_csv(tmp_path / "run" / "ids.csv")
    assert list(written.columns) == ["vertex", "id"]
    np.testing.assert_array_equal(written["id"], ids)
    np.testing.assert_array_equal(written["vertex"], np.arange(40))

    codc = tmp_path / "ring.codc"
    result = runner.invoke(cli, GLOBAL + ["compress", str(path), str(codc)])
    assert result.exit_code == 0, result.output
    np.testing.assert_array_equal(pd.read_csv(tmp_path / "ring.ids.csv")["id"], ids)


def test_codec_repetitions(runner, planted, tmp_path):
    out = tmp_path / "runs"
    args = ["codec", str(planted / "graph.npy"), str(out), "-r", "2"]
    result = runner.invoke(cli, GLOBAL + args)
    assert result.exit_code == 0, result.output
    assert len(pd.read_csv(out / "runs.csv")) == 2
    assert (out / "describe.csv").exists()


def test_experiment(runner, tmp_path):
    out = tmp_path / "experiment"
    args = [
        "--seed",
        "2",
        "--eps-grid",
        "0.5",
        "experiment",
        str(out),
        "--sizes",
        "64",
        "--internoise",
        "0.1,0.2",
        "-c",
        "4",
        "-r",
        "1",
        "--processes",
        "1",
        "--quiet",
    ]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    table = pd.read_csv(out / "results.csv")
    assert list(table["internoise"]) == [0.1, 0.2]
    assert (out / "summary.csv").exists() and (out / "noise.png").exists()
    assert (out / "G.pgm").exists()


def test_config_file(runner, tmp_path):
    config = tmp_path / "codec.toml"
    config.write_text("[synth]\nn = 48\nclusters = 3\n")
    result = runner.invoke(cli, ["--config", str(config), "generate", str(tmp_path / "g")])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("n=48")


def test_codec_errors_become_cli_errors(runner, tmp_path):
    bad = tmp_path / "bad.codc"
    bad.write_bytes(b"NOPE" + bytes(40))
    result = runner.invoke(cli, ["decompress", str(bad), str(tmp_path / "out.npy")])
    assert result.exit_code == 1
    assert "magic" in result.output


def test_bad_number_list(runner, tmp_path):
    result = runner.invoke(cli, ["--eps-grid", "0.2,x", "generate", str(tmp_path)])
    assert result.exit_code == 2
