"""Command line interface: ``szemeredi-codec``."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd

from .codec.config import FileConfig, load_config
from .codec.errors import CodecError
from .codec.experiment import ExperimentSpec, describe_runs, run_experiment, run_network
from .codec.fileio import (
    GRAPH_FORMATS,
    load_compressed,
    load_graph,
    save_compressed,
    save_ids,
    save_matrix,
)
from .codec.measures import kvs_best_ari, l1_dist, l2_dist, l2_reconstruction_error
from .codec.pipeline import (
    CodecConfig,
    best_partition,
    compress,
    decompress,
    median_filter,
    run_codec,
    sweep,
    threshold_search,
)
from .codec.report import emit_report
from .codec.synthgen import SynthParams, generate
from .codec.trend import ThresholdRule

logger = logging.getLogger(__name__)


class CodecGroup(click.Group):
    """Report library errors as one-line CLI errors."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except CodecError as err:
            raise click.ClickException(str(err)) from err


def _floats(_ctx, _param, value: Optional[str]) -> Optional[tuple[float, ...]]:
    if value is None:
        return None
    try:
        return tuple(float(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter("expected a comma separated list of numbers.") from None


def _ints(ctx, param, value: Optional[str]) -> Optional[tuple[int, ...]]:
    floats = _floats(ctx, param, value)
    return None if floats is None else tuple(int(v) for v in floats)


def _codec(ctx: click.Context, **overrides) -> CodecConfig:
    settings = ctx.obj
    fields = {
        "seed": settings["seed"],
        "eps_grid": settings["eps_grid"],
        "kernel": settings["kernel"],
        **overrides,
    }
    return replace(settings["config"].codec, **{k: v for k, v in fields.items() if v is not None})


def _graph(path: Path, fmt: Optional[str]):
    return load_graph(path, fmt).graph


def _labels(path: Path) -> np.ndarray:
    frame = pd.read_csv(path)
    column = "label" if "label" in frame else frame.columns[-1]
    return frame[column].to_numpy()


format_option = click.option(
    "--format", "fmt", type=click.Choice(GRAPH_FORMATS), default=None,
    help="Input format; inferred from the extension when omitted.",
)


@click.group(cls=CodecGroup)
@click.option("--seed", type=int, default=None, help="Master random seed.")
@click.option("--eps-grid", callback=_floats, default=None, help="Comma separated ε candidates.")
@click.option("--kernel", type=int, default=None, help="Odd median filter window.")
@click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None, help="TOML configuration file.",
)
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for debugging.")
@click.pass_context
def cli(ctx, seed, eps_grid, kernel, config_path, verbose):
    """Lossy graph compression through approximately ε-regular partitions."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    config = load_config(config_path) if config_path else FileConfig()
    ctx.obj = {"seed": seed, "eps_grid": eps_grid, "kernel": kernel, "config": config}


@cli.command("generate")
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("-n", "--nodes", type=int, default=None, help="Vertex count.")
@click.option("-c", "--clusters", type=int, default=None, help="Planted clusters.")
@click.option("--internoise", type=float, default=None)
@click.option("--intranoise", type=float, default=None)
@click.option("--imbalanced", is_flag=True, help="Random cluster sizes.")
@click.option("--weighted", is_flag=True, help="Weighted noise edges.")
@click.pass_context
def generate_cmd(ctx, out_dir, nodes, clusters, internoise, intranoise, imbalanced, weighted):
    """Draw a planted-cluster graph; writes graph.npy, gt.npy and labels.csv."""
    values = {
        "n": 1000,
        "clusters": 10,
        "internoise": 0.2,
        **ctx.obj["config"].synth,
    }
    given = {
        "n": nodes,
        "clusters": clusters,
        "internoise": internoise,
        "intranoise": intranoise,
        "balanced": False if imbalanced else None,
        "weighted": weighted or None,
        "seed": ctx.obj["seed"],
    }
    values.update({k: v for k, v in given.items() if v is not None})
    g, gt, labels = generate(SynthParams(**values))

    out_dir.mkdir(parents=True, exist_ok=True)
    save_matrix(g, out_dir / "graph.npy")
    save_matrix(gt, out_dir / "gt.npy")
    pd.DataFrame({"vertex": np.arange(labels.size), "label": labels}).to_csv(
        out_dir / "labels.csv", index=False
    )
    click.echo(f"n={g.n} density={g.density():.4f} -> {out_dir}")


@cli.command("compress")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output", type=click.Path(dir_okay=False, path_type=Path))
@format_option
@click.option("--internal", is_flag=True, help="Keep internal class densities.")
@click.pass_context
def compress_cmd(ctx, graph, output, fmt, internal):
    """Find the best regular partition of GRAPH and write it as CODC."""
    loaded = load_graph(graph, fmt)
    g = loaded.graph
    cfg = _codec(ctx)
    eps, partition = best_partition(sweep(g, cfg))
    compressed = compress(g, partition, eps, internal=internal or cfg.reconstruct_internal)
    save_compressed(compressed, output)
    save_ids(loaded, output.with_suffix(".ids.csv"))
    click.echo(
        f"k={compressed.k} eps={compressed.eps:.4f} "
        f"ratio={compressed.compression_ratio():.2f} -> {output}"
    )


@cli.command("decompress")
@click.argument("compressed", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--reconstruct-irregular", is_flag=True)
@click.option("--reconstruct-internal", is_flag=True)
@click.pass_context
def decompress_cmd(ctx, compressed, output, reconstruct_irregular, reconstruct_internal):
    """Rebuild the weighted graph SZE from a CODC file."""
    cfg = _codec(
        ctx,
        reconstruct_irregular=reconstruct_irregular or None,
        reconstruct_internal=reconstruct_internal or None,
    )
    save_matrix(decompress(load_compressed(compressed), cfg), output)
    click.echo(f"-> {output}")


@cli.command("filter")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output", type=click.Path(dir_okay=False, path_type=Path))
@format_option
@click.pass_context
def filter_cmd(ctx, graph, output, fmt):
    """Median filter a reconstruction (SZE -> FSZE)."""
    cfg = _codec(ctx)
    save_matrix(median_filter(_graph(graph, fmt), cfg.kernel), output)
    click.echo(f"kernel={cfg.kernel} -> {output}")


@cli.command("threshold")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--gt", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Ground truth to search the best threshold against.")
@click.option("--rule", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Experiment results.csv to predict the threshold from density.")
@click.option("--density-of", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Graph whose density feeds --rule (defaults to GRAPH).")
@click.option("--step", type=float, default=None)
@format_option
@click.pass_context
def threshold_cmd(ctx, graph, output, gt, rule, density_of, step, fmt):
    """Binarize FSZE into UFSZE."""
    if (gt is None) == (rule is None):
        raise click.UsageError("pass exactly one of --gt and --rule.")
    fsze = _graph(graph, fmt)
    cfg = _codec(ctx, threshold_step=step)
    if gt is not None:
        t, ufsze = threshold_search(fsze, _graph(gt, None), cfg.threshold_step)
        save_matrix(ufsze, output)
        click.echo(f"t*={t:.4f} l2={l2_dist(ufsze, _graph(gt, None)):.4f} -> {output}")
        return
    density = (_graph(density_of, None) if density_of else fsze).density()
    t = ThresholdRule().fit(pd.read_csv(rule)).rule(density)
    if not np.isfinite(t):
        raise click.ClickException(f"the rule in {rule} predicts no finite threshold.")
    save_matrix((fsze.weights >= t).astype(np.float64), output)
    click.echo(f"density={density:.4f} t={t:.4f} -> {output}")


@cli.command("measure")
@click.argument("first", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("second", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--labels", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="labels.csv for the KVS-ARI of FIRST.")
def measure_cmd(first, second, labels):
    """Compare two matrices (l1, l2) and optionally score FIRST with KVS-ARI."""
    a, b = _graph(first, None), _graph(second, None)
    click.echo(f"l1={l1_dist(a, b):.6f}")
    click.echo(f"l2={l2_dist(a, b):.6f}")
    click.echo(f"l2_error={l2_reconstruction_error(a, b):.3f}")
    if labels is not None:
        score, k = kvs_best_ari(a, _labels(labels))
        click.echo(f"kvs_ari={score:.4f} k={k}")


@cli.command("codec")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@format_option
@click.option("--gt", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Ground truth for l1/l2 and the threshold search.")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-r", "--repetitions", type=int, default=1, show_default=True)
@click.pass_context
def codec_cmd(ctx, graph, out_dir, fmt, gt, labels, repetitions):
    """Run the whole pipeline on GRAPH."""
    loaded = load_graph(graph, fmt)
    g = loaded.graph
    cfg = _codec(ctx)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_ids(loaded, out_dir / "ids.csv")

    if repetitions > 1:
        runs = run_network(g, cfg, repetitions, cfg.seed, progress=True)
        runs.to_csv(out_dir / "runs.csv", index=False)
        stats = describe_runs(runs)
        stats.to_csv(out_dir / "describe.csv")
        click.echo(stats.to_string())
        return

    reference = _graph(gt, None) if gt else None
    result = run_codec(g, cfg, reference=reference, labels=_labels(labels) if labels else None)
    save_compressed(result.compressed, out_dir / "compressed.codc")
    save_matrix(result.sze, out_dir / "sze.npy")
    save_matrix(result.fsze, out_dir / "fsze.npy")
    row = {"n": g.n, "density": g.density(), **result.report.as_row()}
    snapshots = {"G": g, "SZE": result.sze, "FSZE": result.fsze}
    if reference is not None:
        t, ufsze = threshold_search(result.fsze, reference, cfg.threshold_step)
        save_matrix(ufsze, out_dir / "ufsze.npy")
        row.update(threshold=t, l2_ufsze=l2_dist(ufsze, reference))
        snapshots["UFSZE"] = ufsze
    emit_report(pd.DataFrame([row]), out_dir, snapshots)
    report = result.report
    click.echo(
        f"k={report.k_classes} eps={report.eps:.4f} sze_index={report.sze_index:.4f} "
        f"l2={report.l2:.4f} ratio={result.compressed.compression_ratio():.2f}"
    )


@cli.command("experiment")
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--sizes", callback=_ints, default=None, help="Comma separated graph sizes.")
@click.option("--internoise", callback=_floats, default=None)
@click.option("--intranoise", callback=_floats, default=None)
@click.option("-c", "--clusters", type=int, default=None)
@click.option("-r", "--repetitions", type=int, default=None)
@click.option("--processes", type=int, default=None)
@click.option("--imbalanced", is_flag=True)
@click.option("--quiet", is_flag=True, help="Hide the progress bar.")
@click.pass_context
def experiment_cmd(
    ctx, out_dir, sizes, internoise, intranoise, clusters, repetitions, processes,
    imbalanced, quiet,
):
    """Sweep synthetic graphs over noise levels and write the report into OUT_DIR."""
    values = dict(ctx.obj["config"].experiment)
    values.pop("output_dir", None)
    given = {
        "sizes": sizes,
        "internoise_levels": internoise,
        "intranoise_levels": intranoise,
        "clusters": clusters,
        "repetitions": repetitions,
        "processes": processes,
        "balanced": False if imbalanced else None,
        "seed": ctx.obj["seed"],
    }
    values.update({k: v for k, v in given.items() if v is not None})
    spec = ExperimentSpec(codec=_codec(ctx), output_dir=out_dir, **values)
    results = run_experiment(spec, progress=not quiet)
    for path in emit_report(results, out_dir):
        click.echo(f"wrote {path}")


def main():
    cli()


if __name__ == "__main__":
    main()
