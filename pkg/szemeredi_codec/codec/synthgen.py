"""Planted-cluster synthetic graphs ``G = GT + N``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .graph import Graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthParams:
    """
    Parameters of the planted-cluster generator.

    Parameters
    ----------
    n : int
        Vertex count.
    clusters : int
        Number of planted cliques ``C``, ``1 <= C <= n``.
    internoise : float
        Probability that an off-block vertex pair becomes a noise edge.
    intranoise : float, 0.0
        Probability that a structural in-block edge is deleted (corrosion).
    balanced : bool, True
        Equal cluster sizes when True, random sizes otherwise.
    weighted : bool, False
        Draw noise weights from ``noise_weight_range`` instead of using 1.
    seed : int, optional
        Seed of the generator; the same seed gives bit-identical output.
    structure_weight : float, 1.0
        Weight of the structural (in-block) edges.
    noise_weight_range : tuple of float, (0.25, 0.75)
        Uniform range of noise weights in weighted mode.
    """

    n: int
    clusters: int
    internoise: float
    intranoise: float = 0.0
    balanced: bool = True
    weighted: bool = False
    seed: Optional[int] = None
    structure_weight: float = 1.0
    noise_weight_range: tuple[float, float] = (0.25, 0.75)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidArgumentError("n must be a positive integer.")
        if not isinstance(self.clusters, (int, np.integer)) or self.clusters < 1:
            raise InvalidArgumentError("clusters must be a positive integer.")
        if self.clusters > self.n:
            raise InvalidArgumentError(
                f"clusters ({self.clusters}) cannot exceed n ({self.n})."
            )
        for name in ("internoise", "intranoise"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must be a probability in [0, 1].")
        if not 0.0 < self.structure_weight <= 1.0:
            raise InvalidArgumentError("structure_weight must lie in (0, 1].")
        low, high = self.noise_weight_range
        if not 0.0 < low <= high <= 1.0:
            raise InvalidArgumentError(
                "noise_weight_range must satisfy 0 < low <= high <= 1."
            )


def cluster_sizes(params: SynthParams, rng: np.random.Generator | None = None) -> np.ndarray:
    """
    Sizes of the planted clusters.

    Balanced sizes are ``n // C`` with the remainder spread one per cluster
    from the first. Imbalanced sizes give every cluster a floor of
    ``max(8, n // (4C))`` (capped at ``n // C``) and split the rest at
    ``C - 1`` sorted uniform cut points.
    """
    n, c = params.n, params.clusters
    if params.balanced:
        sizes = np.full(c, n // c, dtype=np.int64)
        sizes[: n % c] += 1
        return sizes

    rng = np.random.default_rng(params.seed) if rng is None else rng
    floor = min(max(8, n // (4 * c)), n // c)
    spare = n - c * floor
    cuts = np.sort(rng.integers(0, spare + 1, size=c - 1))
    return floor + np.diff(np.concatenate(([0], cuts, [spare]))).astype(np.int64)


def generate(params: SynthParams) -> tuple[Graph, Graph, np.ndarray]:
    """
    Draw one synthetic graph.

    Returns
    -------
    g : Graph
        ``GT`` with in-block edges deleted with probability ``intranoise``
        and off-block noise edges added with probability ``internoise``.
    gt : Graph
        Block-diagonal disjoint cliques.
    labels : numpy.ndarray
        Cluster id (``1..C``) of every vertex, contiguous in vertex order.
    """
    rng = np.random.default_rng(params.seed)
    sizes = cluster_sizes(params, rng)
    n = params.n
    labels = np.repeat(np.arange(1, params.clusters + 1), sizes)

    rows, cols = np.triu_indices(n, 1)
    in_block = labels[rows] == labels[cols]
    noise_draw = rng.random(rows.size)
    corrosion_draw = rng.random(rows.size)
    if params.weighted:
        low, high = params.noise_weight_range
        noise_weight = rng.uniform(low, high, size=rows.size)
    else:
        noise_weight = np.ones(rows.size)

    gt_upper = np.where(in_block, params.structure_weight, 0.0)
    kept = in_block & (corrosion_draw >= params.intranoise)
    noise = ~in_block & (noise_draw < params.internoise)
    g_upper = np.where(kept, params.structure_weight, 0.0) + np.where(
        noise, noise_weight, 0.0
    )

    gt = _symmetric(n, rows, cols, gt_upper)
    g = _symmetric(n, rows, cols, g_upper)
    logger.debug(
        "generated n=%d C=%d internoise=%.3f intranoise=%.3f density=%.4f",
        n,
        params.clusters,
        params.internoise,
        params.intranoise,
        g.density(),
    )
    return g, gt, labels


def _symmetric(n: int, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> Graph:
    w = np.zeros((n, n))
    w[rows, cols] = values
    w[cols, rows] = values
    return Graph(w)


def expected_density(params: SynthParams) -> float:
    """
    Analytic expected density of ``g`` under ``Graph.density``'s normalisation.

    ``f_in (1 - intranoise) w_s + f_off internoise w_noise`` where ``f_in`` and
    ``f_off`` are the fractions of ordered in-block (off-diagonal) and
    off-block vertex pairs, ``w_s`` the structural weight and ``w_noise`` the
    mean noise weight.
    """
    sizes = cluster_sizes(params).astype(np.float64)
    n2 = float(params.n) ** 2
    f_in = float(np.sum(sizes * (sizes - 1))) / n2
    f_off = (n2 - float(np.sum(sizes**2))) / n2
    noise_weight = float(np.mean(params.noise_weight_range)) if params.weighted else 1.0
    return (
        f_in * (1.0 - params.intranoise) * params.structure_weight
        + f_off * params.internoise * noise_weight
    )


__all__ = ["SynthParams", "cluster_sizes", "generate", "expected_density"]
