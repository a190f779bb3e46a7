"""Compression, decompression and post-processing of graphs through regular partitions.

The codec searches an approximately ε-regular partition over a grid of ε
values, keeps the one with the most classes (smallest ε on ties), stores the
class densities ``RED`` with the membership vector ``M``, and rebuilds a
weighted graph ``SZE`` in which every regular pair becomes a constant
bipartite block. ``SZE`` is median filtered into ``FSZE`` and, given a ground
truth, thresholded into the binary ``UFSZE``.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy import ndimage

from .errors import InvalidArgumentError, NoPartitionFoundError
from .graph import Graph, density_matrix
from .measures import MeasureReport, kvs_best_ari, l1_dist, l2_dist
from .refinement import Partition, RefineStatus, Seed, initial_partition, refine
from .regularity import count_irregular, sze_index

logger = logging.getLogger(__name__)

DEFAULT_EPS_GRID = tuple(float(e) for e in np.round(np.arange(1, 11) * 0.05, 6))
THREADS_ENV = "CODEC_THREADS"


@dataclass(frozen=True)
class CodecConfig:
    """
    Parameters of a codec run.

    Parameters
    ----------
    eps_grid : sequence of float
        ε candidates, each in ``(0, 1)``.
    kernel : int, 3
        Odd side of the median filter window.
    reconstruct_irregular : bool, False
        Give irregular pairs their stored density when decompressing.
    reconstruct_internal : bool, False
        Store internal class densities and draw random intra-class edges
        from them when decompressing.
    threshold_step : float, 0.01
        Grid step of the unweighting threshold search.
    seed : int, optional
        Master seed of every random choice of the run.
    initial_classes : int, 4
        Class count of the starting partition.
    density_threshold : float, 0.5
        Internal density separating densification from sparsification.
    redistribute_c0 : bool, True
        Deal an overgrown exceptional class out over the classes.
    deviation_scale : {"graph", "class"}, "graph"
        Cardinality the regularity thresholds scale with during the search:
        the graph order or the class size.
    workers : int, optional
        Threads for the ε sweep; capped by the ``CODEC_THREADS`` variable.
    """

    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    kernel: int = 3
    reconstruct_irregular: bool = False
    reconstruct_internal: bool = False
    threshold_step: float = 0.01
    seed: Optional[int] = None
    initial_classes: int = 4
    density_threshold: float = 0.5
    redistribute_c0: bool = True
    deviation_scale: Literal["graph", "class"] = "graph"
    workers: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        if not self.eps_grid:
            raise InvalidArgumentError("eps_grid must not be empty.")
        if any(not 0.0 < e < 1.0 for e in self.eps_grid):
            raise InvalidArgumentError("eps_grid values must lie in (0, 1).")
        if not isinstance(self.kernel, int) or self.kernel < 1 or self.kernel % 2 == 0:
            raise InvalidArgumentError("kernel must be an odd positive integer.")
        if not 0.0 < self.threshold_step < 1.0:
            raise InvalidArgumentError("threshold_step must lie in (0, 1).")
        if self.initial_classes < 2:
            raise InvalidArgumentError("initial_classes must be at least 2.")
        if not 0.0 <= self.density_threshold <= 1.0:
            raise InvalidArgumentError("density_threshold must lie in [0, 1].")
        if self.deviation_scale not in ("graph", "class"):
            raise InvalidArgumentError("deviation_scale must be 'graph' or 'class'.")
        if self.workers is not None and self.workers < 1:
            raise InvalidArgumentError("workers must be a positive integer or None.")


def resolve_workers(requested: Optional[int] = None) -> int:
    """Thread count for ``requested`` (all cores when None), capped by ``CODEC_THREADS``."""
    workers = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            limit = int(cap)
        except ValueError:
            raise InvalidArgumentError(
                f"{THREADS_ENV} must be a positive integer, got {cap!r}."
            ) from None
        if limit < 1:
            raise InvalidArgumentError(f"{THREADS_ENV} must be a positive integer.")
        workers = min(workers, limit)
    return workers


def approx_alon(
    g: Graph, eps: float, seed: Seed = None, config: Optional[CodecConfig] = None
) -> Optional[Partition]:
    """
    Search an approximately ε-regular partition of ``g``.

    Starting from a random partition, class pairs are checked and the
    partition is refined until at most ``eps * C(k, 2)`` pairs are
    irregular. Returns None when a refinement step declares the partition
    irregular or runs out of vertices first.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidArgumentError("eps must lie in (0, 1).")
    config = config or CodecConfig()
    order = g.n if config.deviation_scale == "graph" else None
    rng = np.random.default_rng(seed)
    p = initial_partition(g, rng, eps, config.initial_classes)

    previous = None
    while True:
        count, verdicts = count_irregular(g, p, eps, order)
        index = sze_index(g, p)
        if previous is not None and index < previous:
            logger.warning(
                "eps=%.4f: Szemeredi index decreased from %.5f to %.5f at generation %d",
                eps,
                previous,
                index,
                p.generation,
            )
        previous = index

        if count <= eps * math.comb(p.k, 2):
            irregular = tuple(pair for pair, v in verdicts.items() if not v.is_regular)
            return replace(p, irregular_pairs=irregular)

        outcome = refine(
            g,
            p,
            verdicts,
            rng,
            density_threshold=config.density_threshold,
            redistribute_c0=config.redistribute_c0,
        )
        if outcome.status is not RefineStatus.REGULAR:
            logger.debug(
                "eps=%.4f: refinement %s at generation %d (k=%d)",
                eps,
                outcome.status.value,
                outcome.next.generation,
                p.k,
            )
            return None
        p = outcome.next


def sweep(g: Graph, cfg: CodecConfig) -> list[tuple[float, Partition]]:
    """
    Run ``approx_alon`` for every ε of the grid.

    Each ε gets its own random stream spawned from ``cfg.seed``, so results
    do not depend on the number of threads. Successes are returned in grid
    order.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(len(cfg.eps_grid))
    workers = min(resolve_workers(cfg.workers), len(cfg.eps_grid))

    def attempt(job):
        eps, stream = job
        return approx_alon(g, eps, np.random.default_rng(stream), cfg)

    jobs = list(zip(cfg.eps_grid, streams))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(attempt, jobs))
    else:
        found = [attempt(job) for job in jobs]

    candidates = []
    for eps, partition in zip(cfg.eps_grid, found):
        if partition is None:
            logger.info("eps=%.4f: no partition", eps)
            continue
        logger.info(
            "eps=%.4f: k=%d, |c0|=%d, irregular=%d",
            eps,
            partition.k,
            partition.c0.size,
            len(partition.irregular_pairs),
        )
        candidates.append((eps, partition))
    return candidates


def best_partition(
    candidates: Sequence[tuple[float, Partition]],
) -> tuple[float, Partition]:
    """Most classes first, then smallest ε, then earliest in ``candidates``."""
    if not candidates:
        raise NoPartitionFoundError("no ε of the grid produced a regular partition.")
    index = max(
        range(len(candidates)),
        key=lambda i: (candidates[i][1].k, -candidates[i][0], -i),
    )
    return candidates[index]


@dataclass(frozen=True, eq=False)
class CompressedGraph:
    """
    The compressed form of a graph: ``RED`` plus the membership vector ``M``.

    ``red`` holds the density of every class pair (symmetric, zero
    diagonal); the pairs in ``irregular_pairs`` (0-based, ``s < t``) are
    flagged and left empty on decompression unless asked otherwise.
    ``internal`` optionally keeps the internal class densities.
    """

    n: int
    k: int
    eps: float
    membership: np.ndarray
    red: np.ndarray
    internal: Optional[np.ndarray] = None
    irregular_pairs: tuple[tuple[int, int], ...] = field(default=())
    weighted: bool = False

    def __post_init__(self):
        membership = np.asarray(self.membership, dtype=np.int64)
        red = np.asarray(self.red, dtype=np.float64)
        if membership.shape != (self.n,):
            raise InvalidArgumentError("membership must have one entry per vertex.")
        if membership.size and (membership.min() < 0 or membership.max() > self.k):
            raise InvalidArgumentError(f"membership ids must lie in 0..{self.k}.")
        sizes = np.bincount(membership, minlength=self.k + 1)[1:]
        if self.k and (sizes.min() != sizes.max() or sizes.min() == 0):
            raise InvalidArgumentError("classes 1..k must be non-empty and equal in size.")
        if red.shape != (self.k, self.k):
            raise InvalidArgumentError(f"red must be {self.k}x{self.k}, got {red.shape}.")
        if red.size and (red.min() < 0.0 or red.max() > 1.0):
            raise InvalidArgumentError("red entries must lie in [0, 1].")
        if not np.array_equal(red, red.T) or np.any(np.diagonal(red) != 0.0):
            raise InvalidArgumentError("red must be symmetric with a zero diagonal.")
        if self.internal is not None:
            internal = np.asarray(self.internal, dtype=np.float64)
            if internal.shape != (self.k,):
                raise InvalidArgumentError("internal must hold one density per class.")
            object.__setattr__(self, "internal", internal)
        pairs = tuple(sorted((int(s), int(t)) for s, t in self.irregular_pairs))
        if any(not 0 <= s < t < self.k for s, t in pairs):
            raise InvalidArgumentError("irregular pairs must satisfy 0 <= s < t < k.")
        object.__setattr__(self, "membership", membership)
        object.__setattr__(self, "red", red)
        object.__setattr__(self, "irregular_pairs", pairs)

    @property
    def payload_entries(self) -> int:
        """Stored numbers: the upper triangle of ``RED``, ``M`` and any internal densities."""
        extra = self.k if self.internal is not None else 0
        return self.k * (self.k - 1) // 2 + self.n + extra

    def compression_ratio(self) -> float:
        """Upper-triangle entries of the dense adjacency matrix per stored entry."""
        return self.n * (self.n - 1) / 2 / self.payload_entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompressedGraph):
            return NotImplemented
        internal_equal = (self.internal is None and other.internal is None) or (
            self.internal is not None
            and other.internal is not None
            and np.array_equal(self.internal, other.internal)
        )
        return (
            self.n == other.n
            and self.k == other.k
            and self.eps == other.eps
            and self.weighted == other.weighted
            and self.irregular_pairs == other.irregular_pairs
            and np.array_equal(self.membership, other.membership)
            and np.array_equal(self.red, other.red)
            and internal_equal
        )

    __hash__ = None  # type: ignore[assignment]


def compress(
    g: Graph, p: Partition, eps: float, internal: bool = False
) -> CompressedGraph:
    densities = density_matrix(g, p.classes)
    red = densities.copy()
    np.fill_diagonal(red, 0.0)
    return CompressedGraph(
        n=g.n,
        k=p.k,
        eps=float(eps),
        membership=p.membership(g.n),
        red=np.clip(red, 0.0, 1.0),
        internal=np.diagonal(densities).copy() if internal else None,
        irregular_pairs=p.irregular_pairs,
        weighted=g.is_weighted,
    )


def decompress(c: CompressedGraph, cfg: Optional[CodecConfig] = None) -> Graph:
    """
    Rebuild ``SZE`` from ``c``.

    Every cross pair of a regular class pair gets the pair's density.
    Intra-class and ``C_0`` pairs stay empty. With
    ``cfg.reconstruct_internal`` and stored internal densities, each class
    receives random unit edges whose expected count matches its internal
    density (seeded by ``cfg.seed``).
    """
    cfg = cfg or CodecConfig()
    table = np.zeros((c.k + 1, c.k + 1))
    table[1:, 1:] = c.red
    if not cfg.reconstruct_irregular:
        for s, t in c.irregular_pairs:
            table[s + 1, t + 1] = table[t + 1, s + 1] = 0.0
    weights = table[np.ix_(c.membership, c.membership)]

    if cfg.reconstruct_internal and c.internal is not None:
        rng = np.random.default_rng(cfg.seed)
        for s in range(c.k):
            members = np.flatnonzero(c.membership == s + 1)
            m = members.size
            if m < 2:
                continue
            probability = min(1.0, c.internal[s] * m / (m - 1))
            rows, cols = np.triu_indices(m, 1)
            drawn = rng.random(rows.size) < probability
            u, v = members[rows[drawn]], members[cols[drawn]]
            weights[u, v] = weights[v, u] = 1.0

    return Graph(weights)


def median_filter(m: Graph | ArrayLike, kernel: int = 3) -> Graph | np.ndarray:
    """
    Median filter with a ``kernel x kernel`` window and reflected borders.

    A ``Graph`` comes back as a ``Graph``: the filtered matrix is averaged
    with its transpose and its diagonal cleared. Plain arrays are returned
    filtered as they are.
    """
    if not isinstance(kernel, (int, np.integer)) or kernel < 1 or kernel % 2 == 0:
        raise InvalidArgumentError("kernel must be an odd positive integer.")
    values = m.weights if isinstance(m, Graph) else np.asarray(m, dtype=np.float64)
    if kernel > values.shape[0]:
        raise InvalidArgumentError(
            f"kernel {kernel} is larger than the matrix ({values.shape[0]})."
        )
    filtered = ndimage.median_filter(values, size=kernel, mode="reflect")
    if not isinstance(m, Graph):
        return filtered
    symmetric = (filtered + filtered.T) / 2
    np.fill_diagonal(symmetric, 0.0)
    return Graph(symmetric)


def threshold_grid(step: float) -> np.ndarray:
    count = math.ceil(round(1.0 / step, 9)) - 1
    grid = np.round(np.arange(1, count + 1) * step, 10)
    return grid[grid < 1.0]


def threshold_search(fsze: Graph, gt: Graph, step: float = 0.01) -> tuple[float, Graph]:
    """
    Binarize ``fsze`` at the threshold that brings it closest to ``gt``.

    Thresholds ``step, 2 step, ...`` below 1 are tried; weights ``>= t``
    become edges. Returns the smallest ``t`` minimising ``l2_dist`` and the
    binarized graph ``UFSZE``.
    """
    if fsze.n != gt.n:
        raise InvalidArgumentError("fsze and gt must have the same order.")
    if not 0.0 < step < 1.0:
        raise InvalidArgumentError("step must lie in (0, 1).")
    best_t, best_loss = None, np.inf
    for t in threshold_grid(step):
        loss = l2_dist((fsze.weights >= t).astype(np.float64), gt)
        if loss < best_loss:
            best_t, best_loss = float(t), loss
    if best_t is None:
        raise InvalidArgumentError(f"step {step} leaves no threshold below 1.")
    return best_t, Graph((fsze.weights >= best_t).astype(np.float64))


class CodecResult(NamedTuple):
    compressed: CompressedGraph
    sze: Graph
    fsze: Graph
    report: MeasureReport
    partition: Partition
    candidates: list[tuple[float, Partition]]


def run_codec(
    g: Graph,
    cfg: Optional[CodecConfig] = None,
    reference: Optional[Graph] = None,
    labels: Optional[ArrayLike] = None,
) -> CodecResult:
    """
    Compress ``g``, decompress it and filter the reconstruction.

    ``l1``/``l2`` of the report compare ``FSZE`` (and ``SZE``) with
    ``reference``, which defaults to ``g``. KVS-ARI is measured on ``FSZE``
    when ``labels`` are given.
    """
    cfg = cfg or CodecConfig()
    reference = g if reference is None else reference

    start = time.perf_counter()
    candidates = sweep(g, cfg)
    eps, partition = best_partition(candidates)
    compressed = compress(g, partition, eps, internal=cfg.reconstruct_internal)
    t_compress = time.perf_counter() - start
    logger.info(
        "best partition: eps=%.4f k=%d |c0|=%d (%.2fs)",
        eps,
        partition.k,
        partition.c0.size,
        t_compress,
    )

    start = time.perf_counter()
    sze = decompress(compressed, cfg)
    t_decompress = time.perf_counter() - start

    start = time.perf_counter()
    fsze = median_filter(sze, cfg.kernel)
    t_filter = time.perf_counter() - start

    kvs_ari = kvs_k = None
    if labels is not None:
        kvs_ari, kvs_k = kvs_best_ari(fsze, labels)

    report = MeasureReport(
        l1=l1_dist(fsze, reference),
        l2=l2_dist(fsze, reference),
        sze_index=sze_index(g, partition),
        eps=eps,
        k_classes=partition.k,
        irregular_count=len(partition.irregular_pairs),
        t_compress=t_compress,
        t_decompress=t_decompress,
        t_filter=t_filter,
        kvs_ari=kvs_ari,
        kvs_k=kvs_k,
        l1_sze=l1_dist(sze, reference),
        l2_sze=l2_dist(sze, reference),
    )
    return CodecResult(compressed, sze, fsze, report, partition, candidates)


__all__ = [
    "DEFAULT_EPS_GRID",
    "CodecConfig",
    "CompressedGraph",
    "CodecResult",
    "resolve_workers",
    "approx_alon",
    "sweep",
    "best_partition",
    "compress",
    "decompress",
    "median_filter",
    "threshold_grid",
    "threshold_search",
    "run_codec",
]
