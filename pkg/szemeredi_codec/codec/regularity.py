"""Approximate ε-regularity of class pairs and the Szemerédi partition index.

The pair test follows the constructive procedure of Alon et al.: given two
equal classes ``A = C_i`` and ``B = C_j`` of size ``m`` it decides, in
polynomial time, that the pair is regular or returns certificates
``X_i ⊂ C_i`` and ``X_j ⊂ C_j`` witnessing irregularity.

Every threshold of the test is a multiple of a cardinality ``scale``
(``ε³ scale``, ``ε⁴ scale``...). Called on its own a pair uses its class
size ``m``; the partition search may pass the graph order instead through
``order``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np
from numpy.typing import ArrayLike

from .errors import InvalidArgumentError
from .graph import Graph, VertexClass, as_class, density_matrix

if TYPE_CHECKING:
    from .refinement import Partition

logger = logging.getLogger(__name__)

_EMPTY = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class PairStats:
    """Average degree ``d̄`` of a bipartite pair and the cardinalities it is measured on."""

    avg_degree: float
    class_size: int
    order: Optional[int] = None

    def __post_init__(self):
        if self.class_size < 1:
            raise InvalidArgumentError("class_size must be positive.")
        if not 0.0 <= self.avg_degree <= self.class_size + 1e-9:
            raise InvalidArgumentError("avg_degree must lie in [0, class_size].")

    @property
    def scale(self) -> int:
        """Cardinality the regularity thresholds are multiples of."""
        return self.class_size if self.order is None else self.order


@dataclass(frozen=True)
class PairVerdict:
    """
    Outcome of ``check_pair``.

    ``condition`` is 1, 2 or 3 for the case that fired, None when no case
    applies (the pair is then taken as regular). Certificates are empty for
    regular pairs and the complements are the whole classes.
    """

    is_regular: bool
    condition: Optional[int]
    cert_i: VertexClass = field(default_factory=lambda: _EMPTY)
    cert_j: VertexClass = field(default_factory=lambda: _EMPTY)
    compl_i: VertexClass = field(default_factory=lambda: _EMPTY)
    compl_j: VertexClass = field(default_factory=lambda: _EMPTY)


def _bipartite(g: Graph, a: VertexClass, b: VertexClass) -> np.ndarray:
    if a.size != b.size:
        raise InvalidArgumentError(
            f"classes must have equal size, got {a.size} and {b.size}."
        )
    if a.size == 0:
        raise InvalidArgumentError("classes must be non-empty.")
    if np.intersect1d(a, b).size:
        raise InvalidArgumentError("classes must be disjoint.")
    return g.weights[np.ix_(a, b)]


def average_degree(g: Graph, a: ArrayLike, b: ArrayLike) -> float:
    """``d̄ = (1/2m) Σ deg`` over ``A ∪ B`` in the bipartite graph, i.e. ``e(A, B) / m``."""
    a, b = as_class(a, g.n), as_class(b, g.n)
    return float(_bipartite(g, a, b).sum() / a.size)


def pair_stats(g: Graph, a: ArrayLike, b: ArrayLike, order: Optional[int] = None) -> PairStats:
    a, b = as_class(a, g.n), as_class(b, g.n)
    return PairStats(average_degree(g, a, b), int(a.size), order)


def neighborhood_deviation(
    g: Graph, y1: int, y2: int, a: ArrayLike, stats: PairStats
) -> float:
    """
    ``σ(y1, y2) = |N(y1) ∩ N(y2)| - d̄² / m`` with neighbourhoods restricted to ``a``.

    For weighted graphs the common neighbourhood size is
    ``Σ_x w(y1, x) w(y2, x)``.
    """
    if y1 == y2:
        raise InvalidArgumentError("neighborhood_deviation needs two distinct vertices.")
    a = as_class(a, g.n)
    overlap = float(g.weights[y1, a] @ g.weights[y2, a])
    return overlap - stats.avg_degree**2 / stats.class_size


def set_deviation(g: Graph, y_set: ArrayLike, a: ArrayLike, stats: PairStats) -> float:
    """``σ(Y)``: deviations over ordered distinct pairs of ``Y``, divided by ``|Y|²``."""
    y_set, a = as_class(y_set, g.n), as_class(a, g.n)
    if y_set.size < 2:
        raise InvalidArgumentError("set_deviation needs at least two vertices.")
    rows = g.weights[np.ix_(y_set, a)]
    sigma = rows @ rows.T - stats.avg_degree**2 / stats.class_size
    np.fill_diagonal(sigma, 0.0)
    return float(sigma.sum() / y_set.size**2)


def _verdict(ci, cj, cert_i, cert_j, condition) -> PairVerdict:
    cert_i, cert_j = np.sort(cert_i), np.sort(cert_j)
    return PairVerdict(
        is_regular=False,
        condition=condition,
        cert_i=cert_i,
        cert_j=cert_j,
        compl_i=np.setdiff1d(ci, cert_i),
        compl_j=np.setdiff1d(cj, cert_j),
    )


def _regular(ci, cj, condition) -> PairVerdict:
    return PairVerdict(True, condition, _EMPTY, _EMPTY, np.sort(ci), np.sort(cj))


def _coherent_group(overlap: np.ndarray, ref: int, allowed: np.ndarray) -> np.ndarray:
    """Mask of ``ref`` and the ``allowed`` vertices sharing most neighbours with it."""
    group = np.zeros(allowed.size, dtype=bool)
    group[ref] = True
    others = allowed.copy()
    others[ref] = False
    if others.any():
        row = overlap[ref, others]
        group[others] = row >= (row.max() + row.mean()) / 2
    return group


def _degree_certificates(bip: np.ndarray, avg: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Masks over ``A`` and ``B`` of two co-neighbourhood groups of an irregular pair.

    ``cert_j`` gathers the vertices of ``B`` sharing most neighbours with the
    highest-degree vertex of ``B``. Vertices of ``A`` tied to ``cert_j``
    (link density above the midpoint of ``d(A, B)`` and 1) are set aside;
    ``cert_i`` gathers, among the others, those sharing most neighbours with
    the one best attached to the rest of ``B``. When nothing outside the
    tied vertices reaches the rest of ``B``, the tied vertices are ``cert_i``.
    Comparing raw overlaps is the same as comparing ``σ`` since ``σ`` only
    subtracts a constant.
    """
    m = bip.shape[0]
    cert_j = _coherent_group(bip.T @ bip, int(np.argmax(bip.sum(axis=0))), np.ones(m, bool))
    link = bip[:, cert_j].mean(axis=1)
    tied = link >= (avg / m + 1.0) / 2
    reach = np.where(tied, 0.0, bip[:, ~cert_j].sum(axis=1))
    if reach.max() > 0:
        cert_i = _coherent_group(bip @ bip.T, int(np.argmax(reach)), ~tied)
    elif tied.any():
        cert_i = tied
    else:
        cert_i = np.zeros(m, dtype=bool)
        cert_i[np.argmax(link)] = True
    return cert_i, cert_j


def check_pair(
    g: Graph,
    ci: ArrayLike,
    cj: ArrayLike,
    eps: float,
    order: Optional[int] = None,
) -> PairVerdict:
    """
    Decide whether ``(ci, cj)`` is approximately ε-regular.

    Parameters
    ----------
    g : Graph
    ci, cj : array-like
        Disjoint classes of a common size ``m >= 2``; ``ci`` plays ``A``.
    eps : float
        Regularity parameter in ``(0, 1)``.
    order : int, optional
        Cardinality the thresholds scale with. Defaults to ``m``.

    Returns
    -------
    PairVerdict
        Condition 1: ``d̄ < ε³ scale``, regular. Condition 2: more than
        ``ε⁴ scale / 8`` vertices of ``cj`` deviate from ``d̄`` by at least
        ``ε⁴ scale``; the certificates are two co-neighbourhood groups, see
        ``_degree_certificates``.
        Condition 3: the first ``y0`` (ascending vertex id) of ``cj`` with
        small deviation whose set
        ``B_y0 = {y : σ(y0, y) >= 2 ε⁴ scale}`` reaches ``ε⁴ scale / 4``
        (at least one vertex); ``cert_j = B_y0``, ``cert_i = N(y0)``.
        Otherwise regular with condition None.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidArgumentError("eps must lie in (0, 1).")
    ci, cj = as_class(ci, g.n), as_class(cj, g.n)
    if ci.size < 2:
        raise InvalidArgumentError("check_pair needs classes of at least 2 vertices.")
    bip = _bipartite(g, ci, cj)
    m = ci.size
    scale = m if order is None else order

    avg = bip.sum() / m
    if avg < eps**3 * scale:
        return _regular(ci, cj, 1)

    threshold = eps**4 * scale
    degrees = bip.sum(axis=0)
    deviating = np.abs(degrees - avg) >= threshold
    if deviating.sum() > threshold / 8:
        cert_i, cert_j = _degree_certificates(bip, avg)
        return _verdict(ci, cj, ci[cert_i], cj[cert_j], 2)

    sigma = bip.T @ bip - avg**2 / m
    above = sigma >= 2 * threshold
    np.fill_diagonal(above, False)
    sizes = above.sum(axis=1)
    has_neighbours = bip.sum(axis=0) > 0
    success = ~deviating & has_neighbours & (sizes >= max(1.0, threshold / 4))
    for y0 in np.argsort(cj, kind="stable"):
        if success[y0]:
            return _verdict(ci, cj, ci[bip[:, y0] > 0], cj[above[y0]], 3)

    return _regular(ci, cj, None)


def sze_index(g: Graph, partition: "Partition") -> float:
    """``(1/k²) Σ_{s<t} d(C_s, C_t)²`` over the classes of ``partition`` (``C_0`` excluded)."""
    k = len(partition.classes)
    if k < 2:
        raise InvalidArgumentError("sze_index needs at least two classes.")
    densities = density_matrix(g, partition.classes)
    upper = densities[np.triu_indices(k, 1)]
    return float(np.sum(upper**2) / k**2)


def count_irregular(
    g: Graph,
    partition: "Partition",
    eps: float,
    order: Optional[int] = None,
    workers: Optional[int] = None,
) -> tuple[int, dict[tuple[int, int], PairVerdict]]:
    """
    Check every class pair of ``partition``.

    Verdicts are keyed by 0-based class index pairs ``(s, t)``, ``s < t``,
    in lexicographic order regardless of ``workers``.
    """
    classes = partition.classes
    pairs = [(s, t) for s in range(len(classes)) for t in range(s + 1, len(classes))]

    def check(pair):
        s, t = pair
        return check_pair(g, classes[s], classes[t], eps, order)

    if workers and workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, pairs))
    else:
        results = [check(pair) for pair in pairs]

    verdicts = dict(zip(pairs, results))
    count = sum(not v.is_regular for v in results)
    logger.debug("k=%d eps=%.4f irregular pairs=%d", len(classes), eps, count)
    return count, verdicts


__all__ = [
    "PairStats",
    "PairVerdict",
    "average_degree",
    "pair_stats",
    "neighborhood_deviation",
    "set_deviation",
    "check_pair",
    "sze_index",
    "count_irregular",
]
