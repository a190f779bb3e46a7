"""Equitable partitions and the class-doubling refinement heuristic.

Each refinement step splits every class of the partition in two. Classes
that are irregular with some other class are paired with their most similar
irregular partner (``pair_score``) and split around the certificates of that
pair: dense certificates (internal density at least ``density_threshold``)
seed the new classes by indegree unzipping and grow with the most connected
vertices of the pooled complements, sparse certificates are halved at random
and grow with the least connected ones. Classes without an irregular partner
are unzipped. Anything that does not fit the new uniform class size goes to
the exceptional class ``C_0``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike

from .errors import InvalidArgumentError
from .graph import Graph, VertexClass, as_class, density_matrix, indegrees, internal_density
from .regularity import PairVerdict

logger = logging.getLogger(__name__)

Seed = int | np.random.Generator | np.random.SeedSequence | None


@dataclass(frozen=True)
class Partition:
    """
    Equitable partition ``C_0, C_1, ..., C_k`` of the vertices of a graph.

    Parameters
    ----------
    classes : tuple of numpy.ndarray
        The ``k`` classes, all of one cardinality.
    c0 : numpy.ndarray
        The exceptional class.
    eps : float
        The regularity parameter the partition is evolved for.
    generation : int
        Number of refinement steps since the initial partition.
    irregular_pairs : tuple of (int, int)
        0-based class index pairs found irregular when the partition was accepted.
    """

    classes: tuple[VertexClass, ...]
    c0: VertexClass
    eps: float = 0.0
    generation: int = 0
    irregular_pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(
            self, "classes", tuple(np.asarray(c, dtype=np.int64) for c in self.classes)
        )
        object.__setattr__(self, "c0", np.asarray(self.c0, dtype=np.int64))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def class_size(self) -> int:
        return int(self.classes[0].size) if self.classes else 0

    def membership(self, n: int) -> np.ndarray:
        """Membership vector M: 0 for ``C_0``, ``s + 1`` for ``classes[s]``."""
        m = np.zeros(n, dtype=np.int64)
        for s, members in enumerate(self.classes):
            m[members] = s + 1
        return m

    def check(self, n: int) -> None:
        """Raise ``InvalidArgumentError`` unless the partition covers ``0..n-1`` equitably."""
        sizes = {c.size for c in self.classes}
        if len(sizes) > 1:
            raise InvalidArgumentError(f"classes have unequal sizes {sorted(sizes)}.")
        everything = np.concatenate([*self.classes, self.c0]) if self.classes else self.c0
        if everything.size != n or not np.array_equal(np.sort(everything), np.arange(n)):
            raise InvalidArgumentError(
                "classes and c0 must cover every vertex exactly once."
            )


class RefineStatus(enum.Enum):
    REGULAR = "regular"
    IRREGULAR = "irregular"
    EXHAUSTED = "exhausted"


class RefineOutcome(NamedTuple):
    next: Partition
    status: RefineStatus
    visit_order: tuple[int, ...] = ()


class Split(NamedTuple):
    """Two new classes grown from a certificate, the unused pool and the unmet size."""

    first: VertexClass
    second: VertexClass
    pool: VertexClass
    deficit: int


def initial_partition(
    g: Graph, seed: Seed = None, eps: float = 0.0, classes: int = 4
) -> Partition:
    """
    Spread the vertices at random over ``classes`` equal classes.

    Class size is ``n // classes``; the remainder forms ``C_0``.
    """
    if classes < 2:
        raise InvalidArgumentError("classes must be at least 2.")
    if g.n < 2 * classes:
        raise InvalidArgumentError(
            f"a graph of {g.n} vertices is too small for {classes} initial classes "
            f"(need at least {2 * classes})."
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(g.n)
    m = g.n // classes
    parts = tuple(np.sort(perm[s * m : (s + 1) * m]) for s in range(classes))
    return Partition(parts, np.sort(perm[classes * m :]), eps, 0)


def pair_score(g: Graph, ci: ArrayLike, cj: ArrayLike) -> float:
    """``d(C_i, C_j) + 1 - |d(C_i, C_i) - d(C_j, C_j)|``, in ``[0, 2]``."""
    ci, cj = as_class(ci, g.n), as_class(cj, g.n)
    if np.intersect1d(ci, cj).size:
        raise InvalidArgumentError("pair_score needs disjoint classes.")
    densities = density_matrix(g, [ci, cj])
    return _score(densities, 0, 1)


def _score(densities: np.ndarray, s: int, t: int) -> float:
    return float(densities[s, t] + 1.0 - abs(densities[s, s] - densities[t, t]))


def unzip_by_indegree(
    g: Graph, c: ArrayLike
) -> tuple[VertexClass, VertexClass, Optional[int]]:
    """
    Deal a class into two by descending indegree, alternating.

    Ties are broken by ascending vertex id. When ``|c|`` is odd the last
    vertex of the sorted order is returned as the leftover.
    """
    c = as_class(c, g.n)
    if c.size < 2:
        raise InvalidArgumentError("unzip_by_indegree needs at least 2 vertices.")
    ranked = c[np.lexsort((c, -indegrees(g, c)))]
    leftover = None
    if ranked.size % 2:
        leftover = int(ranked[-1])
        ranked = ranked[:-1]
    return ranked[0::2], ranked[1::2], leftover


def _greedy_fill(
    g: Graph,
    first: VertexClass,
    second: VertexClass,
    pool: VertexClass,
    target: int,
    most_connected: bool,
) -> Split:
    pool = np.sort(pool)
    grown = [list(first), list(second)]
    w = g.weights
    # both classes start from their weight to the whole certificate
    anchor = w[np.ix_(pool, np.concatenate((first, second)))].sum(axis=1)
    conn = [anchor, anchor.copy()]
    free = np.ones(pool.size, dtype=bool)
    blocked = -np.inf if most_connected else np.inf
    pick = np.argmax if most_connected else np.argmin

    turn = 0
    while free.any() and any(len(members) < target for members in grown):
        if len(grown[turn]) < target:
            idx = int(pick(np.where(free, conn[turn], blocked)))
            v = int(pool[idx])
            grown[turn].append(v)
            free[idx] = False
            conn[turn] += w[pool, v]
        turn = 1 - turn

    deficit = sum(max(0, target - len(members)) for members in grown)
    return Split(
        np.asarray(grown[0], dtype=np.int64),
        np.asarray(grown[1], dtype=np.int64),
        pool[free],
        deficit,
    )


def densification_split(
    g: Graph, cert: ArrayLike, pool: ArrayLike, target: int
) -> Split:
    """
    Split a dense certificate and grow both halves with the most connected pool vertices.

    The certificate is unzipped by indegree; an odd leftover returns to the
    pool. Pool vertices are assigned greedily, alternating between the two
    classes, each time taking the vertex with the largest total weight to
    the certificate and the receiving class (lowest id on ties).
    """
    cert, pool = as_class(cert, g.n), as_class(pool, g.n)
    if cert.size >= 2:
        first, second, leftover = unzip_by_indegree(g, cert)
        if leftover is not None:
            pool = np.append(pool, leftover)
    else:
        first, second = cert, cert[:0]
    return _greedy_fill(g, first, second, pool, target, most_connected=True)


def sparsification_split(
    g: Graph, cert: ArrayLike, pool: ArrayLike, target: int, seed: Seed = None
) -> Split:
    """
    Halve a sparse certificate at random and grow both halves with the
    pool vertices least connected to the certificate and the receiving class.

    The first half gets ``ceil(|cert| / 2)`` vertices.
    """
    cert, pool = as_class(cert, g.n), as_class(pool, g.n)
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(cert)
    half = math.ceil(cert.size / 2)
    return _greedy_fill(
        g, shuffled[:half], shuffled[half:], pool, target, most_connected=False
    )


def _irregular_partners(
    k: int, verdicts: Mapping[tuple[int, int], PairVerdict]
) -> list[set[int]]:
    partners: list[set[int]] = [set() for _ in range(k)]
    for (s, t), verdict in verdicts.items():
        if not verdict.is_regular:
            partners[s].add(t)
            partners[t].add(s)
    return partners


def refine(
    g: Graph,
    p: Partition,
    verdicts: Mapping[tuple[int, int], PairVerdict],
    seed: Seed = None,
    density_threshold: float = 0.5,
    redistribute_c0: bool = True,
) -> RefineOutcome:
    """
    Double the class count of ``p``.

    Parameters
    ----------
    g : Graph
    p : Partition
    verdicts : mapping
        ``check_pair`` verdicts keyed by 0-based ``(s, t)``, ``s < t``, for
        every class pair of ``p``.
    seed : int or numpy.random.Generator, optional
        Drives the class visit order and the sparsification halving.
    density_threshold : float, 0.5
        Certificates at least this dense are densified, others sparsified.
    redistribute_c0 : bool, True
        When ``C_0`` outgrows ``eps n``, deal it out over the new classes if
        it holds at least ``2k`` vertices. When False an overgrown ``C_0``
        always makes the outcome irregular.

    Returns
    -------
    RefineOutcome
        ``EXHAUSTED`` when the new classes would hold fewer than two
        vertices (``next`` is ``p`` one generation older). ``IRREGULAR``
        when ``C_0`` outgrows ``eps n`` and cannot be dealt out (fewer than
        ``2k`` vertices, or ``redistribute_c0`` is False). ``REGULAR``
        otherwise, including after a redistribution whose remainder (fewer
        than ``2k`` vertices) still exceeds ``eps n``.

    Notes
    -----
    Paired classes are split certificate by certificate, the larger one
    first, drawing on the union of both complements.
    """
    k, m = p.k, p.class_size
    target = m // 2
    if target < 2:
        return RefineOutcome(
            replace(p, generation=p.generation + 1), RefineStatus.EXHAUSTED
        )

    missing = [(s, t) for s in range(k) for t in range(s + 1, k) if (s, t) not in verdicts]
    if missing:
        raise InvalidArgumentError(f"no verdict for class pairs {missing[:3]}...")

    rng = np.random.default_rng(seed)
    order = tuple(int(s) for s in rng.permutation(k))
    densities = density_matrix(g, p.classes)
    partners = _irregular_partners(k, verdicts)

    consumed: set[int] = set()
    new_classes: list[VertexClass] = []
    trash: list[VertexClass] = [p.c0]

    def unzip(s: int) -> None:
        first, second, leftover = unzip_by_indegree(g, p.classes[s])
        new_classes.extend((first, second))
        if leftover is not None:
            trash.append(np.array([leftover]))

    def split(cert: VertexClass, pool: VertexClass) -> VertexClass:
        if internal_density(g, cert) >= density_threshold:
            result = densification_split(g, cert, pool, target)
        else:
            result = sparsification_split(g, cert, pool, target, rng)
        new_classes.extend((result.first, result.second))
        return result.pool

    for s in order:
        if s in consumed:
            continue
        consumed.add(s)
        candidates = sorted(partners[s] - consumed)
        if not candidates:
            unzip(s)
            continue

        t = max(candidates, key=lambda c: (_score(densities, s, c), -c))
        consumed.add(t)
        verdict = verdicts[(min(s, t), max(s, t))]
        if s < t:
            cert_s, compl_s, cert_t, compl_t = (
                verdict.cert_i, verdict.compl_i, verdict.cert_j, verdict.compl_j
            )
        else:
            cert_s, compl_s, cert_t, compl_t = (
                verdict.cert_j, verdict.compl_j, verdict.cert_i, verdict.compl_i
            )
        logger.debug(
            "pairing classes %d and %d (certificates %d/%d)", s, t, cert_s.size, cert_t.size
        )

        if cert_s.size >= 2 and cert_t.size >= 2:
            if cert_t.size > cert_s.size:
                cert_s, cert_t = cert_t, cert_s
            pool = split(cert_s, np.union1d(compl_s, compl_t))
            pool = split(cert_t, pool)
        elif cert_s.size >= 2:
            unzip(t)
            pool = split(cert_s, compl_s)
        elif cert_t.size >= 2:
            unzip(s)
            pool = split(cert_t, compl_t)
        else:
            unzip(s)
            unzip(t)
            pool = np.empty(0, dtype=np.int64)
        trash.append(pool)

    size = min(c.size for c in new_classes)
    if size < 2:
        return RefineOutcome(
            replace(p, generation=p.generation + 1), RefineStatus.EXHAUSTED, order
        )
    trash.extend(c[size:] for c in new_classes)
    new_classes = [c[:size] for c in new_classes]
    c0 = np.concatenate(trash).astype(np.int64)

    status = RefineStatus.REGULAR
    limit = p.eps * g.n
    if c0.size > limit:
        k2 = len(new_classes)
        if redistribute_c0 and c0.size >= k2:
            share = c0.size // k2
            dealt = rng.permutation(c0)
            new_classes = [
                np.concatenate((c, dealt[i * share : (i + 1) * share]))
                for i, c in enumerate(new_classes)
            ]
            c0 = dealt[k2 * share :]
        else:
            status = RefineStatus.IRREGULAR

    nxt = Partition(
        tuple(np.sort(c) for c in new_classes),
        np.sort(c0),
        p.eps,
        p.generation + 1,
    )
    logger.debug(
        "generation %d: k=%d size=%d |c0|=%d status=%s",
        nxt.generation,
        nxt.k,
        nxt.class_size,
        nxt.c0.size,
        status.value,
    )
    return RefineOutcome(nxt, status, order)


__all__ = [
    "Partition",
    "RefineStatus",
    "RefineOutcome",
    "Split",
    "initial_partition",
    "pair_score",
    "unzip_by_indegree",
    "densification_split",
    "sparsification_split",
    "refine",
]
