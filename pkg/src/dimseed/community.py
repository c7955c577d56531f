"""Community detection, gender-dominance classification and the community graph.

Detection maximises modularity on the undirected graph whose edge weight is
the sum of both directed interaction counts.  The optimiser follows the
Leiden scheme (fast local moving, refinement inside each community,
aggregation on the refined partition) and finishes with plain node-level
moves on the original graph until no single move improves modularity.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .graph import SocialGraph


class CommunityType(str, Enum):
    MALE_DOMINANT = "Male"
    FEMALE_DOMINANT = "Female"
    EVEN = "Even"


def classify_community(males: int, females: int) -> CommunityType:
    if males < 0 or females < 0:
        raise ValueError("counts must be non-negative")
    if males == 0 and females == 0:
        raise ValueError("cannot classify an empty community")
    if males > 2 * females:
        return CommunityType.MALE_DOMINANT
    if females > 2 * males:
        return CommunityType.FEMALE_DOMINANT
    return CommunityType.EVEN


@dataclass(frozen=True, eq=False)
class CommunityAssignment:
    """Partition of node indices into communities 0..C-1.

    Community ids are ordered by their smallest member id.
    """

    membership: np.ndarray  # (N,) community per node index
    males: np.ndarray  # (C,)
    females: np.ndarray  # (C,)

    @classmethod
    def from_labels(cls, g: SocialGraph, labels) -> "CommunityAssignment":
        labels = np.asarray(labels)
        if labels.shape != (g.n_nodes,):
            raise ValueError("one label per node required")
        # relabel by first occurrence, i.e. by smallest member index
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        membership = rank[inverse]
        c = len(first)
        females = np.bincount(membership, weights=g.is_female, minlength=c).astype(np.int64)
        sizes = np.bincount(membership, minlength=c)
        return cls(membership=membership, males=sizes - females, females=females)

    @property
    def n_communities(self) -> int:
        return len(self.males)

    @property
    def sizes(self) -> np.ndarray:
        return self.males + self.females

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.membership == c)

    def community_type(self, c: int) -> CommunityType:
        return classify_community(int(self.males[c]), int(self.females[c]))

    def types(self) -> list[CommunityType]:
        return [self.community_type(c) for c in range(self.n_communities)]

    def community_of(self, g: SocialGraph, node_id: int) -> int:
        return int(self.membership[g.idx(node_id)])


def boundary_mask(g: SocialGraph, a: CommunityAssignment) -> np.ndarray:
    """True for nodes with at least one cross-community edge in either direction."""
    cross = a.membership[g.src] != a.membership[g.dst]
    mask = np.zeros(g.n_nodes, dtype=bool)
    mask[g.src[cross]] = True
    mask[g.dst[cross]] = True
    return mask


def is_boundary_user(g: SocialGraph, a: CommunityAssignment, v: int) -> bool:
    return bool(boundary_mask(g, a)[g.idx(v)])


# -- modularity -----------------------------------------------------------

def symmetrized_adjacency(g: SocialGraph) -> sp.csr_matrix:
    n = g.n_nodes
    a = sp.coo_matrix((g.count.astype(np.float64), (g.src, g.dst)), shape=(n, n)).tocsr()
    return (a + a.T).tocsr()


def modularity(adj: sp.csr_matrix, labels, resolution: float = 1.0) -> float:
    """Newman modularity of ``labels`` on a symmetric weighted adjacency."""
    labels = np.asarray(labels)
    k = np.asarray(adj.sum(axis=1)).ravel()
    two_m = k.sum()
    if two_m == 0:
        return 0.0
    coo = adj.tocoo()
    internal = coo.data[labels[coo.row] == labels[coo.col]].sum()
    tot = np.bincount(labels, weights=k)
    return float(internal / two_m - resolution * np.sum(tot ** 2) / two_m ** 2)


class _Level:
    """One (possibly aggregated) graph: CSR adjacency plus node strengths."""

    def __init__(self, adj: sp.csr_matrix):
        self.adj = adj
        self.indptr, self.indices, self.data = adj.indptr, adj.indices, adj.data
        self.k = np.asarray(adj.sum(axis=1)).ravel()
        self.n = adj.shape[0]

    def neighbours(self, v):
        lo, hi = self.indptr[v], self.indptr[v + 1]
        nb, w = self.indices[lo:hi], self.data[lo:hi]
        keep = nb != v
        return nb[keep], w[keep]


def _weights_by_comm(nb, w, part):
    """Sum of edge weight from a node into each neighbouring community."""
    acc: dict[int, float] = {}
    for c, x in zip(part[nb].tolist(), w.tolist()):
        acc[c] = acc.get(c, 0.0) + x
    return acc


def _move_nodes(lv: _Level, part: np.ndarray, gamma: float, two_m: float, rng) -> bool:
    """Queue-based local moving; returns True if any node changed community.

    Gains are scaled by 2m so that integer weights give exact comparisons.
    Ties go to the lowest community id; a node only leaves its community for a
    strictly better one.
    """
    n = lv.n
    tot = np.bincount(part, weights=lv.k, minlength=n)
    sizes = np.bincount(part, minlength=n)
    empty = np.flatnonzero(sizes == 0).tolist()
    heapq.heapify(empty)
    queue = deque(rng.permutation(n).tolist())
    queued = np.ones(n, dtype=bool)
    moved = False
    while queue:
        v = queue.popleft()
        queued[v] = False
        cv = int(part[v])
        kv = lv.k[v]
        nb, w = lv.neighbours(v)
        wc = _weights_by_comm(nb, w, part)
        tot[cv] -= kv
        best = cv
        best_gain = two_m * wc.get(cv, 0.0) - gamma * kv * tot[cv]
        for c in sorted(wc):
            if c == cv:
                continue
            gain = two_m * wc[c] - gamma * kv * tot[c]
            if gain > best_gain + 1e-9:
                best, best_gain = c, gain
        if best_gain < -1e-9 and sizes[cv] > 1 and empty:
            best = heapq.heappop(empty)  # leaving alone beats every option
        if best != cv:
            sizes[cv] -= 1
            sizes[best] += 1
            if sizes[cv] == 0:
                heapq.heappush(empty, cv)
            part[v] = best
            moved = True
            for u in nb.tolist():
                if part[u] != best and not queued[u]:
                    queue.append(u)
                    queued[u] = True
        tot[best] += kv
    return moved


def _refine(lv: _Level, part: np.ndarray, gamma: float, two_m: float, rng) -> np.ndarray:
    """Split each community into well-connected sub-communities.

    Starts from singletons and greedily merges singleton nodes into the
    sub-community of the same parent community with the largest positive
    gain (deterministic limit of the randomised Leiden merge).
    """
    n = lv.n
    refined = np.arange(n)
    r_tot = lv.k.astype(np.float64).copy()
    r_size = np.ones(n, dtype=np.int64)
    comm_tot = np.bincount(part, weights=lv.k, minlength=n)
    # weight from each node / sub-community to the rest of its parent community
    ext = np.zeros(n)
    for v in range(n):
        nb, w = lv.neighbours(v)
        ext[v] = w[part[nb] == part[v]].sum()
    r_ext = ext.copy()

    for v in rng.permutation(n).tolist():
        if r_size[refined[v]] != 1:
            continue
        cp = part[v]
        kv = lv.k[v]
        if ext[v] * two_m < gamma * kv * (comm_tot[cp] - kv):
            continue
        nb, w = lv.neighbours(v)
        same = part[nb] == cp
        wr = _weights_by_comm(nb[same], w[same], refined)
        best, best_gain = None, 0.0
        for t in sorted(wr):
            if t == refined[v]:
                continue
            if r_ext[t] * two_m < gamma * r_tot[t] * (comm_tot[cp] - r_tot[t]):
                continue
            gain = two_m * wr[t] - gamma * kv * r_tot[t]
            if gain > best_gain + 1e-9:
                best, best_gain = t, gain
        if best is None:
            continue
        old = refined[v]
        refined[v] = best
        r_size[old] -= 1
        r_size[best] += 1
        r_tot[old] -= kv
        r_tot[best] += kv
        r_ext[best] = r_ext[best] + ext[v] - 2.0 * wr[best]
        r_ext[old] = 0.0
    return refined


def _relabel(labels: np.ndarray) -> np.ndarray:
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def _aggregate(adj: sp.csr_matrix, labels: np.ndarray) -> sp.csr_matrix:
    n, c = adj.shape[0], labels.max() + 1
    p = sp.csr_matrix((np.ones(n), (np.arange(n), labels)), shape=(n, c))
    return (p.T @ adj @ p).tocsr()


def _leiden(adj: sp.csr_matrix, init: np.ndarray, gamma: float, rng) -> np.ndarray:
    two_m = float(adj.sum())
    node_to_agg = np.arange(adj.shape[0])
    part = init.copy()
    lv = _Level(adj)
    while True:
        _move_nodes(lv, part, gamma, two_m, rng)
        part = _relabel(part)
        if part.max() + 1 == lv.n:
            break
        refined = _relabel(_refine(lv, part, gamma, two_m, rng))
        if refined.max() + 1 == lv.n:
            refined = part  # refinement merged nothing; aggregate on the partition itself
        # parent community of each refined sub-community
        parent = np.zeros(refined.max() + 1, dtype=np.int64)
        parent[refined] = part
        node_to_agg = refined[node_to_agg]
        lv = _Level(_aggregate(lv.adj, refined))
        part = parent
    return part[node_to_agg]


def detect_communities(g: SocialGraph, resolution: float = 1.0, rng_seed: int = 0,
                       max_rounds: int = 100) -> CommunityAssignment:
    if g.n_nodes == 0:
        raise ValueError("graph is empty")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    adj = symmetrized_adjacency(g)
    if adj.nnz == 0:
        return CommunityAssignment.from_labels(g, np.arange(g.n_nodes))
    rng = np.random.default_rng(rng_seed)
    two_m = float(adj.sum())
    labels = np.arange(g.n_nodes)
    base = _Level(adj)
    for _ in range(max_rounds):
        labels = _leiden(adj, labels, resolution, rng)
        # polish: single-node moves on the original graph
        if not _move_nodes(base, labels, resolution, two_m, rng):
            break
        labels = _relabel(labels)
    return CommunityAssignment.from_labels(g, labels)


# -- community-level graph -----------------------------------------------

@dataclass(frozen=True, eq=False)
class CommunityGraph:
    weights: np.ndarray  # (C, C) int64, zero diagonal

    @property
    def n_communities(self) -> int:
        return self.weights.shape[0]

    def edges(self):
        for c, d in zip(*np.nonzero(self.weights)):
            yield int(c), int(d), int(self.weights[c, d])


def build_community_graph(g: SocialGraph, a: CommunityAssignment) -> CommunityGraph:
    c = a.n_communities
    cs, cd = a.membership[g.src], a.membership[g.dst]
    cross = cs != cd
    w = np.zeros((c, c), dtype=np.int64)
    np.add.at(w, (cs[cross], cd[cross]), g.count[cross])
    return CommunityGraph(weights=w)


def pagerank(cg: CommunityGraph, damping: float = 0.85, tolerance: float = 1e-10,
             max_iter: int = 100_000) -> dict[int, float]:
    """Weighted PageRank by power iteration; dangling mass is spread uniformly."""
    n = cg.n_communities
    if n == 0:
        raise ValueError("community graph is empty")
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    w = cg.weights.astype(np.float64)
    out = w.sum(axis=1)
    dangling = out == 0
    trans = np.divide(w, out[:, None], out=np.zeros_like(w), where=~dangling[:, None])
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = damping * (x @ trans + x[dangling].sum() / n) + (1.0 - damping) / n
        new /= new.sum()
        delta = np.abs(new - x).sum()
        x = new
        if delta < tolerance:
            break
    return {c: float(x[c]) for c in range(n)}
