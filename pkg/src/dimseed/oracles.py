"""Brute-force reference implementations and randomized cross-checks.

The routines here deliberately avoid the vectorised kernels they check:
greedy uses per-world Python-int bitsets built by plain DFS, and the IC
expectation comes from full enumeration.
"""
from __future__ import annotations

import numpy as np

from .community import CommunityAssignment
from .diffusion import WorldSet, estimate_spread, exact_spread, sample_worlds
from .graph import Gender, SocialGraph, normalize_weights
from .potential import gci_table, gpi_all
from .seeding import celf_indices


def random_graph(rng: np.random.Generator, n_nodes: int, n_edges: int, random_b: bool = True) -> SocialGraph:
    """Random simple digraph; b uniform in (0, 1] or count-normalised."""
    pairs = [(s, d) for s in range(n_nodes) for d in range(n_nodes) if s != d]
    n_edges = min(n_edges, len(pairs))
    chosen = rng.choice(len(pairs), size=n_edges, replace=False) if n_edges else []
    edges = [(pairs[j][0], pairs[j][1], int(rng.integers(1, 5))) for j in sorted(chosen)]
    nodes = [(v, Gender.FEMALE if rng.random() < 0.5 else Gender.MALE) for v in range(n_nodes)]
    if random_b:
        b = 1.0 - rng.random(len(edges))  # (0, 1]
        return SocialGraph.from_records(nodes, edges, b=b)
    return normalize_weights(SocialGraph.from_records(nodes, edges))


# -- diffusion -----------------------------------------------------------

def check_mc_vs_exact(seed: int, R: int = 10_000, max_edges: int = 12) -> tuple[bool, str]:
    """Estimated spread within 4 summed binomial standard errors of the exact value."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    g = random_graph(rng, n, int(rng.integers(0, max_edges + 1)))
    seeds = sorted(rng.choice(n, size=int(rng.integers(1, min(3, n) + 1)), replace=False).tolist())
    exact = exact_spread(g, seeds)
    est = estimate_spread(sample_worlds(g, R, seed), seeds)
    p = np.array([exact.frequency[int(v)] for v in g.ids])
    se = np.sqrt(np.clip(p * (1 - p), 0, None) / R)
    checks = [("total", exact.spread, est.spread, se.sum())]
    for gen in Gender:
        mask = g.gender_mask(gen)
        checks.append((gen.value, exact.spread_by_gender[gen], est.spread_by_gender[gen], se[mask].sum()))
    for name, want, got, sigma in checks:
        if abs(got - want) > 4 * sigma + 1e-9:
            return False, f"{name}: estimate {got:.5f} vs exact {want:.5f} (4 sigma = {4 * sigma:.5f})"
    return True, f"{g.n_edges} edges, spread {exact.spread:.4f}"


# -- greedy --------------------------------------------------------------

def world_reach_sets(ws: WorldSet) -> list[list[int]]:
    """Per world, per node: bitmask (Python int) of nodes reachable by DFS."""
    g = ws.graph
    n = g.n_nodes
    out = []
    for j in range(ws.R):
        adj = [[] for _ in range(n)]
        for e in np.flatnonzero(ws.live[j]):
            adj[int(g.src[e])].append(int(g.dst[e]))
        rows = []
        for v in range(n):
            seen = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            rows.append(sum(1 << w for w in seen))
        out.append(rows)
    return out


def naive_greedy(ws: WorldSet, k: int) -> list[int]:
    """Plain greedy on summed reach; ties to the lower node index."""
    reach = world_reach_sets(ws)
    n = ws.graph.n_nodes
    cover = [0] * ws.R
    chosen: list[int] = []
    base = 0
    for _ in range(k):
        best, best_gain = None, -1
        for v in range(n):
            if v in chosen:
                continue
            total = sum(bin(c | reach[j][v]).count("1") for j, c in enumerate(cover))
            if total - base > best_gain:
                best, best_gain = v, total - base
        chosen.append(best)
        cover = [c | reach[j][best] for j, c in enumerate(cover)]
        base += best_gain
    return chosen


def check_celf_vs_greedy(seed: int, R: int = 200) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 41))
    g = random_graph(rng, n, int(rng.integers(n, 4 * n)), random_b=bool(rng.random() < 0.5))
    k = int(rng.integers(1, min(5, n) + 1))
    ws = sample_worlds(g, R, seed)
    lazy = celf_indices(ws, k)
    plain = naive_greedy(ws, k)
    if lazy != plain:
        return False, f"celf {lazy} != greedy {plain}"
    return True, f"|V|={n}, k={k}"


# -- potential -----------------------------------------------------------

def random_assignment(rng: np.random.Generator, g: SocialGraph) -> CommunityAssignment:
    n_comm = int(rng.integers(1, max(2, g.n_nodes // 3) + 1))
    return CommunityAssignment.from_labels(g, rng.integers(0, n_comm, size=g.n_nodes))


def check_gpi_monotone(seed: int) -> tuple[bool, str]:
    """GPI never grows when the influenced set grows."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 30))
    g = random_graph(rng, n, int(rng.integers(0, 3 * n)), random_b=False)
    a = random_assignment(rng, g)
    small = rng.random(n) < 0.3
    large = small | (rng.random(n) < 0.3)
    for gen in Gender:
        values = gci_table(g, a, gen, alpha=float(1.0 - rng.random())).value
        before = gpi_all(g, values, gen, small)
        after = gpi_all(g, values, gen, large)
        bad = np.flatnonzero(after > before + 1e-9)
        if bad.size:
            v = int(g.ids[bad[0]])
            return False, f"node {v} gender {gen.value}: {after[bad[0]]} > {before[bad[0]]}"
    return True, f"|V|={n}"

