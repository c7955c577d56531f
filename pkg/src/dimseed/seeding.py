"""Base seeders (agnostic, CELF, diversity) and gender-targeted swap refinement."""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .community import CommunityAssignment
from .diffusion import WorldSet
from .graph import Gender, SocialGraph, interaction_degrees
from .potential import DEFAULT_ALPHA, gci_table, gpi_all

# slack for float noise in |r - zeta| <= e
_RATIO_EPS = 1e-12


@dataclass(frozen=True)
class SwapConfig:
    k: int = 10
    zeta: float = 0.5
    margin: float = 0.01
    target_gender: Gender = Gender.FEMALE
    n: int = 5
    i_max: int = 20
    alpha: float = DEFAULT_ALPHA
    worlds: int = 10_000
    rng_seed: int = 0
    a_threshold: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if not 0 < self.zeta <= 1:
            raise ValueError("zeta must lie in (0, 1]")
        if self.i_max < 0:
            raise ValueError("i_max must be >= 0")
        if not 0 <= self.a_threshold <= 1:
            raise ValueError("a_threshold must lie in [0, 1]")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")

    def to_json(self) -> dict:
        d = asdict(self)
        d["target_gender"] = self.target_gender.value
        return d


@dataclass(frozen=True)
class SwapStep:
    iteration: int
    gender: Gender  # g_i, the gender favoured by this swap
    removed: int
    added: int
    ratio: float
    spread: float


@dataclass
class SwapResult:
    seeds: list[int]
    ratio: float
    spread: float
    iterations: int
    converged: bool
    trace: list[SwapStep] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "seeds": self.seeds,
            "ratio": self.ratio,
            "spread": self.spread,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [
                {"iteration": s.iteration, "gender": s.gender.value, "out": s.removed,
                 "in": s.added, "ratio": s.ratio, "spread": s.spread}
                for s in self.trace
            ],
        }


def _ids(g: SocialGraph, idx) -> list[int]:
    return [int(g.ids[i]) for i in idx]


def _top_by_degree(deg: np.ndarray, candidates: np.ndarray, k: int) -> np.ndarray:
    # highest degree first, lower index breaks ties
    order = np.lexsort((candidates, -deg[candidates]))
    return candidates[order[:k]]


def seed_agnostic(g: SocialGraph, k: int) -> list[int]:
    """Top-k users by interaction count (sent + received)."""
    if k > g.n_nodes:
        raise ValueError(f"k={k} exceeds the number of nodes {g.n_nodes}")
    return _ids(g, _top_by_degree(interaction_degrees(g), np.arange(g.n_nodes), k))


def celf_indices(ws: WorldSet, k: int) -> list[int]:
    """Lazy greedy on the fixed worlds; same picks as plain greedy, in order."""
    n = ws.graph.n_nodes
    if k > n:
        raise ValueError(f"k={k} exceeds the number of nodes {n}")
    # entries: (-gain, node, size of the seed set the gain was computed for)
    heap = [(-ws.counts([v])[0], v, 0) for v in range(n)]
    heapq.heapify(heap)
    chosen: list[int] = []
    current = 0
    while len(chosen) < k:
        neg, v, fresh = heapq.heappop(heap)
        if fresh == len(chosen):
            chosen.append(v)
            current -= neg
            continue
        gain = ws.counts(chosen + [v])[0] - current
        heapq.heappush(heap, (-gain, v, len(chosen)))
    return chosen


def seed_celf(ws: WorldSet, k: int) -> list[int]:
    return _ids(ws.graph, celf_indices(ws, k))


def _ratio(total: int, target_hits: int) -> float:
    return target_hits / total if total else 0.0


def target_counts(ws: WorldSet, seeds, target: Gender) -> tuple[int, int]:
    total, female = ws.counts(seeds)
    return total, female if target is Gender.FEMALE else total - female


def seed_diversity(g: SocialGraph, ws: WorldSet, k: int, zeta: float, target: Gender = Gender.FEMALE) -> list[int]:
    """Gendered top-degree seeds with the seed mix searched between AN's and zeta.

    Candidate target-gender seed counts run over ceil(lo*k)..ceil(hi*k), where
    [lo, hi] spans zeta and the target share of the agnostic seeds.  The mix
    whose influenced ratio lands closest to zeta wins; ties go to the larger
    spread, then the fewer target-gender seeds.  Mixes that need more nodes of
    one gender than the graph has are skipped.
    """
    deg = interaction_degrees(g)
    an = [g.idx(v) for v in seed_agnostic(g, k)]
    mask = g.gender_mask(target)
    rho_an = mask[an].sum() / k
    lo, hi = min(zeta, rho_an), max(zeta, rho_an)
    t_lo, t_hi = math.ceil(lo * k - 1e-9), math.ceil(hi * k - 1e-9)
    pool_t, pool_o = np.flatnonzero(mask), np.flatnonzero(~mask)
    best, best_key = None, None
    for t in range(t_lo, t_hi + 1):
        if t > len(pool_t) or k - t > len(pool_o):
            continue
        seeds = np.concatenate([_top_by_degree(deg, pool_t, t), _top_by_degree(deg, pool_o, k - t)])
        total, hits = target_counts(ws, seeds, target)
        key = (abs(_ratio(total, hits) - zeta), -total, t)
        if best_key is None or key < best_key:
            best, best_key = seeds, key
    if best is None:
        raise ValueError(f"no feasible gender mix for k={k} between {t_lo} and {t_hi} target-gender seeds")
    return _ids(g, np.sort(best))


def _pick(values: np.ndarray, candidates: np.ndarray, n: int, highest: bool) -> np.ndarray:
    v = values[candidates]
    order = np.lexsort((candidates, -v if highest else v))
    return candidates[order[:n]]


def swap_refine(g: SocialGraph, a: CommunityAssignment, ws: WorldSet, S0, cfg: SwapConfig) -> SwapResult:
    """Iteratively exchange one seed for one non-seed until the ratio is within margin.

    Each round favours the target gender when the influenced ratio is below
    zeta and the other gender otherwise.  The n seeds with the lowest GPI on
    that gender are paired with the n non-seeds with the highest GPI, and the
    pair giving the largest spread on the favoured gender is applied.  The
    set closest to zeta seen along the way is returned.
    """
    k = cfg.k
    seeds = [g.idx(v) for v in S0]
    if len(set(seeds)) != k:
        raise ValueError(f"initial seed set must hold exactly k={k} distinct nodes, got {len(set(seeds))}")
    n = cfg.n
    if n > k or n > g.n_nodes - k:
        n = max(1, min(k, g.n_nodes - k))
        warnings.warn(f"n={cfg.n} infeasible for k={k}, |V|={g.n_nodes}; using n={n}", stacklevel=2)
    target = cfg.target_gender
    gci_values = {gen: gci_table(g, a, gen, cfg.alpha).value for gen in Gender}

    def within(r: float) -> bool:
        return abs(r - cfg.zeta) <= cfg.margin + _RATIO_EPS

    current = sorted(seeds)
    total, hits = target_counts(ws, current, target)
    r = _ratio(total, hits)
    best = (abs(r - cfg.zeta), -total, list(current), r, total)
    trace: list[SwapStep] = []

    for i in range(1, cfg.i_max + 1):
        if within(r) or g.n_nodes == k:
            break
        favoured = target if r < cfg.zeta else target.other()
        freq = ws.frequency(current)
        influenced = freq >= cfg.a_threshold
        influenced[current] = True
        pot = gpi_all(g, gci_values[favoured], favoured, influenced)

        in_seed = np.zeros(g.n_nodes, dtype=bool)
        in_seed[current] = True
        outs = _pick(pot, np.flatnonzero(in_seed), n, highest=False)
        ins = _pick(pot, np.flatnonzero(~in_seed), n, highest=True)

        choice = None
        for o in sorted(outs.tolist()):
            rest = [s for s in current if s != o]
            for w in sorted(ins.tolist()):
                t2, h2 = target_counts(ws, rest + [w], target)
                on_favoured = h2 if favoured is target else t2 - h2
                key = (-on_favoured, -t2, int(g.ids[o]), int(g.ids[w]))
                if choice is None or key < choice[0]:
                    choice = (key, o, w, t2, h2)
        _, o, w, total, hits = choice
        current = sorted([s for s in current if s != o] + [w])
        r = _ratio(total, hits)
        trace.append(SwapStep(iteration=i, gender=favoured, removed=int(g.ids[o]), added=int(g.ids[w]),
                              ratio=r, spread=total / ws.R))
        cand = (abs(r - cfg.zeta), -total, list(current), r, total)
        if cand[:2] < best[:2]:
            best = cand

    _, _, chosen, r_best, total_best = best
    return SwapResult(seeds=_ids(g, chosen), ratio=r_best, spread=total_best / ws.R,
                      iterations=len(trace), converged=within(r_best), trace=trace)
