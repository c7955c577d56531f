"""Gendered stochastic block model generator."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Gender, SocialGraph, normalize_weights


@dataclass(frozen=True)
class SbmSpec:
    """Block sizes, per-block gender shares and probability ranges.

    ``ratios[c]`` is the share of ``ratio_gender`` members in block c.  The
    default instance lists its shares for males: that is the only reading
    under which the four blocks add up to 60 males and 40 females.
    """

    sizes: tuple[int, ...] = (28, 20, 22, 30)
    ratios: tuple[float, ...] = (0.8, 0.5, 0.25, 0.75)
    ratio_gender: Gender = Gender.MALE
    intra: tuple[float, float] = (0.7, 0.8)
    inter: tuple[float, float] = (0.01, 0.03)
    rng_seed: int = 0

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("at least one community required")
        if len(self.ratios) != len(self.sizes):
            raise ValueError("sizes and ratios differ in length")
        if sum(self.sizes) == 0:
            raise ValueError("empty graph: all community sizes are 0")
        if any(s < 1 for s in self.sizes):
            raise ValueError("community sizes must be >= 1")
        for name, (lo, hi) in (("intra", self.intra), ("inter", self.inter)):
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"{name} range {(lo, hi)} not an ordered sub-range of [0, 1]")
        if any(not 0.0 <= r <= 1.0 for r in self.ratios):
            raise ValueError("ratios must lie in [0, 1]")

    def to_json(self) -> dict:
        d = asdict(self)
        d["ratio_gender"] = self.ratio_gender.value
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SbmSpec":
        d = dict(d)
        if "ratio_gender" in d:
            d["ratio_gender"] = Gender.parse(d["ratio_gender"])
        for key in ("sizes", "ratios", "intra", "inter"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class SbmSample:
    graph: SocialGraph
    truth: np.ndarray  # block index per node index
    probabilities: np.ndarray  # (C, C) drawn per ordered block pair
    gender_counts: list[tuple[int, int]] = field(default_factory=list)  # (males, females) per block
    rounding: str = "largest-remainder"

    def meta(self, spec: SbmSpec) -> dict:
        return {
            "spec": spec.to_json(),
            "rng_seed": spec.rng_seed,
            "probabilities": self.probabilities.tolist(),
            "gender_counts": [{"males": m, "females": f} for m, f in self.gender_counts],
            "rounding": self.rounding,
        }


def apportion(sizes, ratios) -> list[int]:
    """Integer member counts per block whose total is the rounded expected total.

    Each block gets floor(size * ratio); the remaining units go to the largest
    fractional remainders, ties to the lower block index.  This is plain
    half-up rounding whenever that already hits the rounded total.
    """
    exact = [s * r for s, r in zip(sizes, ratios)]
    base = [int(np.floor(x + 1e-9)) for x in exact]
    target = int(np.floor(sum(exact) + 0.5 + 1e-9))
    rem = [x - b for x, b in zip(exact, base)]
    order = sorted(range(len(sizes)), key=lambda c: (-round(rem[c], 9), c))
    for c in order[: max(0, target - sum(base))]:
        base[c] += 1
    return [min(b, s) for b, s in zip(base, sizes)]


def generate_sbm(spec: SbmSpec) -> SbmSample:
    """Draw one graph; deterministic in ``spec.rng_seed``.

    One probability is drawn per ordered block pair, then every ordered node
    pair of that block pair gets an edge with that probability.  Edges carry a
    single interaction, so b_vw = 1 / in-degree(w) after normalisation.
    """
    rng = np.random.default_rng(spec.rng_seed)
    sizes = list(spec.sizes)
    n_blocks = len(sizes)
    counted = apportion(sizes, spec.ratios)
    if spec.ratio_gender is Gender.FEMALE:
        females = counted
    else:
        females = [s - m for s, m in zip(sizes, counted)]

    probs = np.empty((n_blocks, n_blocks))
    for c in range(n_blocks):
        for d in range(n_blocks):
            lo, hi = spec.intra if c == d else spec.inter
            probs[c, d] = rng.uniform(lo, hi)

    truth = np.repeat(np.arange(n_blocks), sizes)
    is_female = np.zeros(len(truth), dtype=bool)
    start = 0
    for size, f in zip(sizes, females):
        # random positions so that id order carries no gender signal
        is_female[start + rng.permutation(size)[:f]] = True
        start += size

    n = len(truth)
    p = probs[truth[:, None], truth[None, :]]
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)  # row-major, already sorted by (src, dst)
    g = SocialGraph(ids=np.arange(n, dtype=np.int64), is_female=is_female,
                    src=src.astype(np.int64), dst=dst.astype(np.int64),
                    count=np.ones(len(src), dtype=np.int64), b=np.zeros(len(src)))
    g = normalize_weights(g)
    counts = [(s - f, f) for s, f in zip(sizes, females)]
    return SbmSample(graph=g, truth=truth, probabilities=probs, gender_counts=counts)
