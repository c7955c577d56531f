"""Community structure of one SBM sample: recovery, gender mix and reach.

    python scripts/community_report.py --rng-seed 0
"""
import argparse

import numpy as np

from dimseed.analysis import INTRA, interaction_mix, pagerank_ccdf, top_ranked_gender_share
from dimseed.community import (CommunityAssignment, build_community_graph, detect_communities, modularity, pagerank,
                               symmetrized_adjacency)
from dimseed.synthgen import SbmSpec, generate_sbm


def pair_agreement(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of node pairs on which two partitions agree (Rand index)."""
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(len(a), 1)
    return float((same_a == same_b)[iu].mean())


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--resolution", type=float, default=1.0)
    args = p.parse_args()

    sample = generate_sbm(SbmSpec(rng_seed=args.rng_seed))
    g = sample.graph
    a = detect_communities(g, args.resolution, args.rng_seed)
    truth = CommunityAssignment.from_labels(g, sample.truth)
    adj = symmetrized_adjacency(g)
    print(f"{g.n_nodes} nodes, {g.n_edges} edges, {int(g.is_female.sum())} female")
    print(f"detected {a.n_communities} communities, modularity {modularity(adj, a.membership):.4f} "
          f"(ground truth {modularity(adj, truth.membership):.4f}), Rand index {pair_agreement(a.membership, truth.membership):.4f}")
    for c in range(a.n_communities):
        print(f"  community {c}: {a.males[c]:>3} M {a.females[c]:>3} F  {a.community_type(c).value}")

    print("\ninteraction share by sender community type")
    for t, row in interaction_mix(g, a).items():
        cells = "  ".join(f"{k}={v:.3f}" for k, v in row.items() if k != INTRA)
        print(f"  {t.value:>6}: intra={row[INTRA]:.3f}  {cells}")

    for pct in (0.05, 0.10):
        shares = top_ranked_gender_share(g, a, pct)
        print(f"female share among top {pct:.0%}: " + ", ".join(f"{t.value}={s:.3f}" for t, s in shares.items()))

    scores = pagerank(build_community_graph(g, a))
    print("\nPageRank CCDF per community type")
    for t, pts in pagerank_ccdf(scores, dict(enumerate(a.types()))).items():
        print(f"  {t.value:>6}: " + ", ".join(f"{x:.4f}->{y:.2f}" for x, y in pts))


if __name__ == "__main__":
    main()
