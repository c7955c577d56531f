"""Descriptive statistics on gendered communities.

All functions are read-only over a graph and its community assignment and
return plain dictionaries that the CLI writes out as CSV.
"""
from __future__ import annotations

import math

import numpy as np

from .community import CommunityAssignment, CommunityType
from .graph import SocialGraph

TYPES = (CommunityType.MALE_DOMINANT, CommunityType.FEMALE_DOMINANT, CommunityType.EVEN)
INTRA = "intra"


def interaction_mix(g: SocialGraph, a: CommunityAssignment) -> dict[CommunityType, dict[str, float]]:
    """Share of interactions sent by each community type, by destination.

    Row keys are source types that send at least one interaction.  Columns
    are ``"intra"`` (same community) plus one column per destination type for
    interactions landing in a different community.  Rows sum to one.
    """
    types = a.types()
    ctype = np.array([TYPES.index(t) for t in types], dtype=np.int64)
    cs, cd = a.membership[g.src], a.membership[g.dst]
    out: dict[CommunityType, dict[str, float]] = {}
    for ti, t in enumerate(TYPES):
        rows = ctype[cs] == ti
        total = g.count[rows].sum()
        if total == 0:
            continue
        intra = rows & (cs == cd)
        row = {INTRA: float(g.count[intra].sum() / total)}
        for tj, u in enumerate(TYPES):
            sel = rows & (cs != cd) & (ctype[cd] == tj)
            row[u.value] = float(g.count[sel].sum() / total)
        out[t] = row
    return out


def inter_type_mix(g: SocialGraph, a: CommunityAssignment) -> dict[CommunityType, dict[str, float]]:
    """Destination-type distribution of cross-community interactions only."""
    mix = interaction_mix(g, a)
    out = {}
    for t, row in mix.items():
        cross = 1.0 - row[INTRA]
        if cross <= 0:
            continue
        out[t] = {u.value: row[u.value] / cross for u in TYPES}
    return out


def intra_interaction_counts(g: SocialGraph, a: CommunityAssignment) -> np.ndarray:
    """Sent + received interactions with members of one's own community."""
    same = a.membership[g.src] == a.membership[g.dst]
    w = np.where(same, g.count, 0)
    n = g.n_nodes
    return np.bincount(g.src, weights=w, minlength=n) + np.bincount(g.dst, weights=w, minlength=n)


def top_ranked_gender_share(g: SocialGraph, a: CommunityAssignment, pct: float) -> dict[CommunityType, float]:
    """Mean female share among each community's top ``pct`` intra-community interactors.

    Each community contributes ceil(pct * size) users; the per-community
    shares are averaged within each community type.
    """
    if not 0 < pct <= 1:
        raise ValueError("pct must lie in (0, 1]")
    score = intra_interaction_counts(g, a)
    shares: dict[CommunityType, list[float]] = {}
    for c in range(a.n_communities):
        members = a.members(c)
        take = math.ceil(pct * len(members) - 1e-9)
        top = members[np.lexsort((members, -score[members]))[:take]]
        shares.setdefault(a.community_type(c), []).append(float(g.is_female[top].mean()))
    return {t: float(np.mean(v)) for t, v in shares.items()}


def pagerank_ccdf(scores: dict[int, float], grouping: dict[int, CommunityType]) -> dict[CommunityType, list[tuple[float, float]]]:
    """Per type, ascending distinct scores x with the fraction of communities scoring >= x."""
    out = {}
    for t in TYPES:
        vals = np.sort([s for c, s in scores.items() if grouping[c] is t])
        if vals.size == 0:
            continue
        xs = np.unique(vals)
        ccdf = 1.0 - np.searchsorted(vals, xs, side="left") / vals.size
        out[t] = [(float(x), float(y)) for x, y in zip(xs, ccdf)]
    return out
