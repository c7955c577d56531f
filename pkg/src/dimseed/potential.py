"""Gender-aware community influence (GCI) and potential influence (GPI).

For a node v and gender g:

    GCI_g(v) = U_g(v) + D_g(v)                    if v is a core user
             = alpha * AU_g(v) + D_g(v) + C_g(v)  otherwise

    GPI_g(v) = sum of b_vw * GCI_g(w) over out-neighbours w of gender g
               that are not yet influenced.

U counts g-members of v's community (v included), D counts v's g-gender
out-neighbours, and AU / C are the mean g-count and the summed g-share over
the foreign communities v sends at least one edge to.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import CommunityAssignment, boundary_mask
from .graph import Gender, SocialGraph

DEFAULT_ALPHA = 1.0 / 3.0


@dataclass(frozen=True)
class GciBreakdown:
    U: float
    D: float
    AU: float
    C: float
    alpha: float
    is_core: bool

    @property
    def value(self) -> float:
        if self.is_core:
            return self.U + self.D
        return self.alpha * self.AU + self.D + self.C


@dataclass(frozen=True, eq=False)
class GciTable:
    """All four GCI terms for every node, for one gender."""

    gender: Gender
    alpha: float
    U: np.ndarray
    D: np.ndarray
    AU: np.ndarray
    C: np.ndarray
    is_core: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return np.where(self.is_core, self.U + self.D, self.alpha * self.AU + self.D + self.C)

    def breakdown(self, i: int) -> GciBreakdown:
        return GciBreakdown(U=float(self.U[i]), D=float(self.D[i]), AU=float(self.AU[i]),
                            C=float(self.C[i]), alpha=self.alpha, is_core=bool(self.is_core[i]))


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def gci_table(g: SocialGraph, a: CommunityAssignment, gender: Gender, alpha: float = DEFAULT_ALPHA) -> GciTable:
    _check_alpha(alpha)
    n = g.n_nodes
    of_g = g.gender_mask(gender)
    comm_g = a.females if gender is Gender.FEMALE else a.males
    sizes = a.sizes

    U = comm_g[a.membership].astype(np.float64)
    D = np.bincount(g.src, weights=of_g[g.dst].astype(np.float64), minlength=n)

    cs, cd = a.membership[g.src], a.membership[g.dst]
    cross = cs != cd
    # distinct (node, foreign community) pairs reached by out-edges
    pairs = np.unique(np.stack([g.src[cross], cd[cross]], axis=1), axis=0) if cross.any() else np.empty((0, 2), np.int64)
    k = np.bincount(pairs[:, 0], minlength=n).astype(np.float64)
    g_sum = np.bincount(pairs[:, 0], weights=comm_g[pairs[:, 1]], minlength=n)
    share_sum = np.bincount(pairs[:, 0], weights=comm_g[pairs[:, 1]] / sizes[pairs[:, 1]], minlength=n)
    AU = np.divide(g_sum, k, out=np.zeros(n), where=k > 0)

    return GciTable(gender=gender, alpha=alpha, U=U, D=D, AU=AU, C=share_sum,
                    is_core=~boundary_mask(g, a))


def gci(g: SocialGraph, a: CommunityAssignment, v: int, gender: Gender, alpha: float = DEFAULT_ALPHA) -> GciBreakdown:
    i = g.idx(v)
    return gci_table(g, a, gender, alpha).breakdown(i)


def gpi_all(g: SocialGraph, gci_values: np.ndarray, gender: Gender, influenced: np.ndarray | None = None) -> np.ndarray:
    """GPI of every node given precomputed GCI values for ``gender``.

    ``influenced`` is a boolean mask over node indices (the set A).
    """
    keep = g.gender_mask(gender)[g.dst]
    if influenced is not None:
        keep = keep & ~influenced[g.dst]
    contrib = np.where(keep, g.b * gci_values[g.dst], 0.0)
    return np.bincount(g.src, weights=contrib, minlength=g.n_nodes)


def gpi(g: SocialGraph, a: CommunityAssignment, v: int, gender: Gender, A=(), alpha: float = DEFAULT_ALPHA) -> float:
    i = g.idx(v)
    mask = np.zeros(g.n_nodes, dtype=bool)
    for w in A:
        mask[g.idx(w)] = True
    values = gci_table(g, a, gender, alpha).value
    return float(gpi_all(g, values, gender, mask)[i])
