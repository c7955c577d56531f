"""Gendered social-interaction graph, CSV ingestion and IC edge weights.

Nodes are stored in ascending id order so that "lower node id" tie-breaks
are the same as lower internal index.  Edges are stored sorted by
(source, destination) which gives a CSR view of the out-neighbourhoods for
free; the in-neighbourhoods use a separate permutation.
"""
from __future__ import annotations

import csv
import dataclasses
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np


class GraphFormatError(ValueError):
    """Malformed or inconsistent node/edge input."""


class InvariantViolation(RuntimeError):
    """An internal invariant does not hold (corrupt data or a bug)."""


class Gender(str, Enum):
    MALE = "M"
    FEMALE = "F"

    @classmethod
    def parse(cls, token: str) -> "Gender":
        t = token.strip().upper()
        if t == "M":
            return cls.MALE
        if t == "F":
            return cls.FEMALE
        raise GraphFormatError(f"unknown gender token {token!r}")

    def other(self) -> "Gender":
        return Gender.FEMALE if self is Gender.MALE else Gender.MALE


@dataclass(frozen=True, eq=False)
class SocialGraph:
    ids: np.ndarray  # (N,) int64, strictly increasing
    is_female: np.ndarray  # (N,) bool
    src: np.ndarray  # (E,) node index, edges sorted by (src, dst)
    dst: np.ndarray
    count: np.ndarray  # (E,) int64 >= 1
    b: np.ndarray  # (E,) float64 influence probabilities
    normalized: bool = False
    out_ptr: np.ndarray = field(init=False, repr=False)
    in_order: np.ndarray = field(init=False, repr=False)
    in_ptr: np.ndarray = field(init=False, repr=False)
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.ids)
        set_ = object.__setattr__
        set_(self, "out_ptr", np.concatenate([[0], np.cumsum(np.bincount(self.src, minlength=n))]).astype(np.int64))
        order = np.lexsort((self.src, self.dst))
        set_(self, "in_order", order.astype(np.int64))
        set_(self, "in_ptr", np.concatenate([[0], np.cumsum(np.bincount(self.dst, minlength=n))]).astype(np.int64))
        set_(self, "index", {int(v): i for i, v in enumerate(self.ids)})

    @classmethod
    def from_records(cls, nodes: Iterable[tuple[int, Gender]], edges: Iterable[tuple[int, int, int]],
                     b: Iterable[float] | None = None) -> "SocialGraph":
        """Build a graph from (id, gender) and (src, dst, count) records.

        Parallel edges are merged by summing counts.  If ``b`` is given it must
        align with ``edges`` after aggregation (i.e. no duplicates) and is used
        verbatim; otherwise b starts at zero.
        """
        genders: dict[int, Gender] = {}
        for nid, gender in nodes:
            nid = int(nid)
            if nid in genders:
                raise GraphFormatError(f"duplicate node id {nid}")
            genders[nid] = Gender(gender)
        ids = np.array(sorted(genders), dtype=np.int64)
        index = {int(v): i for i, v in enumerate(ids)}

        agg: dict[tuple[int, int], int] = defaultdict(int)
        given_b: dict[tuple[int, int], float] = {}
        b_list = None if b is None else list(b)
        for j, (s, d, c) in enumerate(edges):
            s, d, c = int(s), int(d), int(c)
            if s not in index or d not in index:
                missing = s if s not in index else d
                raise GraphFormatError(f"unknown endpoint {missing}")
            if s == d:
                raise GraphFormatError(f"self-loop on node {s}")
            if c < 1:
                raise GraphFormatError(f"interaction count must be >= 1, got {c}")
            key = (index[s], index[d])
            if b_list is not None:
                if key in given_b:
                    raise GraphFormatError("explicit b requires unique edges")
                given_b[key] = float(b_list[j])
            agg[key] += c

        keys = sorted(agg)
        src = np.array([k[0] for k in keys], dtype=np.int64)
        dst = np.array([k[1] for k in keys], dtype=np.int64)
        count = np.array([agg[k] for k in keys], dtype=np.int64)
        if b_list is None:
            bw = np.zeros(len(keys))
        else:
            bw = np.array([given_b[k] for k in keys], dtype=np.float64)
        is_female = np.array([genders[int(v)] is Gender.FEMALE for v in ids], dtype=bool)
        return cls(ids=ids, is_female=is_female, src=src, dst=dst, count=count, b=bw)

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def idx(self, node_id: int) -> int:
        try:
            return self.index[int(node_id)]
        except KeyError:
            raise KeyError(f"unknown node {node_id}") from None

    def gender(self, node_id: int) -> Gender:
        return Gender.FEMALE if self.is_female[self.idx(node_id)] else Gender.MALE

    def gender_mask(self, gender: Gender) -> np.ndarray:
        return self.is_female if gender is Gender.FEMALE else ~self.is_female

    def out_slice(self, i: int) -> slice:
        return slice(self.out_ptr[i], self.out_ptr[i + 1])

    def in_edges(self, i: int) -> np.ndarray:
        """Edge indices of the in-edges of node index ``i``."""
        return self.in_order[self.in_ptr[i]:self.in_ptr[i + 1]]

    def edge_tuples(self):
        for s, d, c in zip(self.src, self.dst, self.count):
            yield int(self.ids[s]), int(self.ids[d]), int(c)

    def with_b(self, b: np.ndarray) -> "SocialGraph":
        return dataclasses.replace(self, b=np.asarray(b, dtype=np.float64), normalized=False)


def _rows(path: Path):
    """Yield (line number, fields) for data rows, skipping comments and blanks."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = ((no, line) for no, line in enumerate(fh, start=1)
                 if line.strip() and not line.lstrip().startswith("#"))
        for no, line in lines:
            yield no, next(csv.reader([line]))


def load_graph(nodes_file: str | Path, edges_file: str | Path, type_filter: str | None = None) -> SocialGraph:
    """Read ``id,gender`` and ``src,dst,count[,type]`` CSV files.

    Returned weights are not normalised yet (b == 0).  With ``type_filter``
    only edge rows whose type column equals it are kept.
    """
    nodes = []
    known: set[int] = set()
    rows = _rows(Path(nodes_file))
    header = next(rows, None)
    if header is None or [h.strip().lower() for h in header[1]] != ["id", "gender"]:
        raise GraphFormatError(f"{nodes_file}: expected header 'id,gender'")
    for no, fields in rows:
        if len(fields) != 2:
            raise GraphFormatError(f"{nodes_file}:{no}: malformed line")
        try:
            nid = int(fields[0])
        except ValueError:
            raise GraphFormatError(f"{nodes_file}:{no}: malformed node id {fields[0]!r}") from None
        if nid in known:
            raise GraphFormatError(f"{nodes_file}:{no}: duplicate node id {nid}")
        known.add(nid)
        try:
            nodes.append((nid, Gender.parse(fields[1])))
        except GraphFormatError as exc:
            raise GraphFormatError(f"{nodes_file}:{no}: {exc}") from None

    edges = []
    rows = _rows(Path(edges_file))
    header = next(rows, None)
    cols = [h.strip().lower() for h in header[1]] if header else []
    if cols not in (["src", "dst", "count"], ["src", "dst", "count", "type"]):
        raise GraphFormatError(f"{edges_file}: expected header 'src,dst,count[,type]'")
    for no, fields in rows:
        if len(fields) not in (3, 4) or len(fields) > len(cols):
            raise GraphFormatError(f"{edges_file}:{no}: malformed line")
        if type_filter is not None and (len(fields) < 4 or fields[3].strip() != type_filter):
            continue
        try:
            s, d, c = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError:
            raise GraphFormatError(f"{edges_file}:{no}: malformed line") from None
        if s not in known or d not in known:
            raise GraphFormatError(f"{edges_file}:{no}: unknown endpoint {s if s not in known else d}")
        if s == d:
            raise GraphFormatError(f"{edges_file}:{no}: self-loop on node {s}")
        if c < 1:
            raise GraphFormatError(f"{edges_file}:{no}: interaction count must be >= 1")
        edges.append((s, d, c))

    return SocialGraph.from_records(nodes, edges)


def write_graph(g: SocialGraph, nodes_file: str | Path, edges_file: str | Path, comment: str | None = None) -> None:
    with open(nodes_file, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "gender"])
        for v, f in zip(g.ids, g.is_female):
            w.writerow([int(v), "F" if f else "M"])
    with open(edges_file, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "count"])
        for row in g.edge_tuples():
            w.writerow(row)


def normalize_weights(g: SocialGraph) -> SocialGraph:
    """b_vw = count(v->w) / total interactions received by w."""
    received = np.bincount(g.dst, weights=g.count, minlength=g.n_nodes)
    b = g.count / received[g.dst] if g.n_edges else np.zeros(0)
    return dataclasses.replace(g, b=b, normalized=True)


def interaction_degrees(g: SocialGraph) -> np.ndarray:
    """Sent plus received interaction counts, per node index."""
    n = g.n_nodes
    return (np.bincount(g.src, weights=g.count, minlength=n)
            + np.bincount(g.dst, weights=g.count, minlength=n)).astype(np.int64)


def interaction_degree(g: SocialGraph, v: int) -> int:
    return int(interaction_degrees(g)[g.idx(v)])


def check_normalized(g: SocialGraph, tol: float = 1e-9) -> None:
    """Raise InvariantViolation unless incoming b sums to 1 at every node with in-edges."""
    if g.n_edges and (np.any(g.b <= 0) or np.any(g.b > 1 + tol)):
        raise InvariantViolation("influence probability outside (0, 1]")
    in_strength = np.bincount(g.dst, weights=g.b, minlength=g.n_nodes)
    has_in = np.bincount(g.dst, minlength=g.n_nodes) > 0
    bad = np.flatnonzero(has_in & (np.abs(in_strength - 1.0) > tol))
    if bad.size:
        v = int(g.ids[bad[0]])
        raise InvariantViolation(f"incoming b of node {v} sums to {float(in_strength[bad[0]])!r}, not 1")
