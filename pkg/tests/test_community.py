import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import adjusted_rand_score

from dimseed.community import (CommunityAssignment, CommunityType, boundary_mask, build_community_graph,
                               classify_community, detect_communities, is_boundary_user, modularity, pagerank,
                               symmetrized_adjacency)
from dimseed.oracles import random_graph
from dimseed.synthgen import SbmSpec, generate_sbm
from tests.conftest import make_graph

MD, FD, EV = CommunityType.MALE_DOMINANT, CommunityType.FEMALE_DOMINANT, CommunityType.EVEN


def two_thirds(m, f):
    if m > 2 * f:
        return MD
    if f > 2 * m:
        return FD
    return EV


def test_classify_examples():
    assert classify_community(10, 4) is MD
    assert classify_community(5, 5) is EV
    assert classify_community(2, 5) is FD
    assert classify_community(2, 1) is EV  # 2 > 2 fails
    assert classify_community(3, 1) is MD


def test_classify_grid():
    for m in range(21):
        for f in range(21):
            if m == f == 0:
                with pytest.raises(ValueError):
                    classify_community(m, f)
            else:
                assert classify_community(m, f) is two_thirds(m, f)


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_classify_scale_invariant(m, f):
    if m or f:
        assert classify_community(m, f) is classify_community(2 * m, 2 * f)


def test_classify_rejects_negative():
    with pytest.raises(ValueError):
        classify_community(-1, 3)


def test_assignment_relabels_and_counts():
    g = make_graph("FMFMM", [])
    a = CommunityAssignment.from_labels(g, [7, 3, 7, 3, 9])
    assert a.membership.tolist() == [0, 1, 0, 1, 2]
    assert a.females.tolist() == [2, 0, 0] and a.males.tolist() == [0, 2, 1]
    assert a.types() == [FD, MD, MD]
    assert a.community_of(g, 4) == 2
    with pytest.raises(ValueError):
        CommunityAssignment.from_labels(g, [0, 1])


def test_boundary_examples():
    g = make_graph("FMFMM", [(0, 1), (1, 0), (2, 3)])
    a = CommunityAssignment.from_labels(g, [0, 0, 1, 2, 1])
    assert not is_boundary_user(g, a, 0)
    assert is_boundary_user(g, a, 2)  # one out-edge into another community
    assert is_boundary_user(g, a, 3)  # receives a cross edge
    assert not is_boundary_user(g, a, 4)  # isolated


def test_community_graph_examples():
    g = make_graph("FMFM", [(0, 1, 4), (2, 3, 1)])
    assert list(build_community_graph(g, CommunityAssignment.from_labels(g, [0, 0, 1, 1])).edges()) == []
    g = make_graph("FM", [(0, 1, 7)])
    assert list(build_community_graph(g, CommunityAssignment.from_labels(g, [0, 1])).edges()) == [(0, 1, 7)]
    g = make_graph("FMFMF", [(0, 2, 3), (3, 1, 2), (0, 1, 5)])
    a = CommunityAssignment.from_labels(g, [0, 0, 1, 1, 2])
    assert sorted(build_community_graph(g, a).edges()) == [(0, 1, 3), (1, 0, 2)]


def cg_of(weights):
    from dimseed.community import CommunityGraph
    return CommunityGraph(weights=np.asarray(weights, dtype=np.int64))


def test_pagerank_examples():
    assert pagerank(cg_of([[0]])) == {0: 1.0}
    pr = pagerank(cg_of([[0, 3], [3, 0]]))
    assert abs(pr[0] - 0.5) <= 1e-12 and abs(pr[1] - 0.5) <= 1e-12
    pr = pagerank(cg_of([[0, 1, 0], [0, 0, 1], [1, 0, 0]]))
    assert all(abs(v - 1 / 3) <= 1e-12 for v in pr.values())
    with pytest.raises(ValueError):
        pagerank(cg_of([[0, 1], [1, 0]]), damping=1.0)


@given(st.integers(0, 2**32 - 1))
def test_pagerank_matches_networkx(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    w = rng.integers(0, 4, size=(n, n)) * (rng.random((n, n)) < 0.4)
    np.fill_diagonal(w, 0)
    pr = pagerank(cg_of(w))
    assert abs(sum(pr.values()) - 1) <= 1e-8 and min(pr.values()) >= 0
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    G.add_weighted_edges_from((int(c), int(d), int(w[c, d])) for c, d in zip(*np.nonzero(w)))
    ref = nx.pagerank(G, alpha=0.85, tol=1e-13, max_iter=10_000)
    assert max(abs(pr[c] - ref[c]) for c in range(n)) <= 1e-8


def test_modularity_matches_networkx():
    g = random_graph(np.random.default_rng(2), 30, 90, random_b=False)
    labels = np.random.default_rng(3).integers(0, 4, g.n_nodes)
    G = nx.Graph()
    G.add_nodes_from(range(g.n_nodes))
    for s, d, c in zip(g.src, g.dst, g.count):
        w = G.get_edge_data(s, d, {"weight": 0})["weight"]
        G.add_edge(int(s), int(d), weight=w + int(c))
    parts = [set(np.flatnonzero(labels == c).tolist()) for c in np.unique(labels)]
    ref = nx.community.modularity(G, parts, weight="weight")
    assert abs(modularity(symmetrized_adjacency(g), labels) - ref) <= 1e-12


def best_single_move_gain(adj, labels):
    q0 = modularity(adj, labels)
    best = 0.0
    fresh = labels.max() + 1
    for v in range(len(labels)):
        for c in set(labels[adj[v].indices].tolist()) | {fresh}:
            if c == labels[v]:
                continue
            moved = labels.copy()
            moved[v] = c
            best = max(best, modularity(adj, moved) - q0)
    return best


@pytest.mark.parametrize("seed", range(4))
def test_detection_locally_optimal(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 40, 120, random_b=False)
    a = detect_communities(g, rng_seed=seed)
    adj = symmetrized_adjacency(g)
    assert modularity(adj, a.membership) >= 0
    assert best_single_move_gain(adj, a.membership) <= 1e-12


def test_detection_edge_cases():
    g = make_graph("FMF", [])
    assert detect_communities(g).n_communities == 3
    g = make_graph("FMFM", [(0, 1), (1, 0), (2, 3), (3, 2)])
    assert detect_communities(g).membership.tolist() == [0, 0, 1, 1]
    with pytest.raises(ValueError):
        detect_communities(g, resolution=0)


def test_detection_deterministic(sbm_default):
    g = sbm_default.graph
    a, b = detect_communities(g, rng_seed=5), detect_communities(g, rng_seed=5)
    assert np.array_equal(a.membership, b.membership)


def test_sbm_recovery():
    scores = [adjusted_rand_score(s.truth, detect_communities(s.graph, rng_seed=seed).membership)
              for seed in range(5) for s in [generate_sbm(SbmSpec(rng_seed=seed))]]
    assert sum(x >= 0.9 for x in scores) >= 3, scores


@given(st.integers(0, 2**32 - 1))
def test_core_xor_boundary(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 15, 30)
    a = CommunityAssignment.from_labels(g, rng.integers(0, 3, g.n_nodes))
    mask = boundary_mask(g, a)
    for v in range(g.n_nodes):
        s_out, s_in = g.out_slice(v), g.in_edges(v)
        touches = np.concatenate([g.dst[s_out], g.src[s_in]])
        assert mask[v] == bool(np.any(a.membership[touches] != a.membership[v]))
