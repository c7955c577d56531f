import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimseed.graph import (Gender, GraphFormatError, InvariantViolation, check_normalized, interaction_degree,
                           load_graph, normalize_weights, write_graph)
from dimseed.oracles import random_graph
from tests.conftest import make_graph


def write(tmp_path, nodes, edges):
    (tmp_path / "n.csv").write_text(nodes)
    (tmp_path / "e.csv").write_text(edges)
    return tmp_path / "n.csv", tmp_path / "e.csv"


def test_load_simple(tmp_path):
    g = load_graph(*write(tmp_path, "id,gender\n1,F\n2,M\n", "src,dst,count\n1,2,3\n"))
    assert g.n_nodes == 2 and g.n_edges == 1
    assert list(g.edge_tuples()) == [(1, 2, 3)]
    assert np.all(g.b == 0) and not g.normalized
    assert g.gender(1) is Gender.FEMALE and g.gender(2) is Gender.MALE


def test_load_aggregates_parallel_edges(tmp_path):
    g = load_graph(*write(tmp_path, "id,gender\n1,F\n2,M\n", "src,dst,count\n1,2,2\n1,2,4\n"))
    assert list(g.edge_tuples()) == [(1, 2, 6)]


def test_load_comments_case_and_type_filter(tmp_path):
    nodes = "# users\nid,gender\n1,f\n2,m\n3,F\n"
    edges = "src,dst,count,type\n# tags only\n1,2,2,tag\n1,2,5,like\n3,1,1,tag\n"
    n, e = write(tmp_path, nodes, edges)
    assert list(load_graph(n, e).edge_tuples()) == [(1, 2, 7), (3, 1, 1)]
    assert list(load_graph(n, e, type_filter="tag").edge_tuples()) == [(1, 2, 2), (3, 1, 1)]


@pytest.mark.parametrize("nodes, edges, message", [
    ("id,gender\n1,F\n2,M\n", "src,dst,count\n1,99,1\n", "unknown endpoint 99"),
    ("id,gender\n1,F\n2,X\n", "src,dst,count\n", "unknown gender"),
    ("id,gender\n1,F\n1,M\n", "src,dst,count\n", "duplicate node id"),
    ("id,gender\n1,F\n2,M\n", "src,dst,count\n1,2\n", "e.csv:2: malformed"),
    ("id,gender\n1,F\n2,M\n", "src,dst,count\n1,2,abc\n", "malformed"),
    ("id,gender\n1,F\n2,M\n", "src,dst,count\n1,1,1\n", "self-loop"),
    ("id,gender\n1,F\n2,M\n", "src,dst,count\n1,2,0\n", ">= 1"),
    ("node,sex\n1,F\n", "src,dst,count\n", "header"),
])
def test_load_errors(tmp_path, nodes, edges, message):
    with pytest.raises(GraphFormatError, match=message):
        load_graph(*write(tmp_path, nodes, edges))


def test_error_reports_line_number(tmp_path):
    with pytest.raises(GraphFormatError, match=r"n.csv:4:"):
        load_graph(*write(tmp_path, "id,gender\n1,F\n2,M\n3,Q\n", "src,dst,count\n"))


def test_roundtrip(tmp_path):
    g = random_graph(np.random.default_rng(3), 12, 30, random_b=False)
    write_graph(g, tmp_path / "n.csv", tmp_path / "e.csv", comment="x")
    h = load_graph(tmp_path / "n.csv", tmp_path / "e.csv")
    assert list(h.edge_tuples()) == list(g.edge_tuples())
    assert np.array_equal(h.is_female, g.is_female)


def test_normalize_examples():
    g = normalize_weights(make_graph("FMM", [(0, 2, 3), (1, 2, 1)]))
    assert g.b.tolist() == [0.75, 0.25]
    assert normalize_weights(make_graph("FM", [(0, 1, 17)])).b.tolist() == [1.0]
    star = normalize_weights(make_graph("FMMMM", [(i, 0, 1) for i in range(1, 5)]))
    assert star.b.tolist() == [0.25] * 4
    assert star.count.tolist() == [1] * 4


def test_interaction_degree_examples():
    g = make_graph("FMMF", [(0, 1, 3), (2, 0, 2), (1, 2, 1), (2, 1, 1)])
    assert interaction_degree(g, 3) == 0
    assert interaction_degree(g, 0) == 5
    assert interaction_degree(g, 1) == 3 + 1 + 1
    two_cycle = make_graph("FM", [(0, 1, 1), (1, 0, 1)])
    assert interaction_degree(two_cycle, 0) == 2
    with pytest.raises(KeyError):
        interaction_degree(g, 42)


@given(st.integers(0, 2**32 - 1))
def test_normalization_properties(seed):
    g = random_graph(np.random.default_rng(seed), 10, 25, random_b=False)
    once = normalize_weights(g)
    twice = normalize_weights(once)
    assert np.array_equal(once.b, twice.b)
    check_normalized(once)
    has_in = np.bincount(once.dst, minlength=once.n_nodes) > 0
    assert abs(once.b.sum() - has_in.sum()) <= 1e-6 * once.n_nodes
    assert np.all((once.b > 0) & (once.b <= 1))


def test_check_normalized_detects_corruption():
    g = normalize_weights(make_graph("FMM", [(0, 2, 3), (1, 2, 1)]))
    with pytest.raises(InvariantViolation):
        check_normalized(g.with_b(g.b * 0.9))
