import json

import numpy as np
import pytest
from scipy.stats import chisquare

from polyaurn import (
    SimpleGraph,
    cartesian_product,
    complete_graph,
    cycle_graph,
    path_graph,
    run,
    star_graph,
    verify_walk_product,
    walk_urn,
)
from polyaurn.errors import InputError
from polyaurn.graphs import load_graph


def test_graph_validation():
    with pytest.raises(InputError):
        SimpleGraph(2, frozenset({(0, 0)}))
    with pytest.raises(InputError):
        SimpleGraph(2, frozenset({(0, 5)}))
    g = SimpleGraph(3, frozenset({(2, 0)}))
    assert g.edges == frozenset({(0, 2)})


def test_k2_square_is_four_cycle():
    grid = cartesian_product(complete_graph(2), complete_graph(2))
    assert grid.vertex_count == 4
    assert grid.edges == frozenset({(0, 1), (0, 2), (1, 3), (2, 3)})


def test_product_with_single_vertex_is_identity():
    single = SimpleGraph(1, frozenset())
    for g in (path_graph(3), cycle_graph(5), star_graph(3)):
        assert cartesian_product(g, single) == g


def test_p2_p3_grid():
    grid = cartesian_product(path_graph(2), path_graph(3))
    assert grid.vertex_count == 6
    assert len(grid.edges) == 7
    expected = set()
    for j in range(3):
        expected.add((j, 3 + j))  # the P2 edge at each P3 vertex
    for i in range(2):
        for j in range(2):
            expected.add((i * 3 + j, i * 3 + j + 1))
    assert grid.edges == frozenset(expected)


def test_degree_sum_rule():
    graphs = [complete_graph(2), path_graph(3), cycle_graph(4), star_graph(3)]
    for g in graphs:
        for g2 in graphs:
            grid = cartesian_product(g, g2)
            for v in range(g.vertex_count):
                for w in range(g2.vertex_count):
                    assert grid.degree(v * g2.vertex_count + w) == g.degree(v) + g2.degree(w)


def test_walk_urn_k2():
    urn = walk_urn(complete_graph(2), 0)
    assert urn.activities == (1, 1)
    assert urn.initial == (1, 0)
    assert urn.measures[0].atoms == (((-1, 1), 1),)
    assert urn.measures[1].atoms == (((1, -1), 1),)


def test_walk_urn_isolated_vertex():
    g = SimpleGraph(3, frozenset({(0, 1)}))
    urn = walk_urn(g, 0)
    assert urn.activities[2] == 0
    assert urn.measures[2].is_dirac_at_zero()


def test_walk_urn_keeps_one_ball():
    urn = walk_urn(complete_graph(3), 1)
    trace = run(urn, 2000, seed=13, snapshot_stride=1)
    assert (trace.snapshot_counts.sum(axis=1) == 1).all()


def test_walk_urn_transition_kernel():
    # along a long walk on C5, the moves out of vertex 0 are uniform on
    # its neighbours {1, 4}
    urn = walk_urn(cycle_graph(5), 0)
    trace = run(urn, 100_000, seed=17, snapshot_stride=1)
    vertices = trace.snapshot_counts.argmax(axis=1)
    from_zero = vertices[1:][vertices[:-1] == 0]
    hits = [(from_zero == 1).sum(), (from_zero == 4).sum()]
    assert sum(hits) == len(from_zero)
    _, p = chisquare(hits)
    assert p > 0.001


CORPUS = {
    "K2": complete_graph(2),
    "P3": path_graph(3),
    "C4": cycle_graph(4),
    "C5": cycle_graph(5),
    "S3": star_graph(3),
}


def test_walk_product_corpus():
    for g in CORPUS.values():
        for g2 in CORPUS.values():
            for v0 in range(g.vertex_count):
                for v1 in range(g2.vertex_count):
                    witness = verify_walk_product(g, g2, v0, v1)
                    assert witness is not None
                    assert witness == tuple(range(g.vertex_count * g2.vertex_count))


def test_walk_product_with_isolated_vertices():
    lonely = SimpleGraph(3, frozenset({(0, 1)}))
    assert verify_walk_product(lonely, complete_graph(2), 2, 0) is not None
    # degenerate colour pairs with deg(v) + deg(v') = 0 exercise the inert
    # branch of the product measure
    assert verify_walk_product(lonely, lonely, 2, 2) is not None


def test_graph_json_roundtrip(tmp_path):
    g = star_graph(3)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_json()))
    assert load_graph(path) == g
    path.write_text("{bad json")
    with pytest.raises(InputError):
        load_graph(path)
