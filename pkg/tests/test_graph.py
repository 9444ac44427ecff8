import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score

from monosplit.graph import (SimilarityGraph, _edge_betweenness, build_graph, girvan_newman,
                             louvain, modularity, to_dot)
from monosplit.model import Decomposition, InputError, SimilarityMatrix
from monosplit.similarity import project_similarity
from monosplit.synthetic import planted_monolith
from oracles import edge_betweenness_oracle, modularity_oracle


def graph(n, edges):
    return SimilarityGraph(tuple(f"N{i}" for i in range(n)),
                           {(min(i, j), max(i, j)): w for (i, j), w in edges.items()})


def groups_of(d, names):
    return sorted(sorted(names.index(c) for c in m) for m in d.scored.values())


def partition(g, *groups):
    return Decomposition({f"s{k}": {g.names[i] for i in grp} for k, grp in enumerate(groups)})


def cliques_with_bridge(size=4, w=0.9, bridge=0.1):
    edges = {}
    for base in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                edges[base + i, base + j] = w
    edges[size - 1, size] = bridge
    return graph(2 * size, edges)


def test_build_graph_empty():
    cs = SimilarityMatrix(("A", "B", "C"), np.eye(3), "blended")
    g = build_graph(cs)
    assert g.n == 3 and g.edges == {}


def test_build_graph_threshold():
    sim = np.array([[1, 0.7, 0.5], [0.7, 1, 0.2], [0.5, 0.2, 1]])
    cs = SimilarityMatrix(("A", "B", "C"), sim, "blended")
    assert build_graph(cs, 0.5).edges == {(0, 1): 0.7}
    assert build_graph(cs, 0).sorted_edges() == [(0, 1, 0.7), (0, 2, 0.5), (1, 2, 0.2)]
    assert build_graph(cs, 1.0).edges == {}


def test_modularity_hand_values():
    g = graph(4, {(0, 1): 1.0, (2, 3): 1.0, (1, 2): 0.5})
    # m = 2.5; each half: inside 1, degree 2.5 -> 2 * (1/2.5 - 0.25)
    assert modularity(g, partition(g, [0, 1], [2, 3])) == pytest.approx(0.3, abs=1e-12)
    cycle = graph(4, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): 1})
    assert modularity(cycle, partition(cycle, [0, 1, 2, 3])) == pytest.approx(0.0, abs=1e-12)


def test_modularity_edgeless_and_cliques():
    g = graph(3, {})
    assert modularity(g, partition(g, [0], [1], [2])) == 0
    two = graph(6, {(0, 1): 1, (1, 2): 1, (0, 2): 1, (3, 4): 1, (4, 5): 1, (3, 5): 1})
    assert modularity(two, partition(two, [0, 1, 2], [3, 4, 5])) == pytest.approx(0.5, abs=1e-12)


def test_modularity_unknown_class():
    g = graph(2, {(0, 1): 1.0})
    with pytest.raises(InputError):
        modularity(g, Decomposition({"s": {"N0", "ghost"}}))


weighted_graphs = st.integers(2, 10).flatmap(lambda n: st.tuples(
    st.just(n),
    st.dictionaries(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                    .filter(lambda e: e[0] < e[1]),
                    st.floats(0.05, 1.0), max_size=n * (n - 1) // 2)))


@settings(max_examples=60, deadline=None)
@given(weighted_graphs, st.data())
def test_modularity_matches_oracle_and_networkx(ge, data):
    n, edges = ge
    g = graph(n, edges)
    labels = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    groups = [[i for i in range(n) if labels[i] == k] for k in range(4)]
    groups = [grp for grp in groups if grp]
    q = modularity(g, partition(g, *groups))
    assert q == pytest.approx(modularity_oracle(n, edges, groups), abs=1e-12)
    if edges:
        h = nx.Graph()
        h.add_nodes_from(range(n))
        h.add_weighted_edges_from((i, j, w) for (i, j), w in edges.items())
        assert q == pytest.approx(nx.community.modularity(h, groups), abs=1e-12)
    assert -0.5 - 1e-12 <= q <= 1


def test_gn_triangle_literal():
    g = graph(3, {(0, 1): 0.9, (1, 2): 0.9, (0, 2): 0.1})
    d = girvan_newman(g, "paper_literal")
    levels = [groups_of(lv, g.names) for lv in d.levels]
    assert levels == [[[0, 1, 2]], [[0], [1, 2]], [[0], [1], [2]]]


def test_gn_single_edge():
    g = graph(2, {(0, 1): 0.5})
    for mode in ("paper_literal", "betweenness"):
        levels = [groups_of(lv, g.names) for lv in girvan_newman(g, mode).levels]
        assert levels == [[[0, 1]], [[0], [1]]]


@pytest.mark.parametrize("mode", ["paper_literal", "betweenness"])
def test_gn_cliques_split_first(mode):
    g = cliques_with_bridge()
    d = girvan_newman(g, mode)
    assert groups_of(d.levels[1], g.names) == [[0, 1, 2, 3], [4, 5, 6, 7]]
    assert groups_of(d.recommended, g.names) == [[0, 1, 2, 3], [4, 5, 6, 7]]


def test_edge_betweenness_matches_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(15):
        n = int(rng.integers(3, 8))
        edges = {(i, j): float(rng.choice([0.25, 0.5, 1.0]))
                 for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5}
        if not edges:
            continue
        ours = _edge_betweenness(n, edges)
        ref = edge_betweenness_oracle(n, edges)
        for e in edges:
            assert ours[e] == pytest.approx(ref[e], abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(weighted_graphs, st.randoms(use_true_random=False))
def test_literal_order_ignores_edge_insertion_order(ge, rnd):
    n, edges = ge
    items = list(edges.items())
    rnd.shuffle(items)
    a = girvan_newman(graph(n, edges))
    b = girvan_newman(graph(n, dict(items)))
    assert [lv.services for lv in a.levels] == [lv.services for lv in b.levels]


def test_louvain_disconnected_triangles():
    g = graph(6, {(0, 1): 1, (1, 2): 1, (0, 2): 1, (3, 4): 1, (4, 5): 1, (3, 5): 1})
    for seed in range(5):
        assert groups_of(louvain(g, seed), g.names) == [[0, 1, 2], [3, 4, 5]]


@settings(max_examples=40, deadline=None)
@given(weighted_graphs, st.integers(0, 100))
def test_louvain_beats_singletons_and_never_merges_components(ge, seed):
    n, edges = ge
    g = graph(n, edges)
    d = louvain(g, seed)
    singletons = partition(g, *[[i] for i in range(n)])
    assert modularity(g, d) >= modularity(g, singletons) - 1e-12
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(edges)
    comp = {i: k for k, c in enumerate(nx.connected_components(h)) for i in c}
    for members in d.scored.values():
        assert len({comp[g.names.index(c)] for c in members}) == 1
    assert modularity(g, louvain(g, seed)) == modularity(g, d)


def test_louvain_planted_blocks():
    calls, corpus, truth = planted_monolith(seed=4)
    g = build_graph(project_similarity(calls, corpus, 0.5))
    d = louvain(g, seed=4)
    pred = [next(k for k, m in enumerate(d.scored.values()) if c in m) for c in calls.names]
    assert adjusted_rand_score(truth, pred) >= 0.9


def test_dot_export():
    g = graph(3, {(0, 1): 0.5})
    d = Decomposition({"a": {"N0", "N1"}, "b": {"N2"}})
    dot = to_dot(g, d)
    assert dot.startswith("graph monolith {")
    assert '"N0" -- "N1" [weight=0.5];' in dot
    assert 'group="a"' in dot and 'group="b"' in dot
    assert to_dot(g, d) == dot
