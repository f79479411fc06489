"""Tests for the mixed-graph layer."""

import networkx as nx
import numpy as np
import pytest

from ansible_collections.causal.zid.plugins.module_utils.admg import (
    Hedge,
    ancestors,
    build,
    c_components,
    descendants,
    format_graph,
    induced,
    is_c_component,
    is_c_forest,
    mutilate,
    root_set,
    topological_order,
    validate_hedge,
)
from ansible_collections.causal.zid.plugins.module_utils.corpus import random_admg
from ansible_collections.causal.zid.plugins.module_utils.errors import GraphError


class TestBuild:
    def test_vertices_and_edges(self, g_a):
        assert g_a.vertices == {"X", "Y", "Z"}
        assert g_a.directed == {("Z", "X"), ("X", "Y")}
        assert g_a.bidirected == {("X", "Z"), ("Y", "Z")}

    def test_bidirected_pairs_are_unordered(self):
        graph = build(["A", "B"], bidirected_edges=[("B", "A")])
        assert graph.bidirected == {("A", "B")}

    @pytest.mark.parametrize(
        "directed, bidirected, code",
        [
            ([("A", "B"), ("B", "A")], [], "CYCLE"),
            ([("A", "A")], [], "SELF_LOOP"),
            ([], [("B", "B")], "SELF_LOOP"),
            ([("A", "C")], [], "UNKNOWN_VERTEX"),
            ([("A", "B"), ("A", "B")], [], "DUPLICATE_EDGE"),
            ([], [("A", "B"), ("B", "A")], "DUPLICATE_EDGE"),
        ],
    )
    def test_rejects_invalid_graphs(self, directed, bidirected, code):
        with pytest.raises(GraphError) as excinfo:
            build(["A", "B"], directed, bidirected)
        assert excinfo.value.code == code

    def test_rejects_bad_names(self):
        with pytest.raises(GraphError) as excinfo:
            build(["A B"])
        assert excinfo.value.code == "UNKNOWN_VERTEX"

    def test_parallel_directed_and_bidirected_edges_allowed(self, bow):
        assert ("X", "Y") in bow.directed
        assert ("X", "Y") in bow.bidirected


class TestReachability:
    def test_ancestors_include_the_set(self, front_door):
        assert ancestors(front_door, {"Y"}) == {"X", "M", "Y"}
        assert ancestors(front_door, {"X"}) == {"X"}

    def test_descendants(self, front_door):
        assert descendants(front_door, {"M"}) == {"M", "Y"}

    def test_unknown_vertex(self, chain):
        with pytest.raises(GraphError) as excinfo:
            ancestors(chain, {"Q"})
        assert excinfo.value.code == "UNKNOWN_VERTEX"

    def test_bidirected_edges_do_not_carry_ancestry(self):
        graph = build(["A", "B"], bidirected_edges=[("A", "B")])
        assert ancestors(graph, {"B"}) == {"B"}


class TestSubgraphs:
    def test_induced_keeps_inner_edges(self, g_a):
        sub = induced(g_a, {"X", "Y"})
        assert sub.vertices == {"X", "Y"}
        assert sub.directed == {("X", "Y")}
        assert sub.bidirected == frozenset()

    def test_overline_cuts_arrowheads(self, g_a):
        cut = mutilate(g_a, overline={"X"})
        assert cut.directed == {("X", "Y")}
        assert cut.bidirected == {("Y", "Z")}

    def test_underline_keeps_bidirected(self, bow):
        cut = mutilate(bow, underline={"X"})
        assert cut.directed == frozenset()
        assert cut.bidirected == {("X", "Y")}

    def test_graphs_are_not_modified(self, g_a):
        mutilate(g_a, overline={"X", "Y", "Z"})
        assert len(g_a.directed) == 2


class TestStructure:
    def test_c_components_sorted_by_smallest_member(self, front_door):
        assert c_components(front_door) == (frozenset({"M"}), frozenset({"X", "Y"}))

    def test_single_c_component(self, g_a):
        assert c_components(g_a) == (frozenset({"X", "Y", "Z"}),)
        assert is_c_component(g_a)

    def test_topological_order_is_lexicographic(self):
        graph = build(["B", "A", "C"], [("B", "C")])
        assert topological_order(graph) == ("A", "B", "C")

    def test_topological_order_respects_edges(self, napkin):
        order = topological_order(napkin)
        assert order == ("W1", "W2", "X", "Y")

    def test_root_set(self, front_door):
        assert root_set(front_door) == {"Y"}

    def test_c_forest(self, bow):
        assert is_c_forest(bow, {"Y"})
        assert not is_c_forest(bow, {"X", "Y"})

    def test_c_forest_needs_one_child_per_vertex(self):
        graph = build(["A", "B", "C"], [("A", "B"), ("A", "C")], [("A", "B"), ("B", "C")])
        assert not is_c_forest(graph, {"B", "C"})

    def test_empty_graph_is_not_a_c_component(self):
        assert not is_c_component(build([]))


def _bow_hedge():
    return Hedge(
        f_vertices=frozenset({"X", "Y"}),
        f_directed=frozenset({("X", "Y")}),
        f_bidirected=frozenset({("X", "Y")}),
        fprime_vertices=frozenset({"Y"}),
        fprime_directed=frozenset(),
        fprime_bidirected=frozenset(),
        r=frozenset({"Y"}),
        x=frozenset({"X"}),
        y=frozenset({"Y"}),
    )


class TestHedge:
    def test_bow_hedge_validates(self, bow):
        assert validate_hedge(bow, _bow_hedge(), {"X"}, {"Y"})

    def test_hedge_must_contain_treatment(self, bow):
        assert not validate_hedge(bow, _bow_hedge(), set(), {"Y"})

    def test_missing_edge_is_malformed(self, chain):
        with pytest.raises(GraphError) as excinfo:
            validate_hedge(chain, _bow_hedge(), {"X"}, {"Y"})
        assert excinfo.value.code == "MALFORMED_WITNESS"

    def test_inner_forest_outside_outer(self, bow):
        hedge = Hedge(
            f_vertices=frozenset({"Y"}),
            f_directed=frozenset(),
            f_bidirected=frozenset(),
            fprime_vertices=frozenset({"X", "Y"}),
            fprime_directed=frozenset({("X", "Y")}),
            fprime_bidirected=frozenset({("X", "Y")}),
            r=frozenset({"Y"}),
        )
        with pytest.raises(GraphError) as excinfo:
            validate_hedge(bow, hedge, {"X"}, {"Y"})
        assert excinfo.value.code == "MALFORMED_WITNESS"

    def test_to_json(self):
        doc = _bow_hedge().to_json()
        assert doc["f"] == {"vertices": ["X", "Y"], "directed": [["X", "Y"]], "bidirected": [["X", "Y"]]}
        assert doc["f_prime"]["vertices"] == ["Y"]
        assert doc["r"] == ["Y"]


class TestFormat:
    def test_format_graph(self):
        graph = build(["X", "Y", "W"], [("X", "Y")], [("X", "Y")])
        assert format_graph(graph) == "X -> Y\nX <-> Y\nnode W\n"

    def test_str_uses_edge_format(self, chain):
        assert str(chain) == "X -> Y\n"


def _subset(rng, names):
    return frozenset(v for v in sorted(names) if rng.random() < 0.4)


class TestRandomGraphs:
    @pytest.mark.parametrize("seed", range(40))
    def test_mutilation_is_idempotent(self, seed):
        graph = random_admg(seed)
        rng = np.random.default_rng(seed)
        over, under = _subset(rng, graph.vertices), _subset(rng, graph.vertices)
        once = mutilate(graph, overline=over, underline=under)
        assert mutilate(once, overline=over, underline=under) == once
        assert once.directed <= graph.directed
        assert once.bidirected <= graph.bidirected

    @pytest.mark.parametrize("seed", range(40))
    def test_c_components_partition_the_vertices(self, seed):
        graph = random_admg(seed, max_bidirected=6)
        parts = c_components(graph)
        assert frozenset().union(*parts) == graph.vertices
        assert sum(len(p) for p in parts) == len(graph.vertices)
        for part in parts:
            assert is_c_component(induced(graph, part))
        owner = {v: i for i, part in enumerate(parts) for v in part}
        assert all(owner[u] == owner[v] for u, v in graph.bidirected)

    @pytest.mark.parametrize("seed", range(40))
    def test_roots_have_no_proper_descendants(self, seed):
        graph = random_admg(seed)
        sinks = {v for v in graph.vertices if descendants(graph, {v}) == {v}}
        assert root_set(graph) == sinks

    @pytest.mark.parametrize("seed", range(40))
    def test_topological_order_respects_every_edge(self, seed):
        graph = random_admg(seed, p_directed=0.6)
        order = topological_order(graph)
        position = {v: i for i, v in enumerate(order)}
        assert sorted(order) == sorted(graph.vertices)
        assert all(position[a] < position[b] for a, b in graph.directed)

    @pytest.mark.parametrize("seed", range(20))
    def test_ancestry_agrees_with_networkx(self, seed):
        graph = random_admg(seed)
        for v in sorted(graph.vertices):
            assert ancestors(graph, {v}) == nx.ancestors(graph.dag, v) | {v}
