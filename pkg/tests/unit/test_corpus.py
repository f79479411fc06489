"""Tests for the named diagrams and the seeded generators."""

import pytest

from ansible_collections.causal.zid.plugins.module_utils.admg import ancestors, descendants, induced
from ansible_collections.causal.zid.plugins.module_utils.corpus import (
    NAMED_GRAPHS,
    corollary2_corpus,
    named,
    random_admg,
    random_query,
)
from ansible_collections.causal.zid.plugins.module_utils.errors import GraphError
from ansible_collections.causal.zid.plugins.module_utils.identify import corollary2_precheck, idz


@pytest.mark.parametrize("name", sorted(NAMED_GRAPHS))
def test_named_graphs_build(name):
    graph = named(name)
    assert {"X", "Y"} <= graph.vertices


def test_unknown_name():
    with pytest.raises(GraphError):
        named("spiral")


class TestRandom:
    def test_seeded(self):
        assert random_admg(11) == random_admg(11)

    def test_sizes(self):
        for seed in range(30):
            graph = random_admg(seed, max_vertices=4, max_bidirected=2)
            assert 2 <= len(graph.vertices) <= 4
            assert len(graph.bidirected) <= 2

    def test_query_sets_are_disjoint(self):
        for seed in range(30):
            graph = random_admg(seed)
            query = random_query(graph, seed)
            query.validate(graph)
            assert query.x
            assert len(query.z) <= 2


class TestDescendantCorpus:
    def test_every_entry_satisfies_the_precheck(self):
        for graph, query in corollary2_corpus(25, seed=1):
            assert {("X", "Z"), ("Z", "Y")} <= graph.directed
            reach = descendants(induced(graph, ancestors(graph, {"Y"})), {"X"})
            assert query.z <= reach
            assert corollary2_precheck(graph, query.x_vars, query.y_vars, query.z)
            assert not idz(query, graph).identified

    @pytest.mark.slow
    def test_large_corpus(self):
        for graph, query in corollary2_corpus(500, seed=0):
            assert corollary2_precheck(graph, query.x_vars, query.y_vars, query.z)
            assert not idz(query, graph).identified
