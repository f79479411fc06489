"""Tests for m-separation and the do-calculus rule checks."""

import itertools

import networkx as nx
import numpy as np
import pytest

from ansible_collections.causal.zid.plugins.module_utils.admg import build, topological_order
from ansible_collections.causal.zid.plugins.module_utils.corpus import random_admg
from ansible_collections.causal.zid.plugins.module_utils.dcalc import (
    SeparationQuery,
    latent_augmentation,
    m_separated,
    rule1_applicable,
    rule2_applicable,
    rule3_applicable,
)
from ansible_collections.causal.zid.plugins.module_utils.errors import SeparationError
from ansible_collections.causal.zid.plugins.module_utils.scm_oracle import joint, random_scm


@pytest.fixture
def collider():
    """A -> C <- B"""
    return build(["A", "B", "C"], [("A", "C"), ("B", "C")])


@pytest.fixture
def latent_collider():
    """A <-> C <- B"""
    return build(["A", "B", "C"], [("B", "C")], [("A", "C")])


class TestSeparation:
    def test_collider_blocks(self, collider):
        assert m_separated(collider, SeparationQuery({"A"}, {"B"}))

    def test_conditioning_on_collider_opens(self, collider):
        assert not m_separated(collider, SeparationQuery({"A"}, {"B"}, {"C"}))

    def test_bidirected_edge_connects(self, bow):
        assert not m_separated(bow, SeparationQuery({"X"}, {"Y"}))

    def test_bidirected_collider(self, latent_collider):
        assert m_separated(latent_collider, SeparationQuery({"A"}, {"B"}))
        assert not m_separated(latent_collider, SeparationQuery({"A"}, {"B"}, {"C"}))

    def test_chain_blocked_by_middle(self, front_door):
        assert not m_separated(front_door, SeparationQuery({"X"}, {"M"}, {"Y"}))
        graph = build(["A", "B", "C"], [("A", "B"), ("B", "C")])
        assert m_separated(graph, SeparationQuery({"A"}, {"C"}, {"B"}))

    def test_empty_side_is_separated(self, bow):
        assert m_separated(bow, SeparationQuery(set(), {"Y"}))

    def test_overlap_rejected(self):
        with pytest.raises(SeparationError) as excinfo:
            SeparationQuery({"A"}, {"A", "B"})
        assert excinfo.value.code == "OVERLAPPING_SETS"

    def test_augmentation_matches_networkx(self, napkin):
        dag = latent_augmentation(napkin)
        assert nx.is_directed_acyclic_graph(dag)
        assert set(napkin.vertices) < set(dag.nodes)
        hidden = set(dag.nodes) - set(napkin.vertices)
        assert len(hidden) == len(napkin.bidirected)
        assert all(dag.in_degree(h) == 0 and dag.out_degree(h) == 2 for h in hidden)


class TestRules:
    def test_rule1_observation_cannot_be_dropped_on_a_chain(self, chain):
        assert not rule1_applicable(chain, {"Y"}, set(), {"X"}, set())

    def test_rule1_after_intervention(self):
        graph = build(["W", "X", "Y"], [("W", "X"), ("X", "Y")])
        assert rule1_applicable(graph, {"Y"}, {"X"}, {"W"}, set())

    def test_rule2_back_door(self, back_door):
        assert rule2_applicable(back_door, {"Y"}, set(), {"X"}, {"Z"})
        assert not rule2_applicable(back_door, {"Y"}, set(), {"X"}, set())

    def test_rule2_fails_under_confounding(self, bow):
        assert not rule2_applicable(bow, {"Y"}, set(), {"X"}, set())

    def test_rule3_drops_action_on_non_ancestor(self):
        graph = build(["X", "Y"], [("Y", "X")])
        assert rule3_applicable(graph, {"Y"}, set(), {"X"}, set())

    def test_rule3_keeps_action_on_cause(self, chain):
        assert not rule3_applicable(chain, {"Y"}, set(), {"X"}, set())

    def test_rule3_with_empty_set(self, bow):
        assert rule3_applicable(bow, {"Y"}, set(), set(), set())

    def test_rule3_uses_ancestors_of_w(self):
        # Z is an ancestor of W, so its arrowheads stay when W is observed
        graph = build(["W", "Y", "Z"], [("Z", "W")], [("Y", "Z")])
        assert not rule3_applicable(graph, {"Y"}, set(), {"Z"}, {"W"})
        assert rule3_applicable(graph, {"Y"}, set(), {"Z"}, set())

    def test_overlapping_sets(self, chain):
        with pytest.raises(SeparationError):
            rule1_applicable(chain, {"Y"}, {"Y"}, {"X"}, set())


def _separation_queries(graph, seed):
    """Every ordered pair of vertices with a seeded conditioning set."""
    rng = np.random.default_rng(seed)
    for a, b in itertools.permutations(sorted(graph.vertices), 2):
        rest = sorted(graph.vertices - {a, b})
        yield SeparationQuery({a}, {b}, {v for v in rest if rng.random() < 0.4})


def _with_extra_edge(graph, seed):
    rng = np.random.default_rng(seed)
    order = topological_order(graph)
    pairs = [(u, v) for i, u in enumerate(order) for v in order[i + 1:]]
    u, v = pairs[int(rng.integers(len(pairs)))]
    if rng.random() < 0.5:
        return build(graph.vertices, graph.directed | {(u, v)}, graph.bidirected)
    return build(graph.vertices, graph.directed, graph.bidirected | {tuple(sorted((u, v)))})


class TestRandomGraphs:
    @pytest.mark.parametrize("seed", range(30))
    def test_separation_is_symmetric(self, seed):
        graph = random_admg(seed)
        for query in _separation_queries(graph, seed):
            swapped = SeparationQuery(query.b, query.a, query.given)
            assert m_separated(graph, query) == m_separated(graph, swapped)

    @pytest.mark.parametrize("seed", range(30))
    def test_extra_edges_only_remove_separations(self, seed):
        graph = random_admg(seed)
        richer = _with_extra_edge(graph, seed)
        for query in _separation_queries(graph, seed):
            if m_separated(richer, query):
                assert m_separated(graph, query), query

    @pytest.mark.parametrize("seed", range(30))
    def test_separation_implies_independence_in_models(self, seed):
        graph = random_admg(seed, max_vertices=5)
        table = joint(random_scm(graph, seed=seed))
        cards = dict(zip(table.variables, table.cardinalities))
        for query in _separation_queries(graph, seed):
            if not m_separated(graph, query):
                continue
            (a,), (b,) = sorted(query.a), sorted(query.b)
            given = sorted(query.given)
            for values in itertools.product(*(range(cards[v]) for v in [a, b] + given)):
                c = dict(zip(given, values[2:]))
                both = table.probability({a: values[0], b: values[1], **c})
                left = table.probability({a: values[0], **c})
                right = table.probability({b: values[1], **c})
                base = table.probability(c) if c else 1.0
                assert abs(both * base - left * right) <= 1e-9, (query, values)
