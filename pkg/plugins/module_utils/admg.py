# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Acyclic directed mixed graphs (ADMGs).

Directed edges encode causation, bidirected edges encode latent confounding.
All graphs are immutable; every operation returns a new graph or a set and
breaks ties lexicographically on vertex names.
"""

import logging
import re
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from .errors import GraphError

logger = logging.getLogger(__name__)

_NAME = re.compile(r"^[A-Za-z0-9_]+$")


def check_name(name):
    """Return ``name`` if it is a valid variable token, raise otherwise."""
    if not isinstance(name, str) or not _NAME.match(name):
        raise GraphError("invalid variable name {0!r}".format(name), code="UNKNOWN_VERTEX")
    return name


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Admg:
    """Causal diagram over observed variables.

    Attributes:
        vertices (frozenset): Variable names.
        directed (frozenset): ``(parent, child)`` pairs.
        bidirected (frozenset): Unordered pairs stored as sorted tuples.
    """

    vertices: frozenset
    directed: frozenset
    bidirected: frozenset

    @cached_property
    def dag(self):
        graph = nx.DiGraph()
        graph.add_nodes_from(sorted(self.vertices))
        graph.add_edges_from(sorted(self.directed))
        return graph

    @cached_property
    def confounding(self):
        graph = nx.Graph()
        graph.add_nodes_from(sorted(self.vertices))
        graph.add_edges_from(sorted(self.bidirected))
        return graph

    def parents(self, vertex):
        return frozenset(self.dag.predecessors(vertex))

    def children(self, vertex):
        return frozenset(self.dag.successors(vertex))

    def check_subset(self, names):
        """Return ``names`` as a frozenset, raising UNKNOWN_VERTEX on strays."""
        names = frozenset(names)
        unknown = names - self.vertices
        if unknown:
            raise GraphError(
                "unknown vertices: {0}".format(", ".join(sorted(unknown))),
                code="UNKNOWN_VERTEX",
            )
        return names

    def __str__(self):
        return format_graph(self)


def _assemble(vertices, directed, bidirected):
    """Build a graph from parts already known to be valid."""
    return Admg(
        vertices=frozenset(vertices),
        directed=frozenset(directed),
        bidirected=frozenset(_pair(a, b) for a, b in bidirected),
    )


# ============================================================================
# Construction
# ============================================================================

def build(vertices, directed_edges=(), bidirected_edges=()):
    """Validate the parts of a diagram and return it as an :class:`Admg`.

    Args:
        vertices: Iterable of variable names.
        directed_edges: Iterable of ``(parent, child)`` pairs.
        bidirected_edges: Iterable of unordered pairs.

    Raises:
        GraphError: CYCLE, SELF_LOOP, UNKNOWN_VERTEX or DUPLICATE_EDGE.
    """
    names = frozenset(check_name(v) for v in vertices)
    directed = set()
    bidirected = set()

    for kind, edges, store in (("->", directed_edges, directed), ("<->", bidirected_edges, bidirected)):
        for edge in edges:
            a, b = edge
            for end in (a, b):
                if end not in names:
                    raise GraphError(
                        "edge {0} {1} {2} uses unknown vertex {3!r}".format(a, kind, b, end),
                        code="UNKNOWN_VERTEX",
                    )
            if a == b:
                raise GraphError("self-loop {0} {1} {0}".format(a, kind), code="SELF_LOOP")
            key = (a, b) if kind == "->" else _pair(a, b)
            if key in store:
                raise GraphError("duplicate edge {0} {1} {2}".format(a, kind, b), code="DUPLICATE_EDGE")
            store.add(key)

    graph = _assemble(names, directed, bidirected)
    try:
        cycle = nx.find_cycle(graph.dag)
    except nx.NetworkXNoCycle:
        return graph
    path = " -> ".join([cycle[0][0]] + [edge[1] for edge in cycle])
    raise GraphError("directed cycle {0}".format(path), code="CYCLE")


# ============================================================================
# Reachability and subgraphs
# ============================================================================

def ancestors(graph, names):
    """Vertices with a directed path into ``names``, including ``names``."""
    names = graph.check_subset(names)
    found = set(names)
    for vertex in names:
        found |= nx.ancestors(graph.dag, vertex)
    return frozenset(found)


def descendants(graph, names):
    """Vertices reachable from ``names`` by directed paths, including ``names``."""
    names = graph.check_subset(names)
    found = set(names)
    for vertex in names:
        found |= nx.descendants(graph.dag, vertex)
    return frozenset(found)


def induced(graph, names):
    """Subgraph on ``names`` keeping every edge with both endpoints inside."""
    names = graph.check_subset(names)
    return _assemble(
        names,
        (e for e in graph.directed if e[0] in names and e[1] in names),
        (e for e in graph.bidirected if e[0] in names and e[1] in names),
    )


def mutilate(graph, overline=(), underline=()):
    """Edge subgraph with arrows into ``overline`` and out of ``underline`` cut.

    A bidirected edge has an arrowhead at both ends, so it is cut when either
    endpoint is in ``overline``; ``underline`` leaves bidirected edges alone.
    """
    overline = graph.check_subset(overline)
    underline = graph.check_subset(underline)
    return _assemble(
        graph.vertices,
        (e for e in graph.directed if e[1] not in overline and e[0] not in underline),
        (e for e in graph.bidirected if e[0] not in overline and e[1] not in overline),
    )


# ============================================================================
# Structure
# ============================================================================

def c_components(graph):
    """Partition of the vertices into confounded components.

    Components are ordered by their lexicographically smallest member.
    """
    parts = (frozenset(c) for c in nx.connected_components(graph.confounding))
    return tuple(sorted(parts, key=min))


def topological_order(graph):
    """Parents before children, ties broken lexicographically."""
    return tuple(nx.lexicographical_topological_sort(graph.dag))


def root_set(graph):
    """Vertices without directed children."""
    return frozenset(v for v in graph.vertices if graph.dag.out_degree(v) == 0)


def is_c_component(graph):
    return bool(graph.vertices) and nx.is_connected(graph.confounding)


def is_c_forest(graph, roots):
    """True iff ``graph`` is an R-rooted C-forest for ``R = roots``.

    The graph must be a single C-component, every vertex may have at most one
    child, and ``roots`` must be exactly the set of sinks.
    """
    roots = graph.check_subset(roots)
    if not is_c_component(graph):
        return False
    if any(graph.dag.out_degree(v) > 1 for v in graph.vertices):
        return False
    return roots == root_set(graph)


# ============================================================================
# Hedges
# ============================================================================

@dataclass(frozen=True)
class Hedge:
    """Pair of nested C-forests witnessing that ``P_x(y)`` is not identifiable.

    Attributes:
        f_vertices, f_directed, f_bidirected: The outer forest F.
        fprime_vertices, fprime_directed, fprime_bidirected: The inner forest F'.
        r (frozenset): Shared root set.
        x (frozenset): Interventions of the witnessed query.
        y (frozenset): Outcomes of the witnessed query.
    """

    f_vertices: frozenset
    f_directed: frozenset
    f_bidirected: frozenset
    fprime_vertices: frozenset
    fprime_directed: frozenset
    fprime_bidirected: frozenset
    r: frozenset
    x: frozenset = frozenset()
    y: frozenset = frozenset()

    @property
    def forest(self):
        return _assemble(self.f_vertices, self.f_directed, self.f_bidirected)

    @property
    def forest_prime(self):
        return _assemble(self.fprime_vertices, self.fprime_directed, self.fprime_bidirected)

    def to_json(self):
        def part(vertices, directed, bidirected):
            return {
                "vertices": sorted(vertices),
                "directed": [list(e) for e in sorted(directed)],
                "bidirected": [list(e) for e in sorted(bidirected)],
            }

        return {
            "f": part(self.f_vertices, self.f_directed, self.f_bidirected),
            "f_prime": part(self.fprime_vertices, self.fprime_directed, self.fprime_bidirected),
            "r": sorted(self.r),
            "x": sorted(self.x),
            "y": sorted(self.y),
        }


def _check_witness(graph, hedge):
    f_vertices = frozenset(hedge.f_vertices)
    fp_vertices = frozenset(hedge.fprime_vertices)
    graph.check_subset(f_vertices)
    if not fp_vertices <= f_vertices:
        raise GraphError("F' is not contained in F", code="MALFORMED_WITNESS")

    for label, vertices, directed, bidirected in (
        ("F", f_vertices, hedge.f_directed, hedge.f_bidirected),
        ("F'", fp_vertices, hedge.fprime_directed, hedge.fprime_bidirected),
    ):
        pairs = set(directed) | {_pair(a, b) for a, b in bidirected}
        if any(a not in vertices or b not in vertices for a, b in pairs):
            raise GraphError("{0} has an edge leaving its vertex set".format(label), code="MALFORMED_WITNESS")
        if not set(directed) <= graph.directed or not {_pair(a, b) for a, b in bidirected} <= graph.bidirected:
            raise GraphError("{0} uses edges absent from the graph".format(label), code="MALFORMED_WITNESS")

    if not set(hedge.fprime_directed) <= set(hedge.f_directed) or not (
        {_pair(a, b) for a, b in hedge.fprime_bidirected} <= {_pair(a, b) for a, b in hedge.f_bidirected}
    ):
        raise GraphError("F' has edges outside F", code="MALFORMED_WITNESS")


def validate_hedge(graph, hedge, x, y):
    """Check that ``hedge`` is a hedge for ``P_x(y)`` in ``graph``.

    Root sets are read with ``R`` a (not necessarily strict) subset of the
    ancestors of ``y`` once arrows into ``x`` are cut.

    Raises:
        GraphError: MALFORMED_WITNESS if the forests are not edge subgraphs of
            ``graph`` or F' is not inside F; UNKNOWN_VERTEX for stray names.
    """
    x = graph.check_subset(x)
    y = graph.check_subset(y)
    _check_witness(graph, hedge)

    roots = frozenset(hedge.r)
    if not roots <= frozenset(hedge.fprime_vertices):
        return False
    forest, forest_prime = hedge.forest, hedge.forest_prime
    if not (is_c_forest(forest, roots) and is_c_forest(forest_prime, roots)):
        return False
    if not forest.vertices & x or forest_prime.vertices & x:
        return False
    return roots <= ancestors(mutilate(graph, overline=x), y)


# ============================================================================
# Text format
# ============================================================================

def format_graph(graph):
    """Render ``graph`` in the line-oriented edge format read by the CLI."""
    lines = ["{0} -> {1}".format(a, b) for a, b in sorted(graph.directed)]
    lines += ["{0} <-> {1}".format(a, b) for a, b in sorted(graph.bidirected)]
    touched = {v for edge in graph.directed | graph.bidirected for v in edge}
    lines += ["node {0}".format(v) for v in sorted(graph.vertices - touched)]
    return "\n".join(lines) + ("\n" if lines else "")
