# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Named diagrams and seeded random generators used by the checks and tests."""

import itertools
import logging

import numpy as np

from .admg import ancestors, build, descendants, induced
from .errors import GraphError
from .identify import Query

logger = logging.getLogger(__name__)

NAMED_GRAPHS = {
    "chain": ("X -> Y",),
    "bow": ("X -> Y", "X <-> Y"),
    "back_door": ("Z -> X", "Z -> Y", "X -> Y"),
    "front_door": ("X -> M", "M -> Y", "X <-> Y"),
    "g_a": ("Z -> X", "X -> Y", "Z <-> X", "Z <-> Y"),
    "p_graph": ("Z -> X", "X -> Y", "X <-> Y", "Z <-> Y"),
    "bv_graph": ("Z -> X", "Z -> Y", "X -> Y", "Z <-> X", "Z <-> Y"),
    "w_variant": ("W -> Z", "W -> Y", "Z -> X", "X -> Y", "Z <-> X", "Z <-> Y"),
    "napkin": ("W1 -> W2", "W2 -> X", "X -> Y", "W1 <-> X", "W1 <-> Y"),
}


def _from_lines(lines):
    directed, bidirected, vertices = [], [], set()
    for line in lines:
        if "<->" in line:
            a, b = (p.strip() for p in line.split("<->"))
            bidirected.append((a, b))
        else:
            a, b = (p.strip() for p in line.split("->"))
            directed.append((a, b))
        vertices.update((a, b))
    return build(vertices, directed, bidirected)


def named(name):
    """One of the named diagrams, e.g. ``named("g_a")``."""
    try:
        return _from_lines(NAMED_GRAPHS[name])
    except KeyError:
        raise GraphError(
            "unknown graph {0!r}; known: {1}".format(name, ", ".join(sorted(NAMED_GRAPHS))),
            code="UNKNOWN_VERTEX",
        ) from None


def _random_edges(rng, order, p_directed, max_bidirected):
    directed = [(a, b) for a, b in itertools.combinations(order, 2) if rng.random() < p_directed]
    pairs = list(itertools.combinations(sorted(order), 2))
    count = int(rng.integers(0, min(max_bidirected, len(pairs)) + 1))
    chosen = rng.choice(len(pairs), size=count, replace=False) if count else []
    return directed, [pairs[i] for i in sorted(chosen)]


def random_admg(seed, max_vertices=6, max_bidirected=4, min_vertices=2, p_directed=0.4):
    """Seeded random ADMG over ``V1..Vn`` with a random topological order."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min_vertices, max_vertices + 1))
    names = ["V{0}".format(i) for i in range(1, n + 1)]
    order = [names[i] for i in rng.permutation(n)]
    directed, bidirected = _random_edges(rng, order, p_directed, max_bidirected)
    return build(names, directed, bidirected)


def random_query(graph, seed, max_surrogates=2):
    """Seeded query with nonempty disjoint outcome and treatment sets.

    All values are 0; the graph needs at least two vertices.
    """
    names = sorted(graph.vertices)
    if len(names) < 2:
        raise GraphError("a query needs at least two vertices", code="UNKNOWN_VERTEX")
    rng = np.random.default_rng(seed)
    shuffled = [names[i] for i in rng.permutation(len(names))]
    n_y = 1 if len(names) < 4 else int(rng.integers(1, 3))
    n_x = int(rng.integers(1, min(2, len(names) - n_y) + 1))
    rest = shuffled[n_y + n_x:]
    n_z = int(rng.integers(0, min(max_surrogates, len(rest)) + 1))
    return Query.of(shuffled[:n_y], shuffled[n_y:n_y + n_x], rest[:n_z])


def corollary2_corpus(count, seed=0, max_extra=3, max_bidirected=2):
    """``count`` (graph, query) pairs where the surrogates cannot help.

    Each graph contains ``X -> Z -> Y`` with ``X <-> Y`` and ``Z <-> Y`` plus
    up to ``max_extra`` random vertices and edges, so the effect of ``X`` on
    ``Y`` is not identifiable and every surrogate descends from ``X`` inside
    the ancestors of ``Y``.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        extra = ["V{0}".format(i) for i in range(1, int(rng.integers(0, max_extra + 1)) + 1)]
        order = ["X", "Z", "Y"]
        for name in extra:
            order.insert(int(rng.integers(0, len(order) + 1)), name)
        directed, bidirected = _random_edges(rng, order, 0.3, max_bidirected)
        directed = sorted(set(directed) | {("X", "Z"), ("Z", "Y")})
        bidirected = sorted({tuple(sorted(e)) for e in bidirected} | {("X", "Y"), ("Y", "Z")})
        graph = build(order, directed, bidirected)
        reach = descendants(induced(graph, ancestors(graph, {"Y"})), {"X"}) - {"X", "Y"}
        z = {"Z"} | {v for v in sorted(reach) if rng.random() < 0.5}
        out.append((graph, Query.of({"Y": 0}, {"X": 0}, z)))
    return out
