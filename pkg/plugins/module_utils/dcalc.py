# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""m-separation and the applicability tests of the three do-calculus rules.

Separation on a mixed graph is decided on its latent augmentation: every
bidirected edge ``u <-> v`` becomes a hidden parent ``h -> u, h -> v`` and
ordinary d-separation runs on the resulting DAG.
"""

import logging
from dataclasses import dataclass

import networkx as nx

from .admg import ancestors, mutilate
from .errors import SeparationError

logger = logging.getLogger(__name__)

# networkx 3.3 renamed d_separated to is_d_separator
_d_separated = getattr(nx, "is_d_separator", None) or getattr(nx, "d_separated")

_HIDDEN = "__latent_{0}_{1}"


@dataclass(frozen=True)
class SeparationQuery:
    a: frozenset
    b: frozenset
    given: frozenset = frozenset()

    def __post_init__(self):
        for name in ("a", "b", "given"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        _check_disjoint(a=self.a, b=self.b, given=self.given)


def _check_disjoint(**sets):
    names = sorted(sets)
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            common = sets[first] & sets[second]
            if common:
                raise SeparationError(
                    "{0} and {1} share {2}".format(first, second, ", ".join(sorted(common)))
                )


def latent_augmentation(graph):
    """DAG with one hidden parent per bidirected edge."""
    dag = nx.DiGraph(graph.dag)
    for u, v in sorted(graph.bidirected):
        hidden = _HIDDEN.format(u, v)
        dag.add_edge(hidden, u)
        dag.add_edge(hidden, v)
    return dag


def m_separated(graph, query):
    """True iff ``query.a`` and ``query.b`` are m-separated given ``query.given``."""
    for part in (query.a, query.b, query.given):
        graph.check_subset(part)
    if not query.a or not query.b:
        return True
    return bool(_d_separated(latent_augmentation(graph), set(query.a), set(query.b), set(query.given)))


def _prepare(y, x_hat, z, w, label):
    y, x_hat, z, w = (frozenset(s) for s in (y, x_hat, z, w))
    _check_disjoint(**{"y": y, "x_hat": x_hat, label: z, "w": w})
    return y, x_hat, z, w


def rule1_applicable(graph, y, x_hat, z_obs, w):
    """Insertion/deletion of observations: ``P(y|do(x),z,w) = P(y|do(x),w)``."""
    y, x_hat, z_obs, w = _prepare(y, x_hat, z_obs, w, "z_obs")
    cut = mutilate(graph, overline=x_hat)
    return m_separated(cut, SeparationQuery(y, z_obs, x_hat | w))


def rule2_applicable(graph, y, x_hat, z_exchange, w):
    """Action/observation exchange: ``P(y|do(x),do(z),w) = P(y|do(x),z,w)``."""
    y, x_hat, z_exchange, w = _prepare(y, x_hat, z_exchange, w, "z_exchange")
    cut = mutilate(graph, overline=x_hat, underline=z_exchange)
    return m_separated(cut, SeparationQuery(y, z_exchange, x_hat | w))


def rule3_applicable(graph, y, x_hat, z_del, w):
    """Insertion/deletion of actions: ``P(y|do(x),do(z),w) = P(y|do(x),w)``.

    Only the members of ``z_del`` that are not ancestors of ``w`` once arrows
    into ``x_hat`` are cut get their incoming arrows removed.
    """
    y, x_hat, z_del, w = _prepare(y, x_hat, z_del, w, "z_del")
    if not z_del:
        return True
    z_star = z_del - ancestors(mutilate(graph, overline=x_hat), w)
    cut = mutilate(graph, overline=x_hat | z_star)
    return m_separated(cut, SeparationQuery(y, z_del, x_hat | w))
