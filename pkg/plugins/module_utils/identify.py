# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Identification of causal effects from observations and surrogate experiments.

``idz`` decides whether ``P(y | do(x))`` can be computed from the
observational distribution together with every experimental distribution
``P(V \\ Z' | do(Z'))``, ``Z' ⊆ Z``. It returns a symbolic estimand when it
can and a :class:`Fail` carrying the offending subproblem when it cannot;
``extract_hedge`` turns the latter into a checkable witness.

The recursion threads the current distribution symbolically. When a surrogate
becomes an active intervention (steps 3 and 4) it leaves the local graph and
every leaf of the current expression moves into the enlarged regime.
"""

import itertools
import logging
from dataclasses import dataclass, field

from .admg import (
    Hedge,
    ancestors,
    c_components,
    descendants,
    induced,
    mutilate,
    root_set,
    topological_order,
    validate_hedge,
)
from .errors import GraphError, QueryError
from .estimand import (
    Product,
    Ratio,
    Ref,
    Sum,
    Term,
    Value,
    estimand_to_json,
    joint,
    normalize,
    render,
    substitute,
    switch_regime,
)

logger = logging.getLogger(__name__)

# ============================================================================
# Limits
# ============================================================================
MAX_SUBSET_SURROGATES = 20

# Value every surrogate fixed by step 3 and every irrelevant treatment is set to
CANONICAL_VALUE = 0


# ============================================================================
# Domain types
# ============================================================================

def _assignment(items):
    if isinstance(items, dict):
        items = items.items()
    out = {}
    for item in items:
        if isinstance(item, str):
            name, value = item, CANONICAL_VALUE
        else:
            name, value = item
        out[name] = int(value)
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class Query:
    """``P(y | do(x))`` with surrogate experiments available on ``z``.

    ``y`` and ``x`` are sorted ``(name, value)`` tuples; use :meth:`of` to
    build one from dicts, pairs or bare names (value 0).
    """

    y: tuple
    x: tuple = ()
    z: frozenset = frozenset()

    @classmethod
    def of(cls, y, x=(), z=()):
        return cls(y=_assignment(y), x=_assignment(x), z=frozenset(z))

    @property
    def y_vars(self):
        return frozenset(name for name, _ in self.y)

    @property
    def x_vars(self):
        return frozenset(name for name, _ in self.x)

    def values(self):
        out = dict(self.x)
        out.update(self.y)
        return out

    def without_surrogates(self):
        return Query(self.y, self.x, frozenset())

    def validate(self, graph):
        if not self.y:
            raise QueryError("the outcome set is empty")
        y, x, z = self.y_vars, self.x_vars, self.z
        for first, second, label in ((y, x, "outcome and treatment"), (y, z, "outcome and surrogate"),
                                     (x, z, "treatment and surrogate")):
            if first & second:
                raise QueryError("{0} sets overlap on {1}".format(label, ", ".join(sorted(first & second))))
        unknown = (y | x | z) - graph.vertices
        if unknown:
            raise QueryError("unknown variables: {0}".format(", ".join(sorted(unknown))))


@dataclass(frozen=True)
class CallContext:
    """Surrogates active in a call: ``i_set`` from step 3, ``j_set`` from step 4."""

    i_set: tuple = ()
    j_set: tuple = ()

    @property
    def variables(self):
        return frozenset(name for name, _ in self.i_set + self.j_set)


@dataclass(frozen=True)
class Identified:
    estimand: object

    identified = True


@dataclass(frozen=True)
class Fail:
    """Subproblem on which the recursion stopped.

    ``local_graph`` is a single C-component, ``s_component`` the component
    left once the local treatments ``x`` are removed, ``y`` the local outcomes.
    """

    local_graph: object
    s_component: frozenset
    context: CallContext = field(default_factory=CallContext)
    x: frozenset = frozenset()
    y: frozenset = frozenset()

    identified = False


# ============================================================================
# Current distribution
# ============================================================================

@dataclass(frozen=True)
class _Current:
    """Symbolic distribution over ``variables``.

    ``chain`` is set when ``expr`` is a product of conditionals in topological
    order, one ``(variable, factor)`` pair per variable.
    """

    variables: frozenset
    expr: object
    chain: tuple = None

    def _raw(self):
        return (
            isinstance(self.expr, Term)
            and not self.expr.conditioning
            and frozenset(v for v, _ in self.expr.outcome) == self.variables
        )

    def switch(self, var, binding):
        if self.chain is not None:
            chain = tuple((v, switch_regime(f, var, binding)) for v, f in self.chain if v != var)
            return _Current(self.variables - {var}, Product(f for _, f in chain), chain)
        return _Current(self.variables - {var}, switch_regime(self.expr, var, binding))

    def marginal(self, keep):
        keep = frozenset(keep)
        if keep == self.variables:
            return self
        if self._raw():
            outcome = tuple(p for p in self.expr.outcome if p[0] in keep)
            return _Current(keep, Term(outcome, (), self.expr.regime))
        if self.chain is not None:
            prefix = self.chain[:len(keep)]
            if frozenset(v for v, _ in prefix) == keep:
                return _Current(keep, Product(f for _, f in prefix), prefix)
        return _Current(keep, Sum(self.variables - keep, self.expr))

    def conditional(self, var, preds):
        if self._raw():
            bindings = dict(self.expr.outcome)
            return Term(((var, bindings[var]),), tuple((p, bindings[p]) for p in preds), self.expr.regime)
        if self.chain is not None:
            names = [v for v, _ in self.chain]
            position = names.index(var)
            if frozenset(names[:position]) == frozenset(preds):
                return self.chain[position][1]
        numerator = self.marginal(frozenset(preds) | {var}).expr
        if not preds:
            return numerator
        return Ratio(numerator, self.marginal(preds).expr)


class _Failed(Exception):
    def __init__(self, fail):
        super().__init__("identification failed")
        self.fail = fail


# ============================================================================
# The recursion
# ============================================================================

class _Recursion:
    def __init__(self, graph):
        self.order = topological_order(graph)

    def _conditionals(self, current, vertices, members):
        order = [v for v in self.order if v in vertices]
        out = []
        for position, name in enumerate(order):
            if name in members:
                out.append((name, current.conditional(name, tuple(order[:position]))))
        return out

    def run(self, y, x, z, i_set, j_set, current, graph):
        v = graph.vertices
        xs = frozenset(x)
        logger.debug(
            "idz call: V=%s x=%s I=%s J=%s",
            sorted(v), sorted(xs), [n for n, _ in i_set], [n for n, _ in j_set],
        )

        if not xs:
            logger.debug("line 1: no treatment left")
            return Sum(v - y, current.expr)

        an = ancestors(graph, y)
        if an != v:
            logger.debug("line 2: dropping non-ancestors %s", sorted(v - an))
            return self.run(
                y, {n: b for n, b in x.items() if n in an}, z, i_set, j_set,
                current.marginal(an), induced(graph, an),
            )

        irrelevant = (v - xs) - ancestors(mutilate(graph, overline=xs), y)
        if irrelevant:
            z_w = irrelevant & z
            w = irrelevant - z
            logger.debug("line 3: surrogates %s, treatments %s", sorted(z_w), sorted(w))
            new_x = dict(x)
            new_x.update((n, Value(CANONICAL_VALUE)) for n in w)
            nxt = current
            added = []
            for name in sorted(z_w):
                nxt = nxt.switch(name, Value(CANONICAL_VALUE))
                added.append((name, Value(CANONICAL_VALUE)))
            return self.run(y, new_x, z - z_w, i_set + tuple(added), j_set, nxt, induced(graph, v - z_w))

        components = c_components(induced(graph, v - xs))
        if len(components) > 1:
            logger.debug("line 4: %d components", len(components))
            factors = []
            for s in components:
                others = v - s
                active = sorted(z & others)
                sub = current
                for name in active:
                    sub = sub.switch(name, Ref(name))
                sub_x = {n: x.get(n, Ref(n)) for n in others - z}
                factors.append(self.run(
                    s, sub_x, z - others, i_set, j_set + tuple((n, Ref(n)) for n in active),
                    sub, induced(graph, v - frozenset(active)),
                ))
            return Sum(v - (y | xs), Product(factors))

        s = components[0]
        full = c_components(graph)
        if len(full) == 1:
            logger.debug("line 5: fail on %s with S=%s", sorted(v), sorted(s))
            raise _Failed(Fail(graph, s, CallContext(i_set, j_set), xs, frozenset(y)))

        fixed = {n: b for n, b in x.items() if b != Ref(n)}
        if s in full:
            logger.debug("line 6: %s is a component", sorted(s))
            factors = [f for _, f in self._conditionals(current, v, s)]
            return substitute(Sum(s - y, Product(factors)), fixed)

        s_prime = next(c for c in full if s <= c)
        logger.debug("line 7: recurse into %s", sorted(s_prime))
        outside = {n: b for n, b in fixed.items() if n not in s_prime}
        chain = tuple((n, substitute(f, outside)) for n, f in self._conditionals(current, v, s_prime))
        return self.run(
            y, {n: b for n, b in x.items() if n in s_prime}, z, i_set, j_set,
            _Current(s_prime, Product(f for _, f in chain), chain), induced(graph, s_prime),
        )


def idz(query, graph):
    """Decide z-identifiability of ``query`` in ``graph``.

    Returns:
        Identified: with a raw (unnormalized) estimand whose free variables
            are the outcome and treatment names.
        Fail: the local subproblem on which the recursion stopped.

    Raises:
        QueryError: INVALID_QUERY.
    """
    query.validate(graph)
    recursion = _Recursion(graph)
    current = _Current(graph.vertices, joint(recursion.order))
    x = {name: Ref(name) for name in query.x_vars}
    try:
        estimand = recursion.run(query.y_vars, x, query.z, (), (), current, graph)
    except _Failed as failed:
        logger.info("not identifiable: %s", _describe(query))
        return failed.fail
    logger.info("identified: %s", _describe(query))
    return Identified(estimand)


def id(query, graph):  # pylint: disable=redefined-builtin
    """Ordinary identification from the observational distribution alone."""
    if query.z:
        raise QueryError("ordinary identification takes no surrogates")
    return idz(query, graph)


def _describe(query):
    text = "P({0} | do({1}))".format(",".join(sorted(query.y_vars)), ",".join(sorted(query.x_vars)))
    if query.z:
        text += " with do({0})".format(",".join(sorted(query.z)))
    return text


# ============================================================================
# Hedges
# ============================================================================

def _grow(local, tree, candidates, roots):
    """Attach ``candidates`` to ``tree`` level by level.

    Every vertex joins through its lexicographically smallest child already
    in the tree; vertices in ``roots`` never get a child.
    """
    edges = set()
    tree = set(tree)
    pending = set(candidates) - tree
    while pending:
        level = {}
        for vertex in sorted(pending):
            if vertex in roots:
                continue
            inside = sorted(c for c in local.children(vertex) if c in tree)
            if inside:
                level[vertex] = inside[0]
        if not level:
            break
        for vertex, child in level.items():
            edges.add((vertex, child))
            tree.add(vertex)
        pending -= set(level)
    return tree, edges


def extract_hedge(fail, query=None):
    """Hedge witnessing a :class:`Fail`.

    The root set is the set of sinks of the failing component S. F' spans S
    and F spans the whole local graph; both keep all bidirected edges among
    their vertices. The witnessed query intervenes on the local treatments
    together with the active surrogates.

    Raises:
        QueryError: MALFORMED_FAIL if the local graph is not one C-component.
    """
    local = fail.local_graph
    if len(c_components(local)) != 1 or not fail.s_component <= local.vertices:
        raise QueryError("local graph is not a single C-component", code="MALFORMED_FAIL")

    s = frozenset(fail.s_component)
    roots = root_set(induced(local, s))
    fp_tree, fp_edges = _grow(local, roots, s, roots)
    if fp_tree != s:
        raise QueryError("component does not drain into its sinks", code="MALFORMED_FAIL")
    f_tree, f_edges = _grow(local, fp_tree, local.vertices, roots)
    if f_tree != local.vertices:
        raise QueryError("treatments do not reach the component", code="MALFORMED_FAIL")

    x = frozenset(fail.x) | fail.context.variables
    if query is not None:
        logger.debug("hedge for %s", _describe(query))
    return Hedge(
        f_vertices=local.vertices,
        f_directed=frozenset(fp_edges | f_edges),
        f_bidirected=local.bidirected,
        fprime_vertices=s,
        fprime_directed=frozenset(fp_edges),
        fprime_bidirected=frozenset(e for e in local.bidirected if e[0] in s and e[1] in s),
        r=roots,
        x=x,
        y=frozenset(fail.y),
    )


# ============================================================================
# Graphical criteria
# ============================================================================

def intercepts(graph, x, zprime, y):
    """True iff every directed path from ``zprime`` to ``y`` passes through ``x``."""
    x, zprime, y = (graph.check_subset(s) for s in (x, zprime, y))
    if not zprime:
        return True
    remaining = induced(graph, graph.vertices - x)
    return not descendants(remaining, zprime - x) & y


def _identifiable(query, graph):
    return idz(query.without_surrogates(), graph).identified


@dataclass(frozen=True)
class Theorem3Verdict:
    zid: bool
    witness: frozenset = None
    tested: int = 0


def theorem3_zid(query, graph):
    """Subset criterion for z-identifiability.

    The effect is zID iff it is identifiable in ``graph`` or some ``Z' ⊆ z``
    has every directed path to ``y`` intercepted by ``x`` and makes the
    effect identifiable once arrows into ``Z'`` are cut. Subsets are tried by
    size, then lexicographically, and the first hit is reported.

    Raises:
        QueryError: SUBSET_LIMIT if ``z`` has more than 20 members.
    """
    query.validate(graph)
    if len(query.z) > MAX_SUBSET_SURROGATES:
        raise QueryError(
            "{0} surrogates exceed the subset limit of {1}".format(len(query.z), MAX_SUBSET_SURROGATES),
            code="SUBSET_LIMIT",
        )
    tested = 1
    if _identifiable(query, graph):
        return Theorem3Verdict(True, frozenset(), tested)
    names = sorted(query.z)
    for size in range(1, len(names) + 1):
        for subset in itertools.combinations(names, size):
            tested += 1
            subset = frozenset(subset)
            if not intercepts(graph, query.x_vars, subset, query.y_vars):
                continue
            if _identifiable(query, mutilate(graph, overline=subset)):
                return Theorem3Verdict(True, subset, tested)
    return Theorem3Verdict(False, None, tested)


def pearl_criterion(graph, x, z, y):
    """Sufficient two-condition test using the whole surrogate set at once."""
    x, z, y = (graph.check_subset(s) for s in (x, z, y))
    if not intercepts(graph, x, z, y):
        return False
    return _identifiable(Query.of(y, x), mutilate(graph, overline=z))


def corollary2_precheck(graph, x, y, z):
    """True when the surrogates provably cannot help.

    That is the case when every surrogate descends from ``x`` inside the
    ancestors of ``y`` and the effect is not identifiable without them.
    """
    x, y, z = (graph.check_subset(s) for s in (x, y, z))
    an = ancestors(graph, y)
    reach = descendants(induced(graph, an), x & an)
    if not z <= reach:
        return False
    return not _identifiable(Query.of(y, x), graph)


# ============================================================================
# Reports
# ============================================================================

def verdict_json(result, hedge=None, witness=None, fmt="text"):
    """Verdict document shared by the CLI and the Ansible modules."""
    doc = {
        "verdict": "identified" if result.identified else "not-zid",
        "estimand": None,
        "rendered": None,
        "hedge": hedge.to_json() if hedge is not None else None,
        "witness_subset": sorted(witness) if witness is not None else None,
    }
    if result.identified:
        estimand = normalize(result.estimand)
        doc["estimand"] = estimand_to_json(estimand)
        doc["rendered"] = render(estimand, fmt if fmt in ("text", "latex") else "text")
    return doc


def zid_report(query, graph, fmt="text", result=None):
    """Run every check on ``query`` and bundle the results.

    ``result`` is an :func:`idz` verdict already computed for ``query``. The
    hedge is validated against ``graph`` and the outcome reported as
    ``hedge_valid``; the subset criterion is skipped beyond the subset limit.
    """
    result = idz(query, graph) if result is None else result
    hedge = None
    valid = None
    if not result.identified:
        hedge = extract_hedge(result, query)
        try:
            valid = validate_hedge(graph, hedge, hedge.x, hedge.y)
        except GraphError:
            valid = False
        if not valid:
            logger.warning("extracted hedge does not validate for %s", _describe(query))
    verdict = None
    if len(query.z) <= MAX_SUBSET_SURROGATES:
        verdict = theorem3_zid(query, graph)
        if verdict.zid != result.identified:
            logger.warning("subset criterion disagrees with the recursion on %s", _describe(query))
    doc = verdict_json(result, hedge, verdict.witness if verdict is not None else None, fmt)
    doc["corollary2"] = corollary2_precheck(graph, query.x_vars, query.y_vars, query.z)
    doc["subsets_tested"] = verdict.tested if verdict is not None else None
    doc["hedge_valid"] = valid
    return doc
