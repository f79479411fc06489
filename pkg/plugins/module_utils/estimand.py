# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Symbolic probability expressions.

An estimand is a tree of :class:`Term` leaves combined by :class:`Sum`,
:class:`Product` and :class:`Ratio` nodes. Every leaf names the experimental
regime it is read from: the observational distribution when the regime is
empty, ``P(V \\ Z' | do(Z'=z'))`` otherwise.

Variable values at a leaf are *bindings*: either a concrete :class:`Value` or
a :class:`Ref` to a name that is bound by an enclosing sum or supplied by the
caller at evaluation time.
"""

import itertools
import logging
from dataclasses import dataclass

from .errors import EstimandError

logger = logging.getLogger(__name__)


# ============================================================================
# Tree nodes
# ============================================================================

@dataclass(frozen=True)
class Value:
    value: int


@dataclass(frozen=True)
class Ref:
    name: str


def _pairs(items):
    if isinstance(items, dict):
        items = items.items()
    out = []
    for var, binding in items:
        if isinstance(binding, int):
            binding = Value(binding)
        elif binding is None:
            binding = Ref(var)
        out.append((var, binding))
    return tuple(out)


@dataclass(frozen=True)
class Term:
    """``P[regime](outcome | conditioning)``.

    ``outcome`` keeps its order for rendering; ``conditioning`` and ``regime``
    are kept as given. Each is a tuple of ``(variable, binding)`` pairs.
    """

    outcome: tuple
    conditioning: tuple = ()
    regime: tuple = ()

    def __post_init__(self):
        for name in ("outcome", "conditioning", "regime"):
            object.__setattr__(self, name, _pairs(getattr(self, name)))
        if not self.outcome:
            raise EstimandError("term without outcome variables", code="MALFORMED_ESTIMAND")
        seen = set()
        for var, _ in self.outcome + self.conditioning + self.regime:
            if var in seen:
                raise EstimandError("variable {0} used twice in one term".format(var), code="MALFORMED_ESTIMAND")
            seen.add(var)


@dataclass(frozen=True)
class Sum:
    bound: frozenset
    body: object

    def __post_init__(self):
        object.__setattr__(self, "bound", frozenset(self.bound))


@dataclass(frozen=True)
class Product:
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Ratio:
    numerator: object
    denominator: object


ONE = Product(())


def joint(variables, regime=()):
    """Raw term over ``variables`` with every value referenced by name."""
    return Term(outcome=tuple((v, Ref(v)) for v in variables), regime=regime)


# ============================================================================
# Evaluation
# ============================================================================

def _resolve(binding, env):
    if isinstance(binding, Value):
        return binding.value
    if binding.name not in env:
        raise EstimandError("no value for {0}".format(binding.name), code="UNBOUND_VARIABLE")
    return env[binding.name]


def _assignment(pairs, env, cardinalities):
    values = {}
    for var, binding in pairs:
        value = _resolve(binding, env)
        card = cardinalities.get(var)
        if card is None:
            raise EstimandError("variable {0} is not in the data".format(var), code="DOMAIN_MISMATCH")
        if not 0 <= value < card:
            raise EstimandError(
                "value {0} out of range for {1} (cardinality {2})".format(value, var, card),
                code="DOMAIN_MISMATCH",
            )
        values[var] = value
    return values


def _divide(numerator, denominator):
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def _evaluate(node, env, data):
    if isinstance(node, Term):
        cards = data.cardinalities
        regime = _assignment(node.regime, env, cards)
        table = data.table(regime)
        given = _assignment(node.conditioning, env, cards)
        event = dict(given)
        event.update(_assignment(node.outcome, env, cards))
        if not given:
            return table.probability(event)
        return _divide(table.probability(event), table.probability(given))
    if isinstance(node, Sum):
        names = sorted(node.bound)
        domains = []
        for name in names:
            if name not in data.cardinalities:
                raise EstimandError("summed variable {0} is not in the data".format(name), code="DOMAIN_MISMATCH")
            domains.append(range(data.cardinalities[name]))
        total = 0.0
        inner = dict(env)
        for values in itertools.product(*domains):
            inner.update(zip(names, values))
            total += _evaluate(node.body, inner, data)
        return total
    if isinstance(node, Product):
        result = 1.0
        for factor in node.factors:
            result *= _evaluate(factor, env, data)
            if result == 0.0:
                break
        return result
    if isinstance(node, Ratio):
        return _divide(_evaluate(node.numerator, env, data), _evaluate(node.denominator, env, data))
    raise EstimandError("unknown node {0!r}".format(node), code="MALFORMED_ESTIMAND")


def evaluate(estimand, free, data):
    """Numeric value of ``estimand`` given values for its free variables.

    Args:
        estimand: Expression tree.
        free (dict): Values for the free variables.
        data: A distribution family exposing ``cardinalities`` and
            ``table(regime)``, as :class:`scm_oracle.DistributionFamily` does.

    Raises:
        EstimandError: MISSING_REGIME, UNBOUND_VARIABLE or DOMAIN_MISMATCH.
    """
    return _evaluate(estimand, dict(free), data)


# ============================================================================
# Traversal helpers
# ============================================================================

def _leaf_refs(term):
    return {b.name for _, b in term.outcome + term.conditioning + term.regime if isinstance(b, Ref)}


def free_variables(estimand):
    """Names referenced at leaves and not bound by an enclosing sum."""
    if isinstance(estimand, Term):
        return frozenset(_leaf_refs(estimand))
    if isinstance(estimand, Sum):
        return free_variables(estimand.body) - estimand.bound
    if isinstance(estimand, Product):
        return frozenset().union(*(free_variables(f) for f in estimand.factors))
    return free_variables(estimand.numerator) | free_variables(estimand.denominator)


def regime_variables(estimand):
    """Variables intervened on in any leaf."""
    if isinstance(estimand, Term):
        return frozenset(var for var, _ in estimand.regime)
    if isinstance(estimand, Sum):
        return regime_variables(estimand.body)
    if isinstance(estimand, Product):
        return frozenset().union(*(regime_variables(f) for f in estimand.factors))
    return regime_variables(estimand.numerator) | regime_variables(estimand.denominator)


def switch_regime(estimand, var, binding):
    """Move every leaf into the regime that additionally fixes ``var``.

    ``var`` leaves outcome, conditioning and summation everywhere. A leaf left
    without outcome variables becomes the empty product.
    """
    if isinstance(estimand, Term):
        outcome = tuple(p for p in estimand.outcome if p[0] != var)
        if not outcome:
            return ONE
        conditioning = tuple(p for p in estimand.conditioning if p[0] != var)
        regime = tuple(sorted(estimand.regime + ((var, binding),), key=lambda p: p[0]))
        return Term(outcome=outcome, conditioning=conditioning, regime=regime)
    if isinstance(estimand, Sum):
        return Sum(estimand.bound - {var}, switch_regime(estimand.body, var, binding))
    if isinstance(estimand, Product):
        return Product(switch_regime(f, var, binding) for f in estimand.factors)
    return Ratio(
        switch_regime(estimand.numerator, var, binding),
        switch_regime(estimand.denominator, var, binding),
    )


def substitute(estimand, bindings):
    """Replace free references ``Ref(name)`` by ``bindings[name]``."""
    if not bindings:
        return estimand
    if isinstance(estimand, Term):
        def swap(pairs):
            return tuple(
                (var, bindings.get(b.name, b) if isinstance(b, Ref) else b) for var, b in pairs
            )

        return Term(swap(estimand.outcome), swap(estimand.conditioning), swap(estimand.regime))
    if isinstance(estimand, Sum):
        inner = {k: v for k, v in bindings.items() if k not in estimand.bound}
        return Sum(estimand.bound, substitute(estimand.body, inner))
    if isinstance(estimand, Product):
        return Product(substitute(f, bindings) for f in estimand.factors)
    return Ratio(substitute(estimand.numerator, bindings), substitute(estimand.denominator, bindings))


def normalize(estimand):
    """Flatten products, drop empty sums and unwrap single-factor products."""
    if isinstance(estimand, Term):
        return estimand
    if isinstance(estimand, Sum):
        body = normalize(estimand.body)
        if not estimand.bound:
            return body
        return Sum(estimand.bound, body)
    if isinstance(estimand, Product):
        flat = []
        for factor in estimand.factors:
            factor = normalize(factor)
            if isinstance(factor, Product):
                flat.extend(factor.factors)
            else:
                flat.append(factor)
        if len(flat) == 1:
            return flat[0]
        return Product(flat)
    return Ratio(normalize(estimand.numerator), normalize(estimand.denominator))


# ============================================================================
# Rendering
# ============================================================================

def _symbol(name, latex=False):
    """Value symbol of a variable.

    Names without lowercase letters print lowercased (``X`` as ``x``); any
    other name prints verbatim in quotes, so distinct names never collide.
    """
    if name == name.upper():
        return name.lower()
    if latex:
        return "\\text{{{0}}}".format(name)
    return "'{0}'".format(name)


def _label(var, binding, latex=False):
    name = _symbol(var, latex)
    if isinstance(binding, Value):
        return "{0}={1}".format(name, binding.value)
    if binding.name == var:
        return name
    if latex:
        return "{0}={1}".format(name, _symbol(binding.name, True))
    return "{0}=@{1}".format(name, _symbol(binding.name))


def _text(node):
    if isinstance(node, Term):
        regime = ""
        if node.regime:
            regime = "[{0}]".format(",".join(_label(v, b) for v, b in node.regime))
        inner = ",".join(_label(v, b) for v, b in node.outcome)
        if node.conditioning:
            inner += "|" + ",".join(_label(v, b) for v, b in node.conditioning)
        return "P{0}({1})".format(regime, inner)
    if isinstance(node, Sum):
        bound = ",".join(sorted(_symbol(v) for v in node.bound))
        body = _text(node.body)
        if not isinstance(node.body, Term):
            body = "[{0}]".format(body)
        return "sum_{{{0}}} {1}".format(bound, body)
    if isinstance(node, Product):
        if not node.factors:
            return "1"
        return " * ".join(
            "({0})".format(_text(f)) if isinstance(f, (Sum, Ratio)) else _text(f) for f in node.factors
        )
    parts = []
    for side in (node.numerator, node.denominator):
        text = _text(side)
        if isinstance(side, (Sum, Ratio)) or (isinstance(side, Product) and len(side.factors) > 1):
            text = "({0})".format(text)
        parts.append(text)
    return " / ".join(parts)


def _latex(node):
    if isinstance(node, Term):
        sub = ""
        if node.regime:
            sub = "_{{do({0})}}".format(", ".join(_label(v, b, True) for v, b in node.regime))
        inner = ", ".join(_label(v, b, True) for v, b in node.outcome)
        if node.conditioning:
            inner += " \\mid " + ", ".join(_label(v, b, True) for v, b in node.conditioning)
        return "P{0}({1})".format(sub, inner)
    if isinstance(node, Sum):
        bound = ", ".join(sorted(_symbol(v, True) for v in node.bound))
        body = _latex(node.body)
        if not isinstance(node.body, Term):
            body = "\\left[{0}\\right]".format(body)
        return "\\sum_{{{0}}} {1}".format(bound, body)
    if isinstance(node, Product):
        if not node.factors:
            return "1"
        return " \\, ".join(
            "\\left({0}\\right)".format(_latex(f)) if isinstance(f, Sum) else _latex(f) for f in node.factors
        )
    return "\\frac{{{0}}}{{{1}}}".format(_latex(node.numerator), _latex(node.denominator))


def render(estimand, fmt="text"):
    """Deterministic string form of ``estimand`` (``text`` or ``latex``)."""
    if fmt == "text":
        return _text(estimand)
    if fmt == "latex":
        return _latex(estimand)
    raise EstimandError("unknown format {0!r}".format(fmt), code="MALFORMED_ESTIMAND")


# ============================================================================
# JSON
# ============================================================================

def _binding_json(var, binding):
    if isinstance(binding, Value):
        return {"var": var, "value": binding.value}
    return {"var": var, "ref": binding.name}


def _binding_from_json(item):
    try:
        if "value" in item:
            return item["var"], Value(int(item["value"]))
        return item["var"], Ref(item["ref"])
    except (KeyError, TypeError, ValueError) as exc:
        raise EstimandError("bad binding {0!r}".format(item), code="MALFORMED_ESTIMAND") from exc


def estimand_to_json(estimand):
    if isinstance(estimand, Term):
        return {
            "kind": "term",
            "outcome": [_binding_json(v, b) for v, b in estimand.outcome],
            "conditioning": [_binding_json(v, b) for v, b in estimand.conditioning],
            "regime": [_binding_json(v, b) for v, b in estimand.regime],
        }
    if isinstance(estimand, Sum):
        return {"kind": "sum", "bound": sorted(estimand.bound), "body": estimand_to_json(estimand.body)}
    if isinstance(estimand, Product):
        return {"kind": "product", "factors": [estimand_to_json(f) for f in estimand.factors]}
    return {
        "kind": "ratio",
        "numerator": estimand_to_json(estimand.numerator),
        "denominator": estimand_to_json(estimand.denominator),
    }


def estimand_from_json(data):
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "term":
        return Term(
            outcome=[_binding_from_json(i) for i in data.get("outcome", [])],
            conditioning=[_binding_from_json(i) for i in data.get("conditioning", [])],
            regime=[_binding_from_json(i) for i in data.get("regime", [])],
        )
    if kind == "sum":
        return Sum(frozenset(data["bound"]), estimand_from_json(data["body"]))
    if kind == "product":
        return Product(estimand_from_json(f) for f in data["factors"])
    if kind == "ratio":
        return Ratio(estimand_from_json(data["numerator"]), estimand_from_json(data["denominator"]))
    raise EstimandError("unknown node kind {0!r}".format(kind), code="MALFORMED_ESTIMAND")
