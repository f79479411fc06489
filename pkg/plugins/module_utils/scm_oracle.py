# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Brute-force discrete structural causal models.

Every model is small enough to enumerate: one exogenous latent per
bidirected edge, one exogenous noise per observed variable, and a total
mechanism table per observed variable. Joint and interventional tables are
computed exactly by pushing the whole exogenous grid through the mechanisms.
"""

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, lstsq, null_space
from scipy.special import softmax

from .admg import build, topological_order
from .errors import EstimandError, OracleError
from .estimand import evaluate

logger = logging.getLogger(__name__)

# ============================================================================
# Enumeration caps
# ============================================================================
MAX_ENUMERABLE_VARIABLES = 16
MAX_STATE_SPACE = 2 ** 24
MAX_FAMILY_SURROGATES = 6

# ============================================================================
# Witness search thresholds
# ============================================================================
AGREEMENT_TOLERANCE = 1e-7
GAP_THRESHOLD = 1e-3
TARGET_GAP = 0.05
PROJECTION_TOLERANCE = 1e-10
WITNESS_LATENT_CARDINALITY = 4
WITNESS_NOISE_EXTRA = 2
WITNESS_RESTARTS = 32

DEFAULT_CARDINALITY = 2


# ============================================================================
# Models
# ============================================================================

def _latent_name(edge):
    return "U_{0}_{1}".format(*edge)


def _noise_name(var):
    return "N_{0}".format(var)


@dataclass(frozen=True, eq=False)
class DiscreteScm:
    """Discrete model inducing ``graph``.

    Attributes:
        graph (Admg): Diagram the model induces.
        cardinality (dict): Observed variable -> number of values.
        priors (dict): Exogenous name -> probability vector. Latents are
            named ``U_a_b`` after their bidirected edge, noises ``N_v``.
        mechanisms (dict): Observed variable -> integer array indexed by
            sorted parent values, incident latent values (sorted by name)
            and the variable's own noise value.
    """

    graph: object
    cardinality: dict
    priors: dict
    mechanisms: dict

    def parents_of(self, var):
        return tuple(sorted(self.graph.parents(var)))

    def latents_of(self, var):
        return tuple(sorted(_latent_name(e) for e in self.graph.bidirected if var in e))

    @property
    def latents(self):
        return tuple(sorted(_latent_name(e) for e in self.graph.bidirected))

    @property
    def order(self):
        return topological_order(self.graph)

    @property
    def exogenous(self):
        return self.latents + tuple(_noise_name(v) for v in self.order)

    def with_priors(self, priors):
        merged = dict(self.priors)
        merged.update(priors)
        return replace(self, priors=merged)

    @cached_property
    def grid(self):
        return _Grid(self)


class _Grid:
    """Every joint configuration of the exogenous variables, flattened."""

    def __init__(self, scm):
        self.names = scm.exogenous
        shape = tuple(len(scm.priors[n]) for n in self.names)
        self.size = math.prod(shape)
        if self.size > MAX_STATE_SPACE:
            raise OracleError(
                "exogenous state space {0} exceeds {1}".format(self.size, MAX_STATE_SPACE)
            )
        # one small-integer axis per exogenous variable
        flat = np.arange(self.size)
        self.values = {}
        stride = self.size
        for name, card in zip(self.names, shape):
            stride //= card
            self.values[name] = ((flat // stride) % card).astype(np.min_scalar_type(card - 1))

    def weights(self, priors, skip=None):
        """Product of prior weights per configuration, leaving out ``skip``."""
        w = np.ones(self.size)
        for name in self.names:
            if name != skip:
                w *= np.asarray(priors[name])[self.values[name]]
        return w


def _check_size(graph):
    count = len(graph.vertices) + len(graph.bidirected)
    if count > MAX_ENUMERABLE_VARIABLES:
        raise OracleError(
            "{0} observed and latent variables exceed {1}".format(count, MAX_ENUMERABLE_VARIABLES)
        )


def _cardinalities(graph, cardinalities):
    cards = {v: DEFAULT_CARDINALITY for v in graph.vertices}
    for var, card in (cardinalities or {}).items():
        graph.check_subset([var])
        if int(card) < 2:
            raise OracleError("cardinality of {0} must be at least 2".format(var), code="DOMAIN_MISMATCH")
        cards[var] = int(card)
    return cards


def random_scm(graph, cardinalities=None, seed=0, latent_cardinality=2, noise_extra=0):
    """Seeded random model inducing ``graph``.

    Each noise has ``2 * card + noise_extra`` values. For every configuration
    of parents and latents the first ``card`` noise values map to a
    permutation of the domain, so every value keeps positive probability.

    Raises:
        OracleError: SIZE_LIMIT.
    """
    _check_size(graph)
    cards = _cardinalities(graph, cardinalities)
    rng = np.random.default_rng(seed)
    priors = {}
    for edge in sorted(graph.bidirected):
        priors[_latent_name(edge)] = rng.dirichlet(np.ones(latent_cardinality))

    mechanisms = {}
    for var in topological_order(graph):
        card = cards[var]
        noise = 2 * card + noise_extra
        priors[_noise_name(var)] = rng.dirichlet(np.ones(noise))
        shape = tuple(cards[p] for p in sorted(graph.parents(var)))
        shape += (latent_cardinality,) * sum(1 for e in graph.bidirected if var in e)
        rows = math.prod(shape)
        surjective = np.argsort(rng.random((rows, card)), axis=1)
        rest = rng.integers(0, card, size=(rows, noise - card))
        table = np.concatenate([surjective, rest], axis=1).astype(np.intp)
        mechanisms[var] = table.reshape(shape + (noise,))

    return DiscreteScm(graph=graph, cardinality=cards, priors=priors, mechanisms=mechanisms)


def _propagate(scm, do):
    grid = scm.grid
    values = {}
    for var in scm.order:
        if var in do:
            values[var] = np.full(grid.size, do[var], dtype=np.intp)
            continue
        index = tuple(values[p] for p in scm.parents_of(var))
        index += tuple(grid.values[u] for u in scm.latents_of(var))
        index += (grid.values[_noise_name(var)],)
        values[var] = scm.mechanisms[var][index]
    return values


def _flat_index(scm, values, variables):
    if not variables:
        return np.zeros(scm.grid.size, dtype=np.intp)
    dims = tuple(scm.cardinality[v] for v in variables)
    return np.ravel_multi_index(tuple(values[v] for v in variables), dims)


def _check_assignment(scm, assignment):
    scm.graph.check_subset(assignment)
    for var, value in assignment.items():
        if not 0 <= int(value) < scm.cardinality[var]:
            raise OracleError(
                "value {0} out of range for {1}".format(value, var), code="DOMAIN_MISMATCH"
            )
    return {k: int(v) for k, v in assignment.items()}


# ============================================================================
# Tables
# ============================================================================

@dataclass(eq=False)
class DistributionTable:
    """Exact distribution over ``variables`` (sorted names).

    ``probabilities`` has one axis per variable. Marginals are cached.
    """

    variables: tuple
    cardinalities: tuple
    probabilities: np.ndarray
    _marginals: dict = field(default_factory=dict, init=False, repr=False)

    def total(self):
        return float(self.probabilities.sum())

    def _marginal_array(self, keep):
        keep = frozenset(keep)
        if keep not in self._marginals:
            axes = tuple(i for i, v in enumerate(self.variables) if v not in keep)
            self._marginals[keep] = self.probabilities.sum(axis=axes) if axes else self.probabilities
        return self._marginals[keep]

    def marginal(self, keep):
        unknown = frozenset(keep) - frozenset(self.variables)
        if unknown:
            raise EstimandError(
                "table has no {0}".format(", ".join(sorted(unknown))), code="DOMAIN_MISMATCH"
            )
        kept = tuple(v for v in self.variables if v in keep)
        cards = tuple(c for v, c in zip(self.variables, self.cardinalities) if v in keep)
        return DistributionTable(kept, cards, np.asarray(self._marginal_array(keep)))

    def probability(self, assignment):
        """Marginal probability of the partial assignment ``assignment``."""
        unknown = frozenset(assignment) - frozenset(self.variables)
        if unknown:
            raise EstimandError(
                "table has no {0}".format(", ".join(sorted(unknown))), code="DOMAIN_MISMATCH"
            )
        array = self._marginal_array(assignment)
        index = tuple(assignment[v] for v in self.variables if v in assignment)
        return float(array[index])

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(list(self.variables) + ["probability"])
        for index in itertools.product(*(range(c) for c in self.cardinalities)):
            writer.writerow(list(index) + ["{0:.17g}".format(float(self.probabilities[index]))])
        return out.getvalue()


def _table(scm, do, weights=None):
    weights = scm.grid.weights(scm.priors) if weights is None else weights
    values = _propagate(scm, do)
    variables = tuple(sorted(scm.graph.vertices - set(do)))
    cards = tuple(scm.cardinality[v] for v in variables)
    flat = _flat_index(scm, values, variables)
    counts = np.bincount(flat, weights=weights, minlength=math.prod(cards))
    return DistributionTable(variables, cards, counts.reshape(cards))


def joint(scm):
    """Observational distribution ``P(V)``."""
    return _table(scm, {})


def intervene(scm, assignment):
    """``P(V \\ Z' | do(Z' = z'))`` with mechanisms of ``assignment`` replaced."""
    return _table(scm, _check_assignment(scm, dict(assignment)))


def truth(scm, x_assignment, y_assignment):
    """True causal effect ``P(y | do(x))``."""
    y_assignment = dict(y_assignment)
    overlap = set(x_assignment) & set(y_assignment)
    if overlap:
        raise EstimandError("outcome and treatment share {0}".format(sorted(overlap)), code="DOMAIN_MISMATCH")
    _check_assignment(scm, y_assignment)
    return intervene(scm, x_assignment).probability(y_assignment)


@dataclass
class DistributionFamily:
    """Observational table plus experimental tables keyed by regime.

    Keys of ``experimental`` are frozensets of ``(variable, value)`` pairs;
    the empty key aliases the observational table.
    """

    cardinalities: dict
    observational: DistributionTable
    experimental: dict = field(default_factory=dict)

    def table(self, regime):
        key = frozenset(regime.items())
        if not key:
            return self.observational
        try:
            return self.experimental[key]
        except KeyError:
            label = ", ".join("{0}={1}".format(k, v) for k, v in sorted(key))
            raise EstimandError("no experimental table for do({0})".format(label), code="MISSING_REGIME") from None

    @property
    def surrogates(self):
        return frozenset(var for key in self.experimental for var, _ in key)

    def regimes(self):
        """Every regime key, observational first, then by size and value."""
        return sorted(self.experimental, key=lambda k: (len(k), sorted(k)))


def _regimes(cardinalities, z):
    names = sorted(z)
    for size in range(len(names) + 1):
        for subset in itertools.combinations(names, size):
            for values in itertools.product(*(range(cardinalities[n]) for n in subset)):
                yield dict(zip(subset, values))


def family(scm, z=()):
    """Every table an analyst with experiments on ``z`` can use.

    Raises:
        OracleError: SIZE_LIMIT if ``z`` has more than six members.
    """
    z = scm.graph.check_subset(z)
    if len(z) > MAX_FAMILY_SURROGATES:
        raise OracleError("{0} surrogates exceed {1}".format(len(z), MAX_FAMILY_SURROGATES))
    weights = scm.grid.weights(scm.priors)
    observational = _table(scm, {}, weights)
    experimental = {}
    for regime in _regimes(scm.cardinality, z):
        key = frozenset(regime.items())
        experimental[key] = observational if not regime else _table(scm, regime, weights)
    return DistributionFamily(dict(scm.cardinality), observational, experimental)


# ============================================================================
# Verification
# ============================================================================

def value_grid(cardinalities, names):
    names = sorted(names)
    for values in itertools.product(*(range(cardinalities[n]) for n in names)):
        yield dict(zip(names, values))


def verify_estimand(estimand, graph, query, seeds, cardinalities=None):
    """Largest ``|evaluate - truth|`` over seeded models and all x, y values.

    Args:
        seeds: Iterable of seeds, or a count meaning ``range(count)``.
    """
    if isinstance(seeds, int):
        seeds = range(seeds)
    worst = 0.0
    for seed in seeds:
        scm = random_scm(graph, cardinalities, seed)
        data = family(scm, query.z)
        for x in value_grid(scm.cardinality, query.x_vars):
            table = intervene(scm, x)
            for y in value_grid(scm.cardinality, query.y_vars):
                free = dict(x)
                free.update(y)
                error = abs(evaluate(estimand, free, data) - table.probability(y))
                worst = max(worst, error)
    if worst > 1e-9:
        logger.warning("estimand deviates from the oracle by %.3g", worst)
    return worst


# ============================================================================
# JSON and CSV
# ============================================================================

def scm_to_json(scm):
    return {
        "graph": {
            "vertices": sorted(scm.graph.vertices),
            "directed": [list(e) for e in sorted(scm.graph.directed)],
            "bidirected": [list(e) for e in sorted(scm.graph.bidirected)],
        },
        "cardinality": dict(sorted(scm.cardinality.items())),
        "priors": {name: np.asarray(p).tolist() for name, p in sorted(scm.priors.items())},
        "mechanisms": {
            var: {
                "parents": list(scm.parents_of(var)),
                "latents": list(scm.latents_of(var)),
                "table": np.asarray(table).tolist(),
            }
            for var, table in sorted(scm.mechanisms.items())
        },
    }


def scm_from_json(data):
    try:
        shape = data["graph"]
        graph = build(shape["vertices"], map(tuple, shape["directed"]), map(tuple, shape["bidirected"]))
        scm = DiscreteScm(
            graph=graph,
            cardinality={k: int(v) for k, v in data["cardinality"].items()},
            priors={k: np.asarray(v, dtype=float) for k, v in data["priors"].items()},
            mechanisms={k: np.asarray(v["table"], dtype=np.intp) for k, v in data["mechanisms"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise OracleError("malformed model document: {0}".format(exc), code="MALFORMED_MODEL") from exc
    for var in graph.vertices:
        if var not in scm.mechanisms or _noise_name(var) not in scm.priors:
            raise OracleError("model lacks a mechanism for {0}".format(var), code="MALFORMED_MODEL")
    return scm


# ============================================================================
# Witness search
# ============================================================================

@dataclass(frozen=True, eq=False)
class WitnessPair:
    """Two models agreeing on every available table but not on the effect."""

    first: DiscreteScm
    second: DiscreteScm
    agreement: float
    gap: float
    evaluations: int


def max_disagreement(first, second):
    """Largest absolute difference between two families, table by table."""
    worst = 0.0
    for key in first.regimes():
        a = first.experimental[key].probabilities
        b = second.experimental[key].probabilities
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


class _Search:
    """Moves the exogenous priors of a seed model along table-preserving directions."""

    def __init__(self, graph, query, seed):
        self.query = query
        self.scm = random_scm(
            graph, None, seed,
            latent_cardinality=WITNESS_LATENT_CARDINALITY, noise_extra=WITNESS_NOISE_EXTRA,
        )
        grid = self.scm.grid
        self.grid = grid
        self.names = grid.names
        self.sizes = [len(self.scm.priors[n]) for n in self.names]
        self.splits = np.cumsum(self.sizes)[:-1]

        indices, offset = [], 0
        for regime in _regimes(self.scm.cardinality, query.z):
            variables = tuple(sorted(graph.vertices - set(regime)))
            cards = tuple(self.scm.cardinality[v] for v in variables)
            indices.append(_flat_index(self.scm, _propagate(self.scm, regime), variables) + offset)
            offset += math.prod(cards)
        self.index = np.concatenate(indices)
        self.copies = len(indices)
        self.length = offset

        values = _propagate(self.scm, dict(query.x))
        mask = np.ones(grid.size, dtype=bool)
        for var, value in query.y:
            mask &= values[var] == value
        self.target_mask = mask
        self.evaluations = 0

    def priors(self, theta):
        return dict(zip(self.names, (softmax(part) for part in np.split(theta, self.splits))))

    def initial(self):
        return np.concatenate([np.log(self.scm.priors[n]) for n in self.names])

    def tables(self, weights):
        self.evaluations += 1
        return np.bincount(self.index, weights=np.tile(weights, self.copies), minlength=self.length)

    def target(self, weights):
        return float(weights[self.target_mask].sum())

    def forward(self, theta):
        weights = self.grid.weights(self.priors(theta))
        return self.tables(weights), self.target(weights)

    def jacobian(self, theta):
        priors = self.priors(theta)
        blocks, grads = [], []
        for name in self.names:
            p = priors[name]
            rest = self.grid.weights(priors, skip=name)
            axis = self.grid.values[name]
            column, grad = [], []
            for k in range(len(p)):
                partial = np.where(axis == k, rest, 0.0)
                column.append(self.tables(partial))
                grad.append(self.target(partial))
            chain = np.diag(p) - np.outer(p, p)
            blocks.append(np.stack(column, axis=1) @ chain)
            grads.append(np.asarray(grad) @ chain)
        return np.hstack(blocks), np.concatenate(grads)

    def project(self, theta, goal, budget):
        """Gauss-Newton back onto the tables ``goal``; None when it stalls."""
        for _ in range(50):
            if self.evaluations >= budget or not np.all(np.isfinite(theta)):
                return None
            tables, _ = self.forward(theta)
            residual = tables - goal
            if not np.all(np.isfinite(residual)):
                return None
            if np.max(np.abs(residual)) <= PROJECTION_TOLERANCE:
                return theta
            jac, _ = self.jacobian(theta)
            try:
                theta = theta - lstsq(jac, residual)[0]
            except (LinAlgError, ValueError):
                return None
        return None

    def run(self, sign, budget):
        theta0 = self.initial()
        goal, start = self.forward(theta0)
        theta, gap, step = theta0, 0.0, 0.5
        while self.evaluations < budget and step > 1e-4:
            jac, grad = self.jacobian(theta)
            try:
                basis = null_space(jac, rcond=1e-10)
            except (LinAlgError, ValueError):
                break
            if basis.size == 0:
                break
            direction = sign * (basis @ (basis.T @ grad))
            norm = np.linalg.norm(direction)
            if norm < 1e-12:
                break
            candidate = self.project(theta + step * direction / norm, goal, budget)
            if candidate is None:
                step /= 2
                continue
            _, value = self.forward(candidate)
            if sign * (value - start) <= sign * gap:
                step /= 2
                continue
            theta, gap = candidate, value - start
            if abs(gap) >= TARGET_GAP:
                break
        return theta, abs(gap)


def _verify(query, first, second):
    data1, data2 = family(first, query.z), family(second, query.z)
    agreement = max_disagreement(data1, data2)
    x, y = dict(query.x), dict(query.y)
    gap = abs(truth(first, x, y) - truth(second, x, y))
    return agreement, gap


def _search_worker(graph, query, seed, worker, workers, budget):
    """Restart until a verified pair reaches ``TARGET_GAP``; keep the widest."""
    best = None
    attempt = 0
    spent = 0
    while spent < budget and attempt < WITNESS_RESTARTS:
        search = _Search(graph, query, seed + worker + attempt * workers)
        sign = 1.0 if attempt % 2 == 0 else -1.0
        theta, gap = search.run(sign, budget - spent)
        spent += max(search.evaluations, 1)
        attempt += 1
        if gap < GAP_THRESHOLD:
            continue
        second = search.scm.with_priors(search.priors(theta))
        agreement, verified = _verify(query, search.scm, second)
        if agreement > AGREEMENT_TOLERANCE or verified < GAP_THRESHOLD:
            logger.debug("candidate rejected: agreement %.3g gap %.3g", agreement, verified)
            continue
        if best is None or verified > best.gap:
            best = WitnessPair(search.scm, second, agreement, verified, spent)
        if best.gap >= TARGET_GAP:
            break
    return best


def witness_search(graph, query, budget=10 ** 6, seed=0, workers=1):
    """Look for two models that the available data cannot tell apart.

    The models agree on the observational table and every experimental table
    on subsets of ``query.z`` up to 1e-7 while their effects differ by at
    least 1e-3. ``budget`` counts forward table evaluations and is split
    evenly over ``workers``; worker ``w`` uses seeds ``seed + w``,
    ``seed + w + workers`` and so on. Each worker restarts until a verified
    pair reaches a gap of 0.05 or its share runs out, keeping the widest
    pair, and the lowest worker with a verified pair wins. Returns None on
    exhaustion, which proves nothing.

    Raises:
        OracleError: SIZE_LIMIT.
    """
    query.validate(graph)
    _check_size(graph)
    workers = max(1, int(workers))
    share = max(1, budget // workers)
    if workers == 1:
        results = [_search_worker(graph, query, seed, 0, 1, share)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_search_worker, graph, query, seed, w, workers, share) for w in range(workers)]
            results = [f.result() for f in futures]
    for pair in results:
        if pair is not None:
            logger.info("witness found: gap %.3g after %d evaluations", pair.gap, pair.evaluations)
            return pair
    logger.warning("no witness within %d evaluations", budget)
    return None

