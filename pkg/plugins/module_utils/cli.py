# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Command-line front end.

Reads a graph file, runs one check on one query and prints the result.
Exit status: 0 when the effect is identified or the checked criterion
holds, 1 when it is not identified or the criterion fails (or oracle
verification failed), 2 on input errors.
"""

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field

from . import version_check
from .admg import build
from .dcalc import rule1_applicable, rule2_applicable, rule3_applicable
from .errors import GraphError, InputError, ParseError, ZidError
from .estimand import normalize, render
from .identify import (
    Query,
    corollary2_precheck,
    extract_hedge,
    id as identify_id,
    idz,
    pearl_criterion,
    theorem3_zid,
    verdict_json,
    zid_report,
)
from .scm_oracle import verify_estimand

logger = logging.getLogger(__name__)

MODES = ("idz", "id", "thm3", "pearl", "cor2", "check-rule")
FORMATS = ("text", "latex", "json")
VERIFY_TOLERANCE = 1e-9

EXIT_OK = 0
EXIT_NOT_IDENTIFIED = 1
EXIT_INPUT_ERROR = 2

_EDGE = re.compile(r"^([A-Za-z0-9_]+)\s*(<->|->)\s*([A-Za-z0-9_]+)$")
_NODE = re.compile(r"^node\s+([A-Za-z0-9_]+)$")
_ASSIGN = re.compile(r"^([A-Za-z0-9_]+)(?:=(\d+))?$")


# ============================================================================
# Graph text
# ============================================================================

def parse_graph(text):
    """Read the line-oriented edge format.

    ``A -> B`` and ``A <-> B`` declare edges, ``node A`` an isolated vertex;
    ``#`` starts a comment and blank lines are ignored.

    Raises:
        ParseError: With the 1-based line number of the offending line.
    """
    vertices, directed, bidirected = set(), [], []
    seen = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        node = _NODE.match(line)
        if node:
            vertices.add(node.group(1))
            continue
        edge = _EDGE.match(line)
        if not edge:
            raise ParseError("expected 'A -> B', 'A <-> B' or 'node A'", line=number, token=line)
        a, kind, b = edge.groups()
        if a == b:
            raise ParseError("self-loop", line=number, token=line)
        key = (kind, a, b) if kind == "->" else (kind,) + tuple(sorted((a, b)))
        if key in seen:
            raise ParseError("duplicate edge (first on line {0})".format(seen[key]), line=number, token=line)
        seen[key] = number
        (directed if kind == "->" else bidirected).append((a, b))
        vertices.update((a, b))
    try:
        return build(vertices, directed, bidirected)
    except GraphError as exc:
        raise ParseError(exc.args[0]) from exc


# ============================================================================
# Configuration
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """One invocation.

    ``outcome`` and ``treatment`` hold ``(name, value)`` pairs where the value
    may be None (defaults to 0 with a notice). Either ``graph_path`` or
    ``graph_text`` supplies the graph.
    """

    graph_path: str = None
    outcome: tuple = ()
    treatment: tuple = ()
    surrogate: tuple = ()
    mode: str = "idz"
    fmt: str = "text"
    verify_n: int = 0
    seed: int = 0
    cardinality: tuple = ()
    rule: int = None
    rule_z: tuple = ()
    rule_w: tuple = ()
    graph_text: str = field(default=None, repr=False)


def parse_assignment(text):
    """``"Y=1"`` -> ``("Y", 1)``; ``"Y"`` -> ``("Y", None)``."""
    match = _ASSIGN.match(text.strip())
    if not match:
        raise InputError("expected NAME or NAME=VALUE, got {0!r}".format(text))
    name, value = match.groups()
    return name, (int(value) if value is not None else None)


def parse_cardinality(text):
    name, value = parse_assignment(text)
    if value is None or value < 2:
        raise InputError("cardinality must be NAME=K with K >= 2, got {0!r}".format(text))
    return name, value


def _load_graph(config):
    if config.graph_text is not None:
        return parse_graph(config.graph_text)
    if not config.graph_path:
        raise InputError("no graph given")
    try:
        with open(config.graph_path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError("cannot read {0}: {1}".format(config.graph_path, exc.strerror)) from exc
    return parse_graph(text)


def _values(pairs, label, notices):
    out = {}
    for name, value in pairs:
        if value is None:
            notices.append("notice: no value given for {0} {1}, using 0".format(label, name))
            value = 0
        out[name] = value
    return out


def _check_config(config):
    if config.mode not in MODES:
        raise InputError("unknown mode {0!r}".format(config.mode))
    if config.fmt not in FORMATS:
        raise InputError("unknown format {0!r}".format(config.fmt))
    if not config.outcome:
        raise InputError("--outcome is required")
    if config.mode == "check-rule":
        if config.rule not in (1, 2, 3):
            raise InputError("--rule must be 1, 2 or 3 in check-rule mode")
        if not config.rule_z:
            raise InputError("--rule-z is required in check-rule mode")
    elif not config.treatment and config.mode != "idz":
        raise InputError("--treatment is required in {0} mode".format(config.mode))
    if config.mode == "id" and config.surrogate:
        raise InputError("--surrogate is not used in id mode")
    if config.verify_n < 0:
        raise InputError("--verify-n must be nonnegative")


# ============================================================================
# Output
# ============================================================================

def _edges(directed, bidirected):
    items = ["{0} -> {1}".format(a, b) for a, b in sorted(directed)]
    items += ["{0} <-> {1}".format(a, b) for a, b in sorted(bidirected)]
    return ", ".join(items) or "(none)"


def format_hedge(hedge):
    return "\n".join([
        "hedge for P({0} | do({1})):".format(",".join(sorted(hedge.y)), ",".join(sorted(hedge.x))),
        "  F:  vertices {0}; edges {1}".format(
            ", ".join(sorted(hedge.f_vertices)), _edges(hedge.f_directed, hedge.f_bidirected)),
        "  F': vertices {0}; edges {1}".format(
            ", ".join(sorted(hedge.fprime_vertices)), _edges(hedge.fprime_directed, hedge.fprime_bidirected)),
        "  R:  {0}".format(", ".join(sorted(hedge.r))),
    ])


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True)


@dataclass
class Outcome:
    code: int
    out: list = field(default_factory=list)
    err: list = field(default_factory=list)


def _identification(config, graph, query, result):
    outcome = Outcome(EXIT_OK if result.identified else EXIT_NOT_IDENTIFIED)
    hedge = None if result.identified else extract_hedge(result, query)
    if config.fmt == "json":
        doc = zid_report(query, graph, result=result)
    else:
        doc = verdict_json(result, hedge, fmt=config.fmt)

    if result.identified and config.verify_n > 0:
        seeds = range(config.seed, config.seed + config.verify_n)
        error = verify_estimand(result.estimand, graph, query, seeds, dict(config.cardinality))
        doc["max_oracle_error"] = error
        if error > VERIFY_TOLERANCE:
            outcome.code = EXIT_NOT_IDENTIFIED
            outcome.err.append(
                "verification failed: max oracle error {0:.3g} over {1} models".format(error, config.verify_n)
            )

    if config.fmt == "json":
        outcome.out.append(_dump(doc))
    elif result.identified:
        outcome.out.append(render(normalize(result.estimand), config.fmt))
        if "max_oracle_error" in doc:
            outcome.out.append("max oracle error: {0:.3g}".format(doc["max_oracle_error"]))
    else:
        outcome.out.append("not z-identifiable")
        outcome.out.append(format_hedge(hedge))
    return outcome


def execute(config):
    """Run ``config`` and collect exit status, output lines and diagnostics.

    Raises:
        ZidError: For every input error; :func:`run` maps it to status 2.
    """
    _check_config(config)
    graph = _load_graph(config)
    notices = []
    y = _values(config.outcome, "outcome", notices)
    x = _values(config.treatment, "treatment", notices)
    query = Query.of(y, x, config.surrogate)
    query.validate(graph)

    if config.mode in ("idz", "id"):
        result = idz(query, graph) if config.mode == "idz" else identify_id(query, graph)
        outcome = _identification(config, graph, query, result)
    elif config.mode == "thm3":
        verdict = theorem3_zid(query, graph)
        outcome = Outcome(EXIT_OK if verdict.zid else EXIT_NOT_IDENTIFIED)
        doc = {
            "zid": verdict.zid,
            "witness_subset": sorted(verdict.witness) if verdict.witness is not None else None,
            "subsets_tested": verdict.tested,
        }
        if config.fmt == "json":
            outcome.out.append(_dump(doc))
        elif verdict.zid:
            outcome.out.append("z-identifiable with witness {{{0}}}".format(", ".join(doc["witness_subset"])))
        else:
            outcome.out.append("not z-identifiable ({0} subsets tested)".format(verdict.tested))
    elif config.mode in ("pearl", "cor2"):
        if config.mode == "pearl":
            holds = pearl_criterion(graph, query.x_vars, query.z, query.y_vars)
            label = "surrogate criterion holds" if holds else "surrogate criterion does not hold"
            code = EXIT_OK if holds else EXIT_NOT_IDENTIFIED
        else:
            holds = corollary2_precheck(graph, query.x_vars, query.y_vars, query.z)
            label = "surrogates cannot help: not z-identifiable" if holds else "precheck inconclusive"
            code = EXIT_NOT_IDENTIFIED if holds else EXIT_OK
        outcome = Outcome(code)
        outcome.out.append(_dump({"mode": config.mode, "holds": holds}) if config.fmt == "json" else label)
    else:
        outcome = _rule(config, graph, query)

    outcome.err[:0] = notices
    return outcome


def _rule(config, graph, query):
    check = {1: rule1_applicable, 2: rule2_applicable, 3: rule3_applicable}[config.rule]
    holds = check(graph, query.y_vars, query.x_vars, frozenset(config.rule_z), frozenset(config.rule_w))
    outcome = Outcome(EXIT_OK if holds else EXIT_NOT_IDENTIFIED)
    if config.fmt == "json":
        outcome.out.append(_dump({"mode": "check-rule", "rule": config.rule, "holds": holds}))
    else:
        outcome.out.append("rule {0} {1}".format(config.rule, "applies" if holds else "does not apply"))
    return outcome


def run(config):
    """Return ``(exit_status, stdout_text, stderr_text)`` for ``config``."""
    try:
        outcome = execute(config)
    except ZidError as exc:
        logger.debug("input error", exc_info=True)
        return EXIT_INPUT_ERROR, "", "error: {0}\n".format(exc)
    out = "\n".join(outcome.out) + "\n" if outcome.out else ""
    err = "\n".join(outcome.err) + "\n" if outcome.err else ""
    return outcome.code, out, err


# ============================================================================
# Entry point
# ============================================================================

def build_parser():
    parser = argparse.ArgumentParser(
        prog="zid",
        description="Decide whether P(y | do(x)) is computable from observations and surrogate experiments.",
    )
    parser.add_argument("graph", help="graph file in the edge-list format")
    parser.add_argument("--outcome", "-y", action="append", default=[], metavar="NAME[=V]")
    parser.add_argument("--treatment", "-x", action="append", default=[], metavar="NAME[=V]")
    parser.add_argument("--surrogate", "-z", action="append", default=[], metavar="NAME")
    parser.add_argument("--mode", choices=MODES, default="idz")
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
    parser.add_argument("--verify-n", type=int, default=0, metavar="N",
                        help="check the estimand against N seeded oracle models")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cardinality", action="append", default=[], metavar="NAME=K")
    parser.add_argument("--rule", type=int, choices=(1, 2, 3))
    parser.add_argument("--rule-z", action="append", default=[], metavar="NAME")
    parser.add_argument("--rule-w", action="append", default=[], metavar="NAME")
    parser.add_argument("--verbose", "-v", action="count", default=0)
    return parser


def _split(values):
    out = []
    for value in values:
        out.extend(part for part in value.split(",") if part)
    return out


def config_from_args(args):
    return RunConfig(
        graph_path=args.graph,
        outcome=tuple(parse_assignment(v) for v in _split(args.outcome)),
        treatment=tuple(parse_assignment(v) for v in _split(args.treatment)),
        surrogate=tuple(_split(args.surrogate)),
        mode=args.mode,
        fmt=args.fmt,
        verify_n=args.verify_n,
        seed=args.seed,
        cardinality=tuple(parse_cardinality(v) for v in _split(args.cardinality)),
        rule=args.rule,
        rule_z=tuple(_split(args.rule_z)),
        rule_w=tuple(_split(args.rule_w)),
    )


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        version_check.check_all_requirements()
        config = config_from_args(args)
    except RuntimeError as exc:
        stderr.write("{0}\n".format(exc))
        return EXIT_INPUT_ERROR
    except InputError as exc:
        stderr.write("error: {0}\n".format(exc))
        return EXIT_INPUT_ERROR

    code, out, err = run(config)
    stdout.write(out)
    stderr.write(err)
    return code
