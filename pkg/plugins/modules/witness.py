#!/usr/bin/python
# -*- coding: utf-8 -*-
# pylint: disable=no-name-in-module

# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Counterexample search module.

Look for two discrete models that agree on the observational table and on
every surrogate experiment but disagree on the causal effect.
"""

from ansible.module_utils.basic import AnsibleModule
from ansible.module_utils.common.text.converters import to_native

# Validate Python version and required packages (optional fallback)
try:
    from ansible_collections.causal.zid.plugins.module_utils.version_check import (  # pylint: disable=import-error
        check_all_requirements,
    )
    check_all_requirements()
except ImportError:
    # Fallback if module utils not available (e.g., during linting)
    pass

from ansible_collections.causal.zid.plugins.module_utils.cli import (  # pylint: disable=import-error
    parse_assignment,
    parse_graph,
)
from ansible_collections.causal.zid.plugins.module_utils.errors import ZidError  # pylint: disable=import-error
from ansible_collections.causal.zid.plugins.module_utils.identify import Query  # pylint: disable=import-error
from ansible_collections.causal.zid.plugins.module_utils.scm_oracle import (  # pylint: disable=import-error
    scm_to_json,
    witness_search,
)


DOCUMENTATION = r'''
---
module: witness
short_description: Search for two models the available data cannot tell apart
description:
  - Starts from seeded random discrete models and moves their exogenous
    priors along directions that keep the observational table and every
    experimental table on subsets of O(surrogate) fixed, while pushing the
    effect of O(treatment) on O(outcome) apart.
  - A found pair proves the effect is not identifiable from those tables.
    Exhausting the budget proves nothing.
  - Read-only; never reports a change.
version_added: "0.1.0"
author:
  - causal.zid contributors
options:
  graph:
    description:
      - Diagram in the edge-list format.
      - Mutually exclusive with O(graph_path).
    type: str
  graph_path:
    description:
      - Path to a file holding the diagram.
    type: path
  outcome:
    description:
      - Outcome variables as C(NAME) or C(NAME=VALUE). Missing values default to 0.
    type: list
    elements: str
    required: true
  treatment:
    description:
      - Treatment variables as C(NAME) or C(NAME=VALUE).
    type: list
    elements: str
    required: true
  surrogate:
    description:
      - Variables on which experiments are available.
    type: list
    elements: str
    default: []
  budget:
    description:
      - Maximum number of table evaluations, split evenly over O(workers).
    type: int
    default: 1000000
  seed:
    description:
      - First seed.
    type: int
    default: 0
  workers:
    description:
      - Number of parallel searches.
    type: int
    default: 1
requirements:
  - Python >= 3.11
  - networkx, numpy and scipy on the managed node.
'''

EXAMPLES = r'''
- name: Show that the bow graph is not identifiable
  causal.zid.witness:
    graph: |
      X -> Y
      X <-> Y
    outcome: [Y=1]
    treatment: [X=1]
    budget: 200000
    workers: 4
  register: pair

- name: Fail when no pair was found
  ansible.builtin.assert:
    that: pair.found
'''

RETURN = r'''
found:
  description: Whether a verified pair was found.
  returned: always
  type: bool
gap:
  description: Difference between the two effects.
  returned: when found
  type: float
agreement:
  description: Largest difference between the two models on any available table.
  returned: when found
  type: float
evaluations:
  description: Table evaluations spent by the winning search.
  returned: when found
  type: int
first:
  description: First model as a JSON document (graph, cardinality, priors, mechanisms).
  returned: when found
  type: dict
second:
  description: Second model, same graph and mechanisms with moved priors.
  returned: when found
  type: dict
changed:
  description: Always false.
  returned: always
  type: bool
'''


def _assignment(items):
    return {name: (value if value is not None else 0) for name, value in map(parse_assignment, items)}


def _graph(module):
    if module.params["graph"] is not None:
        return parse_graph(module.params["graph"])
    path = module.params["graph_path"]
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_graph(handle.read())
    except OSError as exc:
        module.fail_json(msg="cannot read {0}: {1}".format(path, to_native(exc)), changed=False)


def run_module():
    module_args = dict(
        graph=dict(type="str"),
        graph_path=dict(type="path"),
        outcome=dict(type="list", elements="str", required=True),
        treatment=dict(type="list", elements="str", required=True),
        surrogate=dict(type="list", elements="str", default=[]),
        budget=dict(type="int", default=10 ** 6),
        seed=dict(type="int", default=0),
        workers=dict(type="int", default=1),
    )

    module = AnsibleModule(
        argument_spec=module_args,
        mutually_exclusive=[["graph", "graph_path"]],
        required_one_of=[["graph", "graph_path"]],
        supports_check_mode=True,
    )

    result = dict(changed=False, found=False)
    if module.params["budget"] < 1 or module.params["workers"] < 1:
        module.fail_json(msg="budget and workers must be positive", **result)

    try:
        graph = _graph(module)
        query = Query.of(
            _assignment(module.params["outcome"]),
            _assignment(module.params["treatment"]),
            module.params["surrogate"],
        )
        pair = witness_search(
            graph, query,
            budget=module.params["budget"],
            seed=module.params["seed"],
            workers=module.params["workers"],
        )
    except ZidError as exc:
        module.fail_json(msg=str(exc), code=exc.code, **result)

    if pair is not None:
        result.update(
            found=True,
            gap=pair.gap,
            agreement=pair.agreement,
            evaluations=pair.evaluations,
            first=scm_to_json(pair.first),
            second=scm_to_json(pair.second),
        )
    module.exit_json(**result)


def main():
    run_module()


if __name__ == "__main__":
    main()
