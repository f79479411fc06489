#!/usr/bin/python
# -*- coding: utf-8 -*-
# pylint: disable=no-name-in-module

# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Causal effect identification module.

Decide whether P(y | do(x)) is computable from observational data plus
surrogate experiments, and return the estimand or the hedge witness.
"""

import json

from ansible.module_utils.basic import AnsibleModule

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
    MODES,
    RunConfig,
    execute,
    parse_assignment,
    parse_cardinality,
)
from ansible_collections.causal.zid.plugins.module_utils.errors import ZidError  # pylint: disable=import-error
from ansible_collections.causal.zid.plugins.module_utils.estimand import (  # pylint: disable=import-error
    estimand_from_json,
    normalize,
    render,
)


DOCUMENTATION = r'''
---
module: identify
short_description: Decide z-identifiability of a causal effect
description:
  - Run the identification recursion, the subset criterion, the two-condition
    surrogate criterion, the descendant precheck or a do-calculus rule check
    on a causal diagram.
  - Identified effects come back as an estimand (JSON tree and rendered text);
    unidentified ones come back with a hedge witness.
  - Read-only; never reports a change.
version_added: "0.1.0"
author:
  - causal.zid contributors
options:
  graph:
    description:
      - Diagram in the edge-list format, one C(A -> B), C(A <-> B) or C(node A) per line.
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
    default: []
  surrogate:
    description:
      - Variables on which experiments are available.
    type: list
    elements: str
    default: []
  mode:
    description:
      - Check to run.
    type: str
    choices: [idz, id, thm3, pearl, cor2, check-rule]
    default: idz
  format:
    description:
      - Rendering of the estimand in RV(rendered).
    type: str
    choices: [text, latex]
    default: text
  verify_n:
    description:
      - Number of seeded oracle models the estimand is checked against.
    type: int
    default: 0
  seed:
    description:
      - First oracle seed.
    type: int
    default: 0
  cardinality:
    description:
      - Number of values per variable for oracle verification (default 2).
    type: dict
    default: {}
  rule:
    description:
      - Do-calculus rule for O(mode=check-rule); O(outcome) is y and O(treatment) the intervened set.
    type: int
    choices: [1, 2, 3]
  rule_z:
    description:
      - The set the rule inserts, deletes or exchanges.
    type: list
    elements: str
    default: []
  rule_w:
    description:
      - Additional observed conditioning set for the rule.
    type: list
    elements: str
    default: []
requirements:
  - Python >= 3.11
  - networkx, numpy and scipy on the managed node.
notes:
  - Runs on the managed node; use C(delegate_to: localhost) to run it on the controller.
'''

EXAMPLES = r'''
- name: Identify P(y | do(x)) with experiments on Z
  causal.zid.identify:
    graph: |
      Z -> X
      X -> Y
      Z <-> X
      Z <-> Y
    outcome: [Y=1]
    treatment: [X=1]
    surrogate: [Z]
    verify_n: 20
  register: result

- name: Apply the subset criterion to a graph file
  causal.zid.identify:
    graph_path: graphs/p_graph.txt
    outcome: [Y]
    treatment: [X]
    surrogate: [Z]
    mode: thm3
'''

RETURN = r'''
identified:
  description:
    - Whether the effect is identifiable, as far as the mode decides it.
    - C(idz), C(id) and C(thm3) give true or false.
    - C(pearl) gives true when the criterion holds and null otherwise, since it is only sufficient.
    - C(cor2) gives false when the precheck holds and null when it is inconclusive.
    - C(check-rule) always gives null; see RV(holds).
  returned: always
  type: bool
holds:
  description: Whether the surrogate criterion, the precheck or the rule holds.
  returned: in pearl, cor2 and check-rule mode
  type: bool
exit_status:
  description: Status the command-line tool would return (0, 1).
  returned: always
  type: int
result:
  description: Verdict document; for idz and id it has verdict, estimand, rendered, hedge, hedge_valid, witness_subset, subsets_tested and corollary2.
  returned: always
  type: dict
  sample: '{"verdict": "identified", "rendered": "P[z=0](y|x)", "hedge": null}'
rendered:
  description: Estimand in the requested format, when identified.
  returned: when identified in idz or id mode
  type: str
diagnostics:
  description: Notices and verification failures.
  returned: always
  type: list
  elements: str
changed:
  description: Always false.
  returned: always
  type: bool
'''


def _config(params):
    return RunConfig(
        graph_path=params["graph_path"],
        graph_text=params["graph"],
        outcome=tuple(parse_assignment(v) for v in params["outcome"]),
        treatment=tuple(parse_assignment(v) for v in params["treatment"]),
        surrogate=tuple(params["surrogate"]),
        mode=params["mode"],
        fmt="json",
        verify_n=params["verify_n"],
        seed=params["seed"],
        cardinality=tuple(sorted(
            parse_cardinality("{0}={1}".format(k, v)) for k, v in params["cardinality"].items()
        )),
        rule=params["rule"],
        rule_z=tuple(params["rule_z"]),
        rule_w=tuple(params["rule_w"]),
    )


def _identified(mode, code, doc):
    if mode in ("idz", "id", "thm3"):
        return code == 0
    if mode == "pearl":
        return True if doc["holds"] else None
    if mode == "cor2":
        return False if doc["holds"] else None
    return None


def run_module():
    """Build the run from the module parameters and report its verdict."""
    module_args = dict(
        graph=dict(type="str"),
        graph_path=dict(type="path"),
        outcome=dict(type="list", elements="str", required=True),
        treatment=dict(type="list", elements="str", default=[]),
        surrogate=dict(type="list", elements="str", default=[]),
        mode=dict(type="str", choices=list(MODES), default="idz"),
        format=dict(type="str", choices=["text", "latex"], default="text"),
        verify_n=dict(type="int", default=0),
        seed=dict(type="int", default=0),
        cardinality=dict(type="dict", default={}),
        rule=dict(type="int", choices=[1, 2, 3]),
        rule_z=dict(type="list", elements="str", default=[]),
        rule_w=dict(type="list", elements="str", default=[]),
    )

    module = AnsibleModule(
        argument_spec=module_args,
        mutually_exclusive=[["graph", "graph_path"]],
        required_one_of=[["graph", "graph_path"]],
        supports_check_mode=True,
    )

    result = dict(changed=False, diagnostics=[])

    try:
        outcome = execute(_config(module.params))
    except ZidError as exc:
        module.fail_json(msg=str(exc), code=exc.code, **result)

    doc = json.loads(outcome.out[0])
    result["exit_status"] = outcome.code
    result["identified"] = _identified(module.params["mode"], outcome.code, doc)
    if "holds" in doc:
        result["holds"] = doc["holds"]
    result["diagnostics"] = list(outcome.err)
    result["result"] = doc

    if doc.get("estimand") is not None and module.params["format"] == "latex":
        doc["rendered"] = _render_latex(doc["estimand"])
    if doc.get("rendered"):
        result["rendered"] = doc["rendered"]

    module.exit_json(**result)


def _render_latex(tree):
    return render(normalize(estimand_from_json(tree)), "latex")


def main():
    """Main entry point."""
    run_module()


if __name__ == "__main__":
    main()
