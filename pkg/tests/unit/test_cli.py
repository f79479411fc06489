"""Tests for the graph parser and the command-line front end."""

import io
import json

import pytest

from ansible_collections.causal.zid.plugins.module_utils.cli import (
    EXIT_INPUT_ERROR,
    EXIT_NOT_IDENTIFIED,
    EXIT_OK,
    RunConfig,
    main,
    parse_assignment,
    parse_cardinality,
    parse_graph,
    run,
)
from ansible_collections.causal.zid.plugins.module_utils.errors import InputError, ParseError

G_A = "Z -> X\nX -> Y\nZ <-> X\nZ <-> Y\n"
BOW = "X -> Y\nX <-> Y\n"
P_GRAPH = "Z -> X\nX -> Y\nX <-> Y\nZ <-> Y\n"


def _config(text, y="Y=1", x="X=1", z=(), **kwargs):
    return RunConfig(
        graph_text=text,
        outcome=(parse_assignment(y),),
        treatment=(parse_assignment(x),) if x else (),
        surrogate=tuple(z),
        **kwargs
    )


class TestParseGraph:
    def test_edges_nodes_and_comments(self):
        graph = parse_graph("# confounded\nX -> Y   # direct\n\nX <-> Y\nnode W\n")
        assert graph.vertices == {"W", "X", "Y"}
        assert graph.directed == {("X", "Y")}
        assert graph.bidirected == {("X", "Y")}

    @pytest.mark.parametrize(
        "text, line",
        [
            ("X -> Y\nX => Y\n", 2),
            ("X -> X\n", 1),
            ("X -> Y\n\nX -> Y\n", 3),
            ("X <-> Y\nY <-> X\n", 2),
            ("node\n", 1),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ParseError) as excinfo:
            parse_graph(text)
        assert excinfo.value.line == line
        assert "line {0}".format(line) in str(excinfo.value)

    def test_cycle(self):
        with pytest.raises(ParseError) as excinfo:
            parse_graph("X -> Y\nY -> X\n")
        assert "cycle" in str(excinfo.value)

    def test_assignment(self):
        assert parse_assignment("Y=1") == ("Y", 1)
        assert parse_assignment(" Y ") == ("Y", None)
        with pytest.raises(InputError):
            parse_assignment("Y=one")

    def test_cardinality(self):
        assert parse_cardinality("X=3") == ("X", 3)
        with pytest.raises(InputError):
            parse_cardinality("X=1")


class TestIdentification:
    def test_identified(self):
        assert run(_config(G_A, z=("Z",))) == (EXIT_OK, "P[z=0](y|x)\n", "")

    def test_latex(self):
        code, out, _ = run(_config(G_A, z=("Z",), fmt="latex"))
        assert code == EXIT_OK
        assert out == "P_{do(z=0)}(y \\mid x)\n"

    def test_json(self):
        code, out, _ = run(_config(G_A, z=("Z",), fmt="json"))
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["verdict"] == "identified"
        assert doc["rendered"] == "P[z=0](y|x)"
        assert doc["estimand"]["kind"] == "term"
        assert doc["witness_subset"] == ["Z"]
        assert doc["subsets_tested"] == 2
        assert doc["corollary2"] is False
        assert doc["hedge_valid"] is None

    def test_missing_values_default_to_zero(self):
        code, _, err = run(_config(G_A, y="Y", x="X", z=("Z",)))
        assert code == EXIT_OK
        assert "notice: no value given for outcome Y, using 0" in err
        assert "notice: no value given for treatment X, using 0" in err

    def test_hedge(self):
        code, out, _ = run(_config(BOW))
        assert code == EXIT_NOT_IDENTIFIED
        assert out.splitlines() == [
            "not z-identifiable",
            "hedge for P(Y | do(X)):",
            "  F:  vertices X, Y; edges X -> Y, X <-> Y",
            "  F': vertices Y; edges (none)",
            "  R:  Y",
        ]

    def test_hedge_json(self):
        code, out, _ = run(_config(P_GRAPH, z=("Z",), fmt="json"))
        doc = json.loads(out)
        assert code == EXIT_NOT_IDENTIFIED
        assert doc["verdict"] == "not-zid"
        assert doc["hedge"]["x"] == ["X", "Z"]
        assert doc["hedge_valid"] is True
        assert doc["witness_subset"] is None

    def test_verification(self):
        code, out, err = run(_config(G_A, z=("Z",), verify_n=3, seed=10))
        assert code == EXIT_OK
        assert out.splitlines()[1].startswith("max oracle error:")
        assert err == ""

    def test_id_mode_ignores_experiments(self):
        code, out, _ = run(_config(G_A, mode="id"))
        assert code == EXIT_NOT_IDENTIFIED
        assert out.startswith("not z-identifiable")


class TestOtherModes:
    def test_subset_criterion(self):
        assert run(_config(G_A, z=("Z",), mode="thm3")) == (EXIT_OK, "z-identifiable with witness {Z}\n", "")
        code, out, _ = run(_config(P_GRAPH, z=("Z",), mode="thm3"))
        assert code == EXIT_NOT_IDENTIFIED
        assert out == "not z-identifiable (2 subsets tested)\n"

    def test_surrogate_criterion(self):
        assert run(_config(G_A, z=("Z",), mode="pearl"))[:2] == (EXIT_OK, "surrogate criterion holds\n")
        assert run(_config(P_GRAPH, z=("Z",), mode="pearl"))[0] == EXIT_NOT_IDENTIFIED

    def test_descendant_precheck(self):
        text = "X -> Z\nZ -> Y\nX <-> Y\nZ <-> Y\n"
        code, out, _ = run(_config(text, z=("Z",), mode="cor2"))
        assert code == EXIT_NOT_IDENTIFIED
        assert out == "surrogates cannot help: not z-identifiable\n"
        assert run(_config(G_A, z=("Z",), mode="cor2"))[:2] == (EXIT_OK, "precheck inconclusive\n")

    def test_rule(self):
        text = "Z -> X\nZ -> Y\nX -> Y\n"
        config = _config(text, x=None, mode="check-rule", rule=2, rule_z=("X",), rule_w=("Z",))
        assert run(config) == (EXIT_OK, "rule 2 applies\n", "")
        config = _config(text, x=None, mode="check-rule", rule=2, rule_z=("X",))
        assert run(config)[:2] == (EXIT_NOT_IDENTIFIED, "rule 2 does not apply\n")


class TestInputErrors:
    @pytest.mark.parametrize(
        "config, message",
        [
            (_config(G_A, y="Q=0"), "INVALID_QUERY"),
            (_config(G_A, x=None, mode="thm3"), "--treatment is required"),
            (_config(G_A, z=("Z",), mode="id"), "--surrogate is not used"),
            (_config(G_A, mode="check-rule"), "--rule must be"),
            (_config(G_A, verify_n=-1), "--verify-n"),
            (_config("X -> \n"), "PARSE_ERROR"),
        ],
    )
    def test_exit_two(self, config, message):
        code, out, err = run(config)
        assert code == EXIT_INPUT_ERROR
        assert out == ""
        assert err.startswith("error: ")
        assert message in err

    def test_unreadable_file(self, tmp_path):
        config = RunConfig(graph_path=str(tmp_path / "missing.txt"), outcome=(("Y", 0),))
        code, _, err = run(config)
        assert code == EXIT_INPUT_ERROR
        assert "cannot read" in err


class TestMain:
    def test_graph_file(self, graph_dir):
        out, err = io.StringIO(), io.StringIO()
        code = main([str(graph_dir / "g_a.txt"), "-y", "Y=1", "-x", "X=1", "-z", "Z"], out, err)
        assert code == EXIT_OK
        assert out.getvalue() == "P[z=0](y|x)\n"

    def test_comma_separated_lists(self, graph_dir):
        out, err = io.StringIO(), io.StringIO()
        code = main([str(graph_dir / "napkin.txt"), "-y", "Y", "-x", "X", "--mode", "id", "--verify-n", "2"], out, err)
        assert code == EXIT_OK
        code = main([str(graph_dir / "w_variant.txt"), "-y", "Y=0", "-x", "X=0", "-z", "Z,W", "--mode", "thm3"],
                    io.StringIO(), io.StringIO())
        assert code == EXIT_OK

    def test_bad_assignment(self, graph_dir):
        out, err = io.StringIO(), io.StringIO()
        code = main([str(graph_dir / "bow.txt"), "-y", "Y=yes", "-x", "X"], out, err)
        assert code == EXIT_INPUT_ERROR
        assert err.getvalue().startswith("error: FLAG_ERROR")
