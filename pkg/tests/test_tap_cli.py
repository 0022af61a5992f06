from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlec import tap
from mlec.cli import main
from mlec.suites import TestCase, TestSuite, demo_suite, load_suite, save_suite
from mlec.sut import Action, ComponentDescriptor, load_demo

GOLDEN = Path(__file__).parent / "golden" / "login.tap"
SUITES = Path(__file__).parents[1] / "src" / "mlec" / "data" / "suites"


def tree_st():
    leaf = st.builds(tap.TapNode, st.text("abc ", min_size=1, max_size=5).map(str.strip).filter(bool), st.booleans())
    return st.recursive(
        st.lists(leaf, max_size=4),
        lambda kids: st.lists(st.builds(tap.TapNode, st.just("n"), st.booleans(), st.just(""), kids), max_size=4),
        max_leaves=20,
    )


class TestTap:
    def test_golden_login(self):
        text, _ = tap.report(load_demo(), [demo_suite("login")])
        assert text == GOLDEN.read_text()

    @given(tree_st())
    def test_rendered_trees_are_well_formed(self, nodes):
        lines = tap.render(nodes)

        def count(ns):
            return sum(1 + count(n.children) for n in ns)

        assert tap.check("\n".join(lines)) == count(nodes)

    def test_demo_reports_pass_checker(self):
        text, cov = tap.report(load_demo(), [demo_suite(n) for n in ("login", "address-book", "calculator")])
        assert tap.check(text) == 3 + 8 + (3 + 56)
        assert "not ok" not in text
        assert cov.percent() > 0

    def test_infeasible_action_is_not_ok_and_rest_skipped(self):
        sut = load_demo()
        good = demo_suite("login").cases[0]
        ghost = Action("click", ComponentDescriptor(("Nowhere",), "button-like"))
        case = TestCase([ghost, *good.actions], "broken")
        text, _ = tap.report(sut, [TestSuite([case, good], "mixed")])
        lines = text.splitlines()
        assert lines[1] == "not ok 1 mixed"
        assert lines[3] == "    not ok 1 broken"
        assert lines[5].endswith("# infeasible: target not present")
        assert all(line.endswith("# SKIP previous action failed") for line in lines[6:9])
        assert "    ok 2 login/valid-credentials" in lines
        assert tap.check(text) == 1 + 2 + 4 + 3

    @pytest.mark.parametrize(
        "text,message",
        [
            ("1..2\nok 1 a\n", "plan 1..2"),
            ("ok 1 a\n", "without a plan"),
            ("1..1\nok 2 a\n", "expected test number 1"),
            ("1..1\nok 1 a\n  1..1\n", "indentation"),
            ("1..1\nok 1 a\n        1..1\n        ok 1 b\n", "too deep"),
            ("hello\n", "not a TAP line"),
            ("", "no plan"),
        ],
    )
    def test_checker_rejects(self, text, message):
        with pytest.raises(tap.TapFormatError, match=message):
            tap.check(text)


class TestSuiteFiles:
    def test_round_trip(self, tmp_path):
        suite = demo_suite("address-book")
        save_suite(suite, tmp_path / "s.json")
        back = load_suite(tmp_path / "s.json")
        assert [c.name for c in back.cases] == [c.name for c in suite.cases]
        assert [[a.signature + (a.payload,) for a in c.actions] for c in back.cases] == [
            [a.signature + (a.payload,) for a in c.actions] for c in suite.cases
        ]

    def test_demo_suite_sizes(self):
        assert sum(len(demo_suite(n)) for n in ("address-book", "calculator")) == 7
        assert sum(demo_suite(n).total_actions for n in ("address-book", "calculator")) == 56


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


class TestCli:
    def test_pipeline_end_to_end(self, workdir, capsys):
        raw, data, model = workdir / "raw.csv", workdir / "data.csv", workdir / "model.json"
        assert main(["extract", "--out", str(raw)]) == 0
        assert "rows=" in capsys.readouterr().out
        assert raw.read_text().startswith("component,enabled")
        assert main(["transform", "--input", str(raw), "--output", str(data), "--seed", "1"]) == 0
        assert "->" in capsys.readouterr().out
        assert main(["train", "--data", str(data), "--out", str(model), "--epochs", "3", "--quiet"]) == 0
        assert "accuracy" in capsys.readouterr().out
        out = workdir / "gen.json"
        args = ["generate", "--model", str(model), "--model-usage", "100", "--max-generations", "1",
                "--population", "4", "--out", str(out), "--quiet"]
        assert main(args) == 0
        assert "coverage=" in capsys.readouterr().out
        assert load_suite(out).cases
        assert main(["replay", str(out)]) == 0
        report = capsys.readouterr().out
        assert tap.check(report) > 0
        assert "# branch coverage" in report
        args = ["evaluate", "--model", str(model), "--runs", "1", "--max-generations", "1", "--population", "4", "--quiet"]
        assert main(args) == 0
        assert "usage" in capsys.readouterr().out

    def test_replay_golden(self, capsys):
        assert main(["replay", str(SUITES / "login.json")]) == 0
        out = capsys.readouterr().out
        assert out.startswith(GOLDEN.read_text())

    def test_extract_dumps_graph(self, workdir):
        dot = workdir / "g.dot"
        assert main(["extract", "--out", str(workdir / "r.csv"), "--dump-graph", str(dot)]) == 0
        assert dot.read_text().startswith("digraph")

    @pytest.mark.parametrize(
        "argv",
        [
            ["generate", "--model-usage", "150", "--out", "x.json"],
            ["generate", "--model-usage", "abc", "--out", "x.json"],
            ["evaluate"],
            ["transform", "--input", "missing.csv", "--output", "o.csv"],
            ["train", "--data", "missing.csv", "--out", "m.json"],
            ["bogus"],
        ],
    )
    def test_invalid_input_exits_one(self, argv, capsys):
        with pytest.raises(SystemExit) as info:
            code = main(argv)
            raise SystemExit(code)
        assert info.value.code == 1

    def test_bad_model_file(self, tmp_path, capsys):
        bad = tmp_path / "m.json"
        bad.write_text('{"format": "mlec-model", "version": 7}')
        code = main(["generate", "--model", str(bad), "--out", str(tmp_path / "o.json"), "--max-generations", "0"])
        assert code == 1
        assert "version" in capsys.readouterr().err

    def test_bad_sut_model(self, tmp_path, capsys):
        bad = tmp_path / "sut.json"
        bad.write_text('{"windows": []}')
        assert main(["replay", "--sut", str(bad), str(SUITES / "login.json")]) == 1
        assert "error" in capsys.readouterr().err
