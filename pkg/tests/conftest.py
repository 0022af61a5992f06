import io
import json

import numpy as np
import pytest

from mlec import etl, neuralnet
from mlec.pipeline import record_suites
from mlec.suites import DEMO_SUITES, demo_suite
from mlec.sut import load_demo, load_model

TOY_MODEL = {
    "name": "toy",
    "initial_window": "w",
    "variables": {"x": 0},
    "lexicon": {"numbers": ["-3", "0", "4", "6", "10"]},
    "windows": [
        {
            "id": "w",
            "components": [
                {"path": ["Frame"], "category": "container", "bounds": {"x": 0, "y": 0, "w": 200, "h": 100}},
                {"path": ["Frame", "Field"], "category": "text-input", "focusable": True, "focus_index": 0,
                 "lexicon": "numbers", "bounds": {"x": 10, "y": 10, "w": 80, "h": 20},
                 "on": {"enter-text": {"bind": "x"}}},
                {"path": ["Frame", "Check"], "category": "button-like", "focusable": True, "focus_index": 1,
                 "bounds": {"x": 10, "y": 40, "w": 60, "h": 20}, "on": {"click": {"call": "check"}}},
                {"path": ["Frame", "Clear"], "category": "button-like", "focusable": True, "focus_index": 2,
                 "bounds": {"x": 80, "y": 40, "w": 60, "h": 20}, "on": {"click": {"call": "clear"}}},
            ],
        }
    ],
    "procedures": {
        "check": [
            {"if": {"left": {"var": "x"}, "op": ">", "right": {"const": 5}},
             "then": [{"if": {"left": {"var": "x"}, "op": "==", "right": {"const": 10}}, "then": []}]},
        ],
        "clear": [
            {"if": {"left": {"var": "x"}, "op": "<", "right": {"const": 0}},
             "then": [{"set": "x", "value": {"const": 0}}], "else": []},
        ],
    },
}


@pytest.fixture
def toy_text():
    return json.dumps(TOY_MODEL)


@pytest.fixture
def toy_sut(toy_text):
    return load_model(toy_text)


@pytest.fixture
def demo_sut():
    return load_demo()


@pytest.fixture(scope="session")
def demo_extraction():
    buf = io.StringIO()
    graph, stats = record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES], sink=buf)
    return buf.getvalue(), graph, stats


@pytest.fixture(scope="session")
def demo_dataset(demo_extraction):
    text, _ = etl.transform(demo_extraction[0], 0.9, seed=1)
    return etl.load_dataset(text)


@pytest.fixture(scope="session")
def trained_model(demo_dataset):
    x, y = demo_dataset
    result = neuralnet.train(x, y, neuralnet.TrainConfig(seed=1))
    return neuralnet.TrainedModel(result.params, result.stats, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


#: One "criterion N: PASS|FAIL ..." line per acceptance criterion, in run order.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
