"""Test cases, test suites and their JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .sut import Action, ComponentDescriptor

SUITE_SCHEMA = "mlec-suite/1"


@dataclass
class TestCase:
    """A sequence of GUI actions executed from the initial state."""

    __test__ = False  # not a pytest class

    actions: list[Action] = field(default_factory=list)
    name: str = "generated"

    def __len__(self) -> int:
        return len(self.actions)

    def copy(self) -> "TestCase":
        return TestCase(list(self.actions), self.name)


@dataclass
class TestSuite:
    __test__ = False

    cases: list[TestCase] = field(default_factory=list)
    name: str = "generated-suite"

    def __len__(self) -> int:
        return len(self.cases)

    @property
    def total_actions(self) -> int:
        return sum(len(c) for c in self.cases)

    def copy(self) -> "TestSuite":
        return TestSuite([c.copy() for c in self.cases], self.name)


def action_to_dict(action: Action) -> dict[str, Any]:
    return {
        "kind": action.kind,
        "target": list(action.target.path),
        "display": str(action.target),
        "payload": action.payload,
    }


def action_from_dict(doc: dict[str, Any]) -> Action:
    path = tuple(doc["target"])
    target = ComponentDescriptor(path=path, category="other", display=doc.get("display", path[-1]))
    return Action(doc["kind"], target, doc.get("payload"))


def suite_to_dict(suite: TestSuite) -> dict[str, Any]:
    return {
        "schema": SUITE_SCHEMA,
        "name": suite.name,
        "tests": [
            {"name": case.name, "actions": [action_to_dict(a) for a in case.actions]} for case in suite.cases
        ],
    }


def suite_from_dict(doc: dict[str, Any]) -> TestSuite:
    if doc.get("schema", SUITE_SCHEMA) != SUITE_SCHEMA:
        raise ValueError(f"unsupported suite schema {doc.get('schema')!r}")
    cases = [
        TestCase([action_from_dict(a) for a in t.get("actions", [])], t.get("name", "generated"))
        for t in doc.get("tests", [])
    ]
    return TestSuite(cases, doc.get("name", "suite"))


def save_suite(suite: TestSuite, path: str | Path) -> None:
    Path(path).write_text(json.dumps(suite_to_dict(suite), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def load_suite(path: str | Path) -> TestSuite:
    return suite_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


DEMO_SUITES = ("address-book", "calculator")


def demo_suite(name: str) -> TestSuite:
    text = resources.files("mlec.data").joinpath("suites", f"{name}.json").read_text(encoding="utf-8")
    return suite_from_dict(json.loads(text))


def demo_suite_path(name: str) -> Path:
    return Path(str(resources.files("mlec.data").joinpath("suites", f"{name}.json")))
