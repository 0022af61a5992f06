"""Nested Test Anything Protocol reports for replayed suites.

Each level (suite, test, action) has its own ``1..N`` plan and result lines,
indented four spaces per level, as in::

    1..1
    ok 1 login
        1..1
        ok 1 login/valid-credentials
            1..3
            ok 1 Entering text 'Max' into JTextField Username
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .suites import TestSuite
from .sut import Action, CoverageMap, InfeasibleActionError, Sut

INDENT = "    "
_PLAN = re.compile(r"^1\.\.(\d+)$")
_RESULT = re.compile(r"^(not ok|ok) (\d+)(?: (.*))?$")


@dataclass
class TapNode:
    description: str
    ok: bool = True
    directive: str = ""
    children: list["TapNode"] = field(default_factory=list)


def render(nodes: list[TapNode], depth: int = 0) -> list[str]:
    pad = INDENT * depth
    lines = [f"{pad}1..{len(nodes)}"]
    for i, node in enumerate(nodes, 1):
        status = "ok" if node.ok else "not ok"
        text = f"{pad}{status} {i} {node.description}"
        if node.directive:
            text += f" # {node.directive}"
        lines.append(text)
        if node.children:
            lines.extend(render(node.children, depth + 1))
    return lines


def replay(sut: Sut, suites: list[TestSuite]) -> tuple[list[TapNode], CoverageMap]:
    """Execute every case from a reset and describe the outcome as TAP nodes.

    An infeasible action is reported ``not ok``; the rest of its case is
    skipped and replay continues with the next case.  Coverage accumulates
    over everything replayed.
    """
    sut.reset()
    suite_nodes = []
    for suite in suites:
        test_nodes = []
        for case in suite.cases:
            sut.reset(cumulative=True)
            action_nodes = []
            failed = False
            for action in case.actions:
                if failed:
                    action_nodes.append(TapNode(action.describe(), True, "SKIP previous action failed"))
                    continue
                target = sut.current_state().find(action.target.path)
                live = Action(action.kind, target, action.payload) if target is not None else action
                try:
                    if target is None:
                        raise InfeasibleActionError(action, "target not present")
                    sut.execute(live)
                    action_nodes.append(TapNode(live.describe()))
                except InfeasibleActionError as exc:
                    failed = True
                    action_nodes.append(TapNode(live.describe(), False, f"infeasible: {exc.reason}"))
            test_nodes.append(TapNode(case.name, not failed, children=action_nodes))
        suite_nodes.append(TapNode(suite.name, all(t.ok for t in test_nodes), children=test_nodes))
    return suite_nodes, sut.coverage.snapshot()


def report(sut: Sut, suites: list[TestSuite]) -> tuple[str, CoverageMap]:
    nodes, coverage = replay(sut, suites)
    return "\n".join(render(nodes)) + "\n", coverage


class TapFormatError(ValueError):
    pass


def check(text: str) -> int:
    """Validate plans against result counts at every nesting level.

    Returns the number of result lines; raises :class:`TapFormatError`.
    """
    # stack of [depth, planned, seen]
    stack: list[list[int]] = []
    results = 0
    for n, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % len(INDENT):
            raise TapFormatError(f"line {n}: indentation is not a multiple of {len(INDENT)}")
        depth = indent // len(INDENT)
        while stack and stack[-1][0] > depth:
            _close(stack.pop(), n)
        plan = _PLAN.match(stripped)
        if plan:
            if stack and stack[-1][0] == depth:
                raise TapFormatError(f"line {n}: second plan at the same level")
            if stack and depth != stack[-1][0] + 1:
                raise TapFormatError(f"line {n}: plan nested too deep")
            stack.append([depth, int(plan.group(1)), 0])
            continue
        result = _RESULT.match(stripped)
        if not result:
            raise TapFormatError(f"line {n}: not a TAP line: {stripped!r}")
        if not stack or stack[-1][0] != depth:
            raise TapFormatError(f"line {n}: result without a plan at this level")
        level = stack[-1]
        level[2] += 1
        if int(result.group(2)) != level[2]:
            raise TapFormatError(f"line {n}: expected test number {level[2]}, got {result.group(2)}")
        results += 1
    if not stack:
        raise TapFormatError("no plan found")
    while stack:
        _close(stack.pop(), None)
    return results


def _close(level: list[int], line: int | None) -> None:
    depth, planned, seen = level
    if planned != seen:
        where = f"before line {line}" if line else "at end of input"
        raise TapFormatError(f"{where}: plan 1..{planned} at depth {depth} but {seen} results")
