"""Deterministic simulated GUI application loaded from a JSON model.

A model declares windows holding component trees, integer/string
registers, and procedures made of guarded steps.  Executing an action runs
the handler bound to the target component; every guard evaluation is
recorded in a :class:`CoverageMap` together with the branch distance of
the outcome that was *not* taken.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable

CATEGORIES = (
    "button-like",
    "text-input",
    "label",
    "container",
    "tab",
    "table-cell",
    "other",
)
ACTION_KINDS = ("click", "enter-text", "select")
COMPARISONS = ("<", "<=", "==", "!=", ">=", ">")

#: Constant added when an inequality must be pushed over its boundary.
K = 1.0

_MAX_CALL_DEPTH = 32
_INT_RE = re.compile(r"^[+-]?\d+$")


class ModelError(Exception):
    """Base class for model loading failures."""


class ModelParseError(ModelError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ModelSemanticError(ModelError):
    pass


class InfeasibleActionError(Exception):
    """Raised when an action cannot be executed in the current state."""

    def __init__(self, action: "Action", reason: str) -> None:
        super().__init__(f"{action.describe()}: {reason}")
        self.action = action
        self.reason = reason


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    x: float = 0.0
    y: float = 0.0
    width: float = 0.0
    height: float = 0.0


@dataclass(frozen=True)
class ComponentDescriptor:
    """Toolkit-independent identity and state of one GUI component."""

    path: tuple[str, ...]
    category: str
    enabled: bool = True
    focusable: bool = False
    bounds: Bounds = Bounds()
    focus_index: int | None = None
    window: str = ""
    display: str = ""
    choices: tuple[str, ...] = ()
    lexicon: str | None = None

    def __str__(self) -> str:
        return self.display or self.path[-1]


@dataclass(frozen=True)
class WindowState:
    id: str
    components: tuple[ComponentDescriptor, ...]


@dataclass(frozen=True, eq=False)
class SutState:
    """Observable snapshot; two states are equal iff their ids are equal.

    The id is a digest of every visible component path together with its
    enabled flag, so equality is full component-tree equality.
    """

    id: str
    windows: tuple[WindowState, ...]
    is_exit: bool = False

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SutState) and other.id == self.id

    def __hash__(self) -> int:
        return hash(self.id)

    def components(self) -> list[ComponentDescriptor]:
        """Depth-first flattening over all windows."""
        return [c for w in self.windows for c in w.components]

    def find(self, path: Iterable[str]) -> ComponentDescriptor | None:
        index = self.__dict__.get("_index")
        if index is None:
            index = {c.path: c for c in reversed(self.components())}
            object.__setattr__(self, "_index", index)
        return index.get(tuple(path))

    def window(self, window_id: str) -> WindowState | None:
        for w in self.windows:
            if w.id == window_id:
                return w
        return None


@dataclass(frozen=True)
class Action:
    kind: str
    target: ComponentDescriptor
    payload: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "click" and self.payload is not None:
            raise ValueError("click actions take no payload")
        if self.kind != "click" and self.payload is None:
            raise ValueError(f"{self.kind} actions require a payload")

    @property
    def signature(self) -> tuple[str, tuple[str, ...]]:
        """Identity used by the state graph; payloads are parameters."""
        return (self.kind, self.target.path)

    def with_payload(self, payload: str) -> "Action":
        return Action(self.kind, self.target, payload)

    def describe(self) -> str:
        if self.kind == "click":
            return f"Click on {self.target}"
        if self.kind == "enter-text":
            return f"Entering text '{self.payload}' into {self.target}"
        return f"Select [{self.payload}] on {self.target}"


EXIT_STATE = SutState(id="exit", windows=(), is_exit=True)


def available_actions(state: SutState) -> list[Action]:
    """Actions on every enabled, non-container component of ``state``.

    Ordered by depth-first component order, then click < enter-text <
    select.  Text and select actions carry a placeholder payload (empty
    text, first choice) that callers usually replace.
    """
    if state.is_exit:
        return []
    actions = []
    for c in state.components():
        if not c.enabled or c.category == "container":
            continue
        actions.append(Action("click", c))
        if c.category == "text-input":
            actions.append(Action("enter-text", c, ""))
        if c.choices:
            actions.append(Action("select", c, c.choices[0]))
    return actions


# ---------------------------------------------------------------------------
# Branch distance
# ---------------------------------------------------------------------------


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def compare(op: str, a: Any, b: Any) -> bool:
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(f"unknown comparison {op!r}")


def branch_distance(op: str, a: Any, b: Any, outcome: bool = True) -> float:
    """Distance of operands ``a``, ``b`` from making ``a op b`` == ``outcome``.

    Zero iff that outcome is the one actually taken.  Strings support only
    ``==``/``!=`` and use the edit distance in place of ``|a - b|``.
    """
    if compare(op, a, b) == outcome:
        return 0.0
    if isinstance(a, str) or isinstance(b, str):
        if op not in ("==", "!="):
            raise ValueError(f"strings do not support {op!r}")
        gap = float(levenshtein(str(a), str(b)))
    else:
        gap = float(abs(a - b))

    if op in ("==", "!="):
        # want equality: how far apart; want inequality: they are equal
        want_equal = (op == "==") == outcome
        return gap if want_equal else K
    # normalise to a "less-than" style question
    if op in (">", ">="):
        a, b = b, a
        op = "<" if op == ">" else "<="
    if op == "<":
        return max(0.0, a - b + K) if outcome else max(0.0, b - a)
    return max(0.0, a - b) if outcome else max(0.0, b - a + K)


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------


@dataclass
class BranchRecord:
    hit_count: int = 0
    min_distance: float = math.inf
    times_condition_executed: int = 0


class CoverageMap:
    """Per-branch hit counts and minimum distances, per-procedure flags."""

    def __init__(self, branches: Iterable[str], procedures: Iterable[str]) -> None:
        self.branches: dict[str, BranchRecord] = {b: BranchRecord() for b in branches}
        self.procedures: dict[str, bool] = {p: False for p in procedures}

    def record(self, guard_id: str, outcome: bool, dist_true: float, dist_false: float) -> None:
        for value, dist in ((True, dist_true), (False, dist_false)):
            rec = self.branches[branch_id(guard_id, value)]
            rec.times_condition_executed += 1
            if value == outcome:
                rec.hit_count += 1
                rec.min_distance = 0.0
            elif dist < rec.min_distance:
                rec.min_distance = dist

    def mark_procedure(self, name: str) -> None:
        self.procedures[name] = True

    def clear(self) -> None:
        for rec in self.branches.values():
            rec.hit_count = 0
            rec.min_distance = math.inf
            rec.times_condition_executed = 0
        for p in self.procedures:
            self.procedures[p] = False

    def covered(self) -> set[str]:
        return {b for b, rec in self.branches.items() if rec.hit_count > 0}

    def executed_procedures(self) -> set[str]:
        return {p for p, done in self.procedures.items() if done}

    def percent(self) -> float:
        if not self.branches:
            return 100.0
        return 100.0 * len(self.covered()) / len(self.branches)

    def snapshot(self) -> "CoverageMap":
        clone = CoverageMap((), ())
        clone.branches = {
            b: BranchRecord(r.hit_count, r.min_distance, r.times_condition_executed) for b, r in self.branches.items()
        }
        clone.procedures = dict(self.procedures)
        return clone


def branch_id(guard_id: str, outcome: bool) -> str:
    return f"{guard_id}:{'T' if outcome else 'F'}"


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass
class ComponentSpec:
    path: tuple[str, ...]
    category: str
    enabled: bool
    focusable: bool
    focus_index: int | None
    bounds: Bounds
    visible: bool
    display: str
    choices: tuple[str, ...]
    lexicon: str | None
    handlers: dict[str, dict[str, Any]]
    cid: str | None
    window: str


@dataclass
class WindowSpec:
    id: str
    components: list[ComponentSpec]  # depth-first order
    children: dict[tuple[str, ...], list[tuple[str, ...]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.by_path = {c.path: c for c in self.components}


@dataclass
class SutModel:
    """Parsed and validated model document."""

    name: str
    windows: dict[str, WindowSpec]
    initial_window: str
    variables: dict[str, Any]
    procedures: dict[str, list[dict[str, Any]]]
    lexicon: dict[str, list[str]]
    guards: list[str]
    by_id: dict[str, ComponentSpec]

    @property
    def branches(self) -> list[str]:
        return [branch_id(g, v) for g in self.guards for v in (True, False)]


def _fail(msg: str) -> ModelSemanticError:
    return ModelSemanticError(msg)


def parse_model(text: str) -> SutModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ModelParseError("top level must be an object", 1, 1)

    windows_doc = doc.get("windows") or []
    if not windows_doc:
        raise _fail("no initial window")
    variables = dict(doc.get("variables", {}))
    for name, value in variables.items():
        if not isinstance(value, (int, str)) or isinstance(value, bool):
            raise _fail(f"variable {name!r} must be an integer or a string")
    lexicon = {k: [str(v) for v in vals] for k, vals in doc.get("lexicon", {}).items()}

    windows: dict[str, WindowSpec] = {}
    by_id: dict[str, ComponentSpec] = {}
    for wdoc in windows_doc:
        wid = wdoc.get("id")
        if not wid:
            raise _fail("window without id")
        if wid in windows:
            raise _fail(f"duplicate window {wid!r}")
        windows[wid] = _parse_window(wid, wdoc.get("components", []), by_id, lexicon)

    initial = doc.get("initial_window")
    if initial not in windows:
        raise _fail("no initial window" if initial is None else f"unknown initial window {initial!r}")

    procedures = doc.get("procedures", {})
    guards: list[str] = []
    for pname, steps in procedures.items():
        counter = [0]
        _check_steps(pname, steps, counter, guards, variables, windows, by_id, procedures)

    for w in windows.values():
        for comp in w.components:
            for kind, handler in comp.handlers.items():
                if kind not in ACTION_KINDS:
                    raise _fail(f"{'/'.join(comp.path)}: unknown handler kind {kind!r}")
                bind = handler.get("bind")
                if bind is not None and bind not in variables:
                    raise _fail(f"{'/'.join(comp.path)}: binds undeclared variable {bind!r}")
                for var in handler.get("assign", {}):
                    if var not in variables:
                        raise _fail(f"{'/'.join(comp.path)}: assigns undeclared variable {var!r}")
                call = handler.get("call")
                if call is not None and call not in procedures:
                    raise _fail(f"{'/'.join(comp.path)}: calls unknown procedure {call!r}")

    return SutModel(
        name=doc.get("name", "model"),
        windows=windows,
        initial_window=initial,
        variables=variables,
        procedures=procedures,
        lexicon=lexicon,
        guards=guards,
        by_id=by_id,
    )


def _parse_window(wid, comps_doc, by_id, lexicon) -> WindowSpec:
    specs: dict[tuple[str, ...], ComponentSpec] = {}
    order: list[tuple[str, ...]] = []
    for cdoc in comps_doc:
        path = tuple(cdoc.get("path") or ())
        if not path:
            raise _fail(f"window {wid!r}: component with empty path")
        if path in specs:
            raise _fail(f"window {wid!r}: duplicate component path {'/'.join(path)}")
        category = cdoc.get("category", "other")
        if category not in CATEGORIES:
            raise _fail(f"{'/'.join(path)}: unknown category {category!r}")
        focusable = bool(cdoc.get("focusable", False))
        focus_index = cdoc.get("focus_index")
        if focusable != (focus_index is not None):
            raise _fail(f"{'/'.join(path)}: focus_index must be present iff focusable")
        b = cdoc.get("bounds", {})
        bounds = Bounds(float(b.get("x", 0)), float(b.get("y", 0)), float(b.get("w", 0)), float(b.get("h", 0)))
        if min(bounds.x, bounds.y, bounds.width, bounds.height) < 0:
            raise _fail(f"{'/'.join(path)}: negative bounds")
        section = cdoc.get("lexicon")
        if section is not None and section not in lexicon:
            raise _fail(f"{'/'.join(path)}: unknown lexicon section {section!r}")
        spec = ComponentSpec(
            path=path,
            category=category,
            enabled=bool(cdoc.get("enabled", True)),
            focusable=focusable,
            focus_index=focus_index,
            bounds=bounds,
            visible=bool(cdoc.get("visible", True)),
            display=cdoc.get("display", path[-1]),
            choices=tuple(str(c) for c in cdoc.get("choices", ())),
            lexicon=section,
            handlers=dict(cdoc.get("on", {})),
            cid=cdoc.get("id"),
            window=wid,
        )
        if spec.cid is not None:
            if spec.cid in by_id:
                raise _fail(f"duplicate component id {spec.cid!r}")
            by_id[spec.cid] = spec
        specs[path] = spec
        order.append(path)

    children: dict[tuple[str, ...], list[tuple[str, ...]]] = {(): []}
    for path in order:
        parent = path[:-1]
        if parent and parent not in specs:
            raise _fail(f"{'/'.join(path)}: parent component missing")
        children.setdefault(parent, []).append(path)

    dfs: list[ComponentSpec] = []
    stack = list(reversed(children[()]))
    while stack:
        path = stack.pop()
        dfs.append(specs[path])
        stack.extend(reversed(children.get(path, [])))

    indices = sorted(c.focus_index for c in dfs if c.focusable)
    if indices != list(range(len(indices))):
        raise _fail(f"window {wid!r}: focus cycle is not contiguous 0..{len(indices) - 1}")
    return WindowSpec(wid, dfs, children)


def _check_operand(where, operand, variables):
    if not isinstance(operand, dict) or len(operand) != 1:
        raise _fail(f"{where}: malformed operand {operand!r}")
    (kind, value), = operand.items()
    if kind in ("var", "len"):
        if value not in variables:
            raise _fail(f"{where}: undeclared variable {value!r}")
    elif kind != "const":
        raise _fail(f"{where}: unknown operand kind {kind!r}")


def _operand_is_str(operand, variables) -> bool:
    (kind, value), = operand.items()
    if kind == "var":
        return isinstance(variables[value], str)
    if kind == "const":
        return isinstance(value, str)
    return False


def _check_steps(pname, steps, counter, guards, variables, windows, by_id, procedures):
    where = f"procedure {pname!r}"
    for step in steps:
        if "if" in step:
            guard = step["if"]
            gid = f"{pname}:{counter[0]}"
            counter[0] += 1
            guards.append(gid)
            if guard.get("op") not in COMPARISONS:
                raise _fail(f"{where}: unknown comparison {guard.get('op')!r}")
            for side in ("left", "right"):
                _check_operand(where, guard.get(side), variables)
            if guard["op"] not in ("==", "!=") and (
                _operand_is_str(guard["left"], variables) or _operand_is_str(guard["right"], variables)
            ):
                raise _fail(f"{where}: ordering comparison on a string")
            _check_steps(pname, step.get("then", []), counter, guards, variables, windows, by_id, procedures)
            _check_steps(pname, step.get("else", []), counter, guards, variables, windows, by_id, procedures)
        elif "set" in step or "add" in step:
            var = step.get("set", step.get("add"))
            if var not in variables:
                raise _fail(f"{where}: undeclared variable {var!r}")
            if "set" in step:
                _check_operand(where, step.get("value"), variables)
        elif any(k in step for k in ("open", "close")):
            wid = step.get("open", step.get("close"))
            if wid not in windows:
                raise _fail(f"{where}: unknown window {wid!r}")
        elif any(k in step for k in ("enable", "disable", "show", "hide")):
            cid = next(step[k] for k in ("enable", "disable", "show", "hide") if k in step)
            if cid not in by_id:
                raise _fail(f"{where}: unknown component id {cid!r}")
        elif "call" in step:
            if step["call"] not in procedures:
                raise _fail(f"{where}: calls unknown procedure {step['call']!r}")
        elif "exit" in step:
            pass
        else:
            raise _fail(f"{where}: unknown step {step!r}")


# ---------------------------------------------------------------------------
# Runtime
# ---------------------------------------------------------------------------


def to_int(value: Any) -> int:
    """Integer reading of a text payload; non-numeric text reads as -1."""
    if isinstance(value, int):
        return value
    text = str(value).strip()
    return int(text) if _INT_RE.match(text) else -1


class Sut:
    """A running instance of a :class:`SutModel`.  Single-threaded."""

    def __init__(self, model: SutModel) -> None:
        self.model = model
        self.coverage = CoverageMap(model.branches, model.procedures)
        self._snapshots: dict[tuple, SutState] = {}
        self._restore()

    def _restore(self) -> None:
        self.variables = dict(self.model.variables)
        self._enabled = {c.path: c.enabled for w in self.model.windows.values() for c in w.components}
        self._visible = {c.path: c.visible for w in self.model.windows.values() for c in w.components}
        self._open = [self.model.initial_window]
        self._exited = False
        self._state: SutState | None = None

    def reset(self, cumulative: bool = False) -> None:
        self._restore()
        if not cumulative:
            self.coverage.clear()

    @property
    def initial_state(self) -> SutState:
        return Sut(self.model).current_state()

    def current_state(self) -> SutState:
        if self._state is None:
            # states are immutable values, so identical flag settings share one
            key = (self._exited, tuple(self._open), tuple(self._enabled.values()), tuple(self._visible.values()))
            state = self._snapshots.get(key)
            if state is None:
                state = self._snapshots[key] = self._snapshot()
            self._state = state
        return self._state

    def _snapshot(self) -> SutState:
        if self._exited:
            return EXIT_STATE
        windows = []
        key = hashlib.sha1()
        for wid in self._open:
            spec = self.model.windows[wid]
            hidden: set[tuple[str, ...]] = set()
            comps = []
            for c in spec.components:
                if c.path[:-1] in hidden or not self._visible[c.path]:
                    hidden.add(c.path)
                    continue
                enabled = self._enabled[c.path]
                comps.append(
                    ComponentDescriptor(
                        path=c.path,
                        category=c.category,
                        enabled=enabled,
                        focusable=c.focusable,
                        bounds=c.bounds,
                        focus_index=c.focus_index,
                        window=wid,
                        display=c.display,
                        choices=c.choices,
                        lexicon=c.lexicon,
                    )
                )
                key.update(f"{'/'.join(c.path)}:{int(enabled)};".encode())
            key.update(f"#{wid}#".encode())
            windows.append(WindowState(wid, tuple(comps)))
        return SutState(id=key.hexdigest()[:16], windows=tuple(windows))

    def available_actions(self, state: SutState | None = None) -> list[Action]:
        return available_actions(self.current_state() if state is None else state)

    def execute(self, action: Action) -> SutState:
        state = self.current_state()
        target = state.find(action.target.path)
        if target is None:
            raise InfeasibleActionError(action, "target not present")
        if not target.enabled:
            raise InfeasibleActionError(action, "target disabled")
        if target.category == "container":
            raise InfeasibleActionError(action, "containers accept no actions")
        if action.kind == "enter-text" and target.category != "text-input":
            raise InfeasibleActionError(action, "target does not accept text")
        if action.kind == "select" and action.payload not in target.choices:
            raise InfeasibleActionError(action, f"no choice {action.payload!r}")

        handler = self._handler(target, action.kind)
        if handler:
            for var, value in handler.get("assign", {}).items():
                self._assign(var, value)
            if "bind" in handler:
                self._assign(handler["bind"], action.payload)
            if "call" in handler:
                self._call(handler["call"], 0)
        return self.current_state()

    def _handler(self, target: ComponentDescriptor, kind: str) -> dict[str, Any] | None:
        return self.model.windows[target.window].by_path[target.path].handlers.get(kind)

    def _assign(self, var: str, value: Any) -> None:
        if isinstance(self.model.variables[var], int):
            self.variables[var] = to_int(value)
        else:
            self.variables[var] = "" if value is None else str(value)

    def _value(self, operand: dict[str, Any]) -> Any:
        (kind, value), = operand.items()
        if kind == "var":
            return self.variables[value]
        if kind == "len":
            return len(str(self.variables[value]))
        return value

    def _call(self, name: str, depth: int) -> None:
        if depth > _MAX_CALL_DEPTH:
            raise RecursionError(f"call depth exceeded in {name!r}")
        self.coverage.mark_procedure(name)
        self._run(name, self.model.procedures[name], [0], depth)

    def _run(self, pname: str, steps: list[dict[str, Any]], counter: list[int], depth: int) -> None:
        for step in steps:
            if "if" in step:
                gid = f"{pname}:{counter[0]}"
                counter[0] += 1
                g = step["if"]
                a, b = self._value(g["left"]), self._value(g["right"])
                outcome = compare(g["op"], a, b)
                self.coverage.record(
                    gid,
                    outcome,
                    branch_distance(g["op"], a, b, True),
                    branch_distance(g["op"], a, b, False),
                )
                # guard numbering is static, so skip the ids of the branch not taken
                taken, skipped = (step.get("then", []), step.get("else", [])) if outcome else (
                    step.get("else", []),
                    step.get("then", []),
                )
                if outcome:
                    self._run(pname, taken, counter, depth)
                    counter[0] += _count_guards(skipped)
                else:
                    counter[0] += _count_guards(skipped)
                    self._run(pname, taken, counter, depth)
            elif "set" in step:
                self._assign(step["set"], self._value(step["value"]))
            elif "add" in step:
                self.variables[step["add"]] += int(step.get("value", 1))
            elif "open" in step:
                if step["open"] not in self._open:
                    self._open.append(step["open"])
                    self._state = None
            elif "close" in step:
                if step["close"] in self._open:
                    self._open.remove(step["close"])
                    self._state = None
            elif "enable" in step or "disable" in step:
                spec = self.model.by_id[step.get("enable", step.get("disable"))]
                self._enabled[spec.path] = "enable" in step
                self._state = None
            elif "show" in step or "hide" in step:
                spec = self.model.by_id[step.get("show", step.get("hide"))]
                self._visible[spec.path] = "show" in step
                self._state = None
            elif "call" in step:
                self._call(step["call"], depth + 1)
            elif "exit" in step:
                self._exited = True
                self._state = None


def _count_guards(steps: list[dict[str, Any]]) -> int:
    n = 0
    for step in steps:
        if "if" in step:
            n += 1 + _count_guards(step.get("then", [])) + _count_guards(step.get("else", []))
    return n


def load_model(text: str) -> Sut:
    """Parse a model document and return a SUT at its initial state."""
    return Sut(parse_model(text))


def load_model_file(path: str | Path) -> Sut:
    return load_model(Path(path).read_text(encoding="utf-8"))


def demo_model_text() -> str:
    return resources.files("mlec.data").joinpath("demo_model.json").read_text(encoding="utf-8")


def load_demo() -> Sut:
    return load_model(demo_model_text())
