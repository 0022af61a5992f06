"""The five features describing a possible target relative to the previous one.

A row compares the component acted on by the previous action with every
component of the state in which the current action is executed; the
component the current action really targets is labeled ``true``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .sut import Action, ComponentDescriptor, SutState

MIN_FOCUS_DISTANCE = -10
PREFERRED_CATEGORIES = frozenset({"button-like", "text-input"})
CSV_DELIMITER = ","
HEADER = ("component", "enabled", "preferredType", "focusDistance", "pathDistance", "pointDistance", "label")
FEATURE_NAMES = HEADER[1:6]


def is_enabled(cd: ComponentDescriptor) -> bool:
    return getattr(cd, "enabled", True)


def is_preferred_type(cd: ComponentDescriptor) -> bool:
    """Buttons and text components are what users usually act on."""
    return cd.category in PREFERRED_CATEGORIES


def focus_cycle(state: SutState, window: str) -> list[ComponentDescriptor]:
    """Keyboard traversal order of ``window``: focusable, enabled, visible."""
    win = state.window(window)
    if win is None:
        return []
    members = [c for c in win.components if c.focusable and c.enabled and c.focus_index is not None]
    return sorted(members, key=lambda c: c.focus_index)


def focus_distance(
    source: ComponentDescriptor, target: ComponentDescriptor, cycle: Sequence[ComponentDescriptor]
) -> int:
    """Signed number of Tab (+) or Shift-Tab (-) presses from source to target.

    Searches both directions at once for at most ``|MIN_FOCUS_DISTANCE|``
    steps; the forward direction is checked first so ties are positive.
    """
    if source.path == target.path:
        return 0
    paths = [c.path for c in cycle]
    if source.path not in paths:
        return MIN_FOCUS_DISTANCE
    n = len(paths)
    visited: set[int] = set()
    start = paths.index(source.path)
    after: int | None = start
    before: int | None = start
    for dist in range(1, abs(MIN_FOCUS_DISTANCE) + 1):
        if after is not None:
            visited.add(after)
            after = (after + 1) % n
            if paths[after] == target.path:
                return dist
        if before is not None:
            visited.add(before)
            before = (before - 1) % n
            if paths[before] == target.path:
                return -dist
        if (after is None and before is None) or (after in visited and before in visited):
            break
    return MIN_FOCUS_DISTANCE


def path_distance(source: ComponentDescriptor, target: ComponentDescriptor) -> int:
    """Steps from the deeper of the two paths up to their lowest common parent."""
    a, b = source.path, target.path
    common = 0
    for x, y in zip(a, b):
        if x != y:
            break
        common += 1
    return max(len(a), len(b)) - common


def point_distance(source: ComponentDescriptor, target: ComponentDescriptor) -> float:
    return math.hypot(source.bounds.x - target.bounds.x, source.bounds.y - target.bounds.y)


@dataclass(frozen=True)
class FeatureVector:
    enabled: bool
    preferred_type: bool
    focus_distance: int
    path_distance: int
    point_distance: float
    label: Optional[bool] = None

    @classmethod
    def of(
        cls,
        previous: ComponentDescriptor,
        possible: ComponentDescriptor,
        state: SutState,
        label: Optional[bool] = None,
    ) -> "FeatureVector":
        cycle = focus_cycle(state, previous.window) if previous.window else []
        return cls(
            is_enabled(possible),
            is_preferred_type(possible),
            focus_distance(previous, possible, cycle),
            path_distance(previous, possible),
            point_distance(previous, possible),
            label,
        )

    def as_array(self) -> np.ndarray:
        return np.array(
            [float(self.enabled), float(self.preferred_type), self.focus_distance, self.path_distance, self.point_distance]
        )


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_row(possible: ComponentDescriptor, fv: FeatureVector) -> str:
    component = str(possible).replace(CSV_DELIMITER, "")
    fields = [component, fv.enabled, fv.preferred_type, fv.focus_distance, fv.path_distance, fv.point_distance, fv.label]
    return CSV_DELIMITER.join(_fmt(f) for f in fields) + "\n"


def header_row() -> str:
    return CSV_DELIMITER.join(HEADER) + "\n"


def extract(
    previous_action: Optional[Action],
    from_state: SutState,
    current_action: Action,
    sink: IO[str],
) -> int:
    """Write the rows for one executed action; returns the number of data rows.

    Without a previous action only the header is written.
    """
    if previous_action is None:
        sink.write(header_row())
        return 0
    previous = previous_action.target
    correct = current_action.target.path
    rows = 0
    for possible in from_state.components():
        fv = FeatureVector.of(previous, possible, from_state, possible.path == correct)
        sink.write(csv_row(possible, fv))
        rows += 1
    return rows


def feature_matrix(
    previous: ComponentDescriptor, targets: Iterable[ComponentDescriptor], state: SutState
) -> np.ndarray:
    """Inference-time features, one row per target, same code path as extraction."""
    rows = [FeatureVector.of(previous, t, state).as_array() for t in targets]
    return np.array(rows, dtype=float).reshape(-1, 5)


class CsvDataExtractor:
    """State-graph observer that writes a raw feature CSV while tests replay.

    The header is written once per file.  ``begin_case`` must be called at
    the start of every test so its first action is skipped.
    """

    def __init__(self, sink: IO[str]) -> None:
        self.sink = sink
        self.previous_action: Optional[Action] = None
        self.header_written = False
        self.rows = 0
        self.true_rows = 0
        self.batches = 0

    def begin_case(self) -> None:
        self.previous_action = None

    def __call__(self, from_state: SutState, action: Action, to_state: Optional[SutState]) -> None:
        if self.previous_action is None:
            if not self.header_written:
                extract(None, from_state, action, self.sink)
                self.header_written = True
        else:
            n = extract(self.previous_action, from_state, action, self.sink)
            self.rows += n
            self.batches += 1
            self.true_rows += int(from_state.find(action.target.path) is not None)
        self.previous_action = action

    def finish(self) -> None:
        if not self.header_written:
            self.sink.write(header_row())
            self.header_written = True


def expected_rows(component_counts: Sequence[Sequence[int]]) -> int:
    """Row total for tests whose actions see states with these component counts."""
    return sum(sum(counts[1:]) for counts in component_counts)
