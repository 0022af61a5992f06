"""The state graph: an NFA over observed GUI states learned from executions.

Every state that is added offers its available actions; until an action
has actually been executed from that state its transition points to the
unknown state ``s?``.  Executing it replaces that entry with the concrete
target.  Actions are identified by their signature (kind + target path);
payloads are parameters and do not create new edges.
"""

from __future__ import annotations

import copy
from collections import deque
from typing import Callable, Iterable, Optional

from .suites import TestCase
from .sut import Action, SutState, available_actions

#: Id of the distinguished unknown state ``s?``.
UNKNOWN = "?"

Signature = tuple[str, tuple[str, ...]]
Observer = Callable[[SutState, Action, Optional[SutState]], None]


class StateGraph:
    """(S, Σ, Δ, s0, T) with ``Δ: S x Σ -> P(S ∪ {s?})``."""

    def __init__(self, initial: SutState | None = None) -> None:
        self.states: dict[str, SutState] = {}
        self.actions: dict[Signature, Action] = {}
        self.transitions: dict[tuple[str, Signature], list[str]] = {}
        self.initial: str | None = None
        self.terminals: set[str] = set()
        self.observers: list[Observer] = []
        self._order: dict[str, int] = {}
        self._available: dict[str, list[Action]] = {}
        self._signatures: dict[str, frozenset[Signature]] = {}
        self._edge_payload: dict[tuple[str, Signature, str], str] = {}
        if initial is not None:
            self.add_state(initial)

    # -- construction -----------------------------------------------------

    def add_state(self, state: SutState) -> None:
        if state.id in self.states:
            return
        self.states[state.id] = state
        self._order[state.id] = len(self._order)
        if self.initial is None:
            self.initial = state.id
        if state.is_exit:
            self.terminals.add(state.id)
        acts = available_actions(state)
        self._available[state.id] = acts
        self._signatures[state.id] = frozenset(a.signature for a in acts)
        for a in acts:
            self.actions.setdefault(a.signature, a)
            self.transitions.setdefault((state.id, a.signature), [UNKNOWN])

    def add_transition(self, source: SutState, action: Action, target: SutState | None) -> None:
        """Record that ``action`` executed in ``source`` led to ``target``.

        ``target=None`` records an edge to ``s?``.  A concrete target replaces
        a previous ``s?`` entry; distinct concrete targets accumulate.
        """
        self.add_state(source)
        self.actions.setdefault(action.signature, action)
        key = (source.id, action.signature)
        targets = self.transitions.setdefault(key, [UNKNOWN])
        if target is not None:
            self.add_state(target)
            if UNKNOWN in targets:
                targets.remove(UNKNOWN)
            if target.id not in targets:
                targets.append(target.id)
            if action.payload is not None:
                # the first payload seen on an edge is the one road maps replay
                self._edge_payload.setdefault((source.id, action.signature, target.id), action.payload)
        for notify in self.observers:
            notify(source, action, target)

    def add_observer(self, observer: Observer) -> None:
        self.observers.append(observer)

    def copy(self) -> "StateGraph":
        clone = copy.copy(self)
        clone.states = dict(self.states)
        clone.actions = dict(self.actions)
        clone.transitions = {k: list(v) for k, v in self.transitions.items()}
        clone.terminals = set(self.terminals)
        clone.observers = []
        clone._order = dict(self._order)
        clone._available = dict(self._available)
        clone._signatures = dict(self._signatures)
        clone._edge_payload = dict(self._edge_payload)
        return clone

    # -- queries ----------------------------------------------------------

    def available(self, state: SutState | str) -> list[Action]:
        sid = state if isinstance(state, str) else state.id
        if sid not in self._available and not isinstance(state, str):
            return available_actions(state)
        return self._available.get(sid, [])

    def feas(self, action: Action, state: SutState | str) -> bool:
        """Whether ``action`` is in ``A_state``; always true for ``s?``."""
        sid = state if isinstance(state, str) else state.id
        if sid == UNKNOWN:
            return True
        if sid in self._signatures:
            return action.signature in self._signatures[sid]
        return any(a.signature == action.signature for a in self.available(state))

    def edge_payload(self, source: str, action: Action, target: str) -> str | None:
        """Payload first recorded on the concrete edge ``source -action-> target``."""
        return self._edge_payload.get((source, action.signature, target))

    def successors(self, state_id: str, action: Action) -> list[str]:
        return list(self.transitions.get((state_id, action.signature), [UNKNOWN]))

    def is_explored(self, state_id: str, action: Action) -> bool:
        return UNKNOWN not in self.transitions.get((state_id, action.signature), [UNKNOWN])

    def unexplored_actions(self, state: SutState | str) -> list[Action]:
        sid = state if isinstance(state, str) else state.id
        return [a for a in self.available(state) if not self.is_explored(sid, a)]

    def road_map(self, source: SutState | str) -> list[Action] | None:
        """Shortest known path to the nearest state with unexplored actions.

        Breadth-first over concrete transitions only.  Neighbours are expanded
        in action order and, for nondeterministic edges, in state insertion
        order, which fixes ties.  ``None`` when no such state is reachable.
        Text and select steps carry the payload recorded on the edge taken, so
        a recorded login is replayed with its credentials.
        """
        start = source if isinstance(source, str) else source.id
        if start not in self.states:
            return None
        parent: dict[str, tuple[str, Action] | None] = {start: None}
        queue = deque([start])
        while queue:
            sid = queue.popleft()
            if self.unexplored_actions(sid):
                path: list[Action] = []
                while parent[sid] is not None:
                    sid, action = parent[sid]
                    path.append(action)
                return path[::-1]
            for action in self._available.get(sid, []):
                targets = [t for t in self.transitions.get((sid, action.signature), []) if t != UNKNOWN]
                for t in sorted(targets, key=self._order.__getitem__):
                    if t not in parent:
                        payload = self._edge_payload.get((sid, action.signature, t))
                        step = action if payload is None else Action(action.kind, action.target, payload)
                        parent[t] = (sid, step)
                        queue.append(t)
        return None

    def repair(self, case: TestCase) -> TestCase:
        """Drop every action that is infeasible where the walk reaches it.

        The walk simulates the NFA from ``s0`` on the set of possible current
        states; it only advances on kept actions, so repairing twice changes
        nothing more.  The SUT is never executed.
        """
        if self.initial is None:
            return case.copy()
        current: list[str] = [self.initial]
        kept: list[Action] = []
        for action in case.actions:
            feasible = [s for s in current if self.feas(action, s)]
            if not feasible:
                continue
            kept.append(action)
            nxt: list[str] = []
            for s in feasible:
                for t in ([UNKNOWN] if s == UNKNOWN else self.successors(s, action)):
                    if t not in nxt:
                        nxt.append(t)
            current = nxt
        return TestCase(kept, case.name)

    def walk(self, actions: Iterable[Action]) -> list[str]:
        """Possible states after following ``actions`` from ``s0`` (no repair)."""
        current = [self.initial] if self.initial else [UNKNOWN]
        for action in actions:
            nxt: list[str] = []
            for s in current:
                for t in ([UNKNOWN] if s == UNKNOWN else self.successors(s, action)):
                    if t not in nxt:
                        nxt.append(t)
            current = nxt
        return current

    def to_dot(self) -> str:
        lines = ["digraph states {", '  "?" [shape=doublecircle label="s?"];']
        for sid in self.states:
            shape = "box" if sid in self.terminals else "ellipse"
            extra = " penwidth=2" if sid == self.initial else ""
            lines.append(f'  "{sid}" [shape={shape}{extra}];')
        for (sid, sig), targets in self.transitions.items():
            label = f"{sig[0]} {sig[1][-1]}".replace('"', "'")
            for t in targets:
                lines.append(f'  "{sid}" -> "{t}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __len__(self) -> int:
        return len(self.states)
