"""The smart monkey: a rule cascade choosing the next GUI action.

Rules, first applicable wins:

1. exit state: stop;
2. a road map is being followed: take its next action;
3. with the configured usage probability and a loaded model: let the model
   rank the possible targets and act on the best admissible one;
4. a uniformly chosen unexplored action;
5. plan a road map to the nearest state with unexplored actions;
6. a uniformly chosen available action.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .features import feature_matrix
from .neuralnet import TrainedModel
from .stategraph import StateGraph
from .suites import TestCase
from .sut import Action, ComponentDescriptor, InfeasibleActionError, Sut, SutState

DEFAULT_SECTION = "text"


class RecencyBuffer:
    """The last ``capacity`` component paths the model acted on (FIFO)."""

    def __init__(self, capacity: int = 10) -> None:
        self.capacity = capacity
        self._entries: deque[tuple[str, ...]] = deque(maxlen=capacity)

    def push(self, path: tuple[str, ...]) -> None:
        self._entries.append(tuple(path))

    def __contains__(self, path: object) -> bool:
        return path in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def clear(self) -> None:
        self._entries.clear()

    @property
    def entries(self) -> list[tuple[str, ...]]:
        return list(self._entries)


@dataclass
class MonkeyConfig:
    model_usage: int = 0
    seed: int = 0
    buffer_capacity: int = 10

    def __post_init__(self) -> None:
        if not isinstance(self.model_usage, (int, np.integer)) or not 0 <= self.model_usage <= 100:
            raise ValueError("model_usage must be an integer in 0..100")


@dataclass
class MonkeyStats:
    decisions: int = 0
    eligible: int = 0
    consultations: int = 0
    model_actions: int = 0
    latencies: list[float] = field(default_factory=list)
    rules: dict[int, int] = field(default_factory=lambda: {r: 0 for r in range(1, 7)})


def make_payload(kind: str, target: ComponentDescriptor, lexicon: dict[str, list[str]], rng) -> str:
    """Draw a text or choice uniformly from what fits ``target``."""
    if kind == "select":
        if not target.choices:
            raise ValueError(f"{target} offers no choices")
        return target.choices[int(rng.integers(len(target.choices)))]
    if kind != "enter-text":
        raise ValueError(f"{kind} actions take no payload")
    words = lexicon.get(target.lexicon or DEFAULT_SECTION) or [w for ws in lexicon.values() for w in ws]
    if not words:
        return ""
    return words[int(rng.integers(len(words)))]


def rank_targets(
    model: TrainedModel, previous: ComponentDescriptor, targets: Sequence[ComponentDescriptor], state: SutState
) -> list[ComponentDescriptor]:
    """Targets ordered by predicted probability of being next, best first."""
    if not targets:
        return []
    scores = model.predict_proba(feature_matrix(previous, targets, state))
    order = np.argsort(-scores, kind="stable")
    return [targets[i] for i in order]


def create_action_for(
    ranked: Sequence[ComponentDescriptor],
    state: SutState,
    graph: StateGraph,
    buffer: RecencyBuffer,
) -> Optional[Action]:
    """First admissible pool action on the best-ranked target not recently used.

    The pool holds the state's unexplored actions, or all of its actions
    once everything has been explored.
    """
    pool = graph.unexplored_actions(state) or graph.available(state)
    if not pool:
        return None
    for target in ranked:
        if target.path in buffer:
            continue
        for action in pool:
            if action.target.path == target.path:
                buffer.push(target.path)
                return action
    return None


class Monkey:
    def __init__(
        self,
        graph: StateGraph,
        lexicon: dict[str, list[str]],
        config: MonkeyConfig | None = None,
        model: TrainedModel | None = None,
        rng: np.random.Generator | None = None,
    ) -> None:
        self.graph = graph
        self.lexicon = lexicon
        self.config = config or MonkeyConfig()
        self.model = model
        self.rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        self.buffer = RecencyBuffer(self.config.buffer_capacity)
        self.road: list[Action] = []
        self.stats = MonkeyStats()

    def begin_case(self) -> None:
        self.buffer.clear()
        self.road = []

    def _concretize(self, action: Action, state: SutState, replay: bool = False) -> Action:
        """Bind ``action`` to the live descriptor and give it a payload.

        Road-map steps (``replay``) keep the payload recorded in the graph;
        everything else draws a fresh one.
        """
        target = state.find(action.target.path) or action.target
        if action.kind == "click":
            return Action("click", target)
        if replay:
            return Action(action.kind, target, action.payload)
        return Action(action.kind, target, make_payload(action.kind, target, self.lexicon, self.rng))

    def _pick(self, actions: Sequence[Action]) -> Action:
        return actions[int(self.rng.integers(len(actions)))]

    def next_action(self, state: SutState, previous: Optional[Action] = None) -> Optional[Action]:
        self.stats.decisions += 1
        self.graph.add_state(state)
        if state.is_exit:
            self.stats.rules[1] += 1
            return None
        if self.road:
            step = self.road.pop(0)
            if self.graph.feas(step, state):
                self.stats.rules[2] += 1
                return self._concretize(step, state, replay=True)
            self.road = []  # the map no longer matches what was observed
        if self.model is not None and previous is not None:
            self.stats.eligible += 1
            if self.rng.random() < self.config.model_usage / 100:
                self.stats.consultations += 1
                t0 = time.perf_counter()
                ranked = rank_targets(self.model, previous.target, state.components(), state)
                chosen = create_action_for(ranked, state, self.graph, self.buffer)
                self.stats.latencies.append(time.perf_counter() - t0)
                if chosen is not None:
                    self.stats.rules[3] += 1
                    self.stats.model_actions += 1
                    return self._concretize(chosen, state)
        unexplored = self.graph.unexplored_actions(state)
        if unexplored:
            self.stats.rules[4] += 1
            return self._concretize(self._pick(unexplored), state)
        road = self.graph.road_map(state)
        if road:
            self.stats.rules[5] += 1
            self.road = road[1:]
            return self._concretize(road[0], state, replay=True)
        actions = self.graph.available(state)
        if not actions:
            return None
        self.stats.rules[6] += 1
        return self._concretize(self._pick(actions), state)

    def run_case(self, sut: Sut, length: int, name: str = "generated") -> TestCase:
        """Reset ``sut`` (keeping coverage) and walk at most ``length`` actions."""
        sut.reset(cumulative=True)
        self.begin_case()
        actions: list[Action] = []
        previous: Optional[Action] = None
        while len(actions) < length:
            state = sut.current_state()
            action = self.next_action(state, previous)
            if action is None:
                break
            try:
                after = sut.execute(action)
            except InfeasibleActionError:
                self.graph.add_transition(state, action, None)
                break
            self.graph.add_transition(state, action, after)
            actions.append(action)
            previous = action
        return TestCase(actions, name)
