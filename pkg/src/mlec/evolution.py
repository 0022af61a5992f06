"""Genetic algorithm over whole test suites.

An individual is a :class:`TestSuite`.  Fitness (lower is better) is::

    |M| - |M_S| + sum over branches b of dist(b, S)

with ``M`` the procedures of the SUT, ``M_S`` those the suite executes, and
``dist`` 0 for a covered branch, ``norm(d_min)`` for an uncovered branch
whose condition ran at least twice, and 1 otherwise; ``norm(x) = x/(x+1)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .monkey import Monkey, make_payload
from .stategraph import UNKNOWN, StateGraph
from .suites import TestCase, TestSuite
from .sut import Action, CoverageMap, InfeasibleActionError, Sut


@dataclass
class GaConfig:
    population: int = 16
    crossover_probability: float = 0.75
    sigma: float = 0.1
    elitism: int = 1
    max_case_length: int = 25
    max_initial_cases: int = 10
    coverage_target: Optional[float] = None  # percent
    time_budget: Optional[float] = None  # seconds
    max_generations: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must satisfy 0 <= e < population")
        for name in ("crossover_probability", "sigma"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.max_case_length < 1 or self.max_initial_cases < 1:
            raise ValueError("case length and initial case count must be positive")
        if self.coverage_target is None and self.time_budget is None and self.max_generations is None:
            raise ValueError("set a coverage target, a time budget or a generation limit")


def norm(x: float) -> float:
    return x / (x + 1.0)


def branch_term(hit_count: int, min_distance: float, times_executed: int) -> float:
    if hit_count > 0:
        return 0.0
    if times_executed >= 2 and math.isfinite(min_distance):
        return norm(min_distance)
    return 1.0


def fitness_of(coverage: CoverageMap) -> float:
    missing = len(coverage.procedures) - len(coverage.executed_procedures())
    return missing + sum(
        branch_term(r.hit_count, r.min_distance, r.times_condition_executed) for r in coverage.branches.values()
    )


@dataclass
class Evaluation:
    fitness: float
    coverage: float
    covered: frozenset


def execute_suite(suite: TestSuite, sut: Sut, graph: StateGraph | None = None) -> CoverageMap:
    """Run every case from a reset, coverage accumulating over the suite.

    An infeasible action suspends its case: the case is truncated in place
    at that point, and the graph learns the observed transitions.
    """
    sut.reset()
    for case in suite.cases:
        sut.reset(cumulative=True)
        for i, action in enumerate(case.actions):
            state = sut.current_state()
            target = state.find(action.target.path)
            try:
                if target is None:
                    raise InfeasibleActionError(action, "target not present")
                concrete = Action(action.kind, target, action.payload)
                after = sut.execute(concrete)
            except InfeasibleActionError:
                del case.actions[i:]
                break
            if graph is not None:
                graph.add_transition(state, concrete, after)
    suite.cases = [c for c in suite.cases if c.actions]
    return sut.coverage.snapshot()


def fitness(suite: TestSuite, sut: Sut, graph: StateGraph | None = None) -> float:
    return fitness_of(execute_suite(suite, sut, graph))


def evaluate_suite(suite: TestSuite, sut: Sut, graph: StateGraph | None = None) -> Evaluation:
    cov = execute_suite(suite, sut, graph)
    return Evaluation(fitness_of(cov), cov.percent(), frozenset(cov.covered()))


# ---------------------------------------------------------------------------
# Variation
# ---------------------------------------------------------------------------


def crossover(p0: TestSuite, p1: TestSuite, alpha: float) -> tuple[TestSuite, TestSuite]:
    """Single-point recombination of the case lists at relative position ``alpha``.

    ``O0`` takes the first ``floor(alpha |P0|)`` cases of ``P0`` and the last
    ``|P1| - floor(alpha |P1|)`` cases of ``P1``; ``O1`` the remaining
    parts.  Offspring are never larger than the larger parent.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    c0 = int(math.floor(alpha * len(p0.cases)))
    c1 = int(math.floor(alpha * len(p1.cases)))
    a, b = p0.copy().cases, p1.copy().cases
    o0 = [c for c in a[:c0] + b[c1:] if c.actions]
    o1 = [c for c in b[:c1] + a[c0:] if c.actions]
    return TestSuite(o0, p0.name), TestSuite(o1, p1.name)


def _state_at(graph: StateGraph, prefix: list[Action]) -> Optional[str]:
    for sid in graph.walk(prefix):
        if sid != UNKNOWN:
            return sid
    return None


def mutate_case(case: TestCase, graph: StateGraph, rng: np.random.Generator, lexicon: dict) -> TestCase:
    """Change, delete and insert, each applied with probability 1/3, then repair."""
    actions = list(case.actions)
    do_change, do_delete, do_insert = (rng.random(3) < 1 / 3).tolist()
    if do_change and actions:
        p = 1 / len(actions)
        for i, a in enumerate(actions):
            if rng.random() < p and a.kind != "click":
                actions[i] = a.with_payload(make_payload(a.kind, a.target, lexicon, rng))
    if do_delete and actions:
        p = 1 / len(actions)
        actions = [a for a in actions if rng.random() >= p]
    if do_insert:
        n = 1
        while rng.random() < 2.0 ** (1 - n):
            pos = int(rng.integers(len(actions) + 1))
            sid = _state_at(graph, actions[:pos])
            choices = graph.available(sid) if sid else []
            if choices:
                a = choices[int(rng.integers(len(choices)))]
                if a.kind != "click":
                    a = a.with_payload(make_payload(a.kind, a.target, lexicon, rng))
                actions.insert(pos, a)
            n += 1
    return graph.repair(TestCase(actions, case.name))


def mutate_suite(
    suite: TestSuite,
    graph: StateGraph,
    rng: np.random.Generator,
    lexicon: dict,
    sigma: float = 0.1,
    new_case: Optional[Callable[[], TestCase]] = None,
) -> TestSuite:
    """Insert fresh cases with probabilities sigma, sigma^2, ... and mutate cases w.p. 1/|S|."""
    cases = [c.copy() for c in suite.cases]
    if cases:
        p = 1 / len(cases)
        cases = [mutate_case(c, graph, rng, lexicon) if rng.random() < p else c for c in cases]
    n = 1
    while new_case is not None and rng.random() < sigma**n:
        cases.append(new_case())
        n += 1
    cases = [graph.repair(c) for c in cases]
    return TestSuite([c for c in cases if c.actions], suite.name)


# ---------------------------------------------------------------------------
# Selection and the main loop
# ---------------------------------------------------------------------------


def rank_key(fitness_value: float, suite: TestSuite, order: int) -> tuple[float, int, int]:
    return (fitness_value, suite.total_actions, order)


def select(
    population: list[TestSuite], fitnesses: list[float], rng: np.random.Generator, count: Optional[int] = None
) -> list[int]:
    """Indices of ``count`` parents by binary tournament on the rank key."""
    keys = [rank_key(f, s, i) for i, (s, f) in enumerate(zip(population, fitnesses))]
    count = len(population) if count is None else count
    chosen = []
    for _ in range(count):
        i, j = rng.integers(len(population), size=2)
        chosen.append(int(i) if keys[i] <= keys[j] else int(j))
    return chosen


def ranking(population: list[TestSuite], fitnesses: list[float]) -> list[int]:
    return sorted(range(len(population)), key=lambda i: rank_key(fitnesses[i], population[i], i))


@dataclass
class GenerationRecord:
    generation: int
    best: float
    average: float
    coverage: float

    def __str__(self) -> str:
        return f"gen={self.generation} best={self.best:.4f} avg={self.average:.4f} coverage={self.coverage:.2f}"


@dataclass
class EvolutionResult:
    best: TestSuite
    best_fitness: float
    coverage: float
    log: list[GenerationRecord] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def lines(self) -> list[str]:
        return [str(r) for r in self.log]


def init_population(config: GaConfig, monkey: Monkey, sut: Sut, rng: np.random.Generator) -> list[TestSuite]:
    population = []
    for _ in range(config.population):
        k = int(rng.integers(1, config.max_initial_cases + 1))
        cases = [monkey.run_case(sut, int(rng.integers(1, config.max_case_length + 1))) for _ in range(k)]
        population.append(TestSuite([c for c in cases if c.actions] or cases[:1]))
    return population


def evolve(
    config: GaConfig,
    sut: Sut,
    monkey: Monkey,
    on_generation: Optional[Callable[[GenerationRecord], None]] = None,
    clock: Callable[[], float] = time.perf_counter,
) -> EvolutionResult:
    rng = np.random.default_rng(config.seed)
    graph = monkey.graph
    lexicon = monkey.lexicon
    start = clock()

    def fresh_case() -> TestCase:
        return monkey.run_case(sut, int(rng.integers(1, config.max_case_length + 1)))

    population = init_population(config, monkey, sut, rng)
    evals = [evaluate_suite(s, sut, graph) for s in population]
    log: list[GenerationRecord] = []
    gen = 0
    while True:
        fits = [e.fitness for e in evals]
        order = ranking(population, fits)
        best = order[0]
        record = GenerationRecord(gen, fits[best], float(np.mean(fits)), evals[best].coverage)
        log.append(record)
        if on_generation:
            on_generation(record)
        if config.coverage_target is not None and evals[best].coverage >= config.coverage_target:
            break
        if config.time_budget is not None and clock() - start >= config.time_budget:
            break
        if config.max_generations is not None and gen >= config.max_generations:
            break

        parents = select(population, fits, rng)
        offspring: list[TestSuite] = []
        if len(parents) % 2:
            parents.append(parents[0])
        for a, b in zip(parents[0::2], parents[1::2]):
            o0, o1 = population[a], population[b]
            if rng.random() < config.crossover_probability:
                o0, o1 = crossover(o0, o1, float(rng.random()))
            for child in (o0, o1):
                child = mutate_suite(child, graph, rng, lexicon, config.sigma, fresh_case)
                if not child.cases:
                    child = TestSuite([fresh_case()])
                offspring.append(child)
        elites = [population[i].copy() for i in order[: config.elitism]]
        elite_evals = [evals[i] for i in order[: config.elitism]]
        offspring = offspring[: config.population - config.elitism]
        population = elites + offspring
        evals = elite_evals + [evaluate_suite(s, sut, graph) for s in offspring]
        gen += 1

    fits = [e.fitness for e in evals]
    best = ranking(population, fits)[0]
    return EvolutionResult(population[best], fits[best], evals[best].coverage, log, clock() - start)
