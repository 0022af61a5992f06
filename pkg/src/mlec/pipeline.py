"""Glue between replayed suites, the state graph and the feature extractor."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import IO, Iterable

from .evolution import GaConfig, evolve, execute_suite
from .features import CsvDataExtractor
from .monkey import Monkey, MonkeyConfig
from .neuralnet import TrainedModel
from .seeding import derive_seed
from .stategraph import StateGraph
from .suites import TestSuite
from .sut import InfeasibleActionError, Sut, SutModel


class ReplayError(RuntimeError):
    def __init__(self, suite: str, test: str, index: int, reason: str) -> None:
        super().__init__(f"{suite} / {test} / action {index}: {reason}")
        self.suite, self.test, self.index = suite, test, index


@dataclass
class ExtractionStats:
    rows: int = 0
    true_rows: int = 0
    batches: int = 0
    actions: int = 0
    expected_rows: int = 0

    @property
    def true_ratio(self) -> float:
        return self.true_rows / self.rows if self.rows else 0.0


def record_suites(
    sut: Sut, suites: Iterable[TestSuite], graph: StateGraph | None = None, sink: IO[str] | None = None
) -> tuple[StateGraph, ExtractionStats]:
    """Replay human-written suites, learning the state graph on the way.

    With a ``sink`` the extraction observer writes the raw feature CSV.
    Any infeasible action aborts with a :class:`ReplayError`.
    """
    sut.reset()
    graph = graph if graph is not None else StateGraph(sut.current_state())
    extractor = CsvDataExtractor(sink) if sink is not None else None
    if extractor is not None:
        graph.add_observer(extractor)
    stats = ExtractionStats()
    try:
        for suite in suites:
            for case in suite.cases:
                sut.reset(cumulative=True)
                if extractor is not None:
                    extractor.begin_case()
                for i, action in enumerate(case.actions, 1):
                    state = sut.current_state()
                    target = state.find(action.target.path)
                    if target is None:
                        raise ReplayError(suite.name, case.name, i, "target not present")
                    concrete = type(action)(action.kind, target, action.payload)
                    try:
                        after = sut.execute(concrete)
                    except InfeasibleActionError as exc:
                        raise ReplayError(suite.name, case.name, i, exc.reason) from exc
                    if i > 1:
                        stats.expected_rows += len(state.components())
                    graph.add_transition(state, concrete, after)
                    stats.actions += 1
        if extractor is not None:
            extractor.finish()
            stats.rows, stats.true_rows, stats.batches = extractor.rows, extractor.true_rows, extractor.batches
    finally:
        if extractor is not None:
            graph.observers.remove(extractor)
    return graph, stats


# ---------------------------------------------------------------------------
# Generation runs and the usage-0 versus usage-100 comparison
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    seed: int
    usage: int
    coverage: float
    actions: int
    cases: int
    generations: int
    elapsed: float
    best: TestSuite
    log: list[str]
    latencies: list[float]
    consultations: int
    eligible: int

    @property
    def avg_case_length(self) -> float:
        return self.actions / self.cases if self.cases else 0.0

    def summary(self) -> str:
        return f"coverage={self.coverage:.2f} actions={self.actions} cases={self.cases}"


def generation_run(
    model: SutModel,
    seed: int,
    usage: int = 0,
    trained: TrainedModel | None = None,
    ga: dict | None = None,
    seed_suites: Iterable[TestSuite] = (),
    on_generation=None,
) -> RunResult:
    """One independent generation: fresh SUT, graph seeded from recorded suites."""
    sut = Sut(model)
    graph, _ = record_suites(sut, list(seed_suites))
    monkey = Monkey(
        graph,
        model.lexicon,
        MonkeyConfig(model_usage=usage, seed=derive_seed(seed, "monkey")),
        trained,
    )
    config = GaConfig(seed=derive_seed(seed, "ga"), **(ga or {}))
    result = evolve(config, sut, monkey, on_generation)
    # report what the persisted suite achieves when replayed on its own
    coverage = execute_suite(result.best.copy(), Sut(model)).percent()
    return RunResult(
        seed=seed,
        usage=usage,
        coverage=coverage,
        actions=result.best.total_actions,
        cases=len(result.best),
        generations=len(result.log) - 1,
        elapsed=result.elapsed,
        best=result.best,
        log=result.lines,
        latencies=list(monkey.stats.latencies),
        consultations=monkey.stats.consultations,
        eligible=monkey.stats.eligible,
    )


@dataclass
class Comparison:
    baseline: list[RunResult]
    guided: list[RunResult]

    @staticmethod
    def _mean(values: list[float]) -> float:
        return sum(values) / len(values) if values else 0.0

    def mean_coverage(self, runs: list[RunResult]) -> float:
        return self._mean([r.coverage for r in runs])

    def mean_case_length(self, runs: list[RunResult]) -> float:
        return self._mean([r.avg_case_length for r in runs])

    @property
    def latencies(self) -> list[float]:
        return [t for r in self.guided for t in r.latencies]

    def table(self) -> str:
        lines = [f"{'run':>4} {'cov usage=0':>12} {'cov usage=100':>14} {'len usage=0':>12} {'len usage=100':>14}"]
        for i, (a, b) in enumerate(zip(self.baseline, self.guided), 1):
            lines.append(
                f"{i:>4} {a.coverage:>12.2f} {b.coverage:>14.2f} {a.avg_case_length:>12.2f} {b.avg_case_length:>14.2f}"
            )
        lines.append(
            f"{'avg':>4} {self.mean_coverage(self.baseline):>12.2f} {self.mean_coverage(self.guided):>14.2f} "
            f"{self.mean_case_length(self.baseline):>12.2f} {self.mean_case_length(self.guided):>14.2f}"
        )
        for label, runs in (("usage=0", self.baseline), ("usage=100", self.guided)):
            actions = sum(r.actions for r in runs)
            cases = sum(r.cases for r in runs)
            lines.append(f"{label}: actions={actions} cases={cases} avg_case_length={actions / max(cases, 1):.2f}")
        lat = sorted(self.latencies)
        if lat:
            median = statistics.median(lat) * 1000
            lines.append(f"prediction latency: n={len(lat)} median={median:.3f} ms max={lat[-1] * 1000:.3f} ms")
        else:
            lines.append("prediction latency: no model consultations")
        return "\n".join(lines)


def compare_usage(
    model: SutModel,
    trained: TrainedModel,
    runs: int,
    seed: int,
    ga: dict | None = None,
    seed_suites: Iterable[TestSuite] = (),
    on_run=None,
) -> Comparison:
    """``runs`` generations at usage 0 and ``runs`` at usage 100, distinct seeds."""
    seed_suites = list(seed_suites)
    out = Comparison([], [])
    for i in range(runs):
        for usage, bucket in ((0, out.baseline), (100, out.guided)):
            r = generation_run(model, derive_seed(seed, "evaluate", usage, i), usage, trained, ga, seed_suites)
            bucket.append(r)
            if on_run:
                on_run(i, r)
    return out
