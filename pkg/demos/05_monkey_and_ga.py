"""
Monkey walks and a whole-suite genetic algorithm
================================================

The monkey builds test cases step by step.  With a trained model and a
usage setting it sometimes lets the network pick the next component.  The
genetic algorithm then evolves suites of such cases towards branch coverage.
"""

# %%
import io

from mlec import etl, neuralnet as nn, tap
from mlec.evolution import GaConfig, evolve
from mlec.monkey import Monkey, MonkeyConfig
from mlec.pipeline import record_suites
from mlec.suites import DEMO_SUITES, demo_suite
from mlec.sut import load_demo

buf = io.StringIO()
record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES], sink=buf)
x, y = etl.load_dataset(etl.transform(buf.getvalue(), 0.9, seed=1)[0])
trained = nn.train(x, y, nn.TrainConfig(seed=1))
model = nn.TrainedModel(trained.params, trained.stats, 1)

# %%
# The recorded login seeds the state graph, so the monkey knows a way in.
sut = load_demo()
graph, _ = record_suites(sut, [demo_suite("login")])
monkey = Monkey(graph, sut.model.lexicon, MonkeyConfig(model_usage=50, seed=3), model)
case = monkey.run_case(sut, 12)
for a in case.actions:
    print(" ", a.describe())
print("rule usage:", monkey.stats.rules)

# %%
# Evolve until half of the branches are covered (or 20 generations pass).
result = evolve(GaConfig(coverage_target=50, max_generations=20, seed=3), sut, monkey, on_generation=print)
print(f"best suite: {len(result.best)} cases, {result.best.total_actions} actions, {result.coverage:.1f}% coverage")

# %%
# Replaying the result prints a nested TAP report.
text, cov = tap.report(load_demo(), [result.best])
print(text[:400])
