"""
Does the network help?
======================

Runs the generator with the model switched off (usage 0) and always
consulted (usage 100) on independent seeds and compares coverage and the
length of the generated cases.  The full acceptance setting is ten runs per
arm with a 60 s budget; this demo uses three short runs.
"""

# %%
import io

from mlec import etl, neuralnet as nn
from mlec.pipeline import compare_usage, record_suites
from mlec.suites import DEMO_SUITES, demo_suite
from mlec.sut import load_demo

buf = io.StringIO()
record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES], sink=buf)
x, y = etl.load_dataset(etl.transform(buf.getvalue(), 0.9, seed=1)[0])
trained = nn.train(x, y, nn.TrainConfig(seed=1))
model = nn.TrainedModel(trained.params, trained.stats, 1)

# %%
comparison = compare_usage(
    load_demo().model,
    model,
    runs=3,
    seed=0,
    ga=dict(coverage_target=50.0, time_budget=20.0),
    seed_suites=[demo_suite("login")],
    on_run=lambda i, r: print(f"run {i + 1} usage={r.usage}: {r.summary()} in {r.elapsed:.1f}s"),
)
print(comparison.table())
