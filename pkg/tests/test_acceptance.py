"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (also repeated in
the terminal summary) and then asserts the same condition.  The pipeline is
run with the same defaults the command line uses: root seed 0, keep 0.9.
"""

import io
import json
import statistics
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, TOY_MODEL
from mlec import etl, neuralnet as nn, tap
from mlec.evolution import GaConfig, crossover, evolve, fitness
from mlec.features import focus_cycle, focus_distance, path_distance, point_distance
from mlec.monkey import Monkey, MonkeyConfig
from mlec.pipeline import compare_usage, record_suites
from mlec.seeding import derive_seed
from mlec.suites import DEMO_SUITES, TestCase, TestSuite, demo_suite
from mlec.sut import load_demo, load_model

from test_evolution import build_suite, oracle_fitness
from test_features import POINT_CASES, PATH_CASES, cd, credentials_entered
from test_neuralnet import gradient_check
from test_stategraph import random_case
from test_sut import CANCEL_BUTTON, LOGIN_BUTTON, PASSWORD, USERNAME
from test_tap_cli import GOLDEN

ROOT_SEED = 0


def demo_monkey(sut, seed, usage=0, model=None):
    graph, _ = record_suites(sut, [demo_suite("login")])
    return Monkey(graph, sut.model.lexicon, MonkeyConfig(model_usage=usage, seed=seed), model)


def report(capsys, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    return ok


@pytest.fixture(scope="module")
def raw_csv():
    buf = io.StringIO()
    t0 = time.perf_counter()
    _, stats = record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES], sink=buf)
    return buf.getvalue(), stats, time.perf_counter() - t0


@pytest.fixture(scope="module")
def training(raw_csv):
    text, _ = etl.transform(raw_csv[0], 0.9, derive_seed(ROOT_SEED, "etl"))
    x, y = etl.load_dataset(text)
    seed = derive_seed(ROOT_SEED, "train")
    t0 = time.perf_counter()
    result = nn.train(x, y, nn.TrainConfig(seed=seed))
    return result, nn.TrainedModel(result.params, result.stats, seed), time.perf_counter() - t0


def test_criterion_1_extraction_arithmetic(capsys, raw_csv):
    _, stats, elapsed = raw_csv
    actions = sum(demo_suite(n).total_actions for n in DEMO_SUITES)
    ok = stats.true_rows == 56 and stats.rows == stats.expected_rows and elapsed < 5
    report(
        capsys, 1, ok,
        f"true_rows={stats.true_rows} (want 56 from {actions} actions) rows={stats.rows} "
        f"predicted={stats.expected_rows} time={elapsed:.2f}s",
    )
    assert ok


def test_criterion_2_undersampling_ratio(capsys, raw_csv):
    rows, _ = etl.transform_rows(io.StringIO(raw_csv[0]), keep_fraction=1.0)
    n_false = sum(r[-1] == "0" for r in rows)
    n_true = len(rows) - n_false
    t0 = time.perf_counter()
    fractions, dropped_true = [], 0
    for seed in range(30):
        kept = etl.undersample(rows, 0.9, seed)
        fractions.append(sum(r[-1] == "0" for r in kept) / n_false)
        dropped_true += n_true - sum(r[-1] == "1" for r in kept)
    elapsed = time.perf_counter() - t0
    mean = float(np.mean(fractions))
    ok = abs(mean - 0.9) <= 0.01 and dropped_true == 0 and elapsed < 5
    report(capsys, 2, ok, f"mean kept false fraction={mean:.4f} true rows dropped={dropped_true} time={elapsed:.2f}s")
    assert ok


def test_criterion_3_model_quality(capsys, training):
    result, _, elapsed = training
    acc = result.report.accuracy
    ok = acc >= 0.75 and elapsed < 120
    report(capsys, 3, ok, f"test accuracy={acc:.4f} best_epoch={result.best_epoch} time={elapsed:.1f}s")
    assert ok


def test_criterion_4_gradient_correctness(capsys):
    t0 = time.perf_counter()
    worst = max(gradient_check(seed) for seed in range(20))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 10
    report(capsys, 4, ok, f"max relative error={worst:.2e} over 20 seeds time={elapsed:.2f}s")
    assert ok


def test_criterion_5_numerical_invariants(capsys, raw_csv, training, tmp_path):
    rng = np.random.default_rng(5)
    z = np.concatenate([rng.normal(scale=s, size=(500, 2)) for s in (1, 50, 700)])
    softmax_err = float(np.max(np.abs(nn.softmax(z).sum(axis=1) - 1)))

    text, _ = etl.transform(raw_csv[0], 0.9, derive_seed(ROOT_SEED, "etl"))
    x, y = etl.load_dataset(text)
    x_tr = nn.split(x, y, 0.7, 1)[0]
    zn = nn.normalize(nn.fit_normalizer(x_tr), x_tr)
    varying = x_tr.std(axis=0) > 0
    mean_err = float(np.max(np.abs(zn.mean(axis=0)[varying])))
    std_err = float(np.max(np.abs(zn.std(axis=0)[varying] - 1)))

    model = training[1]
    nn.save_model(tmp_path / "m.json", model)
    back = nn.load_model(tmp_path / "m.json")
    identical = bool(np.array_equal(model.predict_proba(x[:200]), back.predict_proba(x[:200])))

    ok = softmax_err <= 1e-9 and mean_err < 1e-9 and std_err < 1e-6 and identical
    report(
        capsys, 5, ok,
        f"softmax row error={softmax_err:.1e} |mean|={mean_err:.1e} |std-1|={std_err:.1e} round-trip identical={identical}",
    )
    assert ok


def test_criterion_6_metrics_oracle(capsys):
    r = nn.EvalReport.from_confusion(tp=24, fp=2, tn=8, fn=5)
    ok = abs(r.accuracy - 0.8205) <= 1e-4
    report(capsys, 6, ok, f"accuracy={r.accuracy:.4f} precision={r.precision:.4f}")
    assert ok


def test_criterion_7_feature_oracle(capsys):
    sut = load_demo()
    state = credentials_entered(sut)
    cycle = focus_cycle(state, "login")
    user = state.find(USERNAME)
    triple = tuple(focus_distance(user, state.find(p), cycle) for p in (PASSWORD, LOGIN_BUTTON, CANCEL_BUTTON))
    path_ok = sum(path_distance(cd(*a), cd(*b)) == d for a, b, d in PATH_CASES)
    point_ok = sum(
        abs(point_distance(cd("s", x=a[0], y=a[1]), cd("t", x=b[0], y=b[1])) - d) < 1e-9 for a, b, d in POINT_CASES
    )
    ok = triple == (1, 2, -1) and path_ok == len(PATH_CASES) >= 10 and point_ok == len(POINT_CASES) >= 10
    report(
        capsys, 7, ok,
        f"focus triple={triple} path fixtures {path_ok}/{len(PATH_CASES)} point fixtures {point_ok}/{len(POINT_CASES)}",
    )
    assert ok


def random_toy_steps(rng):
    words = TOY_MODEL["lexicon"]["numbers"] + ["abc", "7"]
    cases = []
    for _ in range(int(rng.integers(1, 6))):
        steps = []
        for _ in range(int(rng.integers(1, 9))):
            if rng.random() < 0.5:
                steps.append(("enter", words[int(rng.integers(len(words)))]))
            else:
                steps.append(("click", ("Check", "Clear")[int(rng.integers(2))]))
        cases.append(steps)
    return cases


def test_criterion_8_ga_properties(capsys, raw_csv):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)

    size_ok = True
    for _ in range(200):
        n0, n1 = rng.integers(0, 15, size=2)
        p0 = TestSuite([TestCase([None]) for _ in range(n0)])
        p1 = TestSuite([TestCase([None]) for _ in range(n1)])
        o0, o1 = crossover(p0, p1, float(rng.random()))
        size_ok &= max(len(o0), len(o1)) <= max(n0, n1)

    graph, _ = record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES])
    repair_ok = True
    for _ in range(200):
        once = graph.repair(random_case(graph, rng, int(rng.integers(0, 30))))
        repair_ok &= graph.repair(once).actions == once.actions

    fitness_matches = 0
    for _ in range(50):
        steps = random_toy_steps(rng)
        sut = load_model(json.dumps(TOY_MODEL))
        fitness_matches += fitness(build_suite(sut, steps), sut) == oracle_fitness(steps)

    sut = load_demo()
    result = evolve(GaConfig(population=8, max_generations=30, seed=8), sut, demo_monkey(sut, 8))
    bests = [r.best for r in result.log]
    monotone = len(bests) == 31 and all(b <= a for a, b in zip(bests, bests[1:]))

    elapsed = time.perf_counter() - t0
    ok = size_ok and repair_ok and fitness_matches == 50 and monotone and elapsed < 30
    report(
        capsys, 8, ok,
        f"crossover bound={size_ok} repair idempotent={repair_ok} fitness oracle {fitness_matches}/50 "
        f"elitism monotone over {len(bests) - 1} generations={monotone} time={elapsed:.1f}s",
    )
    assert ok


@pytest.fixture(scope="module")
def comparison(training):
    t0 = time.perf_counter()
    ga = dict(coverage_target=50.0, time_budget=60.0)
    result = compare_usage(load_demo().model, training[1], 10, ROOT_SEED, ga, [demo_suite("login")])
    return result, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_9_coverage_parity(capsys, comparison):
    cmp_, elapsed = comparison
    cov0, cov100 = cmp_.mean_coverage(cmp_.baseline), cmp_.mean_coverage(cmp_.guided)
    len0, len100 = cmp_.mean_case_length(cmp_.baseline), cmp_.mean_case_length(cmp_.guided)
    gap_ok = abs(cov100 - cov0) <= 5
    length_ok = len100 <= len0
    ok = gap_ok and length_ok and elapsed < 25 * 60
    report(
        capsys, 9, ok,
        f"coverage usage0={cov0:.2f}% usage100={cov100:.2f}% (gap ok={gap_ok}) "
        f"actions per case usage0={len0:.2f} usage100={len100:.2f} (length ok={length_ok}) time={elapsed:.0f}s",
    )
    with capsys.disabled():
        print(cmp_.table())
    assert ok


def test_criterion_10_prediction_latency(capsys, training):
    sut = load_demo()
    monkey = demo_monkey(sut, 10, usage=100, model=training[1])
    for _ in range(60):
        monkey.run_case(sut, 25)
    lat = monkey.stats.latencies
    median, worst = statistics.median(lat), max(lat)
    ok = median < 0.05 and worst < 1.0
    report(capsys, 10, ok, f"n={len(lat)} median={median * 1000:.3f} ms max={worst * 1000:.3f} ms")
    assert ok


def test_criterion_11_tap(capsys):
    reports = []
    for name in ("login", *DEMO_SUITES):
        reports.append(tap.report(load_demo(), [demo_suite(name)])[0])
    sut = load_demo()
    result = evolve(GaConfig(population=6, max_generations=3, seed=11), sut, demo_monkey(sut, 11))
    reports.append(tap.report(load_demo(), [result.best])[0])
    well_formed = 0
    for text in reports:
        try:
            tap.check(text)
            well_formed += 1
        except tap.TapFormatError:
            pass
    golden = reports[0] == GOLDEN.read_text()
    ok = well_formed == len(reports) and golden
    report(capsys, 11, ok, f"well-formed reports {well_formed}/{len(reports)} login golden byte match={golden}")
    assert ok
