"""Command-line front end: ``mlec <subcommand>``.

Exit status is 0 on success, 1 for invalid input or configuration and 2
for failures while running.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from . import etl, neuralnet, tap
from .pipeline import ReplayError, compare_usage, generation_run, record_suites
from .seeding import derive_seed
from .suites import DEMO_SUITES, TestSuite, demo_suite, load_suite, save_suite
from .sut import ModelError, Sut, load_demo, load_model_file

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _sut(path: str | None) -> Sut:
    return load_model_file(path) if path else load_demo()


def _suites(paths: Sequence[str] | None, default: Sequence[str]) -> list[TestSuite]:
    if paths is None:
        return [demo_suite(n) for n in default]
    return [load_suite(p) for p in paths]


def _usage(value: str) -> int:
    n = int(value)
    if not 0 <= n <= 100:
        raise argparse.ArgumentTypeError("must be an integer in 0..100")
    return n


def _fraction(value: str) -> float:
    x = float(value)
    if not 0 < x <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return x


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_extract(args: argparse.Namespace) -> int:
    sut = _sut(args.sut)
    suites = _suites(args.suites, DEMO_SUITES)
    buf = io.StringIO()
    try:
        graph, stats = record_suites(sut, suites, sink=buf)
    except ReplayError as exc:
        raise RuntimeError(f"cannot replay suite: {exc}") from exc
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    print(
        f"rows={stats.rows} true={stats.true_rows} ({100 * stats.true_ratio:.2f}%) "
        f"batches={stats.batches} actions={stats.actions} expected_rows={stats.expected_rows}"
    )
    if args.dump_graph:
        Path(args.dump_graph).write_text(graph.to_dot(), encoding="utf-8")
    return EXIT_OK


def cmd_transform(args: argparse.Namespace) -> int:
    raw = Path(args.input).read_text(encoding="utf-8")
    seed = args.seed if args.seed is not None else derive_seed(args.root_seed, "etl")
    text, report = etl.transform(raw, args.keep, seed)
    Path(args.output).write_text(text, encoding="utf-8")
    print(report)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    x, y = etl.load_dataset(Path(args.data).read_text(encoding="utf-8"))
    seed = args.seed if args.seed is not None else derive_seed(args.root_seed, "train")
    config = neuralnet.TrainConfig(
        epochs_max=args.epochs,
        minibatch=args.batch,
        learning_rate=args.lr,
        l2=args.l2,
        time_budget=args.time_budget,
        seed=seed,
    )
    result = neuralnet.train(x, y, config, on_log=None if args.quiet else print)
    neuralnet.save_model(args.out, neuralnet.TrainedModel(result.params, result.stats, seed))
    print(result.report.table())
    return EXIT_OK


def _ga_options(args: argparse.Namespace) -> dict:
    return dict(
        population=args.population,
        coverage_target=args.coverage_target,
        time_budget=args.budget,
        max_generations=args.max_generations,
    )


def cmd_generate(args: argparse.Namespace) -> int:
    sut = _sut(args.sut)
    trained = neuralnet.load_model(args.model) if args.model else None
    if args.model_usage and trained is None:
        print("note: no --model given, the model rule never fires", file=sys.stderr)
    seed_suites = _suites(args.seed_suites, ("login",))
    out = Path(args.out)
    for run in range(args.runs):
        seed = derive_seed(args.root_seed, "generate", run)
        log = (lambda rec: print(rec)) if not args.quiet else None
        result = generation_run(sut.model, seed, args.model_usage, trained, _ga_options(args), seed_suites, log)
        result.best.name = f"generated-suite-{run + 1}"
        target = out if args.runs == 1 else out.with_name(f"{out.stem}-{run + 1}{out.suffix}")
        save_suite(result.best, target)
        if args.dump_graph:
            graph, _ = record_suites(Sut(sut.model), [*seed_suites, result.best.copy()])
            Path(args.dump_graph).write_text(graph.to_dot(), encoding="utf-8")
        print(f"run={run + 1} {result.summary()} file={target}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    sut = _sut(args.sut)
    suites = [load_suite(p) for p in args.suites]
    text, coverage = tap.report(sut, suites)
    sys.stdout.write(text)
    print(f"# branch coverage {coverage.percent():.2f}% ({len(coverage.covered())}/{len(coverage.branches)})")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    sut = _sut(args.sut)
    trained = neuralnet.load_model(args.model)
    seed_suites = _suites(args.seed_suites, ("login",))

    def progress(i: int, r) -> None:
        if not args.quiet:
            print(f"run={i + 1} usage={r.usage} {r.summary()} generations={r.generations} time={r.elapsed:.1f}s")

    comparison = compare_usage(
        sut.model, trained, args.runs, args.root_seed, _ga_options(args), seed_suites, progress
    )
    print(comparison.table())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlec", description="ML-enhanced evolutionary GUI test generation")
    parser.add_argument("--seed", dest="root_seed", type=int, default=0, help="root seed for every subsystem")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_sut(p):
        p.add_argument("--sut", help="SUT model file (default: bundled demo)")
        return p

    p = with_sut(sub.add_parser("extract", help="replay suites and write the raw feature CSV"))
    p.add_argument("--suites", nargs="*", help="suite files (default: bundled demo suites)")
    p.add_argument("--out", required=True)
    p.add_argument("--dump-graph", help="write the learned state graph as DOT")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("transform", help="encode and undersample a raw CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--keep", type=_fraction, default=0.9)
    p.add_argument("--seed", type=int, help="sampling seed (default: derived from the root seed)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("train", help="train the network on a transformed CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="training seed (default: derived from the root seed)")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--time-budget", type=float, default=60.0)
    p.add_argument("--quiet", action="store_true", help="omit per-epoch lines")
    p.set_defaults(func=cmd_train)

    def with_ga(p):
        p.add_argument("--model", help="trained model file")
        p.add_argument("--seed-suites", nargs="*", help="recorded suites that seed the state graph (default: login)")
        p.add_argument("--coverage-target", type=float, default=50.0)
        p.add_argument("--budget", type=float, default=120.0, help="seconds per run")
        p.add_argument("--max-generations", type=int)
        p.add_argument("--population", type=int, default=16)
        p.add_argument("--quiet", action="store_true")
        return p

    p = with_ga(with_sut(sub.add_parser("generate", help="evolve a test suite")))
    p.add_argument("--model-usage", type=_usage, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--out", required=True, help="suite file; numbered per run when --runs > 1")
    p.add_argument("--dump-graph", help="write the state graph of the last run as DOT")
    p.set_defaults(func=cmd_generate)

    p = with_sut(sub.add_parser("replay", help="replay suite files and print a TAP report"))
    p.add_argument("suites", nargs="+")
    p.set_defaults(func=cmd_replay)

    p = with_ga(with_sut(sub.add_parser("evaluate", help="compare model usage 0 against 100")))
    p.set_defaults(func=cmd_evaluate, budget=60.0)
    p.add_argument("--runs", type=int, default=15)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "evaluate" and not args.model:
        parser.exit(EXIT_INVALID, "mlec evaluate: error: --model is required\n")
    try:
        if getattr(args, "runs", 1) < 1:
            raise UsageError("--runs must be at least 1")
        return args.func(args)
    except (UsageError, ModelError, ValueError, FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        print(f"mlec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report and signal a runtime failure
        print(f"mlec {args.command}: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
