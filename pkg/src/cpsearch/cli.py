"""Command-line front end: score, learn, compare, info.

Exit codes are a stable scripting contract: 0 success, 2 input parse
failure, 3 resource cap exceeded, 4 usage error.  Output files are written
to a temporary sibling and renamed, so failed commands leave nothing
behind.  A ``key = value`` config file (with ``#`` comments) can preload
any long option; explicit flags override it.  CPSEARCH_THREADS sets the
default worker-thread count.
"""

from __future__ import annotations

import argparse
import math
import os
import signal
import sys
import tempfile
import threading
import time

from . import engine, fileio, ordersearch, sampling, scoring
from .budget import IterationBudget, TimeBudget
from .model import ModelError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_USAGE = 4
EXIT_INTERRUPT = 130


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code this tool promises."""

    def error(self, message):
        raise UsageError(message)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cpsearch-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise fileio.FormatError(f"cannot read {path}: {exc}") from None


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    for line_no, raw in enumerate(_read_file(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_COERCIONS = {
    "max_indegree": int,
    "ess": float,
    "no_prune": lambda v: v.lower() in ("1", "true", "yes"),
    "algo": str,
    "p": float,
    "m": int,
    "time_limit": float,
    "iter_budget": int,
    "seed": int,
    "threads": int,
    "snapshot_interval": float,
    "interval": float,
    "population": int,
    "mutation_rate": float,
    "workers": str,
    "out": str,
    "out_dag": str,
    "out_csv": str,
}


def _apply_config_defaults(parser: argparse.ArgumentParser, path: str) -> None:
    values = _load_config_file(path)
    coerced = {}
    for key, raw in values.items():
        if key not in _CONFIG_COERCIONS:
            raise UsageError(f"unknown config key {key!r}")
        try:
            coerced[key] = _CONFIG_COERCIONS[key](raw)
        except ValueError:
            raise UsageError(f"bad value for config key {key!r}: {raw!r}") from None
    parser.set_defaults(**coerced)


def _default_threads() -> int | None:
    raw = os.environ.get("CPSEARCH_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"CPSEARCH_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("CPSEARCH_THREADS must be >= 1")
    return value


def _build_score_parser() -> _Parser:
    p = _Parser(prog="cpsearch score", description="Score a dataset's candidate parent sets.")
    p.add_argument("data", help="dataset file (rows of integer codes)")
    p.add_argument("--config", help="key = value config file", default=None)
    p.add_argument("--max-indegree", type=int, default=3, help="largest parent-set size")
    p.add_argument("--ess", type=float, default=1.0, help="prior equivalent sample size")
    p.add_argument("--no-prune", action="store_true", help="keep dominated parent sets")
    p.add_argument("--out", required=True, help="score file to write")
    return p


def cmd_score(argv: list[str]) -> int:
    parser = _build_score_parser()
    args = _parse_with_config(parser, argv)
    if args.ess <= 0:
        raise UsageError("--ess must be positive")
    if args.max_indegree < 0:
        raise UsageError("--max-indegree must be >= 0")
    data = fileio.parse_dataset(_read_file(args.data))
    cfg = scoring.ScoringConfig(
        max_indegree=min(args.max_indegree, data.num_vars - 1),
        ess=args.ess,
        prune=not args.no_prune,
    )
    full_per_node = sum(
        math.comb(data.num_vars - 1, k) for k in range(cfg.max_indegree + 1)
    )
    table = scoring.build_score_table(data, cfg)
    names = data.var_names or fileio.default_names(data.num_vars)
    _atomic_write(args.out, fileio.write_score_file(table, names))
    total_kept = 0
    for node_table in table.tables:
        kept = len(node_table.entries)
        total_kept += kept
        print(f"{names[node_table.node]}: {kept} of {full_per_node} parent sets kept")
    print(
        f"total: {total_kept} of {full_per_node * data.num_vars} parent sets "
        f"({args.out})"
    )
    return EXIT_OK


def _build_learn_parser() -> _Parser:
    p = _Parser(prog="cpsearch learn", description="Learn a structure from a score file.")
    p.add_argument("scores", help="pre-computed score file")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument(
        "--algo",
        choices=["obs", "inobs", "minobs", "ps-minobs"],
        default="ps-minobs",
        help="search algorithm",
    )
    p.add_argument("--p", type=float, default=None, help="sampling rate (ps-minobs)")
    p.add_argument("--m", type=int, default=None, help="worker count (ps-minobs)")
    p.add_argument("--time-limit", type=float, default=None, help="wall budget, seconds")
    p.add_argument(
        "--iter-budget",
        type=int,
        default=None,
        help="evaluation budget per worker (deterministic alternative to --time-limit)",
    )
    p.add_argument("--seed", type=int, default=0, help="base random seed")
    p.add_argument("--threads", type=int, default=None, help="max concurrent workers")
    p.add_argument(
        "--snapshot-interval",
        type=float,
        default=None,
        help="snapshot cadence (seconds, or evaluations with --iter-budget)",
    )
    p.add_argument("--population", type=int, default=20, help="ordering population size")
    p.add_argument("--mutation-rate", type=float, default=0.1, help="insert mutation rate")
    p.add_argument(
        "--workers",
        choices=["thread", "process"],
        default="thread",
        help="worker execution mode",
    )
    p.add_argument("--out-dag", default=None, help="structure file to write")
    p.add_argument("--out-csv", default=None, help="snapshot CSV to write")
    return p


def cmd_learn(argv: list[str]) -> int:
    parser = _build_learn_parser()
    args = _parse_with_config(parser, argv)
    if args.algo != "ps-minobs" and (args.p is not None or args.m is not None):
        raise UsageError("--p and --m apply only to --algo ps-minobs")
    if args.time_limit is not None and args.iter_budget is not None:
        raise UsageError("set only one of --time-limit and --iter-budget")
    if args.time_limit is None and args.iter_budget is None:
        raise UsageError("one of --time-limit and --iter-budget is required")
    threads = args.threads if args.threads is not None else _default_threads()

    table, header = fileio.parse_score_file_ex(_read_file(args.scores))
    search_cfg = ordersearch.SearchConfig(
        population_size=args.population,
        mutation_rate=args.mutation_rate,
        rng_seed=args.seed,
    )
    interval = args.snapshot_interval
    if interval is None:
        interval = 1800.0 if args.time_limit is not None else max(1, args.iter_budget)

    started = time.monotonic()
    cancel = threading.Event()
    previous_handler = None
    if threading.current_thread() is threading.main_thread():
        previous_handler = signal.signal(signal.SIGINT, lambda *_: cancel.set())
    try:
        if args.algo == "ps-minobs":
            cfg = engine.RunConfig(
                p=args.p if args.p is not None else 1.0,
                m=args.m if args.m is not None else 1,
                time_limit=args.time_limit,
                iteration_limit=args.iter_budget,
                snapshot_interval=interval,
                base_seed=args.seed,
                threads=threads,
                worker_kind=args.workers,
                search=search_cfg,
            )
            report = engine.ps_minobs(table, cfg, cancel=cancel)
            dag = report.winner_dag
            series = report.snapshot_series()
            print(report.summary(), end="")
        else:
            if args.time_limit is not None:
                budget = TimeBudget(args.time_limit, cancel=cancel)
            else:
                budget = IterationBudget(args.iter_budget)
            snaps: list[tuple[float, float]] = []

            def sink(elapsed, score, worker_id):
                snaps.append((elapsed, score))

            if args.algo == "minobs":
                evaluation = ordersearch.minobs_search(
                    table, search_cfg, budget, sink, interval
                )
            else:
                neighborhood = "insert" if args.algo == "inobs" else "swap"
                evaluation = ordersearch.restart_search(
                    table, search_cfg, budget, neighborhood, sink, interval
                )
            dag = evaluation.to_dag()
            series = {1: snaps}
        elapsed = time.monotonic() - started
        if args.out_dag:
            _atomic_write(args.out_dag, fileio.write_dag(dag, header.names))
        if args.out_csv:
            _atomic_write(args.out_csv, fileio.write_snapshot_csv(series))
        print(f"final score: {dag.score!r}")
        print(f"elapsed: {elapsed:.3f}s")
        if cancel.is_set():
            print("interrupted: partial results written", file=sys.stderr)
            return EXIT_INTERRUPT
        return EXIT_OK
    finally:
        if previous_handler is not None:
            signal.signal(signal.SIGINT, previous_handler)


def _build_compare_parser() -> _Parser:
    p = _Parser(
        prog="cpsearch compare",
        description="Per-interval score gaps between a baseline run and a parallel run.",
    )
    p.add_argument("baseline_csv", help="baseline snapshot CSV")
    p.add_argument("run_csv", help="parallel run snapshot CSV")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--interval", type=float, default=1800.0, help="boundary spacing")
    p.add_argument("--out", default=None, help="gap table CSV to write")
    return p


def cmd_compare(argv: list[str]) -> int:
    parser = _build_compare_parser()
    args = _parse_with_config(parser, argv)
    baseline = fileio.parse_snapshot_csv(_read_file(args.baseline_csv))
    runs = fileio.parse_snapshot_csv(_read_file(args.run_csv))
    try:
        result = engine.compare_runs(baseline, runs, args.interval)
    except ValueError as exc:
        raise fileio.FormatError(str(exc)) from None
    print(result.format(), end="")
    if args.out:
        _atomic_write(args.out, result.to_csv())
    return EXIT_OK


def _build_info_parser() -> _Parser:
    p = _Parser(prog="cpsearch info", description="Combinatorial size utilities.")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--cps",
        nargs=2,
        type=int,
        metavar=("N", "D"),
        help="candidate parent sets for N nodes at max in-degree D",
    )
    group.add_argument("--dags", type=int, metavar="N", help="labelled DAGs on N nodes")
    group.add_argument(
        "--required-m",
        nargs=2,
        metavar=("P", "N"),
        help="workers needed at rate P over N nodes to match the unsampled volume",
    )
    return p


def _format_sig3(value: int) -> str:
    text = f"{float(value):.2e}"
    mantissa, exponent = text.split("e")
    return f"{mantissa}e{int(exponent):+03d}"


def cmd_info(argv: list[str]) -> int:
    parser = _build_info_parser()
    args = parser.parse_args(argv)
    if args.cps is not None:
        n, d = args.cps
        try:
            value = scoring.max_cps_count(n, d)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(f"{value:,} ({_format_sig3(value)})")
    elif args.dags is not None:
        if args.dags < 0:
            raise UsageError("node count must be non-negative")
        print(f"{scoring.count_dags(args.dags):,}")
    else:
        raw_p, raw_n = args.required_m
        try:
            p = float(raw_p)
            n = int(raw_n)
        except ValueError:
            raise UsageError("--required-m needs a rate and a node count") from None
        try:
            result = sampling.required_m(p, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if result.saturated:
            print("inf (saturated)")
        else:
            print(f"{result.value:g}")
    return EXIT_OK


def _parse_with_config(parser: _Parser, argv: list[str]):
    # A config file only sets defaults, so flags always win.
    probe = _Parser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config:
        _apply_config_defaults(parser, known.config)
    return parser.parse_args(argv)


_COMMANDS = {
    "score": cmd_score,
    "learn": cmd_learn,
    "compare": cmd_compare,
    "info": cmd_info,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if not argv or argv[0] in ("-h", "--help"):
            _print_usage()
            return EXIT_OK
        command = argv[0]
        if command not in _COMMANDS:
            raise UsageError(f"unknown command {command!r}")
        return _COMMANDS[command](argv[1:])
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except scoring.CapExceededError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (fileio.FormatError, ModelError, engine.EngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPT


def _print_usage() -> None:
    print(
        "usage: cpsearch COMMAND ...\n"
        "\n"
        "commands:\n"
        "  score    score a dataset's candidate parent sets into a score file\n"
        "  learn    learn a structure from a score file (obs | inobs | minobs | ps-minobs)\n"
        "  compare  per-interval score gaps between two runs\n"
        "  info     combinatorial size utilities\n"
        "\n"
        "run 'cpsearch COMMAND --help' for the full flag list"
    )


if __name__ == "__main__":
    sys.exit(main())
