"""Parallel fan-out of sampled subproblems, argmax reduction, run reports.

One coordinator launches m workers.  Worker s samples its own reduced
table (subset 1 by truncation, the rest from the half-normal weights) and
runs the memetic search on it under a budget shared by everyone.  Workers
own their tables, random streams and search state outright; the original
table is shared read-only; snapshots are collected per worker and merged
after the fact, so the reduction is order independent.
"""

from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, replace

from .budget import Budget, IterationBudget, TimeBudget
from .fileio import write_snapshot_csv
from .model import Dag, ScoreTable
from .ordersearch import OrderingEvaluation, SearchConfig, minobs_search
from .sampling import SamplingConfig, sample_score_table
from .seeds import worker_search_seed

__all__ = [
    "EngineError",
    "RunConfig",
    "WorkerResult",
    "RunReport",
    "ps_minobs",
    "delta",
    "compare_runs",
    "ComparisonTable",
]


class EngineError(RuntimeError):
    """A run could not produce any result."""


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one parallel run.

    Exactly one of ``time_limit`` (wall seconds, shared deadline) and
    ``iteration_limit`` (per-worker evaluation count, fully deterministic)
    must be set.  ``snapshot_interval`` is measured in the same unit as the
    chosen budget.  ``threads`` bounds concurrent workers; excess workers
    queue and simply see less of the shared wall deadline.
    """

    p: float = 1.0
    m: int = 1
    time_limit: float | None = None
    iteration_limit: int | None = None
    snapshot_interval: float = 1800.0
    base_seed: int = 0
    threads: int | None = None
    worker_kind: str = "thread"
    search: SearchConfig = SearchConfig()

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("need at least one worker")
        if (self.time_limit is None) == (self.iteration_limit is None):
            raise ValueError("set exactly one of time_limit and iteration_limit")
        if self.time_limit is not None:
            if self.time_limit <= 0:
                raise ValueError("time limit must be positive")
            if self.snapshot_interval > self.time_limit:
                raise ValueError("snapshot interval exceeds the time limit")
        if self.iteration_limit is not None and self.iteration_limit < 0:
            raise ValueError("iteration limit must be non-negative")
        if not (self.snapshot_interval > 0):
            raise ValueError("snapshot interval must be positive")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.worker_kind not in ("thread", "process"):
            raise ValueError("worker_kind must be 'thread' or 'process'")


@dataclass(frozen=True)
class WorkerResult:
    """Outcome of one worker: its subset shape, trajectory and final answer."""

    worker: int
    sampled_sizes: tuple[int, ...]
    snapshots: tuple[tuple[float, float], ...]
    evaluation: OrderingEvaluation | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.evaluation is not None


@dataclass(frozen=True)
class RunReport:
    """Everything a run produced: per-worker results and the winner.

    ``deltas`` holds per-worker relative gaps against ``baseline_score``
    when a baseline was supplied.
    """

    workers: tuple[WorkerResult, ...]
    winner: int
    winner_dag: Dag
    baseline_score: float | None = None
    deltas: tuple[float | None, ...] | None = None

    def worker_result(self, s: int) -> WorkerResult:
        for w in self.workers:
            if w.worker == s:
                return w
        raise KeyError(f"no worker {s}")

    def snapshot_series(self) -> dict[int, list[tuple[float, float]]]:
        return {w.worker: list(w.snapshots) for w in self.workers if w.ok}

    def to_csv(self) -> str:
        return write_snapshot_csv(self.snapshot_series())

    def summary(self) -> str:
        lines = ["run summary"]
        for w in self.workers:
            if w.ok:
                lines.append(
                    f"worker {w.worker}: score {w.evaluation.total!r} "
                    f"({len(w.snapshots)} snapshots, "
                    f"{sum(w.sampled_sizes)} sampled entries)"
                )
            else:
                lines.append(f"worker {w.worker}: FAILED ({w.error})")
        lines.append(f"winner: worker {self.winner} with score "
                     f"{self.worker_result(self.winner).evaluation.total!r}")
        if self.baseline_score is not None and self.deltas is not None:
            lines.append(f"baseline score: {self.baseline_score!r}")
            for w, d in zip(self.workers, self.deltas):
                shown = "n/a" if d is None else f"{d * 1000.0:+.3f} permille"
                lines.append(f"worker {w.worker} gap vs baseline: {shown}")
        return "\n".join(lines) + "\n"


def _make_budget(
    cfg: RunConfig, anchor: float, cancel: threading.Event | None
) -> Budget:
    if cfg.time_limit is not None:
        return TimeBudget(cfg.time_limit, anchor=anchor, cancel=cancel)
    return IterationBudget(cfg.iteration_limit)


def _run_worker(
    table: ScoreTable,
    cfg: RunConfig,
    s: int,
    anchor: float,
    cancel: threading.Event | None = None,
) -> WorkerResult:
    try:
        sampled = sample_score_table(
            s, SamplingConfig(p=cfg.p), table, cfg.base_seed
        )
        budget = _make_budget(cfg, anchor, cancel)
        snapshots: list[tuple[float, float]] = []

        def sink(elapsed: float, score: float, worker_id: int) -> None:
            snapshots.append((elapsed, score))

        search_cfg = replace(cfg.search, rng_seed=worker_search_seed(cfg.base_seed, s))
        evaluation = minobs_search(
            sampled,
            search_cfg,
            budget,
            snapshot_sink=sink,
            snapshot_interval=cfg.snapshot_interval,
            worker_id=s,
        )
        return WorkerResult(
            worker=s,
            sampled_sizes=tuple(len(t.entries) for t in sampled.tables),
            snapshots=tuple(snapshots),
            evaluation=evaluation,
        )
    except Exception as exc:  # noqa: BLE001 - worker failures are data
        return WorkerResult(
            worker=s,
            sampled_sizes=(),
            snapshots=(),
            evaluation=None,
            error=f"{type(exc).__name__}: {exc}",
        )


def ps_minobs(
    table: ScoreTable,
    cfg: RunConfig,
    baseline_score: float | None = None,
    cancel: threading.Event | None = None,
) -> RunReport:
    """Run m sampled searches in parallel and keep the best structure.

    All workers share one deadline.  Ties in the final scores go to the
    lowest worker index.  Worker failures are captured per worker and only
    excluded from the reduction; a run where every worker failed raises
    :class:`EngineError`.  The winner's parent sets are all verified to
    exist in the original table with their original scores.
    """
    threads = cfg.threads if cfg.threads is not None else cfg.m
    anchor = time.monotonic()
    if cfg.m == 1:
        results = [_run_worker(table, cfg, 1, anchor, cancel)]
    elif cfg.worker_kind == "process":
        # Process workers cannot observe the in-process cancel event.
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_worker, table, cfg, s, anchor)
                for s in range(1, cfg.m + 1)
            ]
            results = [f.result() for f in futures]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_worker, table, cfg, s, anchor, cancel)
                for s in range(1, cfg.m + 1)
            ]
            results = [f.result() for f in futures]

    winner_result: WorkerResult | None = None
    for w in results:
        if w.ok and (
            winner_result is None or w.evaluation.total > winner_result.evaluation.total
        ):
            winner_result = w
    if winner_result is None:
        details = "; ".join(f"worker {w.worker}: {w.error}" for w in results)
        raise EngineError(f"all workers failed: {details}")

    winner_dag = winner_result.evaluation.to_dag()
    _verify_against_original(table, winner_result.evaluation)

    deltas = None
    if baseline_score is not None:
        deltas = tuple(
            delta(baseline_score, w.evaluation.total) if w.ok else None
            for w in results
        )
    return RunReport(
        workers=tuple(results),
        winner=winner_result.worker,
        winner_dag=winner_dag,
        baseline_score=baseline_score,
        deltas=deltas,
    )


def _verify_against_original(table: ScoreTable, evaluation: OrderingEvaluation) -> None:
    total = 0.0
    for node, sp in enumerate(evaluation.chosen):
        node_table = table.tables[node]
        for entry in node_table.entries:
            if entry.parents == sp.parents:
                if entry.score != sp.score:
                    raise EngineError(
                        f"node {node}: sampled score {sp.score!r} diverged from "
                        f"the original {entry.score!r}"
                    )
                total += entry.score
                break
        else:
            raise EngineError(
                f"node {node}: winning parent set {sp.parents} is not in the "
                "original table"
            )
    if not math.isclose(total, evaluation.total, rel_tol=0.0, abs_tol=1e-6):
        raise EngineError(
            f"winner score {evaluation.total!r} does not match the original "
            f"table recomputation {total!r}"
        )


def delta(s_star: float, s_i: float) -> float:
    """Relative score gap (s_star - s_i) / s_star.

    For the negative log scores this works on, a positive result means
    ``s_i`` is the higher (better) score.  ``s_star`` must be nonzero.
    """
    if s_star == 0:
        raise ValueError("reference score must be nonzero")
    return (s_star - s_i) / s_star


@dataclass(frozen=True)
class ComparisonTable:
    """Per-interval relative gaps of each worker series against a baseline.

    ``rows`` maps a series label ("S1".., plus "highest_dag" for the
    per-interval best worker) to one gap per interval boundary.
    """

    boundaries: tuple[float, ...]
    rows: tuple[tuple[str, tuple[float, ...]], ...]

    def row(self, label: str) -> tuple[float, ...]:
        for name, values in self.rows:
            if name == label:
                return values
        raise KeyError(label)

    def to_csv(self) -> str:
        out = ["series,elapsed_s,delta_permille"]
        for label, values in self.rows:
            for boundary, value in zip(self.boundaries, values):
                out.append(f"{label},{boundary!r},{value * 1000.0:.3f}")
        return "\n".join(out) + "\n"

    def format(self) -> str:
        width = 10
        header = "series".ljust(width) + "".join(
            f"{b:>12g}" for b in self.boundaries
        )
        lines = [header]
        for label, values in self.rows:
            lines.append(
                label.ljust(width)
                + "".join(f"{v * 1000.0:>11.3f}‰" for v in values)
            )
        return "\n".join(lines) + "\n"


def _best_at(series: list[tuple[float, float]], boundary: float) -> float:
    best = None
    for elapsed, score in series:
        if elapsed <= boundary and (best is None or score > best):
            best = score
    if best is None:
        # The series starts after this boundary; fall back to its first value.
        best = series[0][1]
    return best


def compare_runs(
    baseline: dict[int, list[tuple[float, float]]] | list[tuple[float, float]],
    runs: dict[int, list[tuple[float, float]]],
    interval: float,
) -> ComparisonTable:
    """Per-interval gaps of each worker against a baseline trajectory.

    At every interval boundary each series contributes its best score seen
    so far; the gap is the relative difference against the baseline's best.
    A final "highest_dag" row tracks the best worker per interval.  The
    interval must not exceed the span of every series involved.
    """
    if not (interval > 0):
        raise ValueError("interval must be positive")
    if isinstance(baseline, dict):
        base_series = [snap for series in baseline.values() for snap in series]
        base_series.sort()
    else:
        base_series = sorted(baseline)
    if not base_series:
        raise ValueError("baseline series is empty")
    if not runs or any(not s for s in runs.values()):
        raise ValueError("run series are empty")
    span = max(
        max(e for e, _ in base_series),
        max(e for series in runs.values() for e, _ in series),
    )
    if interval > span:
        raise ValueError(f"interval {interval} exceeds the series span {span}")
    boundaries = []
    j = 1
    while interval * j <= span * (1.0 + 1e-12):
        boundaries.append(interval * j)
        j += 1
    rows = []
    per_worker: dict[int, list[float]] = {}
    for worker in sorted(runs):
        per_worker[worker] = [_best_at(runs[worker], b) for b in boundaries]
    base_best = [_best_at(base_series, b) for b in boundaries]
    for worker in sorted(runs):
        gaps = tuple(
            delta(sb, wb) for sb, wb in zip(base_best, per_worker[worker])
        )
        rows.append((f"S{worker}", gaps))
    highest = tuple(
        delta(sb, max(per_worker[w][i] for w in per_worker))
        for i, sb in enumerate(base_best)
    )
    rows.append(("highest_dag", highest))
    return ComparisonTable(boundaries=tuple(boundaries), rows=tuple(rows))
