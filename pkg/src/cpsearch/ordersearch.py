"""Order-based structure search over scored candidate parent sets.

A node ordering induces a structure by giving every node the best-scoring
parent set drawn entirely from its predecessors; such structures are
acyclic by construction.  Local search walks the ordering space with
insert moves (or adjacent swaps for the baseline), and a memetic layer
maintains a population of locally optimal orderings recombined by order
crossover and insert mutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .budget import Budget
from .model import (
    Dag,
    ModelError,
    NodeScoreTable,
    Ordering,
    ScoredParentSet,
    ScoreTable,
    validate_ordering,
)

__all__ = [
    "SearchConfig",
    "OrderingEvaluation",
    "consistent_best_parents",
    "ordering_score",
    "swap_adjacent",
    "insert_move",
    "IncrementalEvaluator",
    "inobs_local_search",
    "obs_local_search",
    "crossover",
    "mutate",
    "minobs_search",
    "restart_search",
]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the memetic search and the restart baselines.

    ``tabu_tenure`` is accepted for the swap-adjacent baseline but not
    acted on (the baseline relies on random restarts instead).
    """

    population_size: int = 20
    mutation_rate: float = 0.1
    restarts: bool = True
    tabu_tenure: int | None = None
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must lie in [0, 1]")


@dataclass(frozen=True)
class OrderingEvaluation:
    """Best structure consistent with one ordering.

    ``chosen[i]`` is node ``i``'s selected parent set; ``total`` is the sum
    of the selected scores.
    """

    ordering: Ordering
    chosen: tuple[ScoredParentSet, ...]
    total: float

    def to_dag(self) -> Dag:
        return Dag(
            parents=tuple(sp.parents for sp in self.chosen), score=self.total
        )


def consistent_best_parents(
    ordering: Ordering, node: int, table: NodeScoreTable
) -> ScoredParentSet:
    """Best-scoring entry whose parents all precede ``node`` in the ordering.

    Always defined: the empty parent set is consistent with any position.
    """
    mask = 0
    for v in ordering:
        if v == node:
            idx = table.best_consistent_index(mask)
            return table.entries[idx]
        mask |= 1 << v
    raise ModelError(f"node {node} does not appear in the ordering")


def ordering_score(ordering: Ordering, table: ScoreTable) -> OrderingEvaluation:
    """Evaluate an ordering: per-node best consistent parents and their sum."""
    n = table.num_vars
    validate_ordering(ordering, n)
    chosen: list[ScoredParentSet | None] = [None] * n
    mask = 0
    for v in ordering:
        idx = table.tables[v].best_consistent_index(mask)
        chosen[v] = table.tables[v].entries[idx]
        mask |= 1 << v
    total = math.fsum(sp.score for sp in chosen)  # type: ignore[union-attr]
    return OrderingEvaluation(
        ordering=tuple(ordering), chosen=tuple(chosen), total=total  # type: ignore[arg-type]
    )


def swap_adjacent(ordering: Ordering, i: int) -> Ordering:
    """Exchange positions ``i`` and ``i + 1``."""
    if not (0 <= i < len(ordering) - 1):
        raise IndexError(f"swap position {i} out of range")
    seq = list(ordering)
    seq[i], seq[i + 1] = seq[i + 1], seq[i]
    return tuple(seq)


def insert_move(ordering: Ordering, frm: int, to: int) -> Ordering:
    """Remove the element at ``frm`` and reinsert it at position ``to``.

    All other elements shift while preserving their relative order.
    """
    n = len(ordering)
    if not (0 <= frm < n and 0 <= to < n):
        raise IndexError(f"insert positions ({frm}, {to}) out of range")
    seq = list(ordering)
    x = seq.pop(frm)
    seq.insert(to, x)
    return tuple(seq)


class IncrementalEvaluator:
    """Mutable ordering evaluation supporting cheap insert-move deltas.

    Proposing an insert move recomputes parent choices only for nodes whose
    predecessor sets actually change (the window between the two positions,
    minus provably unaffected nodes), which is what makes neighbourhood
    scans affordable on large tables.
    """

    def __init__(self, table: ScoreTable) -> None:
        self.table = table
        self.n = table.num_vars
        self._order: list[int] = []
        self._pos: list[int] = []
        self._cum: list[int] = []
        self._chosen_idx: list[int] = []
        self._chosen_score: list[float] = []
        self._chosen_mask: list[int] = []
        self.total = 0.0
        self._cached: tuple[int, int, list[tuple[int, int]], float] | None = None

    def reset(self, ordering: Ordering) -> None:
        validate_ordering(ordering, self.n)
        n = self.n
        self._order = [int(v) for v in ordering]
        self._pos = [0] * n
        self._cum = [0] * (n + 1)
        self._chosen_idx = [0] * n
        self._chosen_score = [0.0] * n
        self._chosen_mask = [0] * n
        mask = 0
        for i, v in enumerate(self._order):
            self._pos[v] = i
            self._cum[i] = mask
            nt = self.table.tables[v]
            idx = nt.best_consistent_index(mask)
            self._chosen_idx[v] = idx
            self._chosen_score[v] = nt.entries[idx].score
            self._chosen_mask[v] = nt.masks()[idx]
            mask |= 1 << v
        self._cum[n] = mask
        self.total = math.fsum(self._chosen_score)
        self._cached = None

    @property
    def ordering(self) -> Ordering:
        return tuple(self._order)

    def propose_insert(self, frm: int, to: int) -> float:
        """Score change of the insert move, without applying it."""
        n = self.n
        if not (0 <= frm < n and 0 <= to < n):
            raise IndexError(f"insert positions ({frm}, {to}) out of range")
        if frm == to:
            self._cached = (frm, to, [], 0.0)
            return 0.0
        order = self._order
        x = order[frm]
        xbit = 1 << x
        changes: list[tuple[int, int]] = []
        if frm < to:
            # x shifts later: nodes in between lose x as a predecessor,
            # x gains all of them.
            m = self._cum[frm]
            for j in range(frm + 1, to + 1):
                y = order[j]
                if self._chosen_mask[y] & xbit:
                    idx = self.table.tables[y].best_consistent_index(m)
                    changes.append((y, idx))
                m |= 1 << y
            idx = self.table.tables[x].best_consistent_index(m)
            if idx != self._chosen_idx[x]:
                changes.append((x, idx))
        else:
            # x shifts earlier: it loses the nodes in between, they gain x.
            new_x_mask = self._cum[to]
            if self._chosen_mask[x] & ~new_x_mask:
                idx = self.table.tables[x].best_consistent_index(new_x_mask)
                changes.append((x, idx))
            m = new_x_mask | xbit
            for j in range(to, frm):
                y = order[j]
                idx = self.table.tables[y].best_consistent_index(m)
                if idx != self._chosen_idx[y]:
                    changes.append((y, idx))
                m |= 1 << y
        delta = 0.0
        for node, idx in changes:
            delta += self.table.tables[node].entries[idx].score
            delta -= self._chosen_score[node]
        self._cached = (frm, to, changes, delta)
        return delta

    def apply_insert(self, frm: int, to: int) -> float:
        """Apply the insert move; returns its score delta."""
        cached = self._cached
        if cached is None or cached[0] != frm or cached[1] != to:
            self.propose_insert(frm, to)
            cached = self._cached
        _, _, changes, delta = cached  # type: ignore[misc]
        for node, idx in changes:
            nt = self.table.tables[node]
            self._chosen_idx[node] = idx
            self._chosen_score[node] = nt.entries[idx].score
            self._chosen_mask[node] = nt.masks()[idx]
        self.total += delta
        order = self._order
        x = order.pop(frm)
        order.insert(to, x)
        lo = min(frm, to)
        mask = self._cum[lo]
        for i in range(lo, self.n):
            v = order[i]
            self._pos[v] = i
            self._cum[i] = mask
            mask |= 1 << v
        self._cum[self.n] = mask
        self._cached = None
        return delta

    def evaluation(self) -> OrderingEvaluation:
        chosen = tuple(
            self.table.tables[v].entries[self._chosen_idx[v]] for v in range(self.n)
        )
        total = math.fsum(sp.score for sp in chosen)
        return OrderingEvaluation(
            ordering=tuple(self._order), chosen=chosen, total=total
        )


def _improvement_floor(total: float) -> float:
    # Strictly positive floor keeps float dust from producing move cycles.
    return 1e-12 * (1.0 + abs(total))


def _run_local_search(
    start: Ordering,
    table: ScoreTable,
    budget: Budget | None,
    rng: np.random.Generator | None,
    move_pairs: list[tuple[int, int]],
) -> OrderingEvaluation:
    ev = IncrementalEvaluator(table)
    ev.reset(start)
    if not move_pairs:
        return ev.evaluation()
    pairs = list(move_pairs)
    improved = True
    while improved:
        improved = False
        if rng is not None:
            rng.shuffle(pairs)
        for frm, to in pairs:
            if budget is not None:
                if budget.exhausted():
                    return ev.evaluation()
                budget.spend()
            delta = ev.propose_insert(frm, to)
            if delta > _improvement_floor(ev.total):
                ev.apply_insert(frm, to)
                improved = True
    return ev.evaluation()


def _all_insert_pairs(n: int) -> list[tuple[int, int]]:
    return [(f, t) for f in range(n) for t in range(n) if f != t]


def _adjacent_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def inobs_local_search(
    start: Ordering,
    table: ScoreTable,
    budget: Budget | None = None,
    rng: np.random.Generator | None = None,
) -> OrderingEvaluation:
    """First-improvement hill climbing over all n(n-1) insert moves.

    Moves are scanned in a random order when ``rng`` is given, repeatedly
    until a full pass finds no strict improvement or the budget runs out.
    The returned total is never below the start total.
    """
    return _run_local_search(start, table, budget, rng, _all_insert_pairs(len(start)))


def obs_local_search(
    start: Ordering,
    table: ScoreTable,
    budget: Budget | None = None,
    rng: np.random.Generator | None = None,
) -> OrderingEvaluation:
    """Baseline hill climbing restricted to adjacent-swap moves."""
    return _run_local_search(start, table, budget, rng, _adjacent_pairs(len(start)))


def crossover(
    a: Ordering, b: Ordering, rng: np.random.Generator
) -> Ordering:
    """Order crossover: a random slice of ``a``, the rest in ``b``'s order."""
    if len(a) != len(b):
        raise ValueError(f"orderings differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    lo, hi = sorted(int(c) for c in rng.integers(0, n + 1, size=2))
    kept = a[lo:hi]
    in_slice = set(kept)
    rest = [g for g in b if g not in in_slice]
    child = rest[:lo] + list(kept) + rest[lo:]
    return tuple(child)


def mutate(
    ordering: Ordering, rate: float, rng: np.random.Generator
) -> Ordering:
    """Reinsert each position at a uniform random spot with probability ``rate``."""
    if not (0.0 <= rate <= 1.0):
        raise ValueError("mutation rate must lie in [0, 1]")
    seq = list(ordering)
    n = len(seq)
    for i in range(n):
        if rng.random() < rate:
            x = seq.pop(i)
            seq.insert(int(rng.integers(0, n)), x)
    return tuple(seq)


class _SnapshotEmitter:
    """Emits (elapsed, best score, worker) tuples at interval crossings."""

    def __init__(self, budget: Budget, sink, interval: float | None, worker_id: int):
        self.budget = budget
        self.sink = sink
        self.interval = interval
        self.worker_id = worker_id
        self.next_mark = interval if interval else None

    def emit(self, best_score: float) -> None:
        if self.sink is not None:
            self.sink(self.budget.elapsed(), best_score, self.worker_id)

    def note(self, best_score: float) -> None:
        if self.sink is None or self.next_mark is None:
            return
        elapsed = self.budget.elapsed()
        emitted = False
        while elapsed >= self.next_mark:
            self.next_mark += self.interval
            emitted = True
        if emitted:
            self.sink(elapsed, best_score, self.worker_id)


def _random_ordering(n: int, rng: np.random.Generator) -> Ordering:
    return tuple(int(v) for v in rng.permutation(n))


def minobs_search(
    table: ScoreTable,
    cfg: SearchConfig,
    budget: Budget,
    snapshot_sink=None,
    snapshot_interval: float | None = None,
    worker_id: int = 1,
    initial_population: list[Ordering] | None = None,
) -> OrderingEvaluation:
    """Memetic search: a population of locally optimal orderings, evolved.

    Each generation builds ``population_size`` offspring by crossover and
    mutation, locally optimises them, then truncates the merged population
    back to size.  Runs until the budget is exhausted and returns the best
    evaluation ever seen; snapshots of (elapsed, best score) go to
    ``snapshot_sink`` at ``snapshot_interval`` crossings.
    """
    n = table.num_vars
    rng = np.random.default_rng(cfg.rng_seed)
    emitter = _SnapshotEmitter(budget, snapshot_sink, snapshot_interval, worker_id)

    if initial_population is not None:
        seeds = [tuple(o) for o in initial_population]
        if not seeds:
            raise ValueError("initial population must not be empty")
    else:
        seeds = [_random_ordering(n, rng) for _ in range(cfg.population_size)]

    population: list[OrderingEvaluation] = []
    best: OrderingEvaluation | None = None
    for start in seeds:
        population.append(inobs_local_search(start, table, budget, rng))
        if best is None or population[-1].total > best.total:
            best = population[-1]
        emitter.note(best.total)
        if budget.exhausted() and population:
            break
    assert best is not None
    emitter.emit(best.total)

    while not budget.exhausted():
        offspring: list[OrderingEvaluation] = []
        for _ in range(cfg.population_size):
            if budget.exhausted():
                break
            i = int(rng.integers(0, len(population)))
            j = int(rng.integers(0, len(population)))
            child = crossover(population[i].ordering, population[j].ordering, rng)
            child = mutate(child, cfg.mutation_rate, rng)
            ev = inobs_local_search(child, table, budget, rng)
            offspring.append(ev)
            if ev.total > best.total:
                best = ev
            emitter.note(best.total)
        merged = population + offspring
        merged.sort(key=lambda e: (-e.total, e.ordering))
        population = merged[: cfg.population_size]

    emitter.emit(best.total)
    return best


def restart_search(
    table: ScoreTable,
    cfg: SearchConfig,
    budget: Budget,
    neighborhood: str = "insert",
    snapshot_sink=None,
    snapshot_interval: float | None = None,
    worker_id: int = 1,
) -> OrderingEvaluation:
    """Random-restart hill climbing; the single-start baselines live here.

    ``neighborhood`` selects insert moves or adjacent swaps.  With
    ``cfg.restarts`` false a single descent is performed regardless of the
    remaining budget.
    """
    if neighborhood not in ("insert", "swap"):
        raise ValueError(f"unknown neighborhood {neighborhood!r}")
    search = inobs_local_search if neighborhood == "insert" else obs_local_search
    n = table.num_vars
    rng = np.random.default_rng(cfg.rng_seed)
    emitter = _SnapshotEmitter(budget, snapshot_sink, snapshot_interval, worker_id)
    best: OrderingEvaluation | None = None
    while True:
        ev = search(_random_ordering(n, rng), table, budget, rng)
        if best is None or ev.total > best.total:
            best = ev
        emitter.note(best.total)
        if budget.exhausted() or not cfg.restarts:
            break
    emitter.emit(best.total)
    return best
