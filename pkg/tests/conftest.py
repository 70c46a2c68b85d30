"""Shared builders and independent oracles used across the test suite."""

from __future__ import annotations

import math
from itertools import combinations, product

import numpy as np
import pytest

from cpsearch import (
    Dataset,
    NodeScoreTable,
    ScoredParentSet,
    ScoreTable,
    validate_dataset,
)
from cpsearch.model import canonical_sort_key


def random_dataset(
    rng: np.random.Generator,
    n_vars: int,
    n_rows: int,
    max_arity: int = 4,
) -> Dataset:
    arities = [int(a) for a in rng.integers(2, max_arity + 1, size=n_vars)]
    rows = np.column_stack(
        [rng.integers(0, a, size=n_rows) for a in arities]
    ) if n_rows else np.empty((0, n_vars), dtype=np.int64)
    return validate_dataset(rows, arities=arities)


def oracle_bdeu(data: Dataset, child: int, parents, ess: float = 1.0) -> float:
    """Straight-line reference evaluation of the local score.

    Counts with plain dictionaries and iterates the full parent
    configuration space explicitly, using math.lgamma; shares no code with
    the vectorized production path.
    """
    parents = tuple(parents)
    arities = data.arities
    r = arities[child]
    q = 1
    for p in parents:
        q *= arities[p]
    a_config = ess / q
    a_cell = ess / (r * q)
    joint: dict[tuple, list[int]] = {}
    for row in data.rows.tolist():
        key = tuple(row[p] for p in parents)
        if key not in joint:
            joint[key] = [0] * r
        joint[key][row[child]] += 1
    total = 0.0
    for config in product(*[range(arities[p]) for p in parents]):
        cell_counts = joint.get(config, [0] * r)
        n_config = sum(cell_counts)
        total += math.lgamma(a_config) - math.lgamma(n_config + a_config)
        for k in range(r):
            total += math.lgamma(cell_counts[k] + a_cell) - math.lgamma(a_cell)
    return total


def brute_force_counts(data: Dataset, child: int, parents):
    """Nested-loop recount of child values per parent configuration."""
    parents = tuple(parents)
    counts: dict[tuple, list[int]] = {}
    for row in data.rows.tolist():
        key = tuple(row[p] for p in parents)
        counts.setdefault(key, [0] * data.arities[child])[row[child]] += 1
    return counts


def random_score_table(
    rng: np.random.Generator,
    n_vars: int,
    max_extra_entries: int = 5,
    max_set_size: int | None = None,
) -> ScoreTable:
    """Random valid table: per node, the empty set plus distinct subsets."""
    if max_set_size is None:
        max_set_size = n_vars - 1
    tables = []
    for node in range(n_vars):
        others = [v for v in range(n_vars) if v != node]
        pool = []
        for size in range(1, min(max_set_size, len(others)) + 1):
            pool.extend(combinations(others, size))
        n_extra = int(rng.integers(0, max_extra_entries + 1))
        chosen = {()}
        if pool and n_extra:
            picks = rng.choice(len(pool), size=min(n_extra, len(pool)), replace=False)
            chosen.update(pool[i] for i in picks)
        entries = [
            ScoredParentSet(ps, float(rng.uniform(-20.0, -1.0))) for ps in sorted(chosen)
        ]
        entries.sort(key=canonical_sort_key)
        tables.append(NodeScoreTable(node=node, entries=tuple(entries)))
    return ScoreTable(tables=tuple(tables))


def _masks_acyclic(parent_masks: list[int], n: int) -> bool:
    placed = 0
    remaining = list(range(n))
    while remaining:
        progress = []
        for i in remaining:
            if parent_masks[i] & ~placed == 0:
                progress.append(i)
        if not progress:
            return False
        for i in progress:
            placed |= 1 << i
        remaining = [i for i in remaining if not (placed >> i) & 1]
    return True


def exhaustive_best_dag_score(table: ScoreTable) -> float:
    """Best achievable score by brute force over all entry combinations.

    Enumerates one entry choice per node, keeps acyclic combinations, and
    maximises the summed score.  Exponential; for oracle use on tiny tables.
    """
    n = table.num_vars
    entry_scores = [[e.score for e in t.entries] for t in table.tables]
    entry_masks = [list(t.masks()) for t in table.tables]
    best = -math.inf
    for combo in product(*[range(len(s)) for s in entry_scores]):
        masks = [entry_masks[i][c] for i, c in enumerate(combo)]
        if _masks_acyclic(masks, n):
            score = sum(entry_scores[i][c] for i, c in enumerate(combo))
            if score > best:
                best = score
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
