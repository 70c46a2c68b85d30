"""BDeu local scores over candidate parent sets, dominance pruning, counting.

The local score of (child, parents) is the log marginal likelihood of the
child's conditional distribution under a uniform Dirichlet prior whose
total strength is the equivalent sample size.  The structure-prior term is
constant across structures under a uniform prior and is omitted, so scores
match the prior-free local scores found in pre-computed score files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import gammaln

from .model import (
    Dataset,
    ModelError,
    NodeScoreTable,
    ParentSet,
    ScoredParentSet,
    ScoreTable,
    canonical_sort_key,
)

__all__ = [
    "ScoringConfig",
    "ContingencyCounts",
    "ScoreOverflowError",
    "CapExceededError",
    "count_configurations",
    "bdeu_local_score",
    "enumerate_scored",
    "prune_table",
    "build_score_table",
    "max_cps_count",
    "count_dags",
]


class ScoreOverflowError(ArithmeticError):
    """A local score overflowed to a non-finite value."""


class CapExceededError(RuntimeError):
    """Candidate enumeration would exceed the configured per-node cap."""


@dataclass(frozen=True)
class ScoringConfig:
    """Scoring parameters: in-degree cap, prior strength, pruning switch."""

    max_indegree: int
    ess: float = 1.0
    prune: bool = True
    per_node_cap: int = 100_000_000

    def __post_init__(self) -> None:
        if self.max_indegree < 0:
            raise ValueError("max_indegree must be >= 0")
        if not (self.ess > 0):
            raise ValueError("equivalent sample size must be positive")
        if self.per_node_cap < 1:
            raise ValueError("per_node_cap must be >= 1")


@dataclass(frozen=True)
class ContingencyCounts:
    """Joint counts of one child against one parent set.

    Only parent configurations observed in the data are materialised;
    ``full_config_count`` is the full product of parent arities, which the
    score needs for the prior split even over unobserved configurations.
    """

    configs: tuple[tuple[int, ...], ...]
    totals: np.ndarray
    counts: np.ndarray
    child_arity: int
    full_config_count: int

    @property
    def observed_config_count(self) -> int:
        return len(self.configs)

    def total_rows(self) -> int:
        return int(self.totals.sum()) if self.totals.size else 0


def _validate_family(data: Dataset, child: int, parents: ParentSet) -> None:
    n = data.num_vars
    if not (0 <= child < n):
        raise ModelError(f"child index {child} out of range for {n} variables")
    for p in parents:
        if not (0 <= p < n):
            raise ModelError(f"parent index {p} out of range for {n} variables")
        if p == child:
            raise ModelError(f"child {child} cannot be its own parent")


def count_configurations(
    data: Dataset, child: int, parents: ParentSet
) -> ContingencyCounts:
    """Count child values per observed parent configuration in one pass."""
    _validate_family(data, child, parents)
    r = data.arities[child]
    full_q = math.prod(data.arities[p] for p in parents)
    n_rows = data.num_rows
    if n_rows == 0:
        return ContingencyCounts(
            configs=(),
            totals=np.zeros(0, dtype=np.int64),
            counts=np.zeros((0, r), dtype=np.int64),
            child_arity=r,
            full_config_count=full_q,
        )
    child_col = data.rows[:, child].astype(np.int64, copy=False)
    if parents:
        code = np.zeros(n_rows, dtype=np.int64)
        for p in parents:
            code = code * data.arities[p] + data.rows[:, p]
        pair = code * r + child_col
        pair_space = full_q * r
        if pair_space <= max(65536, 8 * n_rows):
            # Dense joint histogram; cheap when the configuration space is small.
            flat = np.bincount(pair, minlength=pair_space)
            grid = flat.reshape(full_q, r)
            observed = np.flatnonzero(grid.sum(axis=1))
            counts = grid[observed].astype(np.int64)
            codes = observed
        else:
            uniq, cnt = np.unique(pair, return_counts=True)
            codes = np.unique(uniq // r)
            counts = np.zeros((codes.size, r), dtype=np.int64)
            rows_idx = np.searchsorted(codes, uniq // r)
            counts[rows_idx, uniq % r] = cnt
        configs = tuple(_decode_config(int(c), parents, data.arities) for c in codes)
    else:
        counts = np.bincount(child_col, minlength=r).astype(np.int64).reshape(1, r)
        configs = ((),)
    totals = counts.sum(axis=1)
    return ContingencyCounts(
        configs=configs,
        totals=totals,
        counts=counts,
        child_arity=r,
        full_config_count=full_q,
    )


def _decode_config(code: int, parents: ParentSet, arities) -> tuple[int, ...]:
    values = []
    for p in reversed(parents):
        code, v = divmod(code, arities[p])
        values.append(v)
    return tuple(reversed(values))


def bdeu_local_score(
    data: Dataset, child: int, parents: ParentSet, ess: float = 1.0
) -> float:
    """Local score of ``child`` given ``parents`` (natural log).

    Unobserved parent configurations contribute exactly zero and are
    skipped.  A non-finite result (prior mass underflowing for enormous
    configuration spaces) raises :class:`ScoreOverflowError` rather than
    being returned.
    """
    if not (ess > 0):
        raise ValueError("equivalent sample size must be positive")
    cc = count_configurations(data, child, parents)
    return _score_from_counts(cc, ess)


def _score_from_counts(cc: ContingencyCounts, ess: float) -> float:
    if cc.observed_config_count == 0:
        return 0.0
    q = cc.full_config_count
    r = cc.child_arity
    alpha_config = ess / q
    alpha_cell = ess / (r * q)
    if alpha_config <= 0.0 or alpha_cell <= 0.0:
        raise ScoreOverflowError(
            f"prior mass underflowed for {q} parent configurations"
        )
    totals = cc.totals
    nz = cc.counts[cc.counts > 0]
    score = float(
        cc.observed_config_count * gammaln(alpha_config)
        - gammaln(totals + alpha_config).sum()
        + gammaln(nz + alpha_cell).sum()
        - nz.size * gammaln(alpha_cell)
    )
    if not math.isfinite(score):
        raise ScoreOverflowError(f"local score overflowed to {score}")
    return score


def _enumeration_size(n: int, d: int) -> int:
    return sum(math.comb(n - 1, k) for k in range(d + 1))


def enumerate_scored(data: Dataset, child: int, cfg: ScoringConfig) -> NodeScoreTable:
    """Score every parent set of size <= max_indegree, unpruned.

    Entries come back in canonical order; their number is the binomial sum
    over sizes 0..d of subsets of the other variables.
    """
    n = data.num_vars
    if cfg.max_indegree >= n:
        raise ValueError(f"max_indegree {cfg.max_indegree} must be < {n} variables")
    size = _enumeration_size(n, cfg.max_indegree)
    if size > cfg.per_node_cap:
        raise CapExceededError(
            f"{size} candidate parent sets per node exceeds the cap of {cfg.per_node_cap}"
        )
    others = [v for v in range(n) if v != child]
    entries = []
    for k in range(cfg.max_indegree + 1):
        for sub in combinations(others, k):
            entries.append(
                ScoredParentSet(sub, bdeu_local_score(data, child, sub, cfg.ess))
            )
    entries.sort(key=canonical_sort_key)
    return NodeScoreTable(node=child, entries=tuple(entries))


def prune_table(table: NodeScoreTable) -> NodeScoreTable:
    """Drop every entry some proper subset of which scores at least as well.

    Comparisons run against all enumerated sets, whether or not those sets
    themselves survive: a candidate dominated only by an already-dominated
    subset is still dropped.  Equal scores favour the sparser set.  The
    empty set is always retained, so the result stays feasible.
    """
    scores = {e.parents: e.score for e in table.entries}
    if () not in scores:
        raise ModelError(f"node {table.node}: missing empty parent set")
    kept = []
    for e in table.entries:
        if not e.parents:
            kept.append(e)
            continue
        dominated = False
        for k in range(len(e.parents)):
            for sub in combinations(e.parents, k):
                s = scores.get(sub)
                if s is not None and s >= e.score:
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            kept.append(e)
    return NodeScoreTable(node=table.node, entries=tuple(kept))


def build_score_table(data: Dataset, cfg: ScoringConfig) -> ScoreTable:
    """Enumerate and (optionally) prune candidate parent sets for every node."""
    tables = []
    for child in range(data.num_vars):
        t = enumerate_scored(data, child, cfg)
        if cfg.prune:
            t = prune_table(t)
        tables.append(t)
    return ScoreTable(tables=tuple(tables))


def max_cps_count(n: int, d: int) -> int:
    """Number of candidate parent sets over all nodes: n * sum_k C(n-1, k).

    Exact integer arithmetic; values grow past 10^21 for large inputs.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if not (0 <= d < n):
        raise ValueError(f"max in-degree must satisfy 0 <= d < n, got d={d}, n={n}")
    return n * _enumeration_size(n, d)


def count_dags(n: int) -> int:
    """Exact count of labelled DAGs on ``n`` nodes.

    Uses the classic inclusion-exclusion recurrence over source sets:
    a(n) = sum_i (-1)^(i+1) C(n,i) 2^(i(n-i)) a(n-i), with a(0) = 1.
    """
    if n < 0:
        raise ValueError("node count must be non-negative")
    counts = [1]
    for m in range(1, n + 1):
        total = 0
        for i in range(1, m + 1):
            term = math.comb(m, i) * (1 << (i * (m - i))) * counts[m - i]
            total += term if i % 2 == 1 else -term
        counts.append(total)
    return counts[n]
