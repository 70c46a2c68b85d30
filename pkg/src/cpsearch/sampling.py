"""Half-normal rank sampling of candidate parent sets.

Entries of a node table are ranked 1..N best-first; rank k receives weight
proportional to exp(-k^2 / (2 sigma^2)), so high-scoring sets dominate the
draw.  Subset 1 uses deterministic truncation (the top ceil(p*N) ranks plus
the last rank); subsets above 1 draw distinct ranks from the full weight
vector.  Every sampled table keeps the empty parent set so any ordering
stays evaluable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import NodeScoreTable, ScoreTable
from .seeds import node_sampling_seed

__all__ = [
    "SamplingConfig",
    "half_normal_weights",
    "sample_node_subset",
    "sample_score_table",
    "RequiredWorkers",
    "required_m",
    "CombinationVolume",
    "subset_combinations",
]


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling rate and weight spread.

    ``sigma`` of ``None`` applies the per-node rule sigma = 0.5 * p * N
    where N is that node's entry count.  ``force_empty`` keeps the empty
    parent set in every sampled subset (on by default; switching it off
    can make orderings infeasible and exists only for experimentation).
    """

    p: float
    sigma: float | None = None
    force_empty: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ValueError("sampling rate must lie in (0, 1]")
        if self.sigma is not None and not (self.sigma > 0):
            raise ValueError("sigma must be positive")


def half_normal_weights(sigma: float, n_ranks: int) -> np.ndarray:
    """Normalized weights of ranks 1..n_ranks, decreasing in rank.

    Discrete renormalization replaces the continuous half-normal constant,
    so the vector sums to one and w[k]/w[0] == exp(-(k^2 - 1)/(2 sigma^2))
    holds exactly for the unnormalized ratios.
    """
    if not (sigma > 0):
        raise ValueError("sigma must be positive")
    if n_ranks < 1:
        raise ValueError("need at least one rank")
    log_w = _log_weights(sigma, n_ranks)
    w = np.exp(log_w - log_w[0])  # rank 1 carries the maximum
    return w / w.sum()


def _log_weights(sigma: float, n_ranks: int) -> np.ndarray:
    ranks = np.arange(1, n_ranks + 1, dtype=np.float64)
    return -(ranks * ranks) / (2.0 * sigma * sigma)


def _subset_size(p: float, n_ranks: int) -> int:
    # ceil(p * N) with a guard against binary float fuzz on exact products.
    k = math.ceil(p * n_ranks - 1e-9)
    return max(1, min(n_ranks, k))


def _node_sigma(cfg: SamplingConfig, n_ranks: int) -> float:
    if cfg.sigma is not None:
        return cfg.sigma
    return 0.5 * cfg.p * n_ranks


def sample_node_subset(
    s: int,
    cfg: SamplingConfig,
    table: NodeScoreTable,
    rng: np.random.Generator | None,
) -> NodeScoreTable:
    """Sample one node's table down to about ceil(p*N) entries.

    Subset index 1 is deterministic truncation: ranks 1..ceil(p*N) plus the
    last rank (``rng`` is unused).  Higher subset indices draw distinct
    ranks without replacement, proportional to the half-normal weights;
    taking the top k Gumbel-perturbed log weights realises exactly the
    sequential renormalized-draw distribution while staying numerically
    stable for vanishing sigma.
    """
    if s < 1:
        raise ValueError("subset indices start at 1")
    n_ranks = len(table.entries)
    k = _subset_size(cfg.p, n_ranks)
    if s == 1:
        picked = set(range(k))
        picked.add(n_ranks - 1)
    else:
        if rng is None:
            raise ValueError("subset indices above 1 need a random generator")
        log_w = _log_weights(_node_sigma(cfg, n_ranks), n_ranks)
        gumbel = rng.gumbel(size=n_ranks)
        keys = log_w + gumbel
        order = np.argsort(-keys, kind="stable")
        picked = {int(i) for i in order[:k]}
    if cfg.force_empty:
        picked.add(_empty_index(table))
    entries = tuple(table.entries[i] for i in sorted(picked))
    return NodeScoreTable(node=table.node, entries=entries)


def _empty_index(table: NodeScoreTable) -> int:
    for i, e in enumerate(table.entries):
        if not e.parents:
            return i
    raise ValueError(f"node {table.node}: table lacks the empty parent set")


def sample_score_table(
    s: int,
    cfg: SamplingConfig,
    table: ScoreTable,
    base_seed: int,
) -> ScoreTable:
    """Sample every node's table independently; the node count is unchanged.

    Each (subset, node) pair owns a private random stream derived from
    ``base_seed``, so results do not depend on scheduling order.
    """
    tables = []
    for node_table in table.tables:
        if s == 1:
            rng = None
        else:
            rng = np.random.default_rng(
                node_sampling_seed(base_seed, s, node_table.node)
            )
        tables.append(sample_node_subset(s, cfg, node_table, rng))
    return ScoreTable(tables=tuple(tables))


class RequiredWorkers(NamedTuple):
    """Worker count matching an unsampled search volume; may saturate."""

    value: float
    saturated: bool


def required_m(p: float, n: int) -> RequiredWorkers:
    """Workers needed so m * prod(p * N_i) matches prod(N_i): 1 / p^n.

    Astronomically large results saturate to infinity with a flag.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError("sampling rate must lie in (0, 1]")
    if n < 1:
        raise ValueError("need at least one node")
    log_value = -n * math.log(p)
    if log_value > math.log(np.finfo(np.float64).max):
        return RequiredWorkers(value=math.inf, saturated=True)
    return RequiredWorkers(value=math.exp(log_value), saturated=False)


class CombinationVolume(NamedTuple):
    """Log-scale counts of parent-set combinations, sampled and full."""

    log_sampled: float
    log_full: float


def subset_combinations(p: float, m: int, table: ScoreTable) -> CombinationVolume:
    """log(m) + sum_i log(p * N_i), alongside sum_i log(N_i).

    The sampled volume uses the raw product p * N_i (no rounding), matching
    the way the subset count scales before integer truncation.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError("sampling rate must lie in (0, 1]")
    if m < 1:
        raise ValueError("need at least one subset")
    log_full = math.fsum(math.log(len(t.entries)) for t in table.tables)
    log_sampled = math.log(m) + math.fsum(
        math.log(p * len(t.entries)) for t in table.tables
    )
    return CombinationVolume(log_sampled=log_sampled, log_full=log_full)
