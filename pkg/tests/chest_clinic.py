"""Published local scores for four chest-clinic variables, used as fixtures.

Scores come from a small benchmark scenario over {asia, tub, smoke, lung}
(max parent-set size 3).  They exercise subset-dominance pruning against a
known answer: exactly the RETAINED sets below survive, 11 of the 32
candidates.  The numbers are fixture inputs only, never scoring oracles.
"""

from __future__ import annotations

from cpsearch import NodeScoreTable, ScoredParentSet, ScoreTable
from cpsearch.model import canonical_sort_key

NAMES = ("asia", "tub", "smoke", "lung")
ASIA, TUB, SMOKE, LUNG = range(4)

# node -> {parent set: local score}
SCORES = {
    ASIA: {
        (): -2.531,
        (TUB,): -2.381,
        (LUNG,): -2.727,
        (SMOKE,): -3.032,
        (TUB, LUNG): -2.758,
        (TUB, SMOKE): -2.948,
        (SMOKE, LUNG): -3.790,
        (TUB, SMOKE, LUNG): -3.302,
    },
    TUB: {
        (): -7.126,
        (LUNG,): -5.292,
        (ASIA,): -6.976,
        (SMOKE,): -7.426,
        (SMOKE, LUNG): -3.790,
        (ASIA, LUNG): -5.323,
        (ASIA, SMOKE): -7.342,
        (ASIA, SMOKE, LUNG): -3.302,
    },
    SMOKE: {
        (): -36.201,
        (TUB,): -36.502,
        (ASIA,): -36.702,
        (LUNG,): -37.760,
        (TUB, LUNG): -36.258,
        (ASIA, TUB): -37.069,
        (ASIA, LUNG): -38.823,
        (ASIA, TUB, LUNG): -36.803,
    },
    LUNG: {
        (): -16.133,
        (TUB,): -14.299,
        (ASIA,): -16.329,
        (SMOKE,): -17.692,
        (TUB, SMOKE): -14.056,
        (ASIA, TUB): -14.676,
        (ASIA, SMOKE): -18.450,
        (ASIA, TUB, SMOKE): -14.410,
    },
}

RETAINED = {
    ASIA: {(), (TUB,)},
    TUB: {(), (LUNG,), (ASIA,), (SMOKE, LUNG), (ASIA, SMOKE, LUNG)},
    SMOKE: {()},
    LUNG: {(), (TUB,), (TUB, SMOKE)},
}


def node_table(node: int) -> NodeScoreTable:
    entries = [
        ScoredParentSet(tuple(sorted(ps)), score) for ps, score in SCORES[node].items()
    ]
    entries.sort(key=canonical_sort_key)
    return NodeScoreTable(node=node, entries=tuple(entries))


def score_table() -> ScoreTable:
    return ScoreTable(tables=tuple(node_table(v) for v in range(4)))
