"""Synthetic discrete Bayesian networks for desk-scale end-to-end tests."""

from __future__ import annotations

import numpy as np

from cpsearch import Dataset, validate_dataset


def sample_discrete_network(
    seed: int,
    n_vars: int = 37,
    n_rows: int = 10_000,
    max_parents: int = 3,
    max_arity: int = 4,
) -> Dataset:
    """Ancestral samples from a random sparse network with Dirichlet CPTs."""
    rng = np.random.default_rng(seed)
    order = [int(v) for v in rng.permutation(n_vars)]
    arities = [int(a) for a in rng.integers(2, max_arity + 1, size=n_vars)]
    columns: dict[int, np.ndarray] = {}
    for pos, node in enumerate(order):
        k = int(rng.integers(0, min(max_parents, pos) + 1))
        parents = sorted(
            int(v) for v in rng.choice(order[:pos], size=k, replace=False)
        ) if k else []
        r = arities[node]
        q = 1
        for p in parents:
            q *= arities[p]
        cpt = rng.dirichlet(np.ones(r), size=q)  # (q, r)
        if parents:
            config = np.zeros(n_rows, dtype=np.int64)
            for p in parents:
                config = config * arities[p] + columns[p]
        else:
            config = np.zeros(n_rows, dtype=np.int64)
        u = rng.random(n_rows)
        cum = cpt.cumsum(axis=1)
        columns[node] = (u[:, None] > cum[config]).sum(axis=1).astype(np.int64)
    rows = np.column_stack([columns[v] for v in range(n_vars)])
    return validate_dataset(rows, arities=arities)
