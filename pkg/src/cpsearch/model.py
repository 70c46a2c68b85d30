"""Shared domain types: datasets, scored parent-set tables, orderings, DAGs.

Node identity is a 0-based integer index everywhere; variable names are
metadata handled by the I/O layer.  All types are immutable after
construction and safe to share across concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelError",
    "RaggedRowError",
    "CodeOutOfRangeError",
    "ParentSet",
    "Ordering",
    "Dataset",
    "validate_dataset",
    "ScoredParentSet",
    "NodeScoreTable",
    "ScoreTable",
    "Dag",
    "check_acyclic",
]


class ModelError(ValueError):
    """A domain-type invariant was violated."""


class RaggedRowError(ModelError):
    """A data row does not have one entry per variable."""


class CodeOutOfRangeError(ModelError):
    """A category code is negative or not below its column's arity."""


# A parent set is a strictly increasing tuple of node indices; () is the
# valid empty parent set.  An ordering is a permutation of 0..n-1 with
# position 0 earliest (no predecessors).
ParentSet = tuple[int, ...]
Ordering = tuple[int, ...]


def _check_parent_set(parents: ParentSet) -> None:
    for a, b in zip(parents, parents[1:]):
        if a >= b:
            raise ModelError(f"parent set {parents} is not strictly increasing")
    if parents and parents[0] < 0:
        raise ModelError(f"parent set {parents} has a negative index")


def parents_mask(parents: ParentSet) -> int:
    """Bitmask with one bit set per member index."""
    m = 0
    for p in parents:
        m |= 1 << p
    return m


@dataclass(frozen=True)
class Dataset:
    """Discrete observation matrix with per-variable arities.

    ``rows`` is a read-only (n_rows, num_vars) integer array of 0-based
    category codes; ``arities[i]`` bounds the codes of column ``i``.
    """

    rows: np.ndarray
    arities: tuple[int, ...]
    var_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        rows = self.rows
        if not isinstance(rows, np.ndarray) or rows.ndim != 2:
            raise ModelError("rows must be a 2-D integer array")
        if len(self.arities) == 0:
            raise ModelError("dataset has zero variables")
        if rows.shape[1] != len(self.arities):
            raise RaggedRowError(
                f"rows have {rows.shape[1]} columns but {len(self.arities)} arities declared"
            )
        for i, a in enumerate(self.arities):
            if a < 1:
                raise ModelError(f"arity of variable {i} must be >= 1, got {a}")
        if self.var_names is not None and len(self.var_names) != len(self.arities):
            raise ModelError("var_names length does not match number of variables")
        if rows.size:
            mins = rows.min(axis=0)
            maxs = rows.max(axis=0)
            for i, a in enumerate(self.arities):
                if mins[i] < 0 or maxs[i] >= a:
                    raise CodeOutOfRangeError(
                        f"variable {i}: codes must lie in [0, {a}), found "
                        f"[{mins[i]}, {maxs[i]}]"
                    )
        rows.setflags(write=False)

    @property
    def num_vars(self) -> int:
        return len(self.arities)

    @property
    def num_rows(self) -> int:
        return int(self.rows.shape[0])


def validate_dataset(
    rows,
    arities=None,
    var_names=None,
) -> Dataset:
    """Build a validated :class:`Dataset` from raw rows.

    When ``arities`` is omitted it is inferred per column as the observed
    maximum code plus one.  Raises :class:`RaggedRowError` for uneven rows,
    :class:`CodeOutOfRangeError` for codes outside a declared arity, and
    :class:`ModelError` for zero variables.
    """
    if isinstance(rows, np.ndarray):
        arr = rows
        if arr.ndim != 2:
            raise RaggedRowError("row array must be 2-D")
        if not np.issubdtype(arr.dtype, np.integer):
            arr = arr.astype(np.int64)
    else:
        rows = list(rows)
        if rows:
            width = len(rows[0])
            for i, r in enumerate(rows):
                if len(r) != width:
                    raise RaggedRowError(
                        f"row {i} has {len(r)} entries, expected {width}"
                    )
            arr = np.asarray(rows, dtype=np.int64)
        else:
            if arities is None:
                raise ModelError("cannot infer variables from an empty dataset")
            arr = np.empty((0, len(tuple(arities))), dtype=np.int64)
    if arr.shape[1] == 0:
        raise ModelError("dataset has zero variables")
    if arities is None:
        if arr.shape[0] == 0:
            raise ModelError("cannot infer arities from an empty dataset")
        if arr.min() < 0:
            raise CodeOutOfRangeError("category codes must be non-negative")
        arities = tuple(int(m) + 1 for m in arr.max(axis=0))
    else:
        arities = tuple(int(a) for a in arities)
    names = tuple(var_names) if var_names is not None else None
    return Dataset(rows=arr, arities=arities, var_names=names)


@dataclass(frozen=True)
class ScoredParentSet:
    """A candidate parent set together with its local score (log space)."""

    parents: ParentSet
    score: float

    def __post_init__(self) -> None:
        _check_parent_set(self.parents)
        if not math.isfinite(self.score):
            raise ModelError(f"score for {self.parents} is not finite: {self.score}")


def canonical_sort_key(entry: ScoredParentSet) -> tuple[float, ParentSet]:
    """Sort key giving score-descending, then parent-set lexicographic order.

    The lexicographic tie-break makes entry ranks deterministic, which the
    rank-based sampler relies on.
    """
    return (-entry.score, entry.parents)


@dataclass(frozen=True)
class NodeScoreTable:
    """Candidate parent sets of one node, ordered best-first.

    Entries are strictly ordered by (score descending, parents
    lexicographically ascending) and always include the empty parent set,
    so any node ordering admits at least one consistent structure.
    """

    node: int
    entries: tuple[ScoredParentSet, ...]

    def __post_init__(self) -> None:
        if self.node < 0:
            raise ModelError("node index must be non-negative")
        if not self.entries:
            raise ModelError(f"node {self.node}: score table has no entries")
        empty_seen = 0
        prev_key = None
        max_member = -1
        masks = []
        for e in self.entries:
            if not isinstance(e, ScoredParentSet):
                raise ModelError("entries must be ScoredParentSet instances")
            if self.node in e.parents:
                raise ModelError(f"node {self.node} appears in its own parent set")
            key = canonical_sort_key(e)
            if prev_key is not None and key <= prev_key:
                raise ModelError(
                    f"node {self.node}: entries not in strict canonical order near {e.parents}"
                )
            prev_key = key
            if not e.parents:
                empty_seen += 1
            else:
                max_member = max(max_member, e.parents[-1])
            masks.append(parents_mask(e.parents))
        if empty_seen != 1:
            raise ModelError(
                f"node {self.node}: table must contain the empty parent set exactly once"
            )
        object.__setattr__(self, "_masks", tuple(masks))
        object.__setattr__(self, "_max_member", max_member)
        # Packed copies used by the n <= 63 fast scan path.
        if max_member < 63:
            np_masks = np.array(masks, dtype=np.uint64)
        else:
            np_masks = None
        object.__setattr__(self, "_np_masks", np_masks)
        object.__setattr__(
            self, "_scores", np.array([e.score for e in self.entries], dtype=np.float64)
        )

    def __len__(self) -> int:
        return len(self.entries)

    def masks(self) -> tuple[int, ...]:
        """Per-entry parent bitmasks, aligned with ``entries``."""
        return self._masks  # type: ignore[attr-defined]

    def best_consistent_index(self, predecessor_mask: int) -> int:
        """Index of the first entry whose parents all lie in the mask.

        The empty parent set guarantees a hit.  The scan honours the
        canonical order, so equal-scored candidates resolve deterministically.
        """
        np_masks = self._np_masks  # type: ignore[attr-defined]
        if np_masks is not None:
            comp = np.uint64(~predecessor_mask & 0xFFFFFFFFFFFFFFFF)
            feasible = (np_masks & comp) == 0
            idx = int(np.argmax(feasible))
            if not feasible[idx]:  # pragma: no cover - empty set always feasible
                raise ModelError(f"node {self.node}: no consistent parent set")
            return idx
        comp = ~predecessor_mask
        for i, m in enumerate(self._masks):  # type: ignore[attr-defined]
            if m & comp == 0:
                return i
        raise ModelError(f"node {self.node}: no consistent parent set")  # pragma: no cover


@dataclass(frozen=True)
class ScoreTable:
    """One :class:`NodeScoreTable` per node, indexed by node."""

    tables: tuple[NodeScoreTable, ...]

    def __post_init__(self) -> None:
        n = len(self.tables)
        if n == 0:
            raise ModelError("score table has zero variables")
        for i, t in enumerate(self.tables):
            if t.node != i:
                raise ModelError(f"table at position {i} is for node {t.node}")
            if t._max_member >= n:  # type: ignore[attr-defined]
                raise ModelError(
                    f"node {i}: parent index {t._max_member} out of range for {n} variables"  # type: ignore[attr-defined]
                )

    @property
    def num_vars(self) -> int:
        return len(self.tables)

    def __getitem__(self, node: int) -> NodeScoreTable:
        return self.tables[node]

    def entry_counts(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.tables)


@dataclass(frozen=True)
class Dag:
    """One chosen parent set per node, plus the summed local score."""

    parents: tuple[ParentSet, ...]
    score: float

    def __post_init__(self) -> None:
        for i, ps in enumerate(self.parents):
            _check_parent_set(ps)
            if i in ps:
                raise ModelError(f"node {i} is its own parent")
            if ps and ps[-1] >= len(self.parents):
                raise ModelError(f"node {i}: parent index {ps[-1]} out of range")

    @property
    def num_vars(self) -> int:
        return len(self.parents)

    def edge_count(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def average_in_degree(self) -> float:
        return self.edge_count() / len(self.parents)


def check_acyclic(dag: Dag) -> bool:
    """True iff the structure admits a topological order (Kahn peeling)."""
    n = dag.num_vars
    remaining = set(range(n))
    masks = [parents_mask(ps) for ps in dag.parents]
    placed = 0
    while remaining:
        sinks = [i for i in remaining if masks[i] & ~placed == 0]
        if not sinks:
            return False
        for i in sinks:
            placed |= 1 << i
            remaining.remove(i)
    return True


def validate_ordering(ordering: Ordering, num_vars: int) -> None:
    """Raise unless ``ordering`` is a permutation of 0..num_vars-1."""
    if len(ordering) != num_vars or sorted(ordering) != list(range(num_vars)):
        raise ModelError(f"not a permutation of 0..{num_vars - 1}: {ordering}")
