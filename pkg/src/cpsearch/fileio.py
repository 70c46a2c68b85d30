"""Text formats: pre-computed score files, datasets, DAG files, snapshot CSVs.

The score file layout is the plain-text exchange format used by existing
pre-computed-score tooling: a variable count line, then per variable a
"NAME COUNT" header followed by COUNT lines of "SCORE NPARENTS PARENT...".
Parsing is locale independent (decimal point only) and never trusts
declared counts for allocation.  Writers emit the shortest decimal strings
that round-trip the underlying doubles, so write/parse is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    Dag,
    Dataset,
    NodeScoreTable,
    ScoredParentSet,
    ScoreTable,
    canonical_sort_key,
    check_acyclic,
    validate_dataset,
)

__all__ = [
    "FormatError",
    "ScoreFileError",
    "DatasetFormatError",
    "DagFormatError",
    "CyclicStructureError",
    "ScoreFileHeaderInfo",
    "parse_score_file",
    "parse_score_file_ex",
    "write_score_file",
    "parse_dataset",
    "write_dag",
    "parse_dag",
    "write_snapshot_csv",
    "parse_snapshot_csv",
]


class FormatError(ValueError):
    """Malformed input text."""


class ScoreFileError(FormatError):
    pass


class DatasetFormatError(FormatError):
    pass


class DagFormatError(FormatError):
    pass


class CyclicStructureError(DagFormatError):
    """A parsed structure contains a directed cycle."""


@dataclass(frozen=True)
class ScoreFileHeaderInfo:
    """Names and declared entry counts as they appeared in a score file."""

    num_vars: int
    names: tuple[str, ...]
    declared_counts: tuple[int, ...]


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"V{i}" for i in range(n))


def _as_text(stream) -> str:
    if isinstance(stream, bytes):
        return stream.decode("utf-8")
    return str(stream)


def _parse_int(token: str, what: str, exc=ScoreFileError) -> int:
    try:
        return int(token)
    except ValueError:
        raise exc(f"expected an integer {what}, got {token!r}") from None


def _parse_score(token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ScoreFileError(f"expected a decimal score, got {token!r}") from None
    if not math.isfinite(value):
        raise ScoreFileError(f"scores must be finite, got {token!r}")
    return value


def parse_score_file_ex(stream) -> tuple[ScoreTable, ScoreFileHeaderInfo]:
    """Parse a score file, returning the table plus header metadata.

    Entries are re-sorted into canonical order regardless of file order.
    Parents may be referenced by variable name or by 0-based index (names
    win when a token matches both).  Every variable must carry the empty
    parent set; see :func:`parse_score_file` for the relaxation knob.
    """
    return _parse_score_file(stream, insert_missing_empty=False)


def parse_score_file(stream, insert_missing_empty: bool = False) -> ScoreTable:
    """Parse a score file into a :class:`ScoreTable`.

    With ``insert_missing_empty`` a variable lacking the empty parent set
    gets one synthesized at (its minimum score - 1) instead of raising;
    the default is a hard error because such files are usually truncated.
    """
    table, _ = _parse_score_file(stream, insert_missing_empty=insert_missing_empty)
    return table


def _parse_score_file(stream, insert_missing_empty):
    lines = [ln.strip() for ln in _as_text(stream).splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ScoreFileError("empty score file")
    n = _parse_int(lines[0], "variable count")
    if n < 1:
        raise ScoreFileError(f"variable count must be >= 1, got {n}")
    pos = 1
    names: list[str] = []
    declared: list[int] = []
    raw_blocks: list[list[tuple[float, list[str]]]] = []
    for _ in range(n):
        if pos >= len(lines):
            raise ScoreFileError(
                f"expected {n} variable blocks, file ends after {len(names)}"
            )
        header = lines[pos].split()
        pos += 1
        if len(header) != 2:
            raise ScoreFileError(f"bad variable header: {lines[pos - 1]!r}")
        name = header[0]
        count = _parse_int(header[1], "entry count")
        if count < 0:
            raise ScoreFileError(f"negative entry count for {name!r}")
        if name in names:
            raise ScoreFileError(f"duplicate variable name {name!r}")
        entries = []
        for _ in range(count):
            if pos >= len(lines):
                raise ScoreFileError(
                    f"variable {name!r} declares {count} entries, file ends early"
                )
            fields = lines[pos].split()
            pos += 1
            if len(fields) < 2:
                raise ScoreFileError(f"bad entry line: {lines[pos - 1]!r}")
            score = _parse_score(fields[0])
            n_parents = _parse_int(fields[1], "parent count")
            if n_parents != len(fields) - 2:
                raise ScoreFileError(
                    f"entry for {name!r} declares {n_parents} parents "
                    f"but lists {len(fields) - 2}"
                )
            entries.append((score, fields[2:]))
        names.append(name)
        declared.append(count)
        raw_blocks.append(entries)
    if pos != len(lines):
        raise ScoreFileError(f"trailing content after {n} variable blocks")

    index_of = {name: i for i, name in enumerate(names)}
    tables = []
    for child, block in enumerate(raw_blocks):
        seen: set[tuple[int, ...]] = set()
        entries = []
        for score, tokens in block:
            parents = sorted(_resolve_parent(t, index_of, n) for t in tokens)
            pset = tuple(parents)
            if len(set(pset)) != len(pset):
                raise ScoreFileError(
                    f"duplicate parent in set {tokens} for {names[child]!r}"
                )
            if child in pset:
                raise ScoreFileError(
                    f"{names[child]!r} listed as its own parent"
                )
            if pset in seen:
                raise ScoreFileError(
                    f"parent set {tokens} appears twice for {names[child]!r}"
                )
            seen.add(pset)
            entries.append(ScoredParentSet(pset, score))
        if () not in seen:
            if not insert_missing_empty:
                raise ScoreFileError(
                    f"variable {names[child]!r} is missing the empty parent set"
                )
            floor = min((e.score for e in entries), default=0.0) - 1.0
            entries.append(ScoredParentSet((), floor))
        entries.sort(key=canonical_sort_key)
        tables.append(NodeScoreTable(node=child, entries=tuple(entries)))
    table = ScoreTable(tables=tuple(tables))
    header_info = ScoreFileHeaderInfo(
        num_vars=n, names=tuple(names), declared_counts=tuple(declared)
    )
    return table, header_info


def _resolve_parent(token: str, index_of: dict[str, int], n: int) -> int:
    if token in index_of:
        return index_of[token]
    try:
        idx = int(token)
    except ValueError:
        raise ScoreFileError(f"unknown parent name {token!r}") from None
    if not (0 <= idx < n):
        raise ScoreFileError(f"parent index {idx} out of range for {n} variables")
    return idx


def write_score_file(table: ScoreTable, names=None) -> str:
    """Serialize a table in canonical order; parents are written as indices."""
    n = table.num_vars
    names = default_names(n) if names is None else tuple(names)
    if len(names) != n:
        raise ValueError(f"{len(names)} names for {n} variables")
    out = [str(n)]
    for node_table in table.tables:
        out.append(f"{names[node_table.node]} {len(node_table.entries)}")
        for e in node_table.entries:
            fields = [repr(e.score), str(len(e.parents))]
            fields.extend(str(p) for p in e.parents)
            out.append(" ".join(fields))
    return "\n".join(out) + "\n"


def parse_dataset(
    stream,
    has_names: bool | None = None,
    has_arities: bool | None = None,
) -> Dataset:
    """Parse a discrete dataset from delimited text.

    Tokens are whitespace- or comma-separated.  With the defaults the
    layout is auto-detected: a first line with any non-integer token is a
    names header, and when a names header is present the next all-integer
    line is read as declared arities.  Pass booleans to pin either choice.
    """
    lines = [ln.strip() for ln in _as_text(stream).splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise DatasetFormatError("empty dataset")
    tokenized = [_split_row(ln) for ln in lines]
    if has_names is None:
        has_names = not _all_integers(tokenized[0])
    names = None
    pos = 0
    if has_names:
        names = tuple(tokenized[0])
        pos = 1
    if has_arities is None:
        has_arities = (
            has_names
            and pos < len(tokenized)
            and _all_integers(tokenized[pos])
            and all(int(t) >= 1 for t in tokenized[pos])
        )
    arities = None
    if has_arities:
        if pos >= len(tokenized) or not _all_integers(tokenized[pos]):
            raise DatasetFormatError("expected an arity line")
        arities = [int(t) for t in tokenized[pos]]
        pos += 1
    rows = []
    for line_no, tokens in enumerate(tokenized[pos:], start=pos + 1):
        row = []
        for t in tokens:
            try:
                row.append(int(t))
            except ValueError:
                raise DatasetFormatError(
                    f"line {line_no}: non-integer token {t!r}"
                ) from None
        rows.append(row)
    if not rows and arities is None:
        raise DatasetFormatError("dataset has no data rows and no declared arities")
    return validate_dataset(rows, arities=arities, var_names=names)


def _split_row(line: str) -> list[str]:
    if "," in line:
        return [t.strip() for t in line.split(",")]
    return line.split()


def _all_integers(tokens) -> bool:
    for t in tokens:
        try:
            int(t)
        except ValueError:
            return False
    return True


def write_dag(dag: Dag, names=None) -> str:
    """One "child <- parents" line per node, then a trailing score line."""
    n = dag.num_vars
    names = default_names(n) if names is None else tuple(names)
    if len(names) != n:
        raise ValueError(f"{len(names)} names for {n} variables")
    out = []
    for i, parents in enumerate(dag.parents):
        rhs = " ".join(names[p] for p in parents)
        out.append(f"{names[i]} <-" + (f" {rhs}" if rhs else ""))
    out.append(f"score {dag.score!r}")
    return "\n".join(out) + "\n"


def parse_dag(stream) -> Dag:
    """Inverse of :func:`write_dag`; rejects cyclic structures."""
    lines = [ln.strip() for ln in _as_text(stream).splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise DagFormatError("expected node lines plus a score line")
    if not lines[-1].startswith("score "):
        raise DagFormatError("missing trailing score line")
    try:
        score = float(lines[-1][len("score "):])
    except ValueError:
        raise DagFormatError(f"bad score line: {lines[-1]!r}") from None
    node_lines = lines[:-1]
    names = []
    raw_parents = []
    for ln in node_lines:
        if "<-" not in ln:
            raise DagFormatError(f"bad node line: {ln!r}")
        lhs, rhs = ln.split("<-", 1)
        name = lhs.strip()
        if not name:
            raise DagFormatError(f"bad node line: {ln!r}")
        if name in names:
            raise DagFormatError(f"duplicate node name {name!r}")
        names.append(name)
        raw_parents.append(rhs.split())
    index_of = {name: i for i, name in enumerate(names)}
    parents = []
    for name, tokens in zip(names, raw_parents):
        idxs = []
        for t in tokens:
            if t not in index_of:
                raise DagFormatError(f"unknown name {t!r} in parents of {name!r}")
            idxs.append(index_of[t])
        if len(set(idxs)) != len(idxs):
            raise DagFormatError(f"duplicate parent of {name!r}")
        parents.append(tuple(sorted(idxs)))
    dag = Dag(parents=tuple(parents), score=score)
    if not check_acyclic(dag):
        raise CyclicStructureError("parsed structure contains a cycle")
    return dag


def write_snapshot_csv(series: dict[int, list[tuple[float, float]]]) -> str:
    """Serialize per-worker (elapsed, best score) trajectories.

    Rows are ordered by worker then elapsed, so equal runs serialize to
    identical bytes.
    """
    out = ["worker,elapsed_s,score"]
    for worker in sorted(series):
        for elapsed, score in series[worker]:
            out.append(f"{worker},{elapsed!r},{score!r}")
    return "\n".join(out) + "\n"


def parse_snapshot_csv(stream) -> dict[int, list[tuple[float, float]]]:
    """Inverse of :func:`write_snapshot_csv`."""
    lines = [ln.strip() for ln in _as_text(stream).splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0].replace(" ", "") != "worker,elapsed_s,score":
        raise FormatError("expected header 'worker,elapsed_s,score'")
    series: dict[int, list[tuple[float, float]]] = {}
    for ln in lines[1:]:
        fields = [f.strip() for f in ln.split(",")]
        if len(fields) != 3:
            raise FormatError(f"bad snapshot row: {ln!r}")
        worker = _parse_int(fields[0], "worker id", FormatError)
        try:
            elapsed = float(fields[1])
            score = float(fields[2])
        except ValueError:
            raise FormatError(f"bad snapshot row: {ln!r}") from None
        series.setdefault(worker, []).append((elapsed, score))
    for worker, snaps in series.items():
        if any(b[0] < a[0] for a, b in zip(snaps, snaps[1:])):
            raise FormatError(f"worker {worker}: elapsed times are not monotone")
    return series
