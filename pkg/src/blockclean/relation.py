"""Tabular datasets: loading, tuple identity, and delimited-text output.

All cell values are strings. A missing value is the empty string.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class RelationError(ValueError):
    pass


@dataclass(frozen=True)
class Attribute:
    name: str
    position: int


@dataclass(frozen=True)
class Row:
    """One tuple of a relation; ``tid`` is stable across cleaning stages."""

    tid: int
    values: tuple[str, ...]

    def __getitem__(self, position: int) -> str:
        return self.values[position]


@dataclass(frozen=True)
class Relation:
    schema: tuple[Attribute, ...]
    rows: tuple[Row, ...] = field(default=())

    def __post_init__(self) -> None:
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise RelationError(f"duplicate attribute names in schema: {names}")
        arity = len(self.schema)
        last = None
        for row in self.rows:
            if len(row.values) != arity:
                raise RelationError(f"tuple {row.tid} has {len(row.values)} values, schema has {arity}")
            if last is not None and row.tid <= last:
                raise RelationError(f"tuple ids must be strictly increasing (saw {row.tid} after {last})")
            last = row.tid

    @classmethod
    def from_records(cls, names: Sequence[str], records: Iterable[Sequence[str]], first_tid: int = 1) -> Relation:
        schema = tuple(Attribute(n, i) for i, n in enumerate(names))
        rows = tuple(Row(first_tid + i, tuple(r)) for i, r in enumerate(records))
        return cls(schema, rows)

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.schema]

    @property
    def arity(self) -> int:
        return len(self.schema)

    def __len__(self) -> int:
        return len(self.rows)

    def position(self, name: str) -> int:
        for a in self.schema:
            if a.name == name:
                return a.position
        raise RelationError(f"unknown attribute {name!r}")

    def tids(self) -> list[int]:
        return [r.tid for r in self.rows]

    def by_tid(self) -> dict[int, Row]:
        return {r.tid: r for r in self.rows}

    def values_matrix(self) -> list[tuple[str, ...]]:
        return [r.values for r in self.rows]

    def subset(self, tids: Iterable[int]) -> Relation:
        """Rows whose tid is in ``tids``, kept in this relation's order."""
        keep = set(tids)
        return Relation(self.schema, tuple(r for r in self.rows if r.tid in keep))

    def with_values(self, values: dict[int, Sequence[str]]) -> Relation:
        """Copy with the given rows' values replaced; rows not mentioned are unchanged."""
        rows = tuple(Row(r.tid, tuple(values[r.tid])) if r.tid in values else r for r in self.rows)
        return Relation(self.schema, rows)


def load_relation(path: str | Path, delimiter: str = ",", has_header: bool = True) -> Relation:
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise RelationError(f"cannot read {path}: {exc.strerror}") from exc
    with handle:
        reader = csv.reader(handle, delimiter=delimiter)
        records = [rec for rec in reader if rec]

    if has_header:
        if not records:
            raise RelationError(f"{path}: missing header line")
        names = records[0]
        data = records[1:]
        first_line = 2
    else:
        if not records:
            raise RelationError(f"{path}: empty file and no header to infer arity from")
        names = [f"A{i + 1}" for i in range(len(records[0]))]
        data = records
        first_line = 1

    seen: set[str] = set()
    for name in names:
        if name in seen:
            raise RelationError(f"{path}: duplicate header name {name!r}")
        seen.add(name)

    for i, rec in enumerate(data):
        if len(rec) != len(names):
            raise RelationError(
                f"{path}: row {i + 1} (line {first_line + i}) has {len(rec)} fields, expected {len(names)}"
            )
    return Relation.from_records(names, data)


def write_relation(rel: Relation, path: str | Path, delimiter: str = ",") -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
            writer.writerow(rel.names)
            for row in rel.rows:
                writer.writerow(row.values)
    except OSError as exc:
        raise RelationError(f"cannot write {path}: {exc.strerror}") from exc
