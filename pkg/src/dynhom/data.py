"""The data hypergraph: per-relation tuple sets over a fixed element domain."""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import (
    DuplicateTuple,
    ElementOutOfDomain,
    TupleNotPresent,
)
from .hypergraph import Schema


class DataIndex:
    def __init__(self, schema: Schema, domain_size: Optional[int] = None,
                 tuples: Optional[dict] = None):
        self.schema = schema
        self.domain_size = domain_size
        self.tuples: dict[str, set[tuple[int, ...]]] = {
            n: set() for n in schema.names}
        for rel, ts in (tuples or {}).items():
            for t in ts:
                self.insert(rel, t)

    def __eq__(self, other):
        if not isinstance(other, DataIndex):
            return NotImplemented
        return (self.schema == other.schema
                and self.domain_size == other.domain_size
                and self.tuples == other.tuples)

    def __contains__(self, item) -> bool:
        rel, t = item
        return tuple(t) in self.tuples.get(rel, ())

    def __len__(self):
        return sum(len(ts) for ts in self.tuples.values())

    def _check(self, rel: str, t) -> tuple[int, ...]:
        t = tuple(int(x) for x in t)
        self.schema.check(rel, t)
        for x in t:
            if x < 0 or (self.domain_size is not None and x >= self.domain_size):
                raise ElementOutOfDomain(f"element {x} outside the data domain")
        return t

    def insert(self, rel: str, t) -> None:
        t = self._check(rel, t)
        if t in self.tuples[rel]:
            raise DuplicateTuple(f"{rel}{t} already in data")
        self.tuples[rel].add(t)

    def delete(self, rel: str, t) -> None:
        t = self._check(rel, t)
        if t not in self.tuples[rel]:
            raise TupleNotPresent(f"{rel}{t} not in data")
        self.tuples[rel].discard(t)

    def replace(self, rel: str, tuples: Iterable) -> None:
        checked = {self._check(rel, t) for t in tuples}
        self.tuples[rel] = checked

    def relation(self, rel: str) -> list[tuple[int, ...]]:
        return sorted(self.tuples[rel])

    def domain_elements(self) -> list[int]:
        """Declared domain, or the elements occurring in tuples if undeclared."""
        if self.domain_size is not None:
            return list(range(self.domain_size))
        return sorted({x for ts in self.tuples.values() for t in ts for x in t})

    def copy(self) -> "DataIndex":
        twin = DataIndex(self.schema, self.domain_size)
        twin.tuples = {rel: set(ts) for rel, ts in self.tuples.items()}
        return twin
