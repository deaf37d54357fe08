"""Schemas, labelled hyperedges and hypergraphs with degree bookkeeping."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import (
    ArityMismatch,
    DuplicateEdge,
    EdgeNotPresent,
    NodeOutOfDomain,
    UnknownRelation,
)

_REL_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


@dataclass(frozen=True)
class Schema:
    """Ordered relation symbols with their arities.

    ``a_max`` is the largest arity and ``r = 2**a_max - 1`` bounds the number
    of distinct non-empty node sets two hyperedges can share.
    """

    relations: tuple[tuple[str, int], ...]
    _rank: dict = field(init=False, repr=False, compare=False, hash=False)
    _arity: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        relations = tuple((str(n), int(a)) for n, a in self.relations)
        if not relations:
            raise ValueError("schema needs at least one relation")
        names = [n for n, _ in relations]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate relation names in {names}")
        for name, arity in relations:
            if not _REL_NAME.match(name):
                raise ValueError(f"bad relation name {name!r}")
            if arity < 1:
                raise ValueError(f"relation {name} must have arity >= 1")
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_rank", {n: i for i, n in enumerate(names)})
        object.__setattr__(self, "_arity", dict(relations))

    @classmethod
    def parse(cls, text: str) -> "Schema":
        """Parse ``"E/2 F/1"`` style declarations."""
        rels = []
        for token in text.split():
            name, sep, arity = token.partition("/")
            if not sep or not arity.isdigit():
                raise ValueError(f"bad relation declaration {token!r}")
            rels.append((name, int(arity)))
        return cls(tuple(rels))

    def __str__(self):
        return " ".join(f"{n}/{a}" for n, a in self.relations)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.relations]

    @property
    def a_max(self) -> int:
        return max(a for _, a in self.relations)

    @property
    def r(self) -> int:
        return 2 ** self.a_max - 1

    def arity(self, rel: str) -> int:
        try:
            return self._arity[rel]
        except KeyError:
            raise UnknownRelation(f"relation {rel!r} not in schema") from None

    def __contains__(self, rel) -> bool:
        return rel in self._arity

    def edge_key(self, e: "Hyperedge") -> tuple:
        # relation order first, then lexicographic tuple order
        return (self._rank[e.rel], e.nodes)

    def check(self, rel: str, nodes: tuple) -> None:
        if len(nodes) != self.arity(rel):
            raise ArityMismatch(
                f"{rel} has arity {self.arity(rel)}, got {len(nodes)} entries")


@dataclass(frozen=True)
class Hyperedge:
    rel: str
    nodes: tuple[int, ...]
    node_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        object.__setattr__(self, "node_set", frozenset(self.nodes))

    # hyperedges are values; sharing them between copies is safe
    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __str__(self):
        return f"{self.rel}({','.join(map(str, self.nodes))})"

    def tokens(self) -> str:
        """Whitespace form used in script and snapshot lines."""
        return " ".join([self.rel, *map(str, self.nodes)])


def edge(rel: str, *nodes: int) -> Hyperedge:
    return Hyperedge(rel, tuple(nodes))


def shared_set(e1: Hyperedge, e2: Hyperedge) -> frozenset:
    return e1.node_set & e2.node_set


class Hypergraph:
    """A relational structure over a schema, mutated one hyperedge at a time.

    ``degree[v]`` counts hyperedges containing ``v``; the node incidence
    index lets callers enumerate the neighbourhood of a hyperedge in the
    weighted hyperedge graph without scanning everything.
    """

    def __init__(self, schema: Schema, domain_size: Optional[int] = None,
                 edges: Iterable[Hyperedge] = ()):
        self.schema = schema
        self.domain_size = domain_size
        self.edges: dict[str, set[tuple[int, ...]]] = {
            n: set() for n in schema.names}
        self.degree: Counter = Counter()
        self._incidence: dict[int, set[Hyperedge]] = {}
        self._weight = 0
        self._count = 0
        for e in edges:
            self.insert_edge(e)

    def __len__(self):
        return self._count

    def __contains__(self, e: Hyperedge) -> bool:
        tuples = self.edges.get(e.rel)
        return tuples is not None and e.nodes in tuples

    def __iter__(self) -> Iterator[Hyperedge]:
        return iter(self.sorted_edges())

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.schema == other.schema
                and self.domain_size == other.domain_size
                and self.edges == other.edges
                and +self.degree == +other.degree)

    def __repr__(self):
        body = ", ".join(str(e) for e in self.sorted_edges())
        return f"Hypergraph({{{body}}})"

    def key(self, e: Hyperedge) -> tuple:
        return self.schema.edge_key(e)

    def sorted_edges(self) -> list[Hyperedge]:
        return [Hyperedge(rel, t)
                for rel in self.schema.names
                for t in sorted(self.edges[rel])]

    def _validate(self, e: Hyperedge) -> None:
        self.schema.check(e.rel, e.nodes)
        if self.domain_size is not None:
            for v in e.nodes:
                if not 0 <= v < self.domain_size:
                    raise NodeOutOfDomain(
                        f"node {v} outside domain 0..{self.domain_size - 1}")
        elif any(v < 0 for v in e.nodes):
            raise NodeOutOfDomain("node ids are natural numbers")

    def insert_edge(self, e: Hyperedge) -> "Hypergraph":
        self._validate(e)
        if e in self:
            raise DuplicateEdge(f"{e} already present")
        self.edges[e.rel].add(e.nodes)
        for v in e.node_set:
            # a node already in use adds one to the weight
            if self.degree[v] > 0:
                self._weight += 1
            self.degree[v] += 1
            self._incidence.setdefault(v, set()).add(e)
        self._count += 1
        return self

    def delete_edge(self, e: Hyperedge) -> "Hypergraph":
        if e.rel not in self.schema or e not in self:
            raise EdgeNotPresent(f"{e} not present")
        self.edges[e.rel].discard(e.nodes)
        for v in e.node_set:
            self.degree[v] -= 1
            if self.degree[v] > 0:
                self._weight -= 1
            else:
                del self.degree[v]
            inc = self._incidence[v]
            inc.discard(e)
            if not inc:
                del self._incidence[v]
        self._count -= 1
        return self

    def weight(self) -> int:
        """Sum over non-isolated nodes of (degree - 1)."""
        return self._weight

    def incident(self, v: int) -> set[Hyperedge]:
        return self._incidence.get(v, set())

    def nodes_in_use(self) -> set[int]:
        return set(self._incidence)

    def isolated_nodes_exist(self) -> bool:
        if self.domain_size is None:
            return False
        return len(self._incidence) < self.domain_size

    def relation_edges(self, rel: str) -> list[Hyperedge]:
        return [Hyperedge(rel, t) for t in sorted(self.edges[rel])]

    def wg_neighbors(self, e: Hyperedge) -> list[tuple[Hyperedge, frozenset]]:
        """Hyperedges sharing at least one node with ``e``, with the shared set.

        Ordered by relation order, then tuple order.
        """
        if e not in self:
            raise EdgeNotPresent(f"{e} not present")
        found = set()
        for v in e.node_set:
            found |= self._incidence[v]
        found.discard(e)
        return [(f, e.node_set & f.node_set)
                for f in sorted(found, key=self.key)]

    def copy(self) -> "Hypergraph":
        return Hypergraph(self.schema, self.domain_size, self.sorted_edges())
