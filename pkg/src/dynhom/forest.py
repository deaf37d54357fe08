"""Maximal-weight spanning forest of the weighted hyperedge graph.

Nodes of the forest are the hyperedges of a hypergraph; two hyperedges may be
joined when they share nodes, with weight equal to the number of shared
nodes.  The forest is kept maximal under single hyperedge insertions and
deletions while every hyperedge ``e`` has, for every node set ``A``, at most
two incident forest edges whose shared set is exactly ``A``.  That caps forest
degrees at ``2r`` and keeps every change to a bounded number of forest edges.

Comparing the forest weight with the hypergraph weight decides
alpha-acyclicity; when they agree the forest is a join forest.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    HyperedgeMissingFromHypergraph,
    NodeAlreadyInForest,
    NodeNotInForest,
    NotSameComponent,
)
from .hypergraph import Hyperedge, Hypergraph


@dataclass(frozen=True)
class ForestEdge:
    u: Hyperedge
    v: Hyperedge
    shared: frozenset

    @property
    def w(self) -> int:
        return len(self.shared)

    @property
    def endpoints(self) -> tuple[Hyperedge, Hyperedge]:
        return (self.u, self.v)

    def line(self) -> str:
        return f"F {self.u.tokens()} {self.v.tokens()} {self.w}"


@dataclass
class DiffEvent:
    """Forest edges removed and added by one hyperedge change."""

    removed: list[ForestEdge] = field(default_factory=list)
    added: list[ForestEdge] = field(default_factory=list)
    # the hyperedge that entered ("ins") or left ("del") the forest
    op: Optional[str] = None
    hyperedge: Optional[Hyperedge] = None

    def __len__(self):
        return len(self.removed) + len(self.added)

    @property
    def size(self) -> int:
        return len(self)


@dataclass(frozen=True)
class AcyclicityVerdict:
    acyclic: bool
    hypergraph_weight: int
    forest_weight: int


def stage_order(nodes) -> list[frozenset]:
    """Non-empty subsets of ``nodes``, largest first, ties by sorted ids."""
    ordered = sorted(set(nodes))
    subsets = [c for k in range(len(ordered), 0, -1)
               for c in itertools.combinations(ordered, k)]
    return [frozenset(s) for s in subsets]


class _Recorder:
    """Net forest-edge changes; an edge removed and re-added cancels out."""

    def __init__(self):
        self.removed: dict[ForestEdge, None] = {}
        self.added: dict[ForestEdge, None] = {}

    def add(self, fe):
        if fe in self.removed:
            del self.removed[fe]
        else:
            self.added[fe] = None

    def remove(self, fe):
        if fe in self.added:
            del self.added[fe]
        else:
            self.removed[fe] = None

    def event(self, op, e) -> DiffEvent:
        return DiffEvent(list(self.removed), list(self.added), op, e)


class MaxSpanningForest:
    """Maintained spanning forest bound to one hypergraph.

    The caller mutates the hypergraph first and then reports the change:
    ``H.insert_edge(e); F.insert_hyperedge(e)`` or
    ``H.delete_edge(e); F.delete_hyperedge(e)``.
    """

    def __init__(self, hypergraph: Hypergraph):
        self.hypergraph = hypergraph
        self._adj: dict[Hyperedge, dict[Hyperedge, frozenset]] = {}
        self._adeg: Counter = Counter()
        self.total_weight = 0
        self._rec: Optional[_Recorder] = None
        if len(hypergraph):
            raise ValueError("start from an empty hypergraph or use from_hypergraph")

    @classmethod
    def from_hypergraph(cls, hypergraph: Hypergraph) -> "MaxSpanningForest":
        """Build a forest for an existing hypergraph by replaying insertions."""
        scratch = Hypergraph(hypergraph.schema, hypergraph.domain_size)
        forest = cls(scratch)
        for e in hypergraph.sorted_edges():
            scratch.insert_edge(e)
            forest.insert_hyperedge(e)
        forest.hypergraph = hypergraph
        return forest

    # -- basic accessors ----------------------------------------------------

    def key(self, e: Hyperedge) -> tuple:
        return self.hypergraph.schema.edge_key(e)

    def __contains__(self, e: Hyperedge) -> bool:
        return e in self._adj

    def nodes(self) -> list[Hyperedge]:
        return sorted(self._adj, key=self.key)

    def neighbors(self, e: Hyperedge) -> list[Hyperedge]:
        self._require(e)
        return sorted(self._adj[e], key=self.key)

    def shared(self, a: Hyperedge, b: Hyperedge) -> frozenset:
        return self._adj[a][b]

    def degree(self, e: Hyperedge) -> int:
        self._require(e)
        return len(self._adj[e])

    def a_degree(self, e: Hyperedge, A) -> int:
        return self._adeg[(e, frozenset(A))]

    def a_degrees(self) -> dict:
        return {k: c for k, c in self._adeg.items() if c}

    def forest_edge(self, a: Hyperedge, b: Hyperedge) -> ForestEdge:
        shared = a.node_set & b.node_set
        if self.key(b) < self.key(a):
            a, b = b, a
        return ForestEdge(a, b, shared)

    def edges(self) -> list[ForestEdge]:
        out = [self.forest_edge(a, b)
               for a, nbrs in self._adj.items() for b in nbrs
               if self.key(a) < self.key(b)]
        return sorted(out, key=lambda fe: (self.key(fe.u), self.key(fe.v)))

    def _edge_key(self, a, b) -> tuple:
        ka, kb = self.key(a), self.key(b)
        return (ka, kb) if ka < kb else (kb, ka)

    def _require(self, *nodes):
        for e in nodes:
            if e not in self._adj:
                raise NodeNotInForest(f"{e} is not a forest node")

    # -- structural queries -------------------------------------------------

    def component(self, e: Hyperedge) -> set[Hyperedge]:
        self._require(e)
        seen = {e}
        todo = [e]
        while todo:
            x = todo.pop()
            for y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def components(self) -> list[list[Hyperedge]]:
        """Components as sorted node lists, ordered by their first node."""
        seen = set()
        out = []
        for e in self.nodes():
            if e in seen:
                continue
            comp = self.component(e)
            seen |= comp
            out.append(sorted(comp, key=self.key))
        return out

    def path(self, s: Hyperedge, t: Hyperedge) -> Optional[list[Hyperedge]]:
        """The unique forest path from ``s`` to ``t`` or None."""
        self._require(s, t)
        if s == t:
            return [s]
        parent = {s: None}
        todo = deque([s])
        while todo:
            x = todo.popleft()
            for y in self._adj[x]:
                if y in parent:
                    continue
                parent[y] = x
                if y == t:
                    out = [t]
                    while parent[out[-1]] is not None:
                        out.append(parent[out[-1]])
                    return out[::-1]
                todo.append(y)
        return None

    def same_component(self, s: Hyperedge, t: Hyperedge) -> bool:
        return self.path(s, t) is not None

    def on_path(self, s: Hyperedge, t: Hyperedge, u: Hyperedge) -> bool:
        self._require(u)
        p = self.path(s, t)
        return p is not None and u in p

    def lca(self, root: Hyperedge, a: Hyperedge, b: Hyperedge) -> Hyperedge:
        pa = self.path(root, a)
        pb = self.path(root, b)
        if pa is None or pb is None:
            raise NotSameComponent(f"{root}, {a}, {b} not in one component")
        last = root
        for x, y in zip(pa, pb):
            if x != y:
                break
            last = x
        return last

    def subtree_contains(self, root: Hyperedge, a: Hyperedge,
                         b: Hyperedge) -> bool:
        """Is ``b`` in the subtree of ``a`` when rooting at ``root``?"""
        p = self.path(root, b)
        if p is None or self.path(root, a) is None:
            raise NotSameComponent(f"{root}, {a}, {b} not in one component")
        return a in p

    def parent(self, root: Hyperedge, x: Hyperedge) -> Optional[Hyperedge]:
        """Neighbour of ``x`` towards ``root`` (None at the root)."""
        p = self.path(x, root)
        if p is None:
            raise NotSameComponent(f"{root}, {x} not in one component")
        return p[1] if len(p) > 1 else None

    def subtree(self, root: Hyperedge, x: Hyperedge) -> set[Hyperedge]:
        up = self.parent(root, x)
        seen = {x}
        todo = [x]
        while todo:
            y = todo.pop()
            for z in self._adj[y]:
                if z not in seen and z != up:
                    seen.add(z)
                    todo.append(z)
        return seen

    # -- elementary edits ---------------------------------------------------

    def _link(self, a: Hyperedge, b: Hyperedge) -> None:
        A = a.node_set & b.node_set
        assert A and b not in self._adj[a]
        self._adj[a][b] = A
        self._adj[b][a] = A
        self._adeg[(a, A)] += 1
        self._adeg[(b, A)] += 1
        self.total_weight += len(A)
        if self._rec is not None:
            self._rec.add(self.forest_edge(a, b))

    def _cut(self, a: Hyperedge, b: Hyperedge) -> None:
        A = self._adj[a].pop(b)
        del self._adj[b][a]
        for k in ((a, A), (b, A)):
            self._adeg[k] -= 1
            if not self._adeg[k]:
                del self._adeg[k]
        self.total_weight -= len(A)
        if self._rec is not None:
            self._rec.remove(self.forest_edge(a, b))

    # -- maintenance ----------------------------------------------------------

    def insert_hyperedge(self, e: Hyperedge) -> DiffEvent:
        """Add ``e`` (already inserted into the hypergraph) as a forest node.

        One stage per non-empty subset ``A`` of ``e``'s nodes, largest first;
        each stage changes at most two forest edges.
        """
        if e in self._adj:
            raise NodeAlreadyInForest(f"{e} already a forest node")
        if e not in self.hypergraph:
            raise HyperedgeMissingFromHypergraph(f"{e} not in hypergraph")
        self._rec = _Recorder()
        try:
            self._adj[e] = {}
            by_shared: dict[frozenset, list[Hyperedge]] = {}
            for f, A in self.hypergraph.wg_neighbors(e):
                by_shared.setdefault(A, []).append(f)
            for A in stage_order(e.node_set):
                if A in by_shared:
                    self._insertion_stage(e, A, by_shared[A])
            return self._rec.event("ins", e)
        finally:
            self._rec = None

    def _insertion_stage(self, e, A, neighbours) -> None:
        eligible = [n for n in neighbours if self._adeg[(n, A)] <= 1]
        # the A-neighbours form a clique in wg, hence one forest component
        comp = self.component(neighbours[0])
        if e not in comp:
            if not eligible:
                raise AssertionError(f"no attachable {sorted(A)}-neighbour")
            self._link(e, eligible[0])
            return
        best = None
        for n in eligible:
            p = self.path(e, n)
            for a, b in zip(p, p[1:]):
                cand = (len(self._adj[a][b]), self._edge_key(a, b), self.key(n))
                if best is None or cand < best[0]:
                    best = (cand, a, b, n)
        if best is None:
            # only reachable when no swap could improve the weight
            return
        (w, _, _), a, b, n = best
        if w < len(A):
            self._cut(a, b)
            self._link(e, n)

    def delete_hyperedge(self, e: Hyperedge) -> DiffEvent:
        """Remove forest node ``e`` and reconnect the split parts.

        Works whether or not ``e`` is still in the hypergraph; ``e`` itself is
        never used as a reconnecting endpoint.
        """
        self._require(e)
        self._rec = _Recorder()
        try:
            for n in sorted(self._adj[e], key=self.key):
                self._cut(e, n)
                self._reconnect(e, n)
            del self._adj[e]
            return self._rec.event("del", e)
        finally:
            self._rec = None

    def _reconnect(self, gone: Hyperedge, n: Hyperedge) -> None:
        part = self.component(n)
        rest = self.component(gone)
        rest.discard(gone)
        if not rest:
            return
        small, large = (part, rest) if len(part) <= len(rest) else (rest, part)
        H = self.hypergraph
        best_w = 0
        cands = []
        for x in small:
            for y, A in H.wg_neighbors(x):
                if y not in large:
                    continue
                if len(A) > best_w:
                    best_w = len(A)
                    cands = []
                if len(A) == best_w:
                    cands.append((x, y, A))
        if not cands:
            return
        # a maximal crossing edge whose endpoints both have A-degree <= 1
        # always exists among the maximal ones
        ok = [(self._edge_key(x, y), x, y) for x, y, A in cands
              if self._adeg[(x, A)] <= 1 and self._adeg[(y, A)] <= 1]
        if not ok:
            raise AssertionError("no admissible reconnecting edge")
        _, x, y = min(ok, key=lambda t: t[0])
        self._link(x, y)

    # -- verdicts -------------------------------------------------------------

    def acyclicity(self) -> AcyclicityVerdict:
        hw = self.hypergraph.weight()
        return AcyclicityVerdict(hw == self.total_weight, hw, self.total_weight)

    def clone(self, hypergraph: Optional[Hypergraph] = None) -> "MaxSpanningForest":
        """Independent copy, optionally rebound to a copy of the hypergraph."""
        twin = MaxSpanningForest.__new__(MaxSpanningForest)
        twin.hypergraph = hypergraph if hypergraph is not None else self.hypergraph
        twin._adj = {e: dict(nbrs) for e, nbrs in self._adj.items()}
        twin._adeg = Counter(self._adeg)
        twin.total_weight = self.total_weight
        twin._rec = None
        return twin

    def would_stay_acyclic(self, op: str, e: Hyperedge) -> bool:
        """Trial-run a change on scratch copies and report the verdict."""
        H = self.hypergraph.copy()
        trial = self.clone(H)
        apply_change(H, trial, op, e)
        return trial.acyclicity().acyclic

    # -- serialisation --------------------------------------------------------

    def snapshot_lines(self, paths: bool = False) -> list[str]:
        lines = [fe.line() for fe in self.edges()]
        if paths:
            for comp in self.components():
                for s in comp:
                    for t in comp:
                        for u in self.path(s, t):
                            lines.append(
                                f"P {s.tokens()} {t.tokens()} {u.tokens()}")
        return lines


def apply_change(H: Hypergraph, forest: MaxSpanningForest, op: str,
                 e: Hyperedge) -> DiffEvent:
    """Apply ``ins``/``del`` of ``e`` to the hypergraph and its forest."""
    if op == "ins":
        H.insert_edge(e)
        return forest.insert_hyperedge(e)
    if op == "del":
        H.delete_edge(e)
        return forest.delete_hyperedge(e)
    raise ValueError(f"unknown change {op!r}")
