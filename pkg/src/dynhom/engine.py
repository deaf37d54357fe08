"""Homomorphism existence from an acyclic query into a data hypergraph.

For every directed join-forest edge ``u -> v`` the engine stores the set of
images of ``u`` that extend to a homomorphism of ``u``'s side of the cut
``{u, v}`` (a semijoin message).  Changes to the forest or to the data
recompute only the messages pointing away from the touched spot, stopping
wherever a recomputed message comes out unchanged.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

from .data import DataIndex
from .errors import (
    DiffInconsistentWithForest,
    MalformedImage,
    NotAcyclic,
    NotDescendant,
    NotSameComponent,
    SelfJoinPresent,
)
from .forest import DiffEvent, MaxSpanningForest
from .hypergraph import Hyperedge, Hypergraph

Image = tuple[int, ...]


def consistent(e: Hyperedge, image) -> bool:
    """Positions of ``e`` holding the same query node hold the same element."""
    if len(image) != len(e.nodes):
        return False
    seen = {}
    for v, y in zip(e.nodes, image):
        if seen.setdefault(v, y) != y:
            return False
    return True


def _positions(e: Hyperedge, nodes) -> tuple[int, ...]:
    return tuple(e.nodes.index(v) for v in nodes)


def fmt_image(y: Image) -> str:
    return "(" + ",".join(map(str, y)) + ")"


class HomEngine:
    """Engine state attached to a query hypergraph, its join forest and data."""

    def __init__(self, query: Hypergraph, forest: MaxSpanningForest,
                 data: DataIndex):
        if not forest.acyclicity().acyclic:
            raise NotAcyclic("the forest is not a join forest of the query")
        self.query = query
        self.forest = forest
        self.data = data
        self._adj: dict[Hyperedge, set[Hyperedge]] = {
            e: set(forest.neighbors(e)) for e in forest.nodes()}
        self._cand: dict[Hyperedge, frozenset] = {}
        self.messages: dict[tuple[Hyperedge, Hyperedge], frozenset] = {}
        self.answer_bit = True
        self._initial_pass()
        self._refresh_answer()

    @classmethod
    def attach(cls, query: Hypergraph, forest: MaxSpanningForest,
               data: DataIndex) -> "HomEngine":
        return cls(query, forest, data)

    def key(self, e: Hyperedge) -> tuple:
        return self.query.schema.edge_key(e)

    # -- message machinery -----------------------------------------------

    def candidates(self, e: Hyperedge) -> frozenset:
        """Images of ``e`` present in the data and consistent with ``e``."""
        c = self._cand.get(e)
        if c is None:
            c = frozenset(t for t in self.data.tuples[e.rel] if consistent(e, t))
            self._cand[e] = c
        return c

    def _filter(self, u: Hyperedge, exclude: Iterable[Hyperedge],
                base: Optional[Iterable[Image]] = None) -> frozenset:
        checks = []
        skip = set(exclude)
        for n in self._adj[u]:
            if n in skip:
                continue
            common = sorted(u.node_set & n.node_set)
            pn = _positions(n, common)
            allowed = {tuple(b[i] for i in pn) for b in self.messages[(n, u)]}
            if not allowed:
                return frozenset()
            checks.append((_positions(u, common), allowed))
        pool = self.candidates(u) if base is None else base
        return frozenset(
            a for a in pool
            if all(tuple(a[i] for i in pu) in allowed for pu, allowed in checks))

    def _propagate(self, dirty) -> None:
        queue = deque()
        queued = set()
        for d in dirty:
            if d not in queued:
                queued.add(d)
                queue.append(d)
        while queue:
            u, v = d = queue.popleft()
            queued.discard(d)
            if v not in self._adj.get(u, ()):
                continue
            new = self._filter(u, (v,))
            if self.messages.get(d) == new:
                continue
            self.messages[d] = new
            for w in self._adj[v]:
                if w != u and (v, w) not in queued:
                    queued.add((v, w))
                    queue.append((v, w))

    def _initial_pass(self) -> None:
        # upward messages leaves first, then downward ones root first
        for comp in self._components():
            parent = {comp[0]: None}
            for u in comp:
                for v in self._adj[u]:
                    if v not in parent:
                        parent[v] = u
            for u in reversed(comp[1:]):
                self.messages[(u, parent[u])] = self._filter(u, (parent[u],))
            for v in comp[1:]:
                u = parent[v]
                self.messages[(u, v)] = self._filter(u, (v,))

    def _outgoing(self, u: Hyperedge, skip=None) -> list:
        return [(u, w) for w in self._adj[u] if w != skip]

    def _components(self) -> list[list[Hyperedge]]:
        seen = set()
        out = []
        for e in sorted(self._adj, key=self.key):
            if e in seen:
                continue
            comp = [e]
            seen.add(e)
            i = 0
            while i < len(comp):
                for y in self._adj[comp[i]]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                i += 1
            out.append(comp)
        return out

    def _refresh_answer(self) -> None:
        if self.query.isolated_nodes_exist() and not self.data.domain_elements():
            self.answer_bit = False
            return
        self.answer_bit = all(self._filter(comp[0], ())
                              for comp in self._components())

    # -- updates ---------------------------------------------------------

    def apply_forest_diff(self, diff: DiffEvent) -> None:
        """Replay a forest diff edge by edge, restoring the message fixpoint.

        Query and data must already reflect the change that produced it.
        """
        adj = self._adj
        if diff.op == "ins" and diff.hyperedge not in adj:
            adj[diff.hyperedge] = set()
        for fe in diff.removed:
            u, v = fe.u, fe.v
            if v not in adj.get(u, ()):
                raise DiffInconsistentWithForest(f"{u}-{v} is not a forest edge")
            adj[u].discard(v)
            adj[v].discard(u)
            self.messages.pop((u, v), None)
            self.messages.pop((v, u), None)
            self._propagate(self._outgoing(u) + self._outgoing(v))
        for fe in diff.added:
            u, v = fe.u, fe.v
            if u not in adj or v not in adj or v in adj[u]:
                raise DiffInconsistentWithForest(f"cannot add {u}-{v}")
            adj[u].add(v)
            adj[v].add(u)
            self._propagate([(u, v), (v, u)]
                            + self._outgoing(u, v) + self._outgoing(v, u))
        if diff.op == "del" and diff.hyperedge is not None:
            e = diff.hyperedge
            if adj.get(e):
                raise DiffInconsistentWithForest(f"{e} still has forest edges")
            adj.pop(e, None)
            self._cand.pop(e, None)
        self._refresh_answer()

    def _touch_relation(self, rel: str) -> None:
        dirty = []
        for e in self._adj:
            if e.rel == rel:
                self._cand.pop(e, None)
                dirty += self._outgoing(e)
        self._propagate(dirty)
        self._refresh_answer()

    def replace_relation_d(self, rel: str, tuples) -> None:
        """Swap a whole data relation; needs at most one query hyperedge on it."""
        if len(self.query.edges.get(rel, ())) > 1:
            raise SelfJoinPresent(f"query has several {rel} hyperedges")
        self.data.replace(rel, tuples)
        self._touch_relation(rel)

    def change_d_tuple(self, op: str, rel: str, t) -> None:
        if op == "ins":
            self.data.insert(rel, t)
        elif op == "del":
            self.data.delete(rel, t)
        else:
            raise ValueError(f"unknown change {op!r}")
        self._touch_relation(rel)

    def refresh_domain(self) -> None:
        """Re-evaluate after the data domain was redeclared."""
        self._refresh_answer()

    # -- queries ---------------------------------------------------------

    def answer(self) -> bool:
        return self.answer_bit

    def message(self, u: Hyperedge, v: Hyperedge) -> list[Image]:
        return sorted(self.messages[(u, v)])

    def _path(self, s: Hyperedge, t: Hyperedge) -> Optional[list[Hyperedge]]:
        if s not in self._adj or t not in self._adj:
            raise NotSameComponent(f"{s} or {t} not in the query")
        parent = {s: None}
        todo = deque([s])
        while todo:
            x = todo.popleft()
            if x == t:
                out = [t]
                while parent[out[-1]] is not None:
                    out.append(parent[out[-1]])
                return out[::-1]
            for y in self._adj[x]:
                if y not in parent:
                    parent[y] = x
                    todo.append(y)
        return None

    def valid_assignments(self, root: Hyperedge, x: Hyperedge) -> frozenset:
        """Images of ``x`` extending to its subtree when rooted at ``root``."""
        p = self._path(x, root)
        if p is None:
            raise NotSameComponent(f"{root} and {x} in different components")
        up = p[1] if len(p) > 1 else None
        return self._filter(x, () if up is None else (up,))

    def h_query(self, root: Hyperedge, x1: Hyperedge, x2: Hyperedge,
                y2) -> frozenset:
        """Images ``y1`` of ``x1`` valid down to ``(x2, y2)``.

        The hyperedges below ``x1`` but not below ``x2`` must map into the data
        with ``x1 -> y1`` and ``x2 -> y2``.
        """
        y2 = tuple(y2)
        down = self._path(root, x2)
        if down is None or self._path(root, x1) is None:
            raise NotSameComponent(f"{root}, {x1}, {x2} not in one component")
        if x1 not in down:
            raise NotDescendant(f"{x2} is not below {x1}")
        if not consistent(x2, y2) or (x2.rel, y2) not in self.data:
            raise MalformedImage(f"{fmt_image(y2)} is not a data image of {x2}")
        if x1 == x2:
            return frozenset({y2})
        chain = down[down.index(x1):]
        up = self._path(x1, root)
        above = up[1] if len(up) > 1 else None
        current = frozenset({y2})
        for j in range(len(chain) - 2, -1, -1):
            node, below = chain[j], chain[j + 1]
            parent = chain[j - 1] if j > 0 else above
            common = sorted(node.node_set & below.node_set)
            pb = _positions(below, common)
            allowed = {tuple(b[i] for i in pb) for b in current}
            pn = _positions(node, common)
            base = [a for a in self.candidates(node)
                    if tuple(a[i] for i in pn) in allowed]
            exclude = (below,) if parent is None else (below, parent)
            current = self._filter(node, exclude, base)
        return current

    # -- serialisation ---------------------------------------------------

    def valid_lines(self) -> list[str]:
        lines = []
        for x in sorted(self._adj, key=self.key):
            imgs = sorted(self.valid_assignments(x, x))
            body = " ".join(fmt_image(y) for y in imgs)
            lines.append(f"valid {x.tokens()} :{' ' + body if body else ''}")
        return lines

    def message_lines(self) -> list[str]:
        lines = []
        for (u, v) in sorted(self.messages,
                             key=lambda d: (self.key(d[0]), self.key(d[1]))):
            body = " ".join(fmt_image(y) for y in sorted(self.messages[(u, v)]))
            lines.append(f"M {u.tokens()} -> {v.tokens()} :"
                         f"{' ' + body if body else ''}")
        return lines
