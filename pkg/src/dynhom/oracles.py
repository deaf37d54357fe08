"""Independent brute-force references used to cross-check the maintained state.

None of these reuse the incremental machinery: homomorphisms come from
backtracking search, spanning forest weights from networkx's Kruskal, and
acyclicity from GYO ear removal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import networkx as nx

from .data import DataIndex
from .hypergraph import Hyperedge, Hypergraph, Schema


# -- homomorphisms -----------------------------------------------------------

def _matches(e: Hyperedge, t, mapping) -> Optional[dict]:
    """Extension of ``mapping`` sending ``e`` onto tuple ``t``, or None."""
    ext = {}
    for v, y in zip(e.nodes, t):
        have = mapping.get(v, ext.get(v))
        if have is None:
            ext[v] = y
        elif have != y:
            return None
    return ext


def _search(edges, data: DataIndex, mapping: dict) -> Optional[dict]:
    if not edges:
        return mapping
    # most constrained hyperedge first; forward-check the rest
    best = None
    for i, e in enumerate(edges):
        options = [ext for t in data.tuples[e.rel]
                   if (ext := _matches(e, t, mapping)) is not None]
        if not options:
            return None
        if best is None or len(options) < len(best[1]):
            best = (i, options)
    i, options = best
    rest = edges[:i] + edges[i + 1:]
    options.sort(key=lambda ext: sorted(ext.items()))
    for ext in options:
        found = _search(rest, data, {**mapping, **ext})
        if found is not None:
            return found
    return None


def _node_components(edges: list[Hyperedge], pinned) -> list[list[Hyperedge]]:
    parent = list(range(len(edges)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, e in enumerate(edges):
        for v in e.node_set:
            if v in pinned:
                continue
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[Hyperedge]] = {}
    for i, e in enumerate(edges):
        groups.setdefault(find(i), []).append(e)
    return list(groups.values())


def brute_hom(Q, D: DataIndex, fixed: Optional[dict] = None):
    """Exhaustive homomorphism search.

    ``Q`` is a Hypergraph or an iterable of hyperedges.  ``fixed`` pins some
    query nodes to data elements up front.  Returns ``(found, witness)``; the
    witness maps every node occurring in a hyperedge and is re-verified.
    """
    if isinstance(Q, Hypergraph):
        edges = Q.sorted_edges()
        if Q.isolated_nodes_exist() and not D.domain_elements():
            return False, None
    else:
        edges = list(Q)
    mapping = dict(fixed or {})
    witness = dict(mapping)
    for group in _node_components(edges, mapping):
        found = _search(group, D, mapping)
        if found is None:
            return False, None
        witness.update(found)
    for e in edges:
        image = tuple(witness[v] for v in e.nodes)
        if image not in D.tuples[e.rel]:
            raise AssertionError(f"witness does not map {e} into the data")
    return True, witness


# -- spanning forests and acyclicity -----------------------------------------

def hyperedge_graph(H: Hypergraph) -> nx.Graph:
    """The weighted hyperedge graph, built by a plain pairwise scan."""
    G = nx.Graph()
    edges = H.sorted_edges()
    G.add_nodes_from(edges)
    for a, b in combinations(edges, 2):
        common = a.node_set & b.node_set
        if common:
            G.add_edge(a, b, weight=len(common))
    return G


def kruskal_msf_weight(H: Hypergraph) -> int:
    G = hyperedge_graph(H)
    msf = nx.maximum_spanning_tree(G, weight="weight", algorithm="kruskal")
    return int(msf.size(weight="weight"))


def hypergraph_weight(H: Hypergraph) -> int:
    """Weight recomputed from scratch: sum of |e| minus non-isolated nodes."""
    edges = H.sorted_edges()
    used = set().union(*(e.node_set for e in edges)) if edges else set()
    return sum(len(e.node_set) for e in edges) - len(used)


def gyo_acyclic(H) -> bool:
    """GYO ear removal on the node sets of ``H``."""
    sets = [set(e.node_set) for e in (H.sorted_edges()
                                      if isinstance(H, Hypergraph) else H)]
    changed = True
    while changed and sets:
        changed = False
        count: dict[int, int] = {}
        for s in sets:
            for v in s:
                count[v] = count.get(v, 0) + 1
        for s in sets:
            lonely = {v for v in s if count[v] == 1}
            if lonely:
                s -= lonely
                changed = True
        before = len(sets)
        sets = [s for s in sets if s]
        changed |= len(sets) != before
        for i, s in enumerate(sets):
            if any(j != i and s <= t for j, t in enumerate(sets)):
                del sets[i]
                changed = True
                break
    return not sets


def join_forest_violations(forest, H: Hypergraph) -> list[tuple]:
    """Pairs whose forest path leaves a shared node behind."""
    bad = []
    edges = H.sorted_edges()
    for a, b in combinations(edges, 2):
        common = a.node_set & b.node_set
        if not common:
            continue
        p = forest.path(a, b)
        if p is None:
            bad.append((a, b, None))
            continue
        for u in p:
            if not common <= u.node_set:
                bad.append((a, b, u))
                break
    return bad


# -- join-forest messages from their definition ------------------------------

def scratch_messages(adjacency: dict, data: DataIndex) -> dict:
    """Semijoin messages evaluated directly from the recursive definition.

    ``adjacency`` maps each query hyperedge to its forest neighbours.
    """
    memo: dict = {}

    def images(u):
        out = []
        for t in data.tuples[u.rel]:
            if _matches(u, t, {}) is not None:
                out.append(t)
        return out

    def agrees(u, a, n, b):
        return all(a[i] == b[n.nodes.index(v)]
                   for i, v in enumerate(u.nodes) if v in n.node_set)

    def msg(u, v):
        if (u, v) in memo:
            return memo[(u, v)]
        keep = set()
        others = [n for n in adjacency[u] if n != v]
        inbound = {n: msg(n, u) for n in others}
        for a in images(u):
            if all(any(agrees(u, a, n, b) for b in inbound[n]) for n in others):
                keep.add(a)
        memo[(u, v)] = frozenset(keep)
        return memo[(u, v)]

    for u in adjacency:
        for v in adjacency[u]:
            msg(u, v)
    return memo


# -- random change scripts ---------------------------------------------------

@dataclass
class ScriptLimits:
    q_domain: int = 6
    d_domain: int = 4
    max_q_edges: int = 10
    max_d_tuples: int = 20
    initial_d_tuples: int = 10
    weights: dict = field(default_factory=lambda: {
        "insq": 5, "delq": 3, "setd": 0, "insd": 1, "deld": 1, "ask": 1})
    # chance that a Q change is picked to keep Q acyclic
    acyclic_bias: float = 0.8
    # track Q as the driver would: cyclic changes are denied
    simulate_denial: bool = True
    self_join_free: bool = False


def _fmt_tuple(t) -> str:
    return "(" + ",".join(map(str, t)) + ")"


def random_change_script(schema: Schema, steps: int,
                         limits: Optional[ScriptLimits] = None,
                         seed: int = 0) -> list[str]:
    """A deterministic command script: header, initial data, then ``steps``
    commands drawn from the weighted mix in ``limits``."""
    lim = limits or ScriptLimits()
    rng = random.Random(seed)
    names = schema.names
    lines = [f"schema {schema}", f"domq {lim.q_domain}", f"domd {lim.d_domain}"]
    Q: list[Hyperedge] = []
    D: dict[str, set] = {n: set() for n in names}

    def total_d():
        return sum(len(ts) for ts in D.values())

    def rand_tuple(rel, dom):
        return tuple(rng.randrange(dom) for _ in range(schema.arity(rel)))

    for _ in range(lim.initial_d_tuples):
        rel = rng.choice(names)
        t = rand_tuple(rel, lim.d_domain)
        if t not in D[rel]:
            D[rel].add(t)
            lines.append(f"insd {rel} {' '.join(map(str, t))}")

    def fresh_q_edge():
        rels = names
        if lim.self_join_free:
            used = {e.rel for e in Q}
            rels = [n for n in names if n not in used]
            if not rels:
                return None
        for _ in range(20):
            rel = rng.choice(rels)
            e = Hyperedge(rel, rand_tuple(rel, lim.q_domain))
            if e not in Q:
                return e
        return None

    def biased(pick, make_q):
        if rng.random() >= lim.acyclic_bias:
            return pick()
        for _ in range(8):
            e = pick()
            if e is not None and gyo_acyclic(make_q(e)):
                return e
        return pick()

    ops = [op for op in lim.weights if lim.weights[op] > 0]
    wts = [lim.weights[op] for op in ops]
    for _ in range(steps):
        op = rng.choices(ops, wts)[0]
        if op == "insq" and len(Q) >= lim.max_q_edges:
            op = "delq"
        if op == "delq" and not Q:
            op = "insq"
        if op == "insq":
            e = biased(fresh_q_edge, lambda e: Q + [e])
            if e is None:
                lines.append("ask")
                continue
            lines.append(f"insq {e.tokens()}")
            if not lim.simulate_denial or gyo_acyclic(Q + [e]):
                Q.append(e)
        elif op == "delq":
            e = biased(lambda: rng.choice(Q),
                       lambda e: [f for f in Q if f != e])
            lines.append(f"delq {e.tokens()}")
            rest = [f for f in Q if f != e]
            if not lim.simulate_denial or gyo_acyclic(rest):
                Q[:] = rest
        elif op == "setd":
            rels = [n for n in names if sum(f.rel == n for f in Q) <= 1]
            rel = rng.choice(rels)
            room = lim.max_d_tuples - (total_d() - len(D[rel]))
            k = rng.randint(0, max(0, min(room, 2 * lim.d_domain)))
            ts = {rand_tuple(rel, lim.d_domain) for _ in range(k)}
            D[rel] = ts
            body = " ".join(_fmt_tuple(t) for t in sorted(ts))
            lines.append(f"setd {rel}{' ' + body if body else ''}")
        elif op == "insd":
            rel = rng.choice(names)
            t = rand_tuple(rel, lim.d_domain)
            if t in D[rel] or total_d() >= lim.max_d_tuples:
                lines.append("ask")
                continue
            D[rel].add(t)
            lines.append(f"insd {rel} {' '.join(map(str, t))}")
        elif op == "deld":
            present = [(n, t) for n in names for t in sorted(D[n])]
            if not present:
                lines.append("ask")
                continue
            rel, t = rng.choice(present)
            D[rel].discard(t)
            lines.append(f"deld {rel} {' '.join(map(str, t))}")
        else:
            lines.append("ask")
    return lines
