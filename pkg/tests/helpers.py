"""Invariant checks shared by the unit and acceptance suites."""

import itertools
from collections import Counter

from dynhom.forest import MaxSpanningForest, apply_change
from dynhom.hypergraph import Hyperedge, Hypergraph
from dynhom.oracles import brute_hom, kruskal_msf_weight


def forest_violations(F: MaxSpanningForest, H: Hypergraph) -> list[str]:
    """Structural problems of the maintained forest, recomputed from scratch."""
    out = []
    nodes = H.sorted_edges()
    if set(F.nodes()) != set(nodes):
        out.append("forest nodes differ from hyperedges")
        return out
    fedges = F.edges()
    comps = F.components()
    if len(fedges) != len(nodes) - len(comps):
        out.append("forest contains a cycle")
    recount = Counter()
    for fe in fedges:
        shared = fe.u.node_set & fe.v.node_set
        if not shared or shared != fe.shared:
            out.append(f"{fe} is not a wg edge")
        recount[(fe.u, shared)] += 1
        recount[(fe.v, shared)] += 1
    if +recount != +Counter(F.a_degrees()):
        out.append("a-degree bookkeeping drifted")
    if any(n > 2 for n in recount.values()):
        out.append("invariant (*) broken")
    r = H.schema.r
    if any(F.degree(e) > 2 * r for e in nodes):
        out.append("forest degree above 2r")
    where = {e: i for i, comp in enumerate(comps) for e in comp}
    for x, y in itertools.combinations(nodes, 2):
        if x.node_set & y.node_set and where[x] != where[y]:
            out.append(f"{x} and {y} share nodes but are not connected")
            break
    if F.total_weight != sum(fe.w for fe in fedges):
        out.append("total weight drifted")
    if F.total_weight != kruskal_msf_weight(H):
        out.append("forest is not of maximal weight")
    return out


def replay(schema, lines, domain=None):
    """Apply the insq/delq lines of a script to a bare hypergraph + forest."""
    H = Hypergraph(schema, domain)
    F = MaxSpanningForest(H)
    for line in lines:
        tok = line.split()
        if tok[0] in ("insq", "delq"):
            e = Hyperedge(tok[1], tuple(map(int, tok[2:])))
            yield H, F, apply_change(H, F, tok[0][:3], e)


def subtree_brute(eng, F, root, x1, x2=None, y2=None):
    """Images of x1 extending to subtree(x1) minus subtree(x2), by search."""
    below = F.subtree(root, x1)
    cut = F.subtree(root, x2) if x2 is not None else set()
    edges = sorted(below - cut, key=F.key)
    pins = [(x2, y2)] if x2 is not None else []
    out = set()
    for t in eng.data.tuples[x1.rel]:
        fixed = {}
        ok = True
        for e, img in [(x1, t)] + pins:
            for v, val in zip(e.nodes, img):
                if fixed.setdefault(v, val) != val:
                    ok = False
        if not ok:
            continue
        if x1 == x2 or brute_hom(edges, eng.data, fixed)[0]:
            out.add(t)
    return out
