import itertools

import pytest

from dynhom.data import DataIndex
from dynhom.engine import HomEngine
from dynhom.errors import (
    DiffInconsistentWithForest,
    MalformedImage,
    NotAcyclic,
    NotDescendant,
    NotSameComponent,
    SelfJoinPresent,
)
from dynhom.forest import DiffEvent, MaxSpanningForest, apply_change
from dynhom.hypergraph import Hypergraph, Schema, edge
from dynhom.oracles import ScriptLimits, brute_hom, random_change_script, scratch_messages
from dynhom.script import Session

from helpers import subtree_brute

SCHEMA = Schema.parse("E/2 F/1 G/3")
x, y, z, w = 0, 1, 2, 3
XY, YZ = edge("E", x, y), edge("E", y, z)


def setup(q_edges, tuples, schema=SCHEMA):
    Q = Hypergraph(schema)
    F = MaxSpanningForest(Q)
    for e in q_edges:
        apply_change(Q, F, "ins", e)
    D = DataIndex(schema, tuples=tuples)
    return Q, F, D, HomEngine.attach(Q, F, D)


class TestAttach:
    def test_empty_query(self):
        assert setup([], {})[3].answer()

    def test_path_query(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2), (2, 3)]})
        assert eng.answer()

    def test_path_query_without_image(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2)]})
        assert not eng.answer()

    def test_cyclic_query_refused(self):
        Q = Hypergraph(SCHEMA)
        F = MaxSpanningForest(Q)
        for e in [edge("E", 0, 1), edge("E", 1, 2), edge("E", 2, 0)]:
            apply_change(Q, F, "ins", e)
        with pytest.raises(NotAcyclic):
            HomEngine(Q, F, DataIndex(SCHEMA))


class TestForestDiffs:
    def test_empty_diff_is_identity(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2), (2, 3)]})
        before = (eng.answer(), dict(eng.messages))
        eng.apply_forest_diff(DiffEvent())
        assert (eng.answer(), eng.messages) == before

    def test_grow_and_shrink(self):
        Q, F, D, eng = setup([XY], {"E": [(1, 2), (2, 3)]})
        diff = apply_change(Q, F, "ins", YZ)
        eng.apply_forest_diff(diff)
        assert eng.answer()
        # a leaf's outgoing message is all of its data images
        assert eng.message(YZ, XY) == [(1, 2), (2, 3)]
        assert eng.message(XY, YZ) == [(1, 2), (2, 3)]
        assert eng.valid_assignments(YZ, YZ) == {(2, 3)}
        assert eng.valid_assignments(XY, XY) == {(1, 2)}
        diff = apply_change(Q, F, "del", YZ)
        assert len(diff.removed) == 1
        eng.apply_forest_diff(diff)
        assert eng.answer()
        assert eng.valid_assignments(XY, XY) == {(1, 2), (2, 3)}
        assert eng.messages == {}

    def test_inconsistent_diff(self):
        Q, F, D, eng = setup([XY, YZ], {"E": [(1, 2)]})
        (fe,) = F.edges()
        with pytest.raises(DiffInconsistentWithForest):
            eng.apply_forest_diff(DiffEvent(added=[fe]))
        eng2 = setup([XY], {})[3]
        with pytest.raises(DiffInconsistentWithForest):
            eng2.apply_forest_diff(DiffEvent(removed=[fe]))


class TestQueries:
    def test_single_edge(self):
        *_, eng = setup([XY], {"E": [(1, 2)]})
        assert eng.valid_assignments(XY, XY) == {(1, 2)}

    def test_chain(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2), (2, 3)]})
        assert eng.valid_assignments(XY, YZ) == {(1, 2), (2, 3)}
        assert eng.valid_assignments(XY, XY) == {(1, 2)}

    def test_no_data_for_relation(self):
        *_, eng = setup([XY, edge("F", y)], {"E": [(1, 2)]})
        assert eng.valid_assignments(XY, edge("F", y)) == frozenset()

    def test_h_query_base_case(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2), (2, 3)]})
        assert eng.h_query(XY, YZ, YZ, (2, 3)) == {(2, 3)}

    def test_h_query_chain(self):
        *_, eng = setup([XY, YZ], {"E": [(1, 2), (2, 3)]})
        assert eng.h_query(XY, XY, YZ, (2, 3)) == {(1, 2)}
        assert eng.h_query(XY, XY, YZ, (1, 2)) == frozenset()

    def test_h_query_errors(self):
        *_, eng = setup([XY, YZ, edge("F", 7)], {"E": [(1, 2), (2, 3)]})
        with pytest.raises(MalformedImage):
            eng.h_query(XY, XY, YZ, (9, 9))
        with pytest.raises(NotDescendant):
            eng.h_query(XY, YZ, XY, (1, 2))
        with pytest.raises(NotSameComponent):
            eng.h_query(XY, XY, edge("F", 7), (1,))

    def test_two_components(self):
        *_, eng = setup([XY, edge("F", 5)], {"E": [(1, 2)]})
        assert not eng.answer()

    def test_self_loop_query(self):
        Q, F, D, eng = setup([edge("E", x, x)], {"E": [(1, 2)]})
        assert not eng.answer()
        eng.change_d_tuple("ins", "E", (3, 3))
        assert eng.answer()


class TestDataChanges:
    def test_unused_relation(self):
        Q, F, D, eng = setup([XY], {"E": [(1, 2)], "G": [(1, 1, 1)]})
        msgs = dict(eng.messages)
        eng.replace_relation_d("F", [(4,)])
        eng.change_d_tuple("del", "G", (1, 1, 1))
        assert eng.answer() and eng.messages == msgs

    def test_replace_relation(self):
        Q, F, D, eng = setup([XY, edge("F", y)], {"E": [(1, 2)]})
        eng.replace_relation_d("F", [(2,)])
        assert eng.answer()
        eng.replace_relation_d("F", [(1,)])
        assert not eng.answer()

    def test_replace_with_current_contents_is_identity(self):
        Q, F, D, eng = setup([XY, edge("F", y)], {"E": [(1, 2)], "F": [(2,)]})
        before = dict(eng.messages)
        eng.replace_relation_d("F", [(2,)])
        assert eng.messages == before and eng.answer()

    def test_self_join(self):
        Q, F, D, eng = setup([XY, YZ], {"E": [(1, 2)]})
        with pytest.raises(SelfJoinPresent):
            eng.replace_relation_d("E", [])

    def test_tuple_changes(self):
        Q, F, D, eng = setup([XY, YZ], {"E": [(1, 2)]})
        assert not eng.answer()
        eng.change_d_tuple("ins", "E", (2, 3))
        assert eng.answer()
        eng.change_d_tuple("del", "E", (1, 2))
        assert not eng.answer()


def test_isolated_query_nodes_need_a_data_element():
    s = Session()
    for line in ["schema E/2", "domq 3", "domd 0", "insq E 0 1"]:
        s.execute(line)
    # node 2 is isolated and there is nothing to send it to
    assert not s.engine.answer()
    assert brute_hom(s.query, s.data)[0] is False
    s.execute("domq 2")
    assert s.engine.answer() is False  # still no E tuples
    s.execute("domd 1")
    s.execute("insd E 0 0")
    assert s.engine.answer()


# -- randomized properties ---------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_engine_tracks_oracles(seed):
    lim = ScriptLimits(q_domain=5, d_domain=3, max_q_edges=7, max_d_tuples=14,
                       weights={"insq": 5, "delq": 3, "insd": 2, "deld": 2, "ask": 1})
    s = Session()
    for line in random_change_script(SCHEMA, 120, lim, seed):
        s.execute(line)
        eng, F = s.engine, s.forest
        adjacency = {e: set(F.neighbors(e)) for e in F.nodes()}
        assert eng.messages == scratch_messages(adjacency, s.data)
        assert eng.answer() == brute_hom(s.query, s.data)[0]
        for comp in F.components():
            root = comp[0]
            for x1 in comp:
                valid = eng.valid_assignments(root, x1)
                assert valid == subtree_brute(eng, F, root, x1)
                # every node sees the same whole-component verdict
                assert bool(eng.valid_assignments(x1, x1)) == bool(
                    eng.valid_assignments(root, root))
                leaves = [l for l in F.subtree(root, x1)
                          if l != root and len(F.neighbors(l)) == 1 or l == x1 == root
                          and not F.neighbors(l)]
                for leaf in leaves:
                    union = set()
                    for y2 in eng.candidates(leaf):
                        union |= eng.h_query(root, x1, leaf, y2)
                    assert union == valid


def test_h_query_matches_brute_force_on_a_branching_tree():
    q = [edge("G", 0, 1, 2), edge("E", 0, 3), edge("E", 1, 4), edge("E", 4, 5),
         edge("F", 2)]
    data = {"G": list(itertools.product(range(3), repeat=3))[::2],
            "E": [(0, 1), (1, 2), (2, 0), (1, 1)], "F": [(0,), (2,)]}
    Q, F, D, eng = setup(q, data)
    for root in F.nodes():
        for x1 in F.nodes():
            for x2 in F.subtree(root, x1):
                for y2 in sorted(eng.candidates(x2)):
                    expected = subtree_brute(eng, F, root, x1, x2, y2)
                    assert eng.h_query(root, x1, x2, y2) == expected, (root, x1, x2, y2)
