import itertools
import random

import pytest

from dynhom.circuits import (
    AND,
    OR,
    Circuit,
    build_proof_tree,
    diff_on_bitflip,
    encode_instance,
    eval_circuit,
    flip,
    minimal_circuit,
    random_normal_form_circuit,
    reduction_script,
    validate_normal_form,
)
from dynhom.errors import (
    IndexOutOfRange,
    InputLengthMismatch,
    InvalidCircuit,
    InvalidDepth,
    InvalidShape,
    ParseError,
)
from dynhom.oracles import brute_hom, gyo_acyclic
from dynhom.script import Session


class TestValidate:
    def test_minimal_is_valid(self):
        assert validate_normal_form(minimal_circuit()) is None

    def test_and_fan_in(self):
        C = Circuit(1, ((OR, (2, 3)), (AND, (4,))), {2: (0,), 3: (0,), 4: (2,)})
        assert validate_normal_form(C).condition == "fan-in"

    def test_first_layer_and(self):
        C = Circuit(1, ((AND, (2,)), (OR, (3,)), (AND, (4,))),
                    {2: (0, 1), 3: (2,), 4: (3, 3)})
        assert validate_normal_form(C).condition == "first-or"

    def test_skipping_a_layer(self):
        C = Circuit(1, ((OR, (2, 3)), (AND, (4,))), {2: (0,), 3: (1,), 4: (2, 0)})
        assert validate_normal_form(C).condition == "layered"

    def test_repeated_kind(self):
        C = Circuit(1, ((OR, (2,)), (OR, (3,)), (AND, (4,))),
                    {2: (0,), 3: (2,), 4: (3, 3)})
        assert validate_normal_form(C).condition == "alternating"

    def test_wide_output(self):
        C = Circuit(1, ((OR, (2, 3)), (AND, (4, 5))),
                    {2: (0,), 3: (1,), 4: (2, 3), 5: (2, 3)})
        assert validate_normal_form(C).condition == "output-and"

    def test_invalid_circuit_refused(self):
        C = Circuit(1, ((OR, (2, 3)), (AND, (4,))), {2: (0,), 3: (0,), 4: (2,)})
        with pytest.raises(InvalidCircuit):
            eval_circuit(C, (1,))
        with pytest.raises(InvalidCircuit):
            encode_instance(C, (1,))


class TestEval:
    def test_minimal(self):
        C = minimal_circuit()
        assert eval_circuit(C, (1,)) is True
        assert eval_circuit(C, (0,)) is False

    def test_input_and_its_negation(self):
        C = minimal_circuit(((0,), (1,)))
        assert eval_circuit(C, (0,)) is False
        assert eval_circuit(C, (1,)) is False

    def test_length_mismatch(self):
        with pytest.raises(InputLengthMismatch):
            eval_circuit(minimal_circuit(), (1, 0))


class TestProofTree:
    def test_depth_two(self):
        Q = build_proof_tree(2)
        nodes = lambda rel: [e.nodes for e in Q.relation_edges(rel)]
        assert nodes("and_left") == [(0, 1)]
        assert nodes("and_right") == [(0, 2)]
        assert nodes("or") == [(1, 3), (2, 4)]
        assert nodes("one") == [(3,), (4,)]
        assert nodes("zero") == []
        assert gyo_acyclic(Q)

    def test_depth_four_shape(self):
        Q = build_proof_tree(4)
        # 1 + 2 + 2 + 4 + 4 nodes, a tree with one edge per non-root node
        assert Q.domain_size == 13
        assert len(Q) == 12 + 4
        assert gyo_acyclic(Q)

    @pytest.mark.parametrize("depth", [0, 1, 3, -2])
    def test_bad_depth(self, depth):
        with pytest.raises(InvalidDepth):
            build_proof_tree(depth)


class TestEncoding:
    def test_minimal_true_input(self):
        D = encode_instance(minimal_circuit(), (1,))
        assert D.relation("one") == [(0,)]
        assert D.relation("zero") == [(1,)]
        assert D.relation("or") == [(2, 0), (3, 0)]
        assert D.relation("and_left") == [(4, 2)]
        assert D.relation("and_right") == [(4, 3)]

    def test_reduction_on_minimal_circuit(self):
        C = minimal_circuit()
        Q = build_proof_tree(2)
        for x in [(0,), (1,)]:
            assert brute_hom(Q, encode_instance(C, x))[0] == eval_circuit(C, x)

    @pytest.mark.parametrize("seed", range(25))
    def test_reduction_agrees_with_evaluation(self, seed):
        rng = random.Random(seed)
        depth = rng.choice([2, 4])
        C = random_normal_form_circuit(rng.randint(1, 4), depth, rng.randint(2, 4), seed)
        Q = build_proof_tree(depth)
        for x in itertools.product((0, 1), repeat=C.n_inputs):
            assert brute_hom(Q, encode_instance(C, x))[0] == eval_circuit(C, x)


class TestBitFlip:
    def test_flip_changes_four_tuples(self):
        C = random_normal_form_circuit(4, 4, 3, seed=1)
        x = (0, 1, 1, 0)
        for i in range(4):
            removed, added = diff_on_bitflip(C, x, i)
            assert len(removed) == len(added) == 2
            D = encode_instance(C, x)
            for rel, t in removed:
                D.delete(rel, t)
            for rel, t in added:
                D.insert(rel, t)
            assert D == encode_instance(C, flip(x, i))

    def test_flip_twice_restores(self):
        C = minimal_circuit()
        removed, added = diff_on_bitflip(C, (1,), 0)
        back_removed, back_added = diff_on_bitflip(C, (0,), 0)
        assert (back_removed, back_added) == (added, removed)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            diff_on_bitflip(minimal_circuit(), (1,), 1)


class TestText:
    def test_round_trip(self):
        C = random_normal_form_circuit(5, 6, 4, seed=3)
        assert Circuit.from_text(C.to_text()) == C

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            Circuit.from_text("layer OR 2\n")
        with pytest.raises(ParseError) as err:
            Circuit.from_text("circuit 1 2\nlayer OR 2\nlayer XOR 1\n")
        assert err.value.line == 3
        with pytest.raises(ParseError):
            Circuit.from_text("circuit 1 3\nlayer OR 2\nlayer AND 1\n")


class TestGenerator:
    def test_deterministic(self):
        a = random_normal_form_circuit(6, 4, 5, seed=9)
        assert a == random_normal_form_circuit(6, 4, 5, seed=9)
        assert a != random_normal_form_circuit(6, 4, 5, seed=10)

    def test_always_normal_form(self):
        for seed in range(100):
            rng = random.Random(seed)
            C = random_normal_form_circuit(rng.randint(1, 16), rng.choice([2, 4, 6]),
                                           rng.randint(2, 13), seed)
            assert validate_normal_form(C) is None

    def test_positive_literal_makes_all_ones_true(self):
        for seed in range(30):
            C = random_normal_form_circuit(5, 4, 4, seed, positive_literal=True)
            assert eval_circuit(C, (1,) * 5)

    @pytest.mark.parametrize("args", [(1, 3, 2), (1, 4, 1), (0, 2, 2), (2, 0, 2)])
    def test_bad_shape(self, args):
        with pytest.raises(InvalidShape):
            random_normal_form_circuit(*args, seed=0)


def test_reduction_script_runs_through_the_driver():
    C = random_normal_form_circuit(3, 4, 3, seed=4)
    for x in itertools.product((0, 1), repeat=3):
        s = Session()
        out = []
        for line in reduction_script(C, x):
            out += s.execute(line)
        assert out[-1] == ("yes" if eval_circuit(C, x) else "no")
        assert s.denied == 0
