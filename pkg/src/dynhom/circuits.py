"""Layered semi-unbounded circuits, proof trees and their hypergraph encoding.

Gate numbering is global: input ``x_i`` is gate ``i``, its negated partner is
gate ``n + i``, and the gates of layers ``1..depth`` follow consecutively.
A circuit in normal form accepts its input exactly when the proof tree of
its depth maps homomorphically into the encoded circuit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .data import DataIndex
from .errors import (
    IndexOutOfRange,
    InputLengthMismatch,
    InvalidCircuit,
    InvalidDepth,
    InvalidShape,
    ParseError,
)
from .hypergraph import Hyperedge, Hypergraph, Schema

CIRCUIT_SCHEMA = Schema((("zero", 1), ("one", 1), ("or", 2),
                         ("and_left", 2), ("and_right", 2)))

OR, AND = "OR", "AND"


@dataclass(frozen=True)
class Circuit:
    n_inputs: int
    # per layer: (kind, gate ids)
    layers: tuple[tuple[str, tuple[int, ...]], ...]
    # per non-input gate: ordered predecessors
    wires: dict

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def n_gates(self) -> int:
        return 2 * self.n_inputs + sum(len(g) for _, g in self.layers)

    @property
    def output(self) -> int:
        return self.layers[-1][1][-1]

    def kind(self, gate: int) -> str:
        if gate < 2 * self.n_inputs:
            return "INPUT"
        for k, gates in self.layers:
            if gate in gates:
                return k
        raise KeyError(gate)

    def to_text(self) -> str:
        lines = [f"circuit {self.n_inputs} {self.depth}"]
        lines += [f"layer {k} {len(g)}" for k, g in self.layers]
        for _, gates in self.layers:
            for g in gates:
                lines += [f"wire {g} {p}" for p in self.wires.get(g, ())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        n_inputs = depth = None
        kinds: list[tuple[str, int]] = []
        wires: dict[int, list[int]] = {}
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            try:
                if line[0] == "circuit" and len(line) == 3 and n_inputs is None:
                    n_inputs, depth = int(line[1]), int(line[2])
                elif line[0] == "layer" and len(line) == 3 and line[1] in (OR, AND):
                    kinds.append((line[1], int(line[2])))
                elif line[0] == "wire" and len(line) == 3:
                    wires.setdefault(int(line[1]), []).append(int(line[2]))
                else:
                    raise ParseError(f"unexpected {raw.strip()!r}", no)
            except ValueError:
                raise ParseError(f"bad number in {raw.strip()!r}", no) from None
        if n_inputs is None:
            raise ParseError("missing circuit header")
        if depth != len(kinds):
            raise ParseError(f"header says depth {depth}, found {len(kinds)} layers")
        layers = []
        nxt = 2 * n_inputs
        for k, count in kinds:
            layers.append((k, tuple(range(nxt, nxt + count))))
            nxt += count
        return cls(n_inputs, tuple(layers),
                   {g: tuple(ps) for g, ps in wires.items()})


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str


def validate_normal_form(C: Circuit) -> Optional[Violation]:
    """None when ``C`` is in normal form, else the first broken condition."""
    inputs = range(2 * C.n_inputs)
    below = set(inputs)
    for i, (kind, gates) in enumerate(C.layers, 1):
        for g in gates:
            for p in C.wires.get(g, ()):
                if p not in below:
                    return Violation("layered",
                                     f"gate {g} of layer {i} reads gate {p}")
        below = set(gates)
    known = set(inputs) | {g for _, gs in C.layers for g in gs}
    stray = sorted(set(C.wires) - known)
    if stray:
        return Violation("layered", f"wires for unknown gate {stray[0]}")
    for i, (kind, gates) in enumerate(C.layers, 1):
        if kind not in (OR, AND) or not gates:
            return Violation("homogeneous", f"layer {i} is not a gate layer")
    if not C.layers or C.layers[0][0] != OR:
        return Violation("first-or", "the first layer must be OR gates")
    for i in range(1, len(C.layers)):
        if C.layers[i][0] == C.layers[i - 1][0]:
            return Violation("alternating", f"layers {i} and {i + 1} agree")
    if C.layers[-1][0] != AND or len(C.layers[-1][1]) != 1:
        return Violation("output-and", "the output layer must be one AND gate")
    for kind, gates in C.layers:
        for g in gates:
            fan = len(C.wires.get(g, ()))
            if kind == AND and fan != 2:
                return Violation("fan-in", f"AND gate {g} has fan-in {fan}")
            if kind == OR and fan < 1:
                return Violation("fan-in", f"OR gate {g} has no inputs")
    return None


def _require_valid(C: Circuit) -> None:
    v = validate_normal_form(C)
    if v is not None:
        raise InvalidCircuit(f"{v.condition}: {v.detail}")


def eval_circuit(C: Circuit, x: Sequence[int]) -> bool:
    _require_valid(C)
    if len(x) != C.n_inputs:
        raise InputLengthMismatch(f"expected {C.n_inputs} bits, got {len(x)}")
    value = {}
    for i, b in enumerate(x):
        value[i] = bool(b)
        value[C.n_inputs + i] = not b
    for kind, gates in C.layers:
        combine = any if kind == OR else all
        for g in gates:
            value[g] = combine(value[p] for p in C.wires[g])
    return value[C.output]


def build_proof_tree(depth: int) -> Hypergraph:
    """The complete alternating AND/OR tree with constant-1 leaves.

    Nodes are numbered breadth first from the AND root 0.
    """
    if depth < 2 or depth % 2:
        raise InvalidDepth(f"depth must be even and >= 2, got {depth}")
    edges = []
    counter = 1
    level = [0]
    for layer in range(depth, 0, -1):
        nxt = []
        if layer % 2 == 0:
            for a in level:
                left, right = counter, counter + 1
                counter += 2
                edges += [Hyperedge("and_left", (a, left)),
                          Hyperedge("and_right", (a, right))]
                nxt += [left, right]
        else:
            for o in level:
                child = counter
                counter += 1
                edges.append(Hyperedge("or", (o, child)))
                nxt.append(child)
        level = nxt
    edges += [Hyperedge("one", (leaf,)) for leaf in level]
    return Hypergraph(CIRCUIT_SCHEMA, counter, edges)


def _input_tuples(C: Circuit, x) -> set[tuple[str, tuple[int]]]:
    out = set()
    for i, b in enumerate(x):
        pos, neg = i, C.n_inputs + i
        out.add(("one" if b else "zero", (pos,)))
        out.add(("zero" if b else "one", (neg,)))
    return out


def encode_instance(C: Circuit, x: Sequence[int]) -> DataIndex:
    """The circuit with input ``x`` as a data hypergraph, one element per gate."""
    _require_valid(C)
    if len(x) != C.n_inputs:
        raise InputLengthMismatch(f"expected {C.n_inputs} bits, got {len(x)}")
    D = DataIndex(CIRCUIT_SCHEMA, C.n_gates)
    for kind, gates in C.layers:
        for g in gates:
            preds = C.wires[g]
            if kind == AND:
                D.tuples["and_left"].add((g, preds[0]))
                D.tuples["and_right"].add((g, preds[1]))
            else:
                for p in preds:
                    D.tuples["or"].add((g, p))
    for rel, t in _input_tuples(C, x):
        D.tuples[rel].add(t)
    return D


def flip(x: Sequence[int], i: int) -> tuple[int, ...]:
    return tuple(int(not b) if j == i else int(b) for j, b in enumerate(x))


def diff_on_bitflip(C: Circuit, x: Sequence[int], i: int):
    """Data tuples removed and added when bit ``i`` of ``x`` flips."""
    if not 0 <= i < C.n_inputs:
        raise IndexOutOfRange(f"bit {i} outside 0..{C.n_inputs - 1}")
    if len(x) != C.n_inputs:
        raise InputLengthMismatch(f"expected {C.n_inputs} bits, got {len(x)}")
    before = _input_tuples(C, x)
    after = _input_tuples(C, flip(x, i))
    return sorted(before - after), sorted(after - before)


def random_normal_form_circuit(n_inputs: int, depth: int, width: int,
                               seed: int, max_or_fanin: int = 3,
                               positive_literal: bool = False) -> Circuit:
    """A random circuit in normal form.

    Every non-output layer has ``width`` gates.  With ``positive_literal``
    each first-layer OR gate reads at least one un-negated input.
    """
    if depth < 2 or depth % 2 or width < 2 or n_inputs < 1:
        raise InvalidShape(
            f"need even depth >= 2, width >= 2, inputs >= 1; got "
            f"{n_inputs=}, {depth=}, {width=}")
    rng = random.Random(seed)
    prev = list(range(2 * n_inputs))
    nxt = 2 * n_inputs
    layers, wires = [], {}
    for layer in range(1, depth + 1):
        kind = OR if layer % 2 else AND
        count = 1 if layer == depth else width
        gates = tuple(range(nxt, nxt + count))
        nxt += count
        for g in gates:
            if kind == AND:
                wires[g] = tuple(rng.sample(prev, 2))
            else:
                k = rng.randint(1, min(max_or_fanin, len(prev)))
                preds = rng.sample(prev, k)
                if layer == 1 and positive_literal and all(
                        p >= n_inputs for p in preds):
                    preds[0] = rng.randrange(n_inputs)
                    preds = list(dict.fromkeys(preds))
                wires[g] = tuple(preds)
        layers.append((kind, gates))
        prev = list(gates)
    return Circuit(n_inputs, tuple(layers), wires)


def minimal_circuit(or_inputs=((0,), (0,))) -> Circuit:
    """One input, two OR gates over the given inputs, one output AND."""
    wires = {2: tuple(or_inputs[0]), 3: tuple(or_inputs[1]), 4: (2, 3)}
    return Circuit(1, ((OR, (2, 3)), (AND, (4,))), wires)


def reduction_script(C: Circuit, x: Sequence[int]) -> list[str]:
    """Driver commands loading the proof tree as query and ``C(x)`` as data."""
    Q = build_proof_tree(C.depth)
    D = encode_instance(C, x)
    lines = [f"schema {CIRCUIT_SCHEMA}", f"domq {Q.domain_size}",
             f"domd {D.domain_size}"]
    for rel in CIRCUIT_SCHEMA.names:
        lines += [f"insd {rel} {' '.join(map(str, t))}" for t in D.relation(rel)]
    lines += [f"insq {e.tokens()}" for e in Q.sorted_edges()]
    lines.append("ask")
    return lines
