"""Exception hierarchy.

Every error carries a short ``kind`` tag; the script driver renders failures
as ``error <kind>``.
"""


class DynHomError(Exception):
    kind = "error"


# hypergraph

class UnknownRelation(DynHomError):
    kind = "unknown-relation"


class ArityMismatch(DynHomError):
    kind = "arity-mismatch"


class DuplicateEdge(DynHomError):
    kind = "duplicate-edge"


class EdgeNotPresent(DynHomError):
    kind = "edge-not-present"


class NodeOutOfDomain(DynHomError):
    kind = "node-out-of-domain"


# forest

class NodeAlreadyInForest(DynHomError):
    kind = "node-already-in-forest"


class HyperedgeMissingFromHypergraph(DynHomError):
    kind = "hyperedge-missing"


class NodeNotInForest(DynHomError):
    kind = "node-not-in-forest"


class NotSameComponent(DynHomError):
    kind = "not-same-component"


# engine

class NotAcyclic(DynHomError):
    kind = "not-acyclic"


class DiffInconsistentWithForest(DynHomError):
    kind = "diff-inconsistent"


class NotDescendant(DynHomError):
    kind = "not-descendant"


class MalformedImage(DynHomError):
    kind = "malformed-image"


class SelfJoinPresent(DynHomError):
    kind = "self-join"


class DuplicateTuple(DynHomError):
    kind = "duplicate-tuple"


class TupleNotPresent(DynHomError):
    kind = "tuple-not-present"


class ElementOutOfDomain(DynHomError):
    kind = "element-out-of-domain"


# circuits

class InvalidCircuit(DynHomError):
    kind = "invalid-circuit"


class InvalidDepth(DynHomError):
    kind = "invalid-depth"


class InvalidShape(DynHomError):
    kind = "invalid-shape"


class InputLengthMismatch(DynHomError):
    kind = "input-length"


class IndexOutOfRange(DynHomError, IndexError):
    kind = "index-out-of-range"


# script driver

class ParseError(DynHomError):
    kind = "parse"

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        msg = super().__str__()
        return f"line {self.line}: {msg}" if self.line is not None else msg


class StateError(DynHomError):
    kind = "state"
