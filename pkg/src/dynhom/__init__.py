"""Dynamic acyclicity and homomorphism maintenance for hypergraph queries."""

from .data import DataIndex
from .engine import HomEngine
from .errors import DynHomError
from .forest import DiffEvent, MaxSpanningForest, apply_change
from .hypergraph import Hyperedge, Hypergraph, Schema, edge
from .script import Session, run_script

__all__ = [
    "DataIndex", "DiffEvent", "DynHomError", "HomEngine", "Hyperedge",
    "Hypergraph", "MaxSpanningForest", "Schema", "Session", "apply_change",
    "edge", "run_script",
]
