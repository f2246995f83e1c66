"""Search-based quantum circuit optimization over graph-like ZX-diagrams."""

from zxopt.circuit import Circuit, Gate, GateKind, basic_optimize, complexity, emit_circuit, parse_circuit
from zxopt.zxgraph import EdgeType, VertexKind, ZxDiagram, from_circuit, to_graph_like
from zxopt.rewrite import simplify_to_fixpoint, congruence_lc, congruence_pivot
from zxopt.extract import ExtractionStuck, extract_circuit

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "EdgeType",
    "ExtractionStuck",
    "Gate",
    "GateKind",
    "VertexKind",
    "ZxDiagram",
    "basic_optimize",
    "complexity",
    "congruence_lc",
    "congruence_pivot",
    "emit_circuit",
    "extract_circuit",
    "from_circuit",
    "parse_circuit",
    "simplify_to_fixpoint",
    "to_graph_like",
]
