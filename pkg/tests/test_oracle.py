import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from zxopt.circuit import CNOT, CZ, Circuit, GateKind, H, XPhase, ZPhase
from zxopt.oracle import (
    OracleCapExceeded,
    _einsum,
    _network,
    circuits_equivalent,
    equal_up_to_scalar,
    evaluate_circuit,
    evaluate_diagram,
)
from zxopt.zxgraph import S_EDGE, VertexKind, ZxDiagram, from_circuit, to_graph_like

from conftest import small_circuits


def _kron_unitary(c: Circuit) -> np.ndarray:
    """Independent reference: embed each gate with explicit Kronecker products."""
    n = c.n_qubits
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    x, z = np.array([[0, 1], [1, 0]]), np.diag([1, -1])

    def embed(ops: dict) -> np.ndarray:
        out = np.eye(1)
        for q in range(n):
            out = np.kron(out, ops.get(q, np.eye(2)))
        return out

    u = np.eye(2**n, dtype=complex)
    for g in c.gates:
        if g.kind is GateKind.H:
            m = embed({g.qubits[0]: h})
        elif g.kind is GateKind.ZPHASE:
            m = embed({g.qubits[0]: np.diag([1, cmath.exp(1j * math.pi * float(g.phase))])})
        elif g.kind is GateKind.XPHASE:
            rz = np.diag([1, cmath.exp(1j * math.pi * float(g.phase))])
            m = embed({g.qubits[0]: h @ rz @ h})
        elif g.kind is GateKind.CNOT:
            a, b = g.qubits
            m = embed({a: p0}) + embed({a: p1, b: x})
        else:
            a, b = g.qubits
            m = embed({a: p0}) + embed({a: p1, b: z})
        u = m @ u
    return u


def test_empty_circuit_is_identity():
    assert np.allclose(evaluate_circuit(Circuit(1, ())), np.eye(2))


def test_hadamard_matrix():
    # [PAPER] H = 1/sqrt(2) [[1, 1], [1, -1]]
    assert np.allclose(evaluate_circuit(Circuit(1, (H(0),))), np.array([[1, 1], [1, -1]]) / math.sqrt(2))


def test_cnot_matrix():
    # [PAPER] CNOT with control on the first qubit
    expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.allclose(evaluate_circuit(Circuit(2, (CNOT(0, 1),))), expected)


def test_phase_matrix():
    # [PAPER] R_alpha = diag(1, e^{i alpha})
    u = evaluate_circuit(Circuit(1, (ZPhase(0, Fraction(1, 3)),)))
    assert np.allclose(u, np.diag([1, cmath.exp(1j * math.pi / 3)]))


def test_evaluate_circuit_matches_kronecker_reference():
    extra = Circuit(3, (XPhase(2, Fraction(1, 4)), CZ(0, 2), CNOT(2, 0), H(1)))
    for c in small_circuits(25, 5, 30, seed=21) + [extra]:
        assert np.allclose(evaluate_circuit(c), _kron_unitary(c), atol=1e-10)


def _single_spider(kind: VertexKind, p) -> ZxDiagram:
    d = ZxDiagram()
    i = d.add_vertex(VertexKind.BOUNDARY)
    v = d.add_spider(p, kind)
    o = d.add_vertex(VertexKind.BOUNDARY)
    d._set(i, v, S_EDGE)
    d._set(v, o, S_EDGE)
    d.inputs, d.outputs = [i], [o]
    return d


def test_spider_semantics():
    assert equal_up_to_scalar(evaluate_diagram(_single_spider(VertexKind.Z, 0)), np.eye(2))
    alpha = Fraction(2, 7)
    u = evaluate_diagram(_single_spider(VertexKind.Z, alpha))
    assert equal_up_to_scalar(u, np.diag([1, cmath.exp(1j * math.pi * 2 / 7)]))
    # [PAPER] X spider with phase pi is Pauli X up to scalar
    assert equal_up_to_scalar(evaluate_diagram(_single_spider(VertexKind.X, 1)), np.array([[0, 1], [1, 0]]))


def test_equal_up_to_scalar_examples():
    m = np.array([[1, 2j], [0.5, -1]])
    assert equal_up_to_scalar(m, m)
    assert equal_up_to_scalar(m, cmath.exp(1j * math.pi / 7) * m)
    assert not equal_up_to_scalar(np.eye(2), np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        equal_up_to_scalar(np.eye(2), np.eye(4))


def test_equal_up_to_scalar_symmetric_and_reflexive(rng):
    for _ in range(50):
        a = np.array([[complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(4)] for _ in range(4)])
        noise = 1e-9 if rng.random() < 0.5 else 1e-3
        b = (2 - 1j) * a + noise * np.eye(4)
        assert equal_up_to_scalar(a, a, 0.0)
        assert equal_up_to_scalar(a, b) == equal_up_to_scalar(b, a)


def test_from_circuit_and_graph_like_preserve_semantics():
    for c in small_circuits(40, 6, 50, seed=5):
        u = evaluate_circuit(c)
        d = from_circuit(c)
        assert equal_up_to_scalar(evaluate_diagram(d), u)
        assert equal_up_to_scalar(evaluate_diagram(to_graph_like(d)), u)


def test_contraction_order_does_not_matter():
    # one-shot einsum as an independent contraction order
    for c in small_circuits(15, 3, 12, seed=8):
        d = from_circuit(c)
        labels = tuple(d.outputs) + tuple(d.inputs)
        if len({l for _, ls in _network(d) for l in ls}) > 52:
            continue
        direct = _einsum(_network(d), labels).reshape(evaluate_diagram(d).shape)
        greedy = evaluate_diagram(d)
        assert equal_up_to_scalar(direct, greedy, 1e-10)


def test_caps_are_enforced():
    with pytest.raises(OracleCapExceeded):
        evaluate_circuit(Circuit(3, ()), cap=2)
    with pytest.raises(OracleCapExceeded):
        evaluate_diagram(from_circuit(Circuit(3, ())), cap=4)
    assert not circuits_equivalent(Circuit(1, (H(0),)), Circuit(1, ()))
