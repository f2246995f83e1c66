"""Dense linear-map evaluation of circuits and ZX-diagrams.

Used as ground truth for every rewrite: two objects are considered equal when
their matrices agree up to a non-zero global scalar.
"""

from __future__ import annotations

import os
import string
from typing import Optional

import numpy as np

from zxopt.circuit import Circuit, GateKind
from zxopt.phase import to_radians
from zxopt.zxgraph import EdgeType, VertexKind, ZxDiagram

DEFAULT_QUBIT_CAP = 10
DEFAULT_WIRE_CAP = 12
DEFAULT_TOL = 1e-8

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_HU = np.array([[1, 1], [1, -1]], dtype=complex)  # unnormalized, scalars are irrelevant
_I = np.eye(2, dtype=complex)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_LETTERS = string.ascii_letters
_ZERO_RTOL = 1e-12


class OracleCapExceeded(ValueError):
    pass


def qubit_cap() -> int:
    return int(os.environ.get("ZXOPT_ORACLE_CAP", DEFAULT_QUBIT_CAP))


def wire_cap() -> int:
    return max(DEFAULT_WIRE_CAP, 2 * qubit_cap()) if "ZXOPT_ORACLE_CAP" in os.environ else DEFAULT_WIRE_CAP


def _zphase(p) -> np.ndarray:
    return np.diag([1, np.exp(1j * to_radians(p))])


def gate_matrix(kind: GateKind, p=None) -> np.ndarray:
    if kind is GateKind.H:
        return _H
    if kind is GateKind.ZPHASE:
        return _zphase(p)
    if kind is GateKind.XPHASE:
        return _H @ _zphase(p) @ _H
    if kind is GateKind.CNOT:
        return _CNOT
    return _CZ


def evaluate_circuit(c: Circuit, cap: Optional[int] = None) -> np.ndarray:
    """Unitary of ``c``; qubit 0 is the most significant bit."""
    cap = qubit_cap() if cap is None else cap
    n = c.n_qubits
    if n > cap:
        raise OracleCapExceeded(f"{n} qubits exceeds oracle cap of {cap}")
    dim = 2**n
    t = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in c.gates:
        m = gate_matrix(g.kind, g.phase)
        qs = list(g.qubits)
        k = len(qs)
        m = m.reshape((2,) * (2 * k))
        t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), qs))
        t = np.moveaxis(t, list(range(k)), qs)
    return t.reshape(dim, dim)


# --------------------------------------------------------------------------- #
# Diagram contraction


def _einsum(tensors, out_labels):
    """einsum over integer labels, remapped to letters for this call only."""
    letter = {}
    for _, labels in tensors:
        for lab in labels:
            if lab not in letter:
                letter[lab] = _LETTERS[len(letter)]
    spec = ",".join("".join(letter[lab] for lab in labels) for _, labels in tensors)
    spec += "->" + "".join(letter[lab] for lab in out_labels)
    return np.einsum(spec, *[arr for arr, _ in tensors])


def _network(d: ZxDiagram):
    kinds = d.kinds
    tensors = []

    def side(v):
        return _HU if kinds[v] == VertexKind.X else _I

    for v, k in kinds.items():
        if k != VertexKind.BOUNDARY:
            p = d.phases[v]
            if p:
                tensors.append((np.array([1, np.exp(1j * to_radians(p))]), (v,)))
    for u, v, t in d.edges():
        m = _HU if t == EdgeType.HADAMARD else _I
        if u == v:
            loop = side(u) @ m @ side(u)
            tensors.append((np.diag(loop).copy(), (u,)))
        else:
            tensors.append((side(u) @ m @ side(v), (u, v)))
    return tensors


def contract(tensors, open_labels):
    """Greedy variable elimination; every closed label is summed out."""
    tensors = list(tensors)
    open_set = set(open_labels)
    closed = {lab for _, labels in tensors for lab in labels} - open_set
    while closed:
        best = None
        for lab in closed:
            touching = [i for i, (_, labels) in enumerate(tensors) if lab in labels]
            result = set()
            for i in touching:
                result.update(tensors[i][1])
            result.discard(lab)
            size = len(result)
            if best is None or size < best[0]:
                best = (size, lab, touching, result)
        _, lab, touching, result = best
        out = tuple(sorted(result))
        parts = [tensors[i] for i in touching]
        merged = _einsum(parts, out)
        # magnitude the entries could reach without cancellation
        bound = 2.0 * float(np.prod([np.max(np.abs(t)) for t, _ in parts]))
        scale = np.max(np.abs(merged))
        if scale <= _ZERO_RTOL * bound:
            merged = np.zeros_like(merged)
        else:
            merged = merged / scale
        drop = set(touching)
        tensors = [t for i, t in enumerate(tensors) if i not in drop]
        tensors.append((merged, out))
        closed.discard(lab)
    if not tensors:
        return np.ones(())
    return _einsum(tensors, tuple(open_labels))


def evaluate_diagram(d: ZxDiagram, cap: Optional[int] = None) -> np.ndarray:
    """Matrix of shape ``2**len(outputs) x 2**len(inputs)``, scalar dropped."""
    cap = wire_cap() if cap is None else cap
    n_in, n_out = len(d.inputs), len(d.outputs)
    if n_in + n_out > cap:
        raise OracleCapExceeded(f"{n_in + n_out} boundary wires exceeds oracle cap of {cap}")
    open_labels = tuple(d.outputs) + tuple(d.inputs)
    t = contract(_network(d), open_labels)
    return np.asarray(t).reshape(2**n_out, 2**n_in)


def equal_up_to_scalar(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when ``a = lam * b`` for some non-zero ``lam``, within ``tol``.

    ``lam`` is read off the largest-magnitude entry of ``b``; the residual is
    measured relative to the largest entry of ``a``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        return True
    scale_a = np.max(np.abs(a)) if a.size else 0.0
    ib = np.argmax(np.abs(b)) if b.size else 0
    if scale_a == 0 or not b.size or b.flat[ib] == 0:
        return bool(scale_a == 0 and (not b.size or b.flat[ib] == 0))
    lam = a.flat[ib] / b.flat[ib]
    if lam == 0:
        return False
    return bool(np.max(np.abs(a - lam * b)) <= tol * scale_a)


def diagram_matches_circuit(d: ZxDiagram, c: Circuit, tol: float = DEFAULT_TOL) -> bool:
    return equal_up_to_scalar(evaluate_diagram(d), evaluate_circuit(c), tol)


def circuits_equivalent(a: Circuit, b: Circuit, tol: float = DEFAULT_TOL) -> bool:
    return equal_up_to_scalar(evaluate_circuit(a), evaluate_circuit(b), tol)
