"""Circuit extraction from graph-like diagrams with generalized flow.

Works from the outputs towards the inputs. The frontier holds, per qubit,
the spider currently attached to that output. Each round peels Hadamards,
phases and frontier CZs off into gates, then uses GF(2) row operations on the
frontier/neighbour biadjacency matrix (one CNOT per row operation) until some
frontier spider has a single neighbour it can be advanced to.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from zxopt.circuit import CNOT, CZ, Circuit, Gate, GateKind, H, ZPhase
from zxopt.zxgraph import H_EDGE, S_EDGE, EdgeType, VertexKind, ZxDiagram, pivot_graph


class ExtractionStuck(RuntimeError):
    """No frontier progress is possible; carries the frontier at the failure point."""

    def __init__(self, message: str, frontier: Optional[dict[int, int]] = None):
        super().__init__(message)
        self.frontier = dict(frontier or {})


@dataclass(frozen=True)
class ExtractionReport:
    cnot_count: int
    cz_count: int
    h_count: int
    phase_count: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.cnot_count, self.cz_count, self.h_count, self.phase_count)


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _Extractor:
    def __init__(self, d: ZxDiagram):
        if len(d.inputs) != len(d.outputs):
            raise ExtractionStuck("diagram is not square", {})
        self.g = d.copy()
        self.n = len(d.outputs)
        self.gates: list[Gate] = []  # collected output-first
        self.input_set = set(self.g.inputs)
        self.frontier: list[int] = []
        for q, o in enumerate(self.g.outputs):
            (v,) = self.g.adj[o]
            if self.g.kinds[v] == VertexKind.BOUNDARY:
                # bare wire; give it a spider so the loop treats all qubits alike
                m = self.g.adj[o][v]
                self.g._set(o, v, (0, 0))
                z = self.g.add_spider()
                self.g._set(o, z, S_EDGE)
                self.g._set(z, v, m)
                v = z
            self.frontier.append(v)

    def _state(self) -> dict[int, int]:
        return dict(enumerate(self.frontier))

    def _is_boundary(self, v: int) -> bool:
        return self.g.kinds[v] == VertexKind.BOUNDARY

    def _spider_nbrs(self, v: int) -> list[int]:
        kinds = self.g.kinds
        return [w for w in self.g.adj[v] if kinds[w] != VertexKind.BOUNDARY]

    def _peel(self) -> None:
        g, gates = self.g, self.gates
        for q, v in enumerate(self.frontier):
            o = g.outputs[q]
            if g.adj[o][v] == H_EDGE:
                gates.append(H(q))
                g._set(o, v, S_EDGE)
            p = g.phases[v]
            if p:
                gates.append(ZPhase(q, p))
                g.phases[v] = Fraction(0)
        where = {v: q for q, v in enumerate(self.frontier)}
        for q, v in enumerate(self.frontier):
            for w in sorted(g.adj[v], key=lambda x: where.get(x, -1)):
                r = where.get(w)
                if r is not None and r > q:
                    if g.adj[v][w] != H_EDGE:
                        raise ExtractionStuck("non-Hadamard edge inside the frontier", self._state())
                    gates.append(CZ(q, r))
                    g._set(v, w, (0, 0))

    def _detach_inputs(self) -> bool:
        """Split input wires off frontier spiders that still have spider neighbours.

        Returns True when every frontier spider touches nothing but its wires.
        """
        g = self.g
        done = True
        for v in self.frontier:
            nbrs = self._spider_nbrs(v)
            if not nbrs:
                continue
            done = False
            for b in [w for w in g.adj[v] if w in self.input_set]:
                m = g.adj[v][b]
                g._set(v, b, (0, 0))
                z = g.add_spider()
                g._set(v, z, H_EDGE)
                g._set(z, b, H_EDGE if m == S_EDGE else S_EDGE)
        return done

    def _matrix(self):
        rows = [q for q, v in enumerate(self.frontier) if self._spider_nbrs(v)]
        cols = sorted({w for q in rows for w in self._spider_nbrs(self.frontier[q])})
        index = {w: i for i, w in enumerate(cols)}
        bits = {}
        for q in rows:
            mask = 0
            for w in self._spider_nbrs(self.frontier[q]):
                mask |= 1 << index[w]
            bits[q] = mask
        return rows, cols, bits

    def _write_back(self, rows, cols, old, new) -> None:
        g = self.g
        for q in rows:
            diff = old[q] ^ new[q]
            if not diff:
                continue
            v = self.frontier[q]
            for i, w in enumerate(cols):
                if diff >> i & 1:
                    g.toggle_hadamard(v, w)

    def _eliminate(self, rows, cols, bits) -> dict[int, int]:
        """Gauss-Jordan over GF(2); row ``dst ^= src`` emits CNOT(dst, src)."""
        new = dict(bits)
        order = list(rows)
        top = 0
        for c in range(len(cols)):
            bit = 1 << c
            pivot = next((i for i in range(top, len(order)) if new[order[i]] & bit), None)
            if pivot is None:
                continue
            order[top], order[pivot] = order[pivot], order[top]
            src = order[top]
            for dst in rows:
                if dst != src and new[dst] & bit:
                    new[dst] ^= new[src]
                    self.gates.append(CNOT(dst, src))
            top += 1
            if top == len(order):
                break
        return new

    def _advance(self, rows, cols, bits) -> bool:
        g = self.g
        taken = set()
        moved = False
        for q in rows:
            mask = bits[q]
            if _popcount(mask) != 1:
                continue
            w = cols[mask.bit_length() - 1]
            if w in taken:
                continue
            taken.add(w)
            v = self.frontier[q]
            o = g.outputs[q]
            g.remove_vertex(v)
            g._set(o, w, H_EDGE)
            self.frontier[q] = w
            moved = True
        return moved

    def _gadget_pivot(self, rows) -> bool:
        """Pivot a frontier spider with an interior Pauli neighbour, deleting the latter."""
        g = self.g
        for q in rows:
            v = self.frontier[q]
            for w in sorted(self._spider_nbrs(v)):
                if g.phases[w] not in (0, 1):
                    continue
                if any(g.kinds[x] == VertexKind.BOUNDARY for x in g.adj[w]):
                    continue
                nv = set(self._spider_nbrs(v))
                nw = set(self._spider_nbrs(w))
                common = (nv & nw) - {v, w}
                p = g.phases[w]
                h = pivot_graph(g, v, w)
                for x in common:
                    h.phases[x] = (h.phases[x] + 1) % 2
                for x in h.adj[w]:
                    if x != w and h.kinds[x] != VertexKind.BOUNDARY:
                        h.phases[x] = (h.phases[x] + p) % 2
                h.remove_vertex(w)
                o = h.outputs[q]
                h._set(o, v, H_EDGE)
                self.g = h
                return True
        return False

    def run(self) -> list[Gate]:
        while True:
            self._peel()
            if self._detach_inputs():
                break
            rows, cols, bits = self._matrix()
            if self._advance(rows, cols, bits):
                continue
            new = self._eliminate(rows, cols, bits)
            self._write_back(rows, cols, bits, new)
            if self._advance(rows, cols, new):
                continue
            if self._gadget_pivot(rows):
                continue
            raise ExtractionStuck("no frontier spider can be advanced", self._state())
        self._finish()
        return self.gates[::-1]

    def _finish(self) -> None:
        g, gates = self.g, self.gates
        source = []
        where = {b: i for i, b in enumerate(g.inputs)}
        for q, v in enumerate(self.frontier):
            ins = [b for b in g.adj[v] if b in self.input_set]
            if len(ins) != 1 or len(g.adj[v]) != 2:
                raise ExtractionStuck(f"frontier spider on qubit {q} is not a plain wire", self._state())
            b = ins[0]
            if g.adj[v][b] == H_EDGE:
                gates.append(H(q))
            source.append(where[b])
        # output q carries input source[q]; undo with swaps placed before everything else
        perm = list(source)
        for q in range(self.n):
            if perm[q] == q:
                continue
            r = perm.index(q)
            gates.extend(_swap(q, r))
            perm[q], perm[r] = perm[r], perm[q]


def _swap(a: int, b: int) -> list[Gate]:
    return [CNOT(a, b), CNOT(b, a), CNOT(a, b)]


def extract_gates(d: ZxDiagram) -> list[Gate]:
    return _Extractor(d).run()


def extract_circuit(d: ZxDiagram) -> Circuit:
    """Extract an equivalent circuit over {H, ZPhase, CNOT, CZ}."""
    return Circuit(len(d.outputs), tuple(extract_gates(d)))


def extraction_report(d: ZxDiagram) -> ExtractionReport:
    counts = {k: 0 for k in GateKind}
    for gate in extract_gates(d):
        counts[gate.kind] += 1
    return ExtractionReport(counts[GateKind.CNOT], counts[GateKind.CZ], counts[GateKind.H], counts[GateKind.ZPHASE])
