"""ZX-diagram data model, circuit translation and graph-like normalization.

Edges are stored as multiplicities ``(n_simple, n_hadamard)`` so that raw
diagrams with parallel edges or self-loops can be represented; graph-like
diagrams only ever hold single Hadamard edges between spiders.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional

import networkx as nx

from zxopt.circuit import Circuit, GateKind
from zxopt.phase import phase as _phase


class VertexKind(IntEnum):
    BOUNDARY = 0
    Z = 1
    X = 2


class EdgeType(IntEnum):
    SIMPLE = 1
    HADAMARD = 2


Mult = tuple[int, int]
NO_EDGE: Mult = (0, 0)
S_EDGE: Mult = (1, 0)
H_EDGE: Mult = (0, 1)


def _single(etype: EdgeType) -> Mult:
    return S_EDGE if etype == EdgeType.SIMPLE else H_EDGE


def toggle_type(etype: EdgeType) -> EdgeType:
    return EdgeType.HADAMARD if etype == EdgeType.SIMPLE else EdgeType.SIMPLE


class ZxDiagram:
    """Open graph of spiders with ordered input and output boundaries."""

    def __init__(self) -> None:
        self.kinds: dict[int, VertexKind] = {}
        self.phases: dict[int, Fraction] = {}
        self.adj: dict[int, dict[int, Mult]] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self._next_id = 0

    # -- construction ------------------------------------------------------ #

    def add_vertex(self, kind: VertexKind, phase=0, vid: Optional[int] = None) -> int:
        if vid is None:
            vid = self._next_id
        elif vid in self.kinds:
            raise ValueError(f"vertex {vid} already exists")
        self._next_id = max(self._next_id, vid + 1)
        self.kinds[vid] = VertexKind(kind)
        self.phases[vid] = Fraction(0) if kind == VertexKind.BOUNDARY else _phase(phase)
        self.adj[vid] = {}
        return vid

    def add_spider(self, phase=0, kind: VertexKind = VertexKind.Z) -> int:
        return self.add_vertex(kind, phase)

    def remove_vertex(self, v: int) -> None:
        for w in self.adj.pop(v):
            if w != v:
                del self.adj[w][v]
        del self.kinds[v]
        del self.phases[v]
        if v in self.inputs:
            self.inputs.remove(v)
        if v in self.outputs:
            self.outputs.remove(v)

    def add_edge(self, u: int, v: int, etype: EdgeType = EdgeType.SIMPLE, count: int = 1) -> None:
        """Add ``count`` parallel edges of ``etype`` (no simplification)."""
        s, h = self.adj[u].get(v, NO_EDGE)
        if etype == EdgeType.SIMPLE:
            s += count
        else:
            h += count
        self._set(u, v, (s, h))

    def remove_edge(self, u: int, v: int, etype: Optional[EdgeType] = None) -> None:
        s, h = self.adj[u][v]
        if etype is None:
            if s + h != 1:
                raise ValueError(f"ambiguous edge removal between {u} and {v}")
            s = h = 0
        elif etype == EdgeType.SIMPLE:
            if s == 0:
                raise KeyError((u, v, etype))
            s -= 1
        else:
            if h == 0:
                raise KeyError((u, v, etype))
            h -= 1
        self._set(u, v, (s, h))

    def _set(self, u: int, v: int, mult: Mult) -> None:
        if mult[0] == 0 and mult[1] == 0:
            self.adj[u].pop(v, None)
            self.adj[v].pop(u, None)
        else:
            self.adj[u][v] = mult
            self.adj[v][u] = mult

    def toggle_hadamard(self, u: int, v: int) -> None:
        """Add a Hadamard edge, cancelling an existing one (Hopf)."""
        adj_u = self.adj[u]
        if v in adj_u:
            if adj_u[v] != H_EDGE:
                raise ValueError(f"edge {u}-{v} is not a single Hadamard edge")
            del adj_u[v]
            del self.adj[v][u]
        else:
            adj_u[v] = H_EDGE
            self.adj[v][u] = H_EDGE

    # -- queries ------------------------------------------------------------ #

    @property
    def vertices(self) -> list[int]:
        return list(self.kinds)

    def spiders(self) -> list[int]:
        return [v for v, k in self.kinds.items() if k != VertexKind.BOUNDARY]

    def is_boundary(self, v: int) -> bool:
        return self.kinds[v] == VertexKind.BOUNDARY

    def multiplicity(self, u: int, v: int) -> Mult:
        return self.adj[u].get(v, NO_EDGE)

    def edge_type(self, u: int, v: int) -> Optional[EdgeType]:
        """Type of the single edge between ``u`` and ``v``; None if absent."""
        m = self.adj[u].get(v)
        if m is None:
            return None
        if m == S_EDGE:
            return EdgeType.SIMPLE
        if m == H_EDGE:
            return EdgeType.HADAMARD
        raise ValueError(f"parallel edges between {u} and {v}: {m}")

    def connected(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def neighbors(self, v: int) -> list[int]:
        return [w for w in self.adj[v] if w != v]

    def spider_neighbors(self, v: int) -> list[int]:
        kinds = self.kinds
        return [w for w in self.adj[v] if w != v and kinds[w] != VertexKind.BOUNDARY]

    def boundary_neighbors(self, v: int) -> list[int]:
        kinds = self.kinds
        return [w for w in self.adj[v] if kinds[w] == VertexKind.BOUNDARY]

    def is_interior(self, v: int) -> bool:
        """A spider none of whose neighbours is a boundary vertex."""
        kinds = self.kinds
        return kinds[v] != VertexKind.BOUNDARY and all(kinds[w] != VertexKind.BOUNDARY for w in self.adj[v])

    def degree(self, v: int) -> int:
        total = 0
        for w, (s, h) in self.adj[v].items():
            total += 2 * (s + h) if w == v else s + h
        return total

    def edges(self) -> Iterator[tuple[int, int, EdgeType]]:
        """Every edge once, with multiplicity; self-loops appear as ``(v, v, t)``."""
        for u, nbrs in self.adj.items():
            for v, (s, h) in nbrs.items():
                if v < u:
                    continue
                for _ in range(s):
                    yield u, v, EdgeType.SIMPLE
                for _ in range(h):
                    yield u, v, EdgeType.HADAMARD

    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def num_spiders(self) -> int:
        return sum(1 for k in self.kinds.values() if k != VertexKind.BOUNDARY)

    # -- copying and comparison ---------------------------------------------- #

    def copy(self) -> "ZxDiagram":
        d = ZxDiagram.__new__(ZxDiagram)
        d.kinds = dict(self.kinds)
        d.phases = dict(self.phases)
        d.adj = {v: dict(n) for v, n in self.adj.items()}
        d.inputs = list(self.inputs)
        d.outputs = list(self.outputs)
        d._next_id = self._next_id
        return d

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZxDiagram):
            return NotImplemented
        return (
            self.kinds == other.kinds
            and self.phases == other.phases
            and self.adj == other.adj
            and self.inputs == other.inputs
            and self.outputs == other.outputs
        )

    def __repr__(self) -> str:
        return (
            f"ZxDiagram(spiders={self.num_spiders()}, edges={self.num_edges()}, "
            f"inputs={len(self.inputs)}, outputs={len(self.outputs)})"
        )

    # -- in-place primitive rewrites ----------------------------------------- #

    def color_change(self, v: int) -> None:
        """Swap Z <-> X on ``v`` and toggle the type of every non-loop edge at ``v``."""
        kind = self.kinds[v]
        if kind == VertexKind.BOUNDARY:
            raise ValueError("cannot color-change a boundary")
        self.kinds[v] = VertexKind.X if kind == VertexKind.Z else VertexKind.Z
        for w, (s, h) in list(self.adj[v].items()):
            if w != v:
                self._set(v, w, (h, s))

    def fuse(self, u: int, v: int) -> None:
        """Merge same-colored ``v`` into ``u`` along a simple edge."""
        kinds = self.kinds
        if kinds[u] != kinds[v] or kinds[u] == VertexKind.BOUNDARY or u == v:
            raise ValueError(f"cannot fuse {u} and {v}")
        s, h = self.adj[u].get(v, NO_EDGE)
        if s == 0:
            raise ValueError(f"{u} and {v} are not joined by a simple edge")
        self.phases[u] = (self.phases[u] + self.phases[v]) % 2
        loop_s, loop_h = s - 1, h
        vs, vh = self.adj[v].get(v, NO_EDGE)
        loop_s += vs
        loop_h += vh
        del self.adj[u][v]
        del self.adj[v][u]
        for w, (ws, wh) in list(self.adj[v].items()):
            if w == v:
                continue
            es, eh = self.adj[u].get(w, NO_EDGE)
            self._set(u, w, (es + ws, eh + wh))
        self.remove_vertex(v)
        us, uh = self.adj[u].get(u, NO_EDGE)
        self._absorb_loops(u, us + loop_s, uh + loop_h)

    def _absorb_loops(self, v: int, s: int, h: int) -> None:
        # simple self-loops are identities; each Hadamard self-loop contributes pi
        self.adj[v].pop(v, None)
        if h % 2:
            self.phases[v] = (self.phases[v] + 1) % 2

    def remove_self_loops(self, v: int) -> None:
        s, h = self.adj[v].get(v, NO_EDGE)
        if s or h:
            self._absorb_loops(v, s, h)

    def hopf(self, u: int, v: int) -> None:
        """Cancel a pair of parallel edges between two spiders (Hopf / antipode rule)."""
        s, h = self.adj[u].get(v, NO_EDGE)
        same = self.kinds[u] == self.kinds[v]
        if same and h >= 2:
            self._set(u, v, (s, h - 2))
        elif not same and s >= 2:
            self._set(u, v, (s - 2, h))
        else:
            raise ValueError(f"no cancellable parallel pair between {u} and {v}")

    def remove_identity(self, v: int) -> None:
        """Remove a phase-0 spider with exactly two edges, joining its neighbours."""
        if self.kinds[v] == VertexKind.BOUNDARY or self.phases[v] != 0:
            raise ValueError(f"{v} is not an identity spider")
        ends = [(w, t) for w, _, t in self._incident(v)]
        if len(ends) != 2 or any(w == v for w, _ in ends):
            raise ValueError(f"{v} does not have exactly two non-loop edges")
        (a, ta), (b, tb) = ends
        self.remove_vertex(v)
        if a == b:
            # both legs to the same spider become a self-loop
            combined = EdgeType.SIMPLE if ta == tb else EdgeType.HADAMARD
            self.add_edge(a, a, combined)
            return
        self.add_edge(a, b, EdgeType.SIMPLE if ta == tb else EdgeType.HADAMARD)

    def _incident(self, v: int) -> Iterator[tuple[int, int, EdgeType]]:
        for w, (s, h) in self.adj[v].items():
            for _ in range(s):
                yield w, v, EdgeType.SIMPLE
            for _ in range(h):
                yield w, v, EdgeType.HADAMARD

    # -- serialization ------------------------------------------------------- #

    def to_dict(self) -> dict:
        names = {VertexKind.BOUNDARY: "boundary", VertexKind.Z: "Z", VertexKind.X: "X"}
        return {
            "vertices": [
                {
                    "id": v,
                    "kind": names[self.kinds[v]],
                    "phase": [self.phases[v].numerator, self.phases[v].denominator],
                }
                for v in sorted(self.kinds)
            ],
            "edges": [
                {"source": u, "target": v, "type": "hadamard" if t == EdgeType.HADAMARD else "simple"}
                for u, v, t in sorted(self.edges())
            ],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ZxDiagram":
        kinds = {"boundary": VertexKind.BOUNDARY, "Z": VertexKind.Z, "X": VertexKind.X}
        d = cls()
        for vd in data["vertices"]:
            num, den = vd["phase"]
            d.add_vertex(kinds[vd["kind"]], Fraction(num, den), vid=vd["id"])
        for ed in data["edges"]:
            etype = EdgeType.HADAMARD if ed["type"] == "hadamard" else EdgeType.SIMPLE
            d.add_edge(ed["source"], ed["target"], etype)
        d.inputs = list(data["inputs"])
        d.outputs = list(data["outputs"])
        return d

    @classmethod
    def from_json(cls, text: str) -> "ZxDiagram":
        return cls.from_dict(json.loads(text))


# --------------------------------------------------------------------------- #
# Circuit translation


def from_circuit(c: Circuit) -> ZxDiagram:
    """Translate a circuit gate by gate; Hadamards become Hadamard edges."""
    d = ZxDiagram()
    last = []
    pending = []
    for _ in range(c.n_qubits):
        b = d.add_vertex(VertexKind.BOUNDARY)
        d.inputs.append(b)
        last.append(b)
        pending.append(EdgeType.SIMPLE)

    def attach(q: int, kind: VertexKind, p=0) -> int:
        v = d.add_vertex(kind, p)
        d.add_edge(last[q], v, pending[q])
        last[q] = v
        pending[q] = EdgeType.SIMPLE
        return v

    for g in c.gates:
        k = g.kind
        if k is GateKind.H:
            q = g.qubits[0]
            pending[q] = toggle_type(pending[q])
        elif k is GateKind.ZPHASE:
            attach(g.qubits[0], VertexKind.Z, g.phase)
        elif k is GateKind.XPHASE:
            attach(g.qubits[0], VertexKind.X, g.phase)
        elif k is GateKind.CNOT:
            ctrl, tgt = g.qubits
            a = attach(ctrl, VertexKind.Z)
            b = attach(tgt, VertexKind.X)
            d.add_edge(a, b, EdgeType.SIMPLE)
        else:
            p, q = g.qubits
            a = attach(p, VertexKind.Z)
            b = attach(q, VertexKind.Z)
            d.add_edge(a, b, EdgeType.HADAMARD)
    for q in range(c.n_qubits):
        b = d.add_vertex(VertexKind.BOUNDARY)
        d.outputs.append(b)
        d.add_edge(last[q], b, pending[q])
    return d


# --------------------------------------------------------------------------- #
# Graph-like form


@dataclass(frozen=True)
class GraphLikeCertificate:
    only_z_spiders: bool
    only_hadamard_between_spiders: bool
    no_parallel_or_loops: bool
    boundaries_ok: bool

    def __bool__(self) -> bool:
        return (
            self.only_z_spiders
            and self.only_hadamard_between_spiders
            and self.no_parallel_or_loops
            and self.boundaries_ok
        )


def graph_like_certificate(d: ZxDiagram) -> GraphLikeCertificate:
    kinds = d.kinds
    only_z = all(k != VertexKind.X for k in kinds.values())
    only_h = True
    simple_graph = True
    for u, nbrs in d.adj.items():
        for v, (s, h) in nbrs.items():
            if u == v or s + h > 1:
                simple_graph = False
            if kinds[u] != VertexKind.BOUNDARY and kinds[v] != VertexKind.BOUNDARY and s > 0:
                only_h = False
    inputs, outputs = set(d.inputs), set(d.outputs)
    boundaries_ok = inputs.isdisjoint(outputs) and all(
        (v in inputs) or (v in outputs) for v, k in kinds.items() if k == VertexKind.BOUNDARY
    )
    for b in inputs | outputs:
        if b not in kinds or kinds[b] != VertexKind.BOUNDARY or d.degree(b) != 1:
            boundaries_ok = False
            continue
        (w,) = d.adj[b]
        if kinds[w] != VertexKind.Z:
            boundaries_ok = False
    if boundaries_ok:
        for v in d.spiders():
            bs = d.boundary_neighbors(v)
            if sum(1 for b in bs if b in inputs) > 1 or sum(1 for b in bs if b in outputs) > 1:
                boundaries_ok = False
                break
    return GraphLikeCertificate(only_z, only_h, simple_graph, boundaries_ok)


def is_graph_like(d: ZxDiagram) -> bool:
    return bool(graph_like_certificate(d))


def _normalize_pairs(g: ZxDiagram) -> None:
    """After color change and fusion: drop loops, cancel parallel Hadamard pairs."""
    for v in sorted(g.spiders()):
        g.remove_self_loops(v)
    for u in sorted(g.spiders()):
        for w, (s, h) in list(g.adj[u].items()):
            if w > u and g.kinds[w] != VertexKind.BOUNDARY and s == 0 and h > 1:
                g._set(u, w, (0, h % 2))


def _repair_boundaries(g: ZxDiagram) -> None:
    kinds = g.kinds
    for b in list(g.inputs) + list(g.outputs):
        (w,) = list(g.adj[b])
        if kinds[w] == VertexKind.BOUNDARY:
            etype = g.edge_type(b, w)
            g.remove_edge(b, w)
            z = g.add_spider()
            g.add_edge(b, z, EdgeType.SIMPLE)
            g.add_edge(z, w, etype)
    for side in (g.inputs, g.outputs):
        for v in sorted(g.spiders()):
            attached = [b for b in side if b in g.adj[v]]
            for b in attached[1:]:
                etype = g.edge_type(v, b)
                g.remove_edge(v, b)
                z = g.add_spider()
                g.add_edge(v, z, EdgeType.HADAMARD)
                g.add_edge(z, b, toggle_type(etype))


def to_graph_like(d: ZxDiagram) -> ZxDiagram:
    """Return an equivalent (up to scalar) graph-like copy of ``d``."""
    g = d.copy()
    for v in sorted(g.spiders()):
        if g.kinds[v] == VertexKind.X:
            g.color_change(v)
    # fuse along simple spider-spider edges until none remain
    kinds = g.kinds
    changed = True
    while changed:
        changed = False
        for u in sorted(g.spiders()):
            if u not in kinds:
                continue
            while True:
                partner = next(
                    (w for w, (s, _) in g.adj[u].items() if s and w != u and kinds[w] != VertexKind.BOUNDARY),
                    None,
                )
                if partner is None:
                    break
                g.fuse(u, partner)
                changed = True
    _normalize_pairs(g)
    _repair_boundaries(g)
    return g


# --------------------------------------------------------------------------- #
# Pure graph operations


def _spider_nbrs(d: ZxDiagram, u: int) -> list[int]:
    kinds = d.kinds
    return [w for w in d.adj[u] if w != u and kinds[w] != VertexKind.BOUNDARY]


def complement_pairs(d: ZxDiagram, vertices: list[int]) -> None:
    """Toggle the Hadamard edge between every pair of ``vertices`` (in place)."""
    for a, b in combinations(vertices, 2):
        d.toggle_hadamard(a, b)


def local_complement_graph(d: ZxDiagram, u: int) -> ZxDiagram:
    """G * u: complement Hadamard adjacency among the spider neighbours of ``u``.

    No phases change. Boundary neighbours are never touched.
    """
    if u not in d.kinds or d.is_boundary(u):
        raise ValueError(f"{u} is not a spider of the diagram")
    g = d.copy()
    complement_pairs(g, _spider_nbrs(g, u))
    return g


def pivot_graph(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    """G ^ uv = ((G * u) * v) * u.

    Equivalent to complementing the edges between the common neighbourhood and
    the two exclusive neighbourhoods of ``u`` and ``v``, followed by exchanging
    the neighbourhoods of ``u`` and ``v``.
    """
    for x in (u, v):
        if x not in d.kinds or d.is_boundary(x):
            raise ValueError(f"{x} is not a spider of the diagram")
    if d.edge_type(u, v) != EdgeType.HADAMARD:
        raise ValueError(f"{u} and {v} are not Hadamard-adjacent")
    g = d.copy()
    for x in (u, v, u):
        complement_pairs(g, _spider_nbrs(g, x))
    return g


def spider_graph(d: ZxDiagram) -> nx.Graph:
    """Underlying simple graph on the spiders (boundaries dropped)."""
    G = nx.Graph()
    kinds = d.kinds
    spiders = [v for v, k in kinds.items() if k != VertexKind.BOUNDARY]
    G.add_nodes_from(spiders)
    for u in spiders:
        for w in d.adj[u]:
            if w > u and kinds[w] != VertexKind.BOUNDARY:
                G.add_edge(u, w)
    return G


def graph_stats(d: ZxDiagram) -> tuple[int, float, float]:
    """(edge count, density, mean betweenness centrality) over the spiders."""
    G = spider_graph(d)
    n = G.number_of_nodes()
    e = G.number_of_edges()
    density = 2.0 * e / (n * (n - 1)) if n > 1 else 0.0
    if n == 0:
        return e, density, 0.0
    bc = nx.betweenness_centrality(G)
    return e, density, sum(bc.values()) / n
