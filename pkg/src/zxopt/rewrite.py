"""Semantics-preserving rewrites on graph-like diagrams.

Simplifications (lc_simp, pivot_simp, identity removal) shrink the diagram and
are driven to a fixpoint. The two congruences keep roughly the same spider
count but change connectivity; they generate the search neighbourhood.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from zxopt.zxgraph import (
    H_EDGE,
    EdgeType,
    VertexKind,
    ZxDiagram,
    pivot_graph,
    to_graph_like,
)

HALF = Fraction(1, 2)
ONE = Fraction(1)
_PAULI = (Fraction(0), ONE)
_PROPER_CLIFFORD = (HALF, Fraction(3, 2))


class Rule(str, Enum):
    FUSION = "Fusion"
    IDENTITY = "Identity"
    COLOR_CHANGE = "ColorChange"
    HOPF = "Hopf"
    LC_SIMP = "LcSimp"
    PIVOT_SIMP = "PivotSimp"
    CONGRUENCE_LC = "CongruenceLC"
    CONGRUENCE_PIVOT = "CongruencePivot"


class Congruence(str, Enum):
    LC = "lc"
    PIVOT = "pivot"


@dataclass(frozen=True)
class RewriteStep:
    rule: Rule
    subjects: tuple[int, ...]
    timestamp: int = 0

    def to_json(self) -> str:
        return json.dumps({"rule": self.rule.value, "subjects": list(self.subjects), "timestamp": self.timestamp})

    @classmethod
    def from_json(cls, line: str) -> "RewriteStep":
        data = json.loads(line)
        return cls(Rule(data["rule"]), tuple(data["subjects"]), data["timestamp"])


def dump_trace(steps: Iterable[RewriteStep]) -> str:
    return "".join(s.to_json() + "\n" for s in steps)


def load_trace(text: str) -> list[RewriteStep]:
    return [RewriteStep.from_json(line) for line in text.splitlines() if line.strip()]


class RewriteError(ValueError):
    """A rewrite was requested on subjects that fail its preconditions."""


# Fault injection for mutation-testing the soundness sweep. Never set outside tests
# and the verify-rules command.
_FAULTS: set[str] = set()


@contextmanager
def inject_fault(name: str) -> Iterator[None]:
    """Temporarily corrupt one rule; known names: ``lc_simp_sign``, ``pivot_simp_pi``."""
    _FAULTS.add(name)
    try:
        yield
    finally:
        _FAULTS.discard(name)


# --------------------------------------------------------------------------- #
# Copy-returning wrappers for the primitive rules


def fuse(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    g = d.copy()
    g.fuse(u, v)
    return g


def remove_identity(d: ZxDiagram, v: int) -> ZxDiagram:
    g = d.copy()
    g.remove_identity(v)
    return g


def color_change(d: ZxDiagram, v: int) -> ZxDiagram:
    g = d.copy()
    g.color_change(v)
    return g


def hopf(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    g = d.copy()
    g.hopf(u, v)
    return g


# --------------------------------------------------------------------------- #
# Simplifications


def _spider_nbrs(g: ZxDiagram, u: int) -> list[int]:
    kinds = g.kinds
    return [w for w in g.adj[u] if w != u and kinds[w] != VertexKind.BOUNDARY]


def _toggle_between(g: ZxDiagram, xs: Sequence[int], ys: Sequence[int]) -> None:
    for x in xs:
        for y in ys:
            g.toggle_hadamard(x, y)


def _require_spider(d: ZxDiagram, u: int) -> None:
    if u not in d.kinds or d.kinds[u] == VertexKind.BOUNDARY:
        raise RewriteError(f"{u} is not a spider")


def lc_simp_applies(d: ZxDiagram, u: int) -> bool:
    return (
        u in d.kinds
        and d.kinds[u] == VertexKind.Z
        and d.phases[u] in _PROPER_CLIFFORD
        and d.is_interior(u)
    )


def _lc_simp(g: ZxDiagram, u: int) -> None:
    a = g.phases[u]
    if "lc_simp_sign" in _FAULTS:
        a = -a
    nbrs = _spider_nbrs(g, u)
    g.remove_vertex(u)
    for i, x in enumerate(nbrs):
        g.phases[x] = (g.phases[x] - a) % 2
        for y in nbrs[i + 1:]:
            g.toggle_hadamard(x, y)


def lc_simp(d: ZxDiagram, u: int) -> ZxDiagram:
    """Remove an interior spider of phase +-pi/2, complementing its neighbourhood."""
    _require_spider(d, u)
    if not lc_simp_applies(d, u):
        raise RewriteError(f"lc_simp precondition fails at {u}")
    g = d.copy()
    _lc_simp(g, u)
    return g


def pivot_simp_applies(d: ZxDiagram, u: int, v: int) -> bool:
    kinds, phases = d.kinds, d.phases
    return (
        u != v
        and u in kinds
        and v in kinds
        and kinds[u] == VertexKind.Z
        and kinds[v] == VertexKind.Z
        and phases[u] in _PAULI
        and phases[v] in _PAULI
        and d.adj[u].get(v) == H_EDGE
        and d.is_interior(u)
        and d.is_interior(v)
    )


def _pivot_simp(g: ZxDiagram, u: int, v: int) -> None:
    a, b = g.phases[u], g.phases[v]
    nu = set(_spider_nbrs(g, u)) - {v}
    nv = set(_spider_nbrs(g, v)) - {u}
    common = sorted(nu & nv)
    only_u = sorted(nu - nv)
    only_v = sorted(nv - nu)
    g.remove_vertex(u)
    g.remove_vertex(v)
    _toggle_between(g, common, only_u)
    _toggle_between(g, common, only_v)
    _toggle_between(g, only_u, only_v)
    extra = Fraction(0) if "pivot_simp_pi" in _FAULTS else ONE
    for x in only_u:
        g.phases[x] = (g.phases[x] + b) % 2
    for x in only_v:
        g.phases[x] = (g.phases[x] + a) % 2
    for x in common:
        g.phases[x] = (g.phases[x] + a + b + extra) % 2


def pivot_simp(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    """Remove an adjacent interior pair of Pauli spiders."""
    _require_spider(d, u)
    _require_spider(d, v)
    if not pivot_simp_applies(d, u, v):
        raise RewriteError(f"pivot_simp precondition fails at ({u}, {v})")
    g = d.copy()
    _pivot_simp(g, u, v)
    return g


def _boundary_sides(g: ZxDiagram, v: int) -> tuple[int, int]:
    ins = outs = 0
    inputs, outputs = g.inputs, g.outputs
    for w in g.adj[v]:
        if g.kinds[w] == VertexKind.BOUNDARY:
            if w in inputs:
                ins += 1
            elif w in outputs:
                outs += 1
    return ins, outs


def _identity_candidate(g: ZxDiagram, v: int):
    """Neighbours (a, b) if ``v`` is a removable phase-0 interior wire spider."""
    if g.phases[v] != 0:
        return None
    adj_v = g.adj[v]
    if len(adj_v) != 2 or v in adj_v:
        return None
    a, b = adj_v
    kinds = g.kinds
    if kinds[a] == VertexKind.BOUNDARY or kinds[b] == VertexKind.BOUNDARY:
        return None
    ia, oa = _boundary_sides(g, a)
    ib, ob = _boundary_sides(g, b)
    if ia + ib > 1 or oa + ob > 1:
        return None
    return a, b


def _remove_identity_and_fuse(g: ZxDiagram, v: int, a: int, b: int) -> int:
    """Drop ``v`` then fuse ``b`` into ``a`` through the resulting plain wire."""
    g.remove_vertex(v)
    keep, gone = (a, b) if a < b else (b, a)
    adj = g.adj
    loop_pi = False
    if gone in adj[keep]:
        # the existing Hadamard edge becomes a Hadamard self-loop
        del adj[keep][gone]
        del adj[gone][keep]
        loop_pi = True
    g.phases[keep] = (g.phases[keep] + g.phases[gone] + (1 if loop_pi else 0)) % 2
    moved = [(w, m) for w, m in adj[gone].items() if w != gone]
    g.remove_vertex(gone)
    for w, m in moved:
        if g.kinds[w] == VertexKind.BOUNDARY:
            g._set(keep, w, m)
        else:
            g.toggle_hadamard(keep, w)
    return keep


def _identity_pass(g: ZxDiagram, trace: list[RewriteStep]) -> bool:
    changed = False
    for v in sorted(g.kinds):
        if v not in g.kinds or g.kinds[v] == VertexKind.BOUNDARY:
            continue
        ends = _identity_candidate(g, v)
        if ends is None:
            continue
        a, b = ends
        _remove_identity_and_fuse(g, v, a, b)
        trace.append(RewriteStep(Rule.IDENTITY, (v, a, b), len(trace)))
        changed = True
    return changed


def _pivot_pass(g: ZxDiagram, trace: list[RewriteStep]) -> bool:
    changed = False
    kinds, phases = g.kinds, g.phases
    for u in sorted(kinds):
        if u not in kinds or kinds[u] == VertexKind.BOUNDARY or phases[u] not in _PAULI:
            continue
        if not g.is_interior(u):
            continue
        for v in sorted(g.adj[u]):
            if pivot_simp_applies(g, u, v):
                _pivot_simp(g, u, v)
                trace.append(RewriteStep(Rule.PIVOT_SIMP, (u, v), len(trace)))
                changed = True
                break
    return changed


def _lc_pass(g: ZxDiagram, trace: list[RewriteStep]) -> bool:
    changed = False
    for u in sorted(g.kinds):
        if u in g.kinds and lc_simp_applies(g, u):
            _lc_simp(g, u)
            trace.append(RewriteStep(Rule.LC_SIMP, (u,), len(trace)))
            changed = True
    return changed


def simplify_to_fixpoint(d: ZxDiagram) -> tuple[ZxDiagram, list[RewriteStep]]:
    """Normalize to graph-like form, then apply simplifications until none apply.

    Vertices are visited in ascending id order, so the result is deterministic.
    """
    g = to_graph_like(d)
    trace: list[RewriteStep] = []
    while True:
        changed = _identity_pass(g, trace)
        changed |= _pivot_pass(g, trace)
        changed |= _lc_pass(g, trace)
        if not changed:
            return g, trace


def simplify(d: ZxDiagram) -> ZxDiagram:
    return simplify_to_fixpoint(d)[0]


def fixpoint_violations(d: ZxDiagram) -> list[tuple[int, ...]]:
    """Subjects at which lc_simp or pivot_simp would still apply."""
    found: list[tuple[int, ...]] = []
    for u in sorted(d.spiders()):
        if lc_simp_applies(d, u):
            found.append((u,))
        for v in d.adj[u]:
            if v > u and pivot_simp_applies(d, u, v):
                found.append((u, v))
    return found


# --------------------------------------------------------------------------- #
# Congruences


def _move_boundary_legs(g: ZxDiagram, src: int, dst: int) -> None:
    adj, kinds = g.adj, g.kinds
    for b in [w for w in adj[src] if kinds[w] == VertexKind.BOUNDARY]:
        m = adj[src].pop(b)
        del adj[b][src]
        adj[b][dst] = m
        adj[dst][b] = m


def _complement(g: ZxDiagram, xs: Sequence[int]) -> None:
    for x, y in combinations(xs, 2):
        g.toggle_hadamard(x, y)


def congruence_lc(d: ZxDiagram, u: int) -> ZxDiagram:
    """Local complementation at a spider of arbitrary phase.

    ``u`` keeps its spider neighbours, which get complemented and shifted by
    -pi/2. ``u`` takes phase 3pi/2 and gains one helper spider that carries the
    old phase minus pi/2 and any boundary wires of ``u``.
    """
    _require_spider(d, u)
    if d.degree(u) <= 1:
        raise RewriteError(f"congruence_lc needs degree > 1 at {u}")
    g = d.copy()
    nbrs = sorted(_spider_nbrs(g, u))
    _complement(g, nbrs)
    for x in nbrs:
        g.phases[x] = (g.phases[x] - HALF) % 2
    w = g.add_spider((g.phases[u] - HALF) % 2)
    _move_boundary_legs(g, u, w)
    g.phases[u] = Fraction(3, 2)
    g.add_edge(u, w, EdgeType.HADAMARD)
    return g


def congruence_pivot(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    """Pivot along the Hadamard edge u-v at arbitrary phases.

    The spider graph is pivoted on the original vertices; ``u`` and ``v``
    become phase-0 and each hands its phase and boundary wires to a new leg
    spider. Common neighbours gain pi.
    """
    _require_spider(d, u)
    _require_spider(d, v)
    if d.adj[u].get(v) != H_EDGE:
        raise RewriteError(f"{u} and {v} are not Hadamard-adjacent")
    nu = set(_spider_nbrs(d, u))
    nv = set(_spider_nbrs(d, v))
    common = nu & nv
    g = pivot_graph(d, u, v)
    for x in sorted(common):
        g.phases[x] = (g.phases[x] + 1) % 2
    for x in (u, v):
        w = g.add_spider(g.phases[x])
        _move_boundary_legs(g, x, w)
        g.phases[x] = Fraction(0)
        g.add_edge(x, w, EdgeType.HADAMARD)
    return g


def apply_congruence(d: ZxDiagram, kind: Congruence, subject) -> ZxDiagram:
    if Congruence(kind) is Congruence.LC:
        return congruence_lc(d, subject if isinstance(subject, int) else subject[0])
    u, v = subject
    return congruence_pivot(d, u, v)


def eligible_subjects(d: ZxDiagram, kind: Congruence) -> list:
    """LC: spiders of degree > 1. Pivot: Hadamard-adjacent spider pairs ``(u, v)``, u < v."""
    kinds = d.kinds
    spiders = sorted(v for v, k in kinds.items() if k != VertexKind.BOUNDARY)
    if Congruence(kind) is Congruence.LC:
        return [v for v in spiders if d.degree(v) > 1]
    pairs = []
    for u in spiders:
        for v, m in d.adj[u].items():
            if v > u and m == H_EDGE and kinds[v] != VertexKind.BOUNDARY:
                pairs.append((u, v))
    pairs.sort()
    return pairs
