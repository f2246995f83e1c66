import random
from collections import Counter
from fractions import Fraction

import pytest

from zxopt.circuit import CNOT, Circuit, H, ZPhase, random_circuit
from zxopt.oracle import equal_up_to_scalar, evaluate_diagram
from zxopt.rewrite import (
    Congruence,
    RewriteError,
    RewriteStep,
    Rule,
    congruence_lc,
    congruence_pivot,
    dump_trace,
    eligible_subjects,
    fixpoint_violations,
    inject_fault,
    lc_simp,
    load_trace,
    pivot_simp,
    simplify,
    simplify_to_fixpoint,
)
from zxopt.zxgraph import H_EDGE, S_EDGE, VertexKind, ZxDiagram, from_circuit, is_graph_like, pivot_graph, to_graph_like

from conftest import graph_diagram, small_circuits, spider_edges


def _with_wires(d: ZxDiagram, spiders) -> ZxDiagram:
    """Give each listed spider one input and one output wire."""
    for v in spiders:
        i = d.add_vertex(VertexKind.BOUNDARY)
        o = d.add_vertex(VertexKind.BOUNDARY)
        d._set(i, v, S_EDGE)
        d._set(v, o, S_EDGE)
        d.inputs.append(i)
        d.outputs.append(o)
    return d


def _same(a: ZxDiagram, b: ZxDiagram) -> bool:
    return equal_up_to_scalar(evaluate_diagram(a), evaluate_diagram(b))


def _non_clifford(d: ZxDiagram) -> Counter:
    """Multiset of phase residues mod pi/2, ignoring Clifford phases."""
    return Counter(p % Fraction(1, 2) for v, p in d.phases.items() if d.kinds[v] != VertexKind.BOUNDARY and p % Fraction(1, 2))


def _graph_like_corpus(count: int, seed: int) -> list[ZxDiagram]:
    out = []
    for i, c in enumerate(small_circuits(count, 4, 30, seed=seed)):
        d = to_graph_like(from_circuit(c))
        out.append(simplify(d) if i % 2 else d)
    return out


def test_lc_simp_single_neighbour():
    d = _with_wires(graph_diagram(2, [(0, 1)], [Fraction(1, 2), Fraction(1, 3)]), [1])
    out = lc_simp(d, 0)
    assert 0 not in out.kinds
    assert out.phases[1] == Fraction(1, 3) - Fraction(1, 2) + 2
    # [DERIVED] oracle equality on the two-spider diagram
    assert _same(d, out)


def test_lc_simp_minus_half_links_two_neighbours():
    d = _with_wires(graph_diagram(3, [(0, 1), (0, 2)], [Fraction(3, 2), Fraction(1, 4), 0]), [1, 2])
    out = lc_simp(d, 0)
    assert out.adj[1].get(2) == H_EDGE
    assert out.phases[1] == Fraction(3, 4) and out.phases[2] == Fraction(1, 2)
    assert len(out.spiders()) == len(d.spiders()) - 1
    assert _same(d, out)


def test_pivot_simp_links_exclusive_neighbours():
    d = _with_wires(graph_diagram(4, [(2, 0), (0, 1), (1, 3)], [0, 0, Fraction(1, 4), Fraction(1, 8)]), [2, 3])
    out = pivot_simp(d, 0, 1)
    assert out.adj[2].get(3) == H_EDGE
    assert len(out.spiders()) == len(d.spiders()) - 2
    assert _same(d, out)


def test_simplification_preconditions():
    d = _with_wires(graph_diagram(2, [(0, 1)], [Fraction(1, 4), 0]), [1])
    with pytest.raises(RewriteError):
        lc_simp(d, 0)
    with pytest.raises(RewriteError):
        lc_simp(d, d.inputs[0])
    with pytest.raises(RewriteError):
        pivot_simp(d, 0, 1)  # 1 is on the boundary, 0 is not Pauli


def test_simplify_to_fixpoint_contract():
    for c in small_circuits(30, 5, 50, seed=31):
        d = from_circuit(c)
        g, trace = simplify_to_fixpoint(d)
        assert is_graph_like(g)
        assert fixpoint_violations(g) == []
        assert _same(d, g)
        again, more = simplify_to_fixpoint(g)
        assert again == g and more == []
        assert all(isinstance(s, RewriteStep) for s in trace)


def test_clifford_circuit_leaves_no_eligible_spiders():
    rng = random.Random(3)
    gates = []
    for _ in range(60):
        r = rng.random()
        if r < 0.3:
            gates.append(H(rng.randrange(4)))
        elif r < 0.6:
            gates.append(ZPhase(rng.randrange(4), Fraction(rng.choice((1, 2, 3)), 2)))
        else:
            a, b = rng.sample(range(4), 2)
            gates.append(CNOT(a, b))
    g = simplify(from_circuit(Circuit(4, tuple(gates))))
    assert fixpoint_violations(g) == []
    interior = [v for v in g.spiders() if g.is_interior(v)]
    assert all(g.phases[v] not in (Fraction(1, 2), Fraction(3, 2)) for v in interior)


def test_fixpoint_without_clifford_interior_is_unchanged():
    d = _with_wires(graph_diagram(3, [(0, 1), (1, 2)], [0, Fraction(1, 4), 0]), [0, 2])
    g, trace = simplify_to_fixpoint(d)
    assert trace == [] and g == d


def test_trace_round_trip():
    _, trace = simplify_to_fixpoint(from_circuit(random_circuit(4, 40, rng_seed=6)))
    assert trace
    assert load_trace(dump_trace(trace)) == trace


def test_congruence_lc_links_two_neighbours():
    d = _with_wires(graph_diagram(3, [(0, 1), (0, 2)], [Fraction(1, 4), 0, Fraction(1, 3)]), [1, 2])
    out = congruence_lc(d, 0)
    assert out.adj[1].get(2) == H_EDGE
    assert is_graph_like(out)
    assert _same(d, out)
    assert len(out.spiders()) == len(d.spiders()) + 1


def test_congruences_are_sound_on_random_subjects():
    rng = random.Random(77)
    checked = 0
    for d in _graph_like_corpus(30, seed=40):
        for kind in Congruence:
            subjects = eligible_subjects(d, kind)
            for s in rng.sample(subjects, min(3, len(subjects))):
                if kind is Congruence.LC:
                    out = congruence_lc(d, s)
                else:
                    out = congruence_pivot(d, *s)
                assert is_graph_like(out)
                assert _same(d, out)
                assert _non_clifford(out) == _non_clifford(d)
                checked += 1
    assert checked > 100


def test_congruence_pivot_graph_effect_matches_pivot_graph():
    # [DERIVED] restricted to the original spider ids, connectivity equals G ^ uv
    for d in _graph_like_corpus(12, seed=51):
        for u, v in eligible_subjects(d, Congruence.PIVOT)[:4]:
            out = congruence_pivot(d, u, v)
            ref = pivot_graph(d, u, v)
            keep = set(d.spiders())
            got = {e for e in spider_edges(out) if e <= keep}
            assert got == spider_edges(ref)


def test_congruence_pivot_matches_three_local_complementations():
    d = simplify(from_circuit(random_circuit(4, 40, rng_seed=52)))
    u, v = eligible_subjects(d, Congruence.PIVOT)[0]
    three = congruence_lc(congruence_lc(congruence_lc(d, u), v), u)
    assert _same(congruence_pivot(d, u, v), three)


def test_double_lc_then_normalize_is_equivalent():
    d = simplify(from_circuit(random_circuit(4, 40, rng_seed=53)))
    subjects = eligible_subjects(d, Congruence.LC)
    assert subjects
    for u in subjects[:5]:
        twice = to_graph_like(congruence_lc(congruence_lc(d, u), u))
        assert _same(twice, to_graph_like(d))


def test_congruence_errors():
    d = _with_wires(graph_diagram(3, [(0, 1)], [0, 0, 0]), [2])
    with pytest.raises(RewriteError):
        congruence_lc(d, 0)  # degree 1
    with pytest.raises(RewriteError):
        congruence_pivot(d, 0, 2)
    with pytest.raises(RewriteError):
        congruence_lc(d, d.inputs[0])


def test_eligible_subjects_examples():
    lonely = graph_diagram(3, [])
    assert eligible_subjects(lonely, Congruence.LC) == []
    assert eligible_subjects(lonely, Congruence.PIVOT) == []
    tri = graph_diagram(3, [(0, 1), (1, 2), (0, 2)])
    assert len(eligible_subjects(tri, Congruence.LC)) == 3
    assert len(eligible_subjects(tri, Congruence.PIVOT)) == 3


def test_eligible_subject_counts_survive_relabeling():
    d = _graph_like_corpus(1, seed=54)[0]
    ids = sorted(d.kinds)
    perm = ids[:]
    random.Random(0).shuffle(perm)
    rename = dict(zip(ids, perm))
    data = d.to_dict()
    for vd in data["vertices"]:
        vd["id"] = rename[vd["id"]]
    for ed in data["edges"]:
        ed["source"], ed["target"] = rename[ed["source"]], rename[ed["target"]]
    data["inputs"] = [rename[v] for v in data["inputs"]]
    data["outputs"] = [rename[v] for v in data["outputs"]]
    r = ZxDiagram.from_dict(data)
    for kind in Congruence:
        assert len(eligible_subjects(r, kind)) == len(eligible_subjects(d, kind))


def test_injected_faults_break_semantics():
    d = _with_wires(graph_diagram(2, [(0, 1)], [Fraction(1, 2), Fraction(1, 3)]), [1])
    with inject_fault("lc_simp_sign"):
        assert not _same(d, lc_simp(d, 0))
    assert _same(d, lc_simp(d, 0))
    p = _with_wires(graph_diagram(5, [(2, 0), (0, 1), (1, 2), (0, 3), (1, 4)], [0, 0, 0, 0, 0]), [2, 3, 4])
    assert _same(p, pivot_simp(p, 0, 1))
    with inject_fault("pivot_simp_pi"):
        assert not _same(p, pivot_simp(p, 0, 1))


def test_rule_names_are_stable():
    assert [r.value for r in Rule] == [
        "Fusion",
        "Identity",
        "ColorChange",
        "Hopf",
        "LcSimp",
        "PivotSimp",
        "CongruenceLC",
        "CongruencePivot",
    ]
