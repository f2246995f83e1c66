from fractions import Fraction

import pytest

from zxopt.circuit import Circuit, GateKind, H, ZPhase, basic_optimize, random_circuit
from zxopt.extract import ExtractionReport, ExtractionStuck, extract_circuit, extraction_report
from zxopt.oracle import diagram_matches_circuit, equal_up_to_scalar, evaluate_circuit
from zxopt.rewrite import Congruence, apply_congruence, eligible_subjects, simplify
from zxopt.zxgraph import S_EDGE, VertexKind, ZxDiagram, from_circuit, to_graph_like

from conftest import small_circuits


def test_bare_wires_extract_to_nothing():
    d = to_graph_like(from_circuit(Circuit(3, ())))
    assert basic_optimize(extract_circuit(d)) == Circuit(3, ())
    assert extraction_report(from_circuit(Circuit(2, ()))) == ExtractionReport(0, 0, 0, 0)


def test_single_hadamard():
    d = simplify(from_circuit(Circuit(1, (H(0),))))
    assert basic_optimize(extract_circuit(d)).gates == (H(0),)


def test_single_phase_spider_gives_one_phase_gate():
    # [PAPER] one phase gate per non-zero phase
    d = simplify(from_circuit(Circuit(1, (ZPhase(0, Fraction(1, 4)),))))
    assert extraction_report(d).phase_count == 1


def test_random_circuits_round_trip_through_extraction():
    for c in small_circuits(50, 6, 60, seed=101):
        d = simplify(from_circuit(c))
        out = extract_circuit(d)
        assert all(g.kind is not GateKind.XPHASE for g in out.gates)
        assert diagram_matches_circuit(d, out)
        assert equal_up_to_scalar(evaluate_circuit(basic_optimize(out)), evaluate_circuit(c))


def test_phase_count_matches_nonzero_phase_spiders():
    for c in small_circuits(60, 8, 120, seed=202):
        d = simplify(from_circuit(c))
        nonzero = sum(1 for v in d.spiders() if d.phases[v] != 0)
        assert extraction_report(d).phase_count == nonzero


def test_extraction_after_congruence_chains():
    import random

    rng = random.Random(9)
    for i in range(12):
        c = random_circuit(4, 40, rng_seed=300 + i)
        d = simplify(from_circuit(c))
        for _ in range(8):
            kind = rng.choice(list(Congruence))
            subjects = eligible_subjects(d, kind)
            if subjects:
                d = apply_congruence(d, kind, rng.choice(subjects))
        out = extract_circuit(simplify(d))
        assert equal_up_to_scalar(evaluate_circuit(out), evaluate_circuit(c))


def test_report_is_deterministic():
    d = simplify(from_circuit(random_circuit(5, 60, rng_seed=7)))
    assert extraction_report(d) == extraction_report(d)
    r = extraction_report(d)
    gates = extract_circuit(d).gates
    assert r.cnot_count == sum(1 for g in gates if g.kind is GateKind.CNOT)


def test_non_square_diagram_is_stuck():
    d = ZxDiagram()
    i = d.add_vertex(VertexKind.BOUNDARY)
    v = d.add_spider()
    d._set(i, v, S_EDGE)
    d.inputs = [i]
    with pytest.raises(ExtractionStuck) as info:
        extract_circuit(d)
    assert info.value.frontier == {}


def test_extraction_never_sticks_on_500_circuits():
    stuck = 0
    for c in small_circuits(500, 8, 120, seed=303):
        try:
            extract_circuit(simplify(from_circuit(c)))
        except ExtractionStuck:
            stuck += 1
    assert stuck == 0
