import math
from fractions import Fraction

import pytest

from zxopt.circuit import (
    CNOT,
    CZ,
    Circuit,
    CircuitParseError,
    GateKind,
    H,
    XPhase,
    ZPhase,
    basic_optimize,
    complexity,
    emit_circuit,
    load_fixture,
    parse_circuit,
    random_circuit,
)
from zxopt.oracle import circuits_equivalent

from conftest import small_circuits


def test_parse_empty_program():
    c = parse_circuit("qreg q[2];")
    assert c == Circuit(2, ())


def test_parse_single_gates():
    assert parse_circuit("qreg q[1]; h q[0];").gates == (H(0),)
    assert parse_circuit("qreg q[2]; cx q[0],q[1];").gates == (CNOT(0, 1),)


def test_parse_header_comments_and_aliases():
    text = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[3]; // register
t q[0]; tdg q[1]; s q[2]; sdg q[0]; z q[1]; x q[2];
rz(3*pi/8) q[0];
cz q[1],q[2];
"""
    c = parse_circuit(text)
    assert c.n_qubits == 3
    assert [g.phase for g in c.gates[:5]] == [
        Fraction(1, 4),
        Fraction(7, 4),
        Fraction(1, 2),
        Fraction(3, 2),
        Fraction(1),
    ]
    assert c.gates[5] == XPhase(2, 1)
    assert c.gates[6] == ZPhase(0, Fraction(3, 8))
    assert c.gates[7] == CZ(1, 2)


@pytest.mark.parametrize(
    "text, line",
    [
        ("qreg q[2];\nfoo q[0];", 2),
        ("qreg q[2];\nh q[5];", 2),
        ("qreg q[2];\nh q[0]", 2),
        ("h q[0];", 1),
        ("qreg q[2];\n\ncx q[0],q[0];", 3),
        ("qreg q[2];\nrz q[0];", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitParseError) as info:
        parse_circuit(text)
    assert info.value.line == line


def test_emit_examples():
    assert emit_circuit(Circuit(1, ())) == "qreg q[1];\n"
    assert "t q[0];" in emit_circuit(Circuit(1, (ZPhase(0, Fraction(1, 4)),)))


def test_round_trip_on_random_and_fixture_circuits():
    circuits = small_circuits(30, 6, 60, seed=3) + [load_fixture("mod5_4")]
    circuits.append(Circuit(2, (ZPhase(0, Fraction(5, 8)), XPhase(1, Fraction(1, 3)), CZ(0, 1))))
    for c in circuits:
        assert parse_circuit(emit_circuit(c)) == c


def test_complexity_examples():
    assert complexity(Circuit(2, ())).comp == 0
    c = Circuit(2, (CNOT(0, 1), H(0), H(1)))
    assert complexity(c).comp == 12


def test_complexity_of_mod5_4_fixture():
    # [PAPER] 63 gates, 28 two-qubit, comp 315
    r = complexity(load_fixture("mod5_4"))
    assert (r.two_qubit_count, r.single_qubit_count, r.comp) == (28, 35, 315)


def test_t_count_counts_odd_quarters():
    c = Circuit(1, (ZPhase(0, Fraction(1, 4)), ZPhase(0, Fraction(1, 2)), ZPhase(0, Fraction(7, 4)), XPhase(0, Fraction(3, 4))))
    assert complexity(c).t_count == 3


@pytest.mark.parametrize(
    "gates, expected",
    [
        ((H(0), H(0)), ()),
        ((ZPhase(0, Fraction(1, 4)), ZPhase(0, Fraction(1, 4))), (ZPhase(0, Fraction(1, 2)),)),
        ((CNOT(0, 1), CNOT(0, 1)), ()),
        ((CZ(0, 1), CZ(1, 0)), ()),
        ((ZPhase(0, 1), CNOT(0, 1), ZPhase(0, 1)), (CNOT(0, 1),)),
    ],
)
def test_basic_optimize_examples(gates, expected):
    assert basic_optimize(Circuit(2, gates)).gates == expected


def test_basic_optimize_is_sound_monotone_and_idempotent():
    for c in small_circuits(40, 6, 60, seed=11):
        out = basic_optimize(c)
        assert complexity(out).comp <= complexity(c).comp
        assert basic_optimize(out) == out
        assert circuits_equivalent(c, out)


def test_random_circuit_contract():
    assert random_circuit(3, 0, rng_seed=9).gates == ()
    a = random_circuit(4, 50, rng_seed=9)
    assert emit_circuit(a) == emit_circuit(random_circuit(4, 50, rng_seed=9))
    assert len(a) == 50
    for g in a.gates:
        if g.kind is GateKind.CNOT:
            assert g.qubits[0] != g.qubits[1]


def test_random_circuit_frequencies_within_four_sigma():
    # [DERIVED] binomial bound: |count - n p| <= 4 sqrt(n p (1-p))
    n = 2000
    c = random_circuit(5, n, p_t=0.3, p_had=0.25, rng_seed=42)
    counts = {k: 0 for k in (GateKind.H, GateKind.ZPHASE, GateKind.CNOT)}
    for g in c.gates:
        counts[g.kind] += 1
    for kind, p in ((GateKind.H, 0.25), (GateKind.ZPHASE, 0.3), (GateKind.CNOT, 0.45)):
        assert abs(counts[kind] - n * p) <= 4 * math.sqrt(n * p * (1 - p))


@pytest.mark.parametrize("kw", [{"p_t": -0.1}, {"p_t": 0.7, "p_had": 0.5}, {"p_had": 1.5}])
def test_random_circuit_rejects_bad_probabilities(kw):
    with pytest.raises(ValueError):
        random_circuit(3, 10, **kw)
