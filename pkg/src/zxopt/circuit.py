"""Circuit representation, text I/O, peephole cleanup and the complexity metric."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from typing import Optional

from zxopt.phase import Phase, is_odd_quarter, phase


class GateKind(str, Enum):
    H = "H"
    ZPHASE = "ZPhase"
    XPHASE = "XPhase"
    CNOT = "CNOT"
    CZ = "CZ"


TWO_QUBIT = frozenset({GateKind.CNOT, GateKind.CZ})
PHASED = frozenset({GateKind.ZPHASE, GateKind.XPHASE})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    phase: Optional[Phase] = None

    def __post_init__(self):
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind.value} acts on {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind.value} needs distinct qubits, got {self.qubits}")
        if self.kind in PHASED:
            if self.phase is None:
                raise ValueError(f"{self.kind.value} requires a phase")
            object.__setattr__(self, "phase", phase(self.phase))
        elif self.phase is not None:
            raise ValueError(f"{self.kind.value} takes no phase")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    def __str__(self) -> str:
        args = ",".join(str(q) for q in self.qubits)
        if self.phase is not None:
            return f"{self.kind.value}({args}; {self.phase}pi)"
        return f"{self.kind.value}({args})"


def H(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def ZPhase(q: int, p) -> Gate:
    return Gate(GateKind.ZPHASE, (q,), phase(p))


def XPhase(q: int, p) -> Gate:
    return Gate(GateKind.XPHASE, (q,), phase(p))


def CNOT(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def CZ(a: int, b: int) -> Gate:
    return Gate(GateKind.CZ, (a, b))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {g} addresses qubit {q} outside register of {self.n_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        return Circuit(self.n_qubits, self.gates + other.gates)


# --------------------------------------------------------------------------- #
# Text format

_Z_ALIASES = {
    "t": Fraction(1, 4),
    "tdg": Fraction(7, 4),
    "s": Fraction(1, 2),
    "sdg": Fraction(3, 2),
    "z": Fraction(1),
}
_X_ALIASES = {"x": Fraction(1)}
_Z_EMIT = {v: k for k, v in _Z_ALIASES.items()}
_X_EMIT = {v: k for k, v in _X_ALIASES.items()}

_QREG = re.compile(r"^qreg\s+q\s*\[\s*(\d+)\s*\]$")
_STMT = re.compile(r"^([a-z]+)\s*(?:\(([^)]*)\))?\s+(.+)$")
_QARG = re.compile(r"^q\s*\[\s*(\d+)\s*\]$")
_ANGLE = re.compile(r"^(-)?\s*(\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+))?$")


class CircuitParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_angle(text: str, line: int) -> Fraction:
    text = text.strip().replace(" ", "")
    if re.fullmatch(r"-?\d+", text):
        if int(text) != 0:
            raise CircuitParseError(line, f"angle {text!r} is not a rational multiple of pi")
        return Fraction(0)
    m = _ANGLE.match(text)
    if not m:
        raise CircuitParseError(line, f"cannot parse angle {text!r}")
    sign, num, den = m.groups()
    value = Fraction(int(num) if num else 1, int(den) if den else 1)
    return phase(-value if sign else value)


def parse_circuit(text: str) -> Circuit:
    """Parse the QASM-like subset described in the README."""
    n_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("//", 1)[0].strip()
        if not body:
            continue
        for stmt in body.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if stmt.startswith("OPENQASM") or stmt.startswith("include"):
                continue
            m = _QREG.match(stmt)
            if m:
                if n_qubits is not None:
                    raise CircuitParseError(lineno, "only one qreg declaration is supported")
                n_qubits = int(m.group(1))
                if n_qubits < 1:
                    raise CircuitParseError(lineno, "register must have at least one qubit")
                continue
            if n_qubits is None:
                raise CircuitParseError(lineno, "gate before qreg declaration")
            gates.append(_parse_gate(stmt, n_qubits, lineno))
        if not body.rstrip().endswith(";"):
            raise CircuitParseError(lineno, "missing ';'")
    if n_qubits is None:
        raise CircuitParseError(1, "no qreg declaration")
    return Circuit(n_qubits, tuple(gates))


def _parse_gate(stmt: str, n_qubits: int, lineno: int) -> Gate:
    m = _STMT.match(stmt)
    if not m:
        raise CircuitParseError(lineno, f"syntax error in {stmt!r}")
    name, param, args = m.groups()
    qubits = []
    for a in args.split(","):
        qm = _QARG.match(a.strip())
        if not qm:
            raise CircuitParseError(lineno, f"bad qubit argument {a.strip()!r}")
        q = int(qm.group(1))
        if q >= n_qubits:
            raise CircuitParseError(lineno, f"qubit index {q} out of range for qreg of size {n_qubits}")
        qubits.append(q)

    def expect(arity: int, has_param: bool = False):
        if len(qubits) != arity:
            raise CircuitParseError(lineno, f"{name} expects {arity} qubit argument(s)")
        if has_param != (param is not None):
            raise CircuitParseError(lineno, f"{name} {'requires' if has_param else 'takes no'} angle")

    try:
        if name == "h":
            expect(1)
            return H(qubits[0])
        if name in _Z_ALIASES:
            expect(1)
            return ZPhase(qubits[0], _Z_ALIASES[name])
        if name in _X_ALIASES:
            expect(1)
            return XPhase(qubits[0], _X_ALIASES[name])
        if name == "rz":
            expect(1, True)
            return ZPhase(qubits[0], _parse_angle(param, lineno))
        if name == "rx":
            expect(1, True)
            return XPhase(qubits[0], _parse_angle(param, lineno))
        if name == "cx":
            expect(2)
            return CNOT(qubits[0], qubits[1])
        if name == "cz":
            expect(2)
            return CZ(qubits[0], qubits[1])
    except ValueError as exc:
        if isinstance(exc, CircuitParseError):
            raise
        raise CircuitParseError(lineno, str(exc)) from None
    raise CircuitParseError(lineno, f"unknown gate {name!r}")


def _format_angle(p: Fraction) -> str:
    if p == 0:
        return "0"
    num, den = p.numerator, p.denominator
    head = "pi" if num == 1 else f"{num}*pi"
    return head if den == 1 else f"{head}/{den}"


def _emit_gate(g: Gate) -> str:
    if g.kind is GateKind.H:
        return f"h q[{g.qubits[0]}];"
    if g.kind is GateKind.ZPHASE:
        alias = _Z_EMIT.get(g.phase)
        return f"{alias} q[{g.qubits[0]}];" if alias else f"rz({_format_angle(g.phase)}) q[{g.qubits[0]}];"
    if g.kind is GateKind.XPHASE:
        alias = _X_EMIT.get(g.phase)
        return f"{alias} q[{g.qubits[0]}];" if alias else f"rx({_format_angle(g.phase)}) q[{g.qubits[0]}];"
    name = "cx" if g.kind is GateKind.CNOT else "cz"
    return f"{name} q[{g.qubits[0]}],q[{g.qubits[1]}];"


def emit_circuit(c: Circuit) -> str:
    lines = [f"qreg q[{c.n_qubits}];"]
    lines.extend(_emit_gate(g) for g in c.gates)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- #
# Metrics


@dataclass(frozen=True)
class ComplexityReport:
    two_qubit_count: int
    single_qubit_count: int
    t_count: int
    comp: int

    def as_dict(self) -> dict:
        return {
            "two_qubit_count": self.two_qubit_count,
            "single_qubit_count": self.single_qubit_count,
            "t_count": self.t_count,
            "comp": self.comp,
        }


def complexity(c: Circuit) -> ComplexityReport:
    """Gate counts and ``comp = 10 * two-qubit + single-qubit``."""
    two = sum(1 for g in c.gates if g.kind in TWO_QUBIT)
    single = len(c.gates) - two
    t = sum(1 for g in c.gates if g.kind in PHASED and is_odd_quarter(g.phase))
    return ComplexityReport(two, single, t, 10 * two + single)


# --------------------------------------------------------------------------- #
# Peephole optimization


def _commutes_past(g: Gate, h: Gate) -> bool:
    """Whether ``h`` can be moved across ``g`` while looking for a partner of ``g``."""
    k, hk = g.kind, h.kind
    if k is GateKind.ZPHASE:
        (q,) = g.qubits
        return (hk is GateKind.CNOT and h.qubits[0] == q) or hk is GateKind.CZ
    if k is GateKind.XPHASE:
        (q,) = g.qubits
        return hk is GateKind.CNOT and h.qubits[1] == q
    if k is GateKind.CNOT:
        c, t = g.qubits
        if hk is GateKind.ZPHASE:
            return h.qubits[0] == c
        if hk is GateKind.XPHASE:
            return h.qubits[0] == t
        if hk is GateKind.CNOT:
            hc, ht = h.qubits
            return (hc == c and ht != t) or (ht == t and hc != c)
        if hk is GateKind.CZ:
            return t not in h.qubits
        return False
    if k is GateKind.CZ:
        pair = set(g.qubits)
        if hk is GateKind.ZPHASE or hk is GateKind.CZ:
            return True
        if hk is GateKind.CNOT:
            return h.qubits[0] in pair and h.qubits[1] not in pair
        return False
    return False


def _partner(g: Gate, h: Gate) -> bool:
    if g.kind is not h.kind:
        return False
    if g.kind is GateKind.CZ:
        return set(g.qubits) == set(h.qubits)
    return g.qubits == h.qubits


def _peephole_pass(gates: list[Optional[Gate]]) -> bool:
    changed = False
    n = len(gates)
    for i in range(n):
        g = gates[i]
        if g is None:
            continue
        if g.kind in PHASED and g.phase == 0:
            gates[i] = None
            changed = True
            continue
        support = set(g.qubits)
        for j in range(i + 1, n):
            h = gates[j]
            if h is None or support.isdisjoint(h.qubits):
                continue
            if _partner(g, h):
                if g.kind in PHASED:
                    fused = Gate(g.kind, g.qubits, g.phase + h.phase)
                    gates[i] = None if fused.phase == 0 else fused
                    g = gates[i]
                else:
                    gates[i] = None
                    g = None
                gates[j] = None
                changed = True
                break
            if not _commutes_past(g, h):
                break
    return changed


def basic_optimize(c: Circuit) -> Circuit:
    """Cancel and fuse adjacent gates until nothing changes.

    Handles H.H, CNOT.CNOT, CZ.CZ cancellation, same-axis phase fusion,
    zero-phase removal, and looks past gates that commute with the one being
    matched (Z phases through CNOT controls and CZs, X phases through CNOT
    targets, CNOTs sharing a control or target).
    """
    gates: list[Optional[Gate]] = list(c.gates)
    while _peephole_pass(gates):
        gates = [g for g in gates if g is not None]
    return Circuit(c.n_qubits, tuple(g for g in gates if g is not None))


# --------------------------------------------------------------------------- #
# Generators and fixtures


def random_circuit(
    n_qubits: int,
    n_gates: int,
    p_t: float = 0.2,
    p_had: float = 0.2,
    rng_seed: int = 0,
) -> Circuit:
    """Random CNOT/H/T circuit; each gate drawn independently."""
    if n_qubits < 2:
        raise ValueError("random circuits need at least two qubits")
    if n_gates < 0:
        raise ValueError("n_gates must be non-negative")
    if not (0 <= p_t <= 1 and 0 <= p_had <= 1 and p_t + p_had <= 1):
        raise ValueError(f"invalid gate probabilities p_t={p_t}, p_had={p_had}")
    rng = random.Random(rng_seed)
    gates = []
    for _ in range(n_gates):
        r = rng.random()
        if r < p_had:
            gates.append(H(rng.randrange(n_qubits)))
        elif r < p_had + p_t:
            gates.append(ZPhase(rng.randrange(n_qubits), Fraction(1, 4)))
        else:
            control = rng.randrange(n_qubits)
            target = rng.randrange(n_qubits - 1)
            if target >= control:
                target += 1
            gates.append(CNOT(control, target))
    return Circuit(n_qubits, tuple(gates))


FIXTURES = ("mod5_4", "tof_3", "barenco_tof_3")


def load_fixture(name: str) -> Circuit:
    """Load one of the bundled benchmark circuits by name."""
    key = name.replace("-", "_")
    if key not in FIXTURES:
        raise KeyError(f"no fixture named {name!r}; available: {', '.join(FIXTURES)}")
    text = resources.files("zxopt.data").joinpath(f"{key}.qasm").read_text()
    return parse_circuit(text)

