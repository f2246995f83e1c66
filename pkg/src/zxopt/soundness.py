"""Oracle soundness sweep over every rewrite rule.

Two families of cases per rule: exhaustive small diagrams (every structure up to
a spider bound, with fixed phase patterns) and randomized applications on
circuit-derived diagrams.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterator, Optional

from zxopt.circuit import random_circuit
from zxopt.oracle import DEFAULT_TOL, equal_up_to_scalar, evaluate_diagram
from zxopt.rewrite import (
    Congruence,
    Rule,
    color_change,
    congruence_lc,
    congruence_pivot,
    eligible_subjects,
    fuse,
    hopf,
    lc_simp,
    lc_simp_applies,
    pivot_simp,
    pivot_simp_applies,
    remove_identity,
    simplify,
)
from zxopt.zxgraph import EdgeType, VertexKind, ZxDiagram, from_circuit, to_graph_like

ALL_RULES = tuple(Rule)
ALIASES = {
    "fusion": (Rule.FUSION,),
    "identity": (Rule.IDENTITY,),
    "color-change": (Rule.COLOR_CHANGE,),
    "hopf": (Rule.HOPF,),
    "lc-simp": (Rule.LC_SIMP,),
    "pivot-simp": (Rule.PIVOT_SIMP,),
    "lc": (Rule.LC_SIMP, Rule.CONGRUENCE_LC),
    "pivot": (Rule.PIVOT_SIMP, Rule.CONGRUENCE_PIVOT),
}

_PHASE_PATTERNS = (
    (Fraction(1, 4), Fraction(1, 2), Fraction(7, 4), Fraction(1)),
    (Fraction(0), Fraction(3, 4), Fraction(3, 2), Fraction(5, 4)),
)


def resolve_rules(names: Optional[list[str]]) -> tuple[Rule, ...]:
    if not names:
        return ALL_RULES
    chosen: list[Rule] = []
    for name in names:
        key = name.lower()
        if key in ALIASES:
            rules = ALIASES[key]
        else:
            try:
                rules = (Rule(name),)
            except ValueError:
                raise ValueError(f"unknown rule {name!r}") from None
        for r in rules:
            if r not in chosen:
                chosen.append(r)
    return tuple(chosen)


@dataclass
class RuleResult:
    rule: Rule
    exhaustive_cases: int = 0
    random_cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and (self.exhaustive_cases + self.random_cases) > 0


@dataclass
class SweepReport:
    results: dict[Rule, RuleResult]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def lines(self) -> list[str]:
        out = []
        for rule, res in self.results.items():
            status = "PASS" if res.passed else "FAIL"
            out.append(
                f"{status} {rule.value:<16} exhaustive={res.exhaustive_cases:<6} "
                f"random={res.random_cases:<4} failures={len(res.failures)}"
            )
        return out


# --------------------------------------------------------------------------- #
# Exhaustive enumeration


def _attach_boundaries(d: ZxDiagram, spiders: list[int], cfg) -> None:
    (ins, in_type), (outs, out_type) = cfg
    if ins is not None:
        b = d.add_vertex(VertexKind.BOUNDARY)
        d.add_edge(b, spiders[ins], in_type)
        d.inputs.append(b)
    if outs is not None:
        b = d.add_vertex(VertexKind.BOUNDARY)
        d.add_edge(b, spiders[outs], out_type)
        d.outputs.append(b)


def _boundary_configs(k: int):
    sides = [(None, EdgeType.SIMPLE)] + [(i, t) for i in range(k) for t in EdgeType]
    return list(product(sides, sides))


def graph_like_diagrams(max_spiders: int, pattern: int = 0) -> Iterator[ZxDiagram]:
    """Every graph-like diagram up to ``max_spiders`` spiders with at most one input and one output."""
    phases = _PHASE_PATTERNS[pattern % len(_PHASE_PATTERNS)]
    for k in range(1, max_spiders + 1):
        pairs = list(combinations(range(k), 2))
        for mask in range(1 << len(pairs)):
            for bcfg in _boundary_configs(k):
                d = ZxDiagram()
                sp = [d.add_spider(phases[i]) for i in range(k)]
                for j, (a, b) in enumerate(pairs):
                    if mask >> j & 1:
                        d.add_edge(sp[a], sp[b], EdgeType.HADAMARD)
                _attach_boundaries(d, sp, bcfg)
                yield d


_RAW_MULTS = ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1))


def raw_diagrams(max_spiders: int) -> Iterator[ZxDiagram]:
    """Small non-graph-like diagrams: mixed colours and parallel edges."""
    phases = (Fraction(1, 4), Fraction(0), Fraction(3, 4), Fraction(0))
    for k in range(1, max_spiders + 1):
        pairs = list(combinations(range(k), 2))
        for kinds in product((VertexKind.Z, VertexKind.X), repeat=k):
            for mults in product(_RAW_MULTS, repeat=len(pairs)):
                for bcfg in (((None, EdgeType.SIMPLE), (None, EdgeType.SIMPLE)),
                             ((0, EdgeType.SIMPLE), (k - 1, EdgeType.SIMPLE))):
                    d = ZxDiagram()
                    sp = [d.add_vertex(kinds[i], phases[i]) for i in range(k)]
                    for (a, b), (s, h) in zip(pairs, mults):
                        if s:
                            d.add_edge(sp[a], sp[b], EdgeType.SIMPLE, s)
                        if h:
                            d.add_edge(sp[a], sp[b], EdgeType.HADAMARD, h)
                    _attach_boundaries(d, sp, bcfg)
                    yield d


# --------------------------------------------------------------------------- #
# Subject enumeration per rule


def _fusion_subjects(d: ZxDiagram):
    for u in d.spiders():
        for v, (s, _) in d.adj[u].items():
            if v > u and s and d.kinds[v] == d.kinds[u]:
                yield (u, v)


def _hopf_subjects(d: ZxDiagram):
    for u in d.spiders():
        for v, (s, h) in d.adj[u].items():
            if v > u and not d.is_boundary(v):
                same = d.kinds[u] == d.kinds[v]
                if (same and h >= 2) or (not same and s >= 2):
                    yield (u, v)


def _identity_subjects(d: ZxDiagram):
    for v in d.spiders():
        if d.phases[v] == 0 and d.degree(v) == 2 and v not in d.adj[v]:
            yield (v,)


def _subjects(rule: Rule, d: ZxDiagram):
    if rule is Rule.FUSION:
        return list(_fusion_subjects(d))
    if rule is Rule.HOPF:
        return list(_hopf_subjects(d))
    if rule is Rule.IDENTITY:
        return list(_identity_subjects(d))
    if rule is Rule.COLOR_CHANGE:
        return [(v,) for v in d.spiders()]
    if rule is Rule.LC_SIMP:
        return [(v,) for v in d.spiders() if lc_simp_applies(d, v)]
    if rule is Rule.PIVOT_SIMP:
        return [(u, v) for u in d.spiders() for v in d.adj[u] if v > u and pivot_simp_applies(d, u, v)]
    if rule is Rule.CONGRUENCE_LC:
        return [(v,) for v in eligible_subjects(d, Congruence.LC)]
    return list(eligible_subjects(d, Congruence.PIVOT))


_APPLY: dict[Rule, Callable] = {
    Rule.FUSION: fuse,
    Rule.IDENTITY: remove_identity,
    Rule.COLOR_CHANGE: color_change,
    Rule.HOPF: hopf,
    Rule.LC_SIMP: lc_simp,
    Rule.PIVOT_SIMP: pivot_simp,
    Rule.CONGRUENCE_LC: congruence_lc,
    Rule.CONGRUENCE_PIVOT: congruence_pivot,
}

_RAW_RULES = (Rule.FUSION, Rule.IDENTITY, Rule.COLOR_CHANGE, Rule.HOPF)


def _force_eligible(rule: Rule, d: ZxDiagram) -> list[ZxDiagram]:
    """Phase variants that make the simplification rules applicable somewhere."""
    if rule is Rule.LC_SIMP:
        out = []
        for v in d.spiders():
            if d.is_interior(v):
                for p in (Fraction(1, 2), Fraction(3, 2)):
                    e = d.copy()
                    e.phases[v] = p
                    out.append(e)
        return out
    if rule is Rule.PIVOT_SIMP:
        out = []
        for u in d.spiders():
            for v in d.adj[u]:
                if v > u and d.is_interior(u) and d.is_interior(v):
                    for a, b in product((Fraction(0), Fraction(1)), repeat=2):
                        e = d.copy()
                        e.phases[u], e.phases[v] = a, b
                        out.append(e)
        return out
    return [d]


def check_application(rule: Rule, d: ZxDiagram, subject: tuple, tol: float = DEFAULT_TOL, before=None) -> bool:
    if before is None:
        before = evaluate_diagram(d)
    after = evaluate_diagram(_APPLY[rule](d, *subject))
    return equal_up_to_scalar(after, before, tol)


def _exhaustive(rule: Rule, max_spiders: int, res: RuleResult, tol: float) -> None:
    if rule in _RAW_RULES:
        source = raw_diagrams(min(max_spiders, 3))
    else:
        source = graph_like_diagrams(max_spiders)
    for base in source:
        for d in _force_eligible(rule, base):
            subjects = _subjects(rule, d)
            if not subjects:
                continue
            before = evaluate_diagram(d)
            for subj in subjects:
                res.exhaustive_cases += 1
                if not check_application(rule, d, subj, tol, before):
                    res.failures.append(f"exhaustive {rule.value} at {subj}: {d.to_json()}")


# --------------------------------------------------------------------------- #
# Randomized applications on circuit-derived diagrams


def _random_diagram(rule: Rule, rng: random.Random) -> ZxDiagram:
    n = rng.randint(2, 5)
    c = random_circuit(n, rng.randint(4, 8 * n), rng_seed=rng.getrandbits(32))
    d = from_circuit(c)
    if rule is Rule.HOPF:
        zs = [v for v in d.spiders() if d.kinds[v] == VertexKind.Z]
        xs = [v for v in d.spiders() if d.kinds[v] == VertexKind.X]
        if len(zs) >= 2 and rng.random() < 0.5:
            u, v = rng.sample(zs, 2)
            d.add_edge(u, v, EdgeType.HADAMARD, 2)
        elif zs and xs:
            d.add_edge(rng.choice(zs), rng.choice(xs), EdgeType.SIMPLE, 2)
    elif rule is Rule.IDENTITY:
        edges = [(u, v, t) for u, v, t in d.edges() if u != v]
        u, v, t = rng.choice(edges)
        d.remove_edge(u, v, t)
        z = d.add_spider()
        d.add_edge(u, z, t)
        d.add_edge(z, v, EdgeType.SIMPLE)
    elif rule not in _RAW_RULES:
        d = to_graph_like(d)
        if rule in (Rule.LC_SIMP, Rule.PIVOT_SIMP):
            # bias towards Clifford phases so the preconditions are met often
            for v in d.spiders():
                if d.is_interior(v) and rng.random() < 0.5:
                    d.phases[v] = Fraction(rng.randrange(4), 2)
        elif rng.random() < 0.5:
            d = simplify(d)
    return d


def _randomized(rule: Rule, n_cases: int, rng: random.Random, res: RuleResult, tol: float) -> None:
    attempts = 0
    while res.random_cases < n_cases and attempts < 50 * n_cases:
        attempts += 1
        d = _random_diagram(rule, rng)
        subjects = _subjects(rule, d)
        if not subjects:
            continue
        subj = subjects[rng.randrange(len(subjects))]
        res.random_cases += 1
        if not check_application(rule, d, subj, tol):
            res.failures.append(f"random {rule.value} at {subj}: {d.to_json()}")


def run_sweep(
    rules: Optional[tuple[Rule, ...]] = None,
    max_spiders: int = 4,
    n_random: int = 200,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> SweepReport:
    start = time.perf_counter()
    results: dict[Rule, RuleResult] = {}
    for rule in rules or ALL_RULES:
        res = RuleResult(rule)
        if max_spiders > 0:
            _exhaustive(rule, max_spiders, res, tol)
        if n_random > 0:
            _randomized(rule, n_random, random.Random(f"{seed}:{rule.value}"), res, tol)
        results[rule] = res
    return SweepReport(results, time.perf_counter() - start)
