"""Simulated annealing and genetic search over congruence applications."""

from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

import networkx as nx
from scipy import stats

from zxopt.circuit import Circuit, basic_optimize, complexity, random_circuit
from zxopt.extract import ExtractionStuck, extract_circuit
from zxopt.rewrite import (
    Congruence,
    RewriteStep,
    Rule,
    apply_congruence,
    eligible_subjects,
    simplify,
)
from zxopt.zxgraph import ZxDiagram, from_circuit, graph_stats, spider_graph

log = logging.getLogger(__name__)

REFINED_K_MAX = 2500


class Objective(str, Enum):
    EXTRACTED_COMPLEXITY = "ExtractedComplexity"
    EDGE_COUNT = "EdgeCount"
    DENSITY = "Density"
    CENTRALITY = "Centrality"


class Weighting(str, Enum):
    UNIFORM = "Uniform"
    DEGREE = "Degree"
    NEIGHBOR_DEGREE_SUM = "NeighborDegreeSum"
    NEIGHBOR_DEGREE_AVG = "NeighborDegreeAvg"
    LOAD_CENTRALITY = "LoadCentrality"
    EDGE_BETWEENNESS = "EdgeBetweenness"


class Cooling(str, Enum):
    GEOMETRIC = "geometric"  # T <- T * (1 - c)
    LITERAL = "literal"  # T <- T * c


@dataclass
class SearchConfig:
    t_initial: float = 25.0
    cooling: float = 0.005
    k_max: int = 1000
    p_lc: float = 0.5
    p_pivot: float = 0.5
    p_fr: float = 0.1
    objective: Objective = Objective.EXTRACTED_COMPLEXITY
    subject_weighting: Weighting = Weighting.UNIFORM
    rng_seed: int = 0
    restarts: int = 1
    cooling_schedule: Cooling = Cooling.GEOMETRIC

    def __post_init__(self) -> None:
        self.objective = Objective(self.objective)
        self.subject_weighting = Weighting(self.subject_weighting)
        self.cooling_schedule = Cooling(self.cooling_schedule)
        for name in ("p_lc", "p_pivot", "p_fr"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if abs(self.p_lc + self.p_pivot - 1.0) > 1e-9:
            raise ValueError("p_lc + p_pivot must equal 1")
        if self.t_initial <= 0:
            raise ValueError("t_initial must be positive")
        if not 0.0 <= self.cooling < 1.0:
            raise ValueError("cooling must lie in [0, 1)")
        if self.k_max < 0:
            raise ValueError("k_max must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, Enum):
                out[k] = v.value
        return out


@dataclass
class GaConfig(SearchConfig):
    n_mutants: int = 20
    n_gens: int = 40
    k_tourn: int = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.n_mutants < 2:
            raise ValueError("n_mutants must be at least 2")
        if self.k_tourn != 2:
            raise ValueError("tournament size is fixed at 2")
        if self.n_gens < 0:
            raise ValueError("n_gens must be non-negative")


@dataclass
class OptimizationResult:
    """Outcome of a search run.

    ``best_score`` is measured by the configured objective; for the default
    objective it equals ``complexity(best_circuit).comp``.
    """

    best_circuit: Circuit
    best_score: float
    seed_score: float
    seed_circuit: Circuit
    score_trace: list[tuple[int, float]] = field(default_factory=list)
    rewrite_log: list[RewriteStep] = field(default_factory=list)
    wall_time: float = 0.0
    failures: int = 0

    def stats(self) -> dict:
        before = complexity(self.seed_circuit)
        after = complexity(self.best_circuit)
        return {
            "seed_score": self.seed_score,
            "best_score": self.best_score,
            "reduction_pct": reduction_pct(before.comp, after.comp),
            "two_qubit_before": before.two_qubit_count,
            "two_qubit_after": after.two_qubit_count,
            "t_count": after.t_count,
            "wall_time": self.wall_time,
            "extraction_failures": self.failures,
        }

    def stats_json(self) -> str:
        return json.dumps(self.stats(), indent=2, sort_keys=True)

    def trace_jsonl(self) -> str:
        return "".join(json.dumps({"step": k, "score": s}) + "\n" for k, s in self.score_trace)


class NoEligibleSubject(RuntimeError):
    pass


def reduction_pct(before: float, after: float) -> float:
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


# --------------------------------------------------------------------------- #
# Scoring


def extracted(d: ZxDiagram) -> Circuit:
    """basic_optimize(extract(simplify_to_fixpoint(d))); raises ExtractionStuck."""
    return basic_optimize(extract_circuit(simplify(d)))


def _proxy(d: ZxDiagram, objective: Objective) -> float:
    edges, density, centrality = graph_stats(d)
    if objective is Objective.EDGE_COUNT:
        return float(edges)
    if objective is Objective.DENSITY:
        return density
    return centrality


def score(d: ZxDiagram, objective: Objective = Objective.EXTRACTED_COMPLEXITY) -> float:
    """Lower is better."""
    objective = Objective(objective)
    if objective is Objective.EXTRACTED_COMPLEXITY:
        return complexity(extracted(d)).comp
    return _proxy(d, objective)


def _evaluate(d: ZxDiagram, objective: Objective) -> tuple[float, Circuit]:
    circ = extracted(d)
    if objective is Objective.EXTRACTED_COMPLEXITY:
        return complexity(circ).comp, circ
    return _proxy(d, objective), circ


# --------------------------------------------------------------------------- #
# Neighbour sampling


def subject_probabilities(weights: list[float]) -> list[float]:
    """P(x) = mu(x) / sum(mu); falls back to uniform when every weight is zero."""
    total = float(sum(weights))
    if total <= 0:
        return [1.0 / len(weights)] * len(weights)
    return [w / total for w in weights]


def subject_weights(d: ZxDiagram, kind: Congruence, subjects: list, weighting: Weighting) -> list[float]:
    weighting = Weighting(weighting)
    if weighting is Weighting.UNIFORM:
        return [1.0] * len(subjects)
    lc = Congruence(kind) is Congruence.LC
    deg = d.degree

    def nbr_degrees(vs) -> list[int]:
        seen = set()
        for v in vs:
            seen.update(d.neighbors(v))
        seen.difference_update(vs)
        return [deg(w) for w in seen]

    if weighting is Weighting.DEGREE:
        return [float(deg(x)) if lc else float(deg(x[0]) + deg(x[1])) for x in subjects]
    if weighting in (Weighting.NEIGHBOR_DEGREE_SUM, Weighting.NEIGHBOR_DEGREE_AVG):
        out = []
        for x in subjects:
            ds = nbr_degrees([x] if lc else list(x))
            if weighting is Weighting.NEIGHBOR_DEGREE_SUM:
                out.append(float(sum(ds)))
            else:
                out.append(sum(ds) / len(ds) if ds else 0.0)
        return out
    G = spider_graph(d)
    if weighting is Weighting.LOAD_CENTRALITY:
        load = nx.load_centrality(G)
        return [load[x] if lc else load[x[0]] + load[x[1]] for x in subjects]
    eb = nx.edge_betweenness_centrality(G)

    def edge_bc(a, b) -> float:
        return eb.get((a, b), eb.get((b, a), 0.0))

    if lc:
        return [sum(edge_bc(x, w) for w in G.neighbors(x)) for x in subjects]
    return [edge_bc(u, v) for u, v in subjects]


def neighbor(d: ZxDiagram, cfg: SearchConfig, rng: random.Random, timestamp: int = 0) -> tuple[ZxDiagram, RewriteStep]:
    """Apply one randomly chosen congruence to a copy of ``d``."""
    subjects = {
        Congruence.LC: eligible_subjects(d, Congruence.LC),
        Congruence.PIVOT: eligible_subjects(d, Congruence.PIVOT),
    }
    if not subjects[Congruence.LC] and not subjects[Congruence.PIVOT]:
        raise NoEligibleSubject("no spider admits either congruence")
    kind = Congruence.LC if rng.random() < cfg.p_lc else Congruence.PIVOT
    if not subjects[kind]:
        kind = Congruence.PIVOT if kind is Congruence.LC else Congruence.LC
    subs = subjects[kind]
    if cfg.subject_weighting is Weighting.UNIFORM:
        subject = subs[rng.randrange(len(subs))]
    else:
        probs = subject_probabilities(subject_weights(d, kind, subs, cfg.subject_weighting))
        subject = rng.choices(subs, weights=probs)[0]
    out = apply_congruence(d, kind, subject)
    if rng.random() < cfg.p_fr:
        out = simplify(out)
    rule = Rule.CONGRUENCE_LC if kind is Congruence.LC else Rule.CONGRUENCE_PIVOT
    subj = (subject,) if isinstance(subject, int) else tuple(subject)
    return out, RewriteStep(rule, subj, timestamp)


# --------------------------------------------------------------------------- #
# Simulated annealing


def acceptance_probability(delta: float, temperature: float) -> float:
    if delta <= 0:
        return 1.0
    return math.exp(-delta / temperature)


def next_temperature(t: float, cfg: SearchConfig) -> float:
    if cfg.cooling_schedule is Cooling.LITERAL:
        return t * cfg.cooling
    return t * (1.0 - cfg.cooling)


def temperature_schedule(cfg: SearchConfig) -> list[float]:
    temps = []
    t = cfg.t_initial
    for _ in range(cfg.k_max):
        temps.append(t)
        t = next_temperature(t, cfg)
    return temps


def anneal(seed: ZxDiagram, cfg: SearchConfig) -> OptimizationResult:
    """Returns the best state seen (best-so-far), not the final state."""
    start = time.perf_counter()
    seed_score, seed_circ = _evaluate(seed, cfg.objective)
    best_score, best_circ = seed_score, seed_circ
    trace: list[tuple[int, float]] = []
    rewrite_log: list[RewriteStep] = []
    failures = 0
    step_no = 0
    for restart in range(cfg.restarts):
        rng = random.Random(f"{cfg.rng_seed}:sa:{restart}")
        state, energy = seed, seed_score
        t = cfg.t_initial
        trace.append((step_no, energy))
        for k in range(1, cfg.k_max + 1):
            step_no += 1
            try:
                cand, step = neighbor(state, cfg, rng, timestamp=k)
            except NoEligibleSubject:
                break
            try:
                cand_energy, cand_circ = _evaluate(cand, cfg.objective)
            except ExtractionStuck as exc:
                failures += 1
                log.warning("extraction failed at step %d: %s", k, exc)
            else:
                delta = cand_energy - energy
                if delta <= 0 or rng.random() < acceptance_probability(delta, t):
                    state, energy = cand, cand_energy
                    rewrite_log.append(step)
                    if energy < best_score:
                        best_score, best_circ = energy, cand_circ
            trace.append((step_no, energy))
            t = next_temperature(t, cfg)
    return OptimizationResult(
        best_circuit=best_circ,
        best_score=best_score,
        seed_score=seed_score,
        seed_circuit=seed_circ,
        score_trace=trace,
        rewrite_log=rewrite_log,
        wall_time=time.perf_counter() - start,
        failures=failures,
    )


# --------------------------------------------------------------------------- #
# Genetic algorithm


@dataclass
class _Mutant:
    diagram: ZxDiagram
    fitness: float
    circuit: Circuit


def tournament(population: list, fitness: list[float], rng: random.Random, k: int = 2):
    """Draw ``k`` entrants with replacement; the lowest fitness wins (first drawn on ties)."""
    picks = [rng.randrange(len(population)) for _ in range(k)]
    winner = min(picks, key=lambda i: fitness[i])
    return population[winner]


def evolve(seed: ZxDiagram, cfg: GaConfig) -> OptimizationResult:
    """Mutation-only GA with size-2 tournaments; returns the best mutant ever seen."""
    start = time.perf_counter()
    seed_score, seed_circ = _evaluate(seed, cfg.objective)
    origin = _Mutant(seed, seed_score, seed_circ)
    best = origin
    trace: list[tuple[int, float]] = [(0, seed_score)]
    rewrite_log: list[RewriteStep] = []
    failures = 0

    def mutate(parent: _Mutant, gen: int, i: int) -> _Mutant:
        nonlocal failures
        rng = random.Random(f"{cfg.rng_seed}:gen{gen}:mut{i}")
        try:
            child, step = neighbor(parent.diagram, cfg, rng, timestamp=gen)
        except NoEligibleSubject:
            return parent
        try:
            fit, circ = _evaluate(child, cfg.objective)
        except ExtractionStuck as exc:
            failures += 1
            log.warning("extraction failed in generation %d: %s", gen, exc)
            return parent
        rewrite_log.append(step)
        return _Mutant(child, fit, circ)

    population = [mutate(origin, 0, i) for i in range(cfg.n_mutants)]
    for gen in range(cfg.n_gens + 1):
        if gen > 0:
            sel = random.Random(f"{cfg.rng_seed}:gen{gen}:select")
            fitness = [m.fitness for m in population]
            survivors = [tournament(population, fitness, sel, cfg.k_tourn) for _ in range(cfg.n_mutants)]
            population = [mutate(s, gen, i) for i, s in enumerate(survivors)]
        gen_best = min(population, key=lambda m: m.fitness)
        if gen_best.fitness < best.fitness:
            best = gen_best
        trace.append((gen + 1, gen_best.fitness))
    return OptimizationResult(
        best_circuit=best.circuit,
        best_score=best.fitness,
        seed_score=seed_score,
        seed_circuit=seed_circ,
        score_trace=trace,
        rewrite_log=rewrite_log,
        wall_time=time.perf_counter() - start,
        failures=failures,
    )


# --------------------------------------------------------------------------- #
# Pipeline helpers


def seed_diagram(c: Circuit) -> ZxDiagram:
    """Fixpoint-simplified graph-like diagram of ``c``; the search seed."""
    return simplify(from_circuit(c))


def baseline(c: Circuit) -> Circuit:
    """The fixpoint pipeline without search."""
    return extracted(seed_diagram(c))


# --------------------------------------------------------------------------- #
# Proxy-objective correlation


PROPERTIES = ("# Edges", "Centrality", "Density")


@dataclass(frozen=True)
class CorrelationRow:
    name: str
    r: float
    p_value: float
    n: int

    @property
    def defined(self) -> bool:
        return not math.isnan(self.r)


def pearson(xs, ys) -> tuple[float, float]:
    """Pearson r and two-tailed p; (nan, nan) when either side has zero variance."""
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        return math.nan, math.nan
    res = stats.pearsonr(xs, ys)
    return float(res[0]), float(res[1])


def correlation_samples(n_samples: int, qubits: int, gates: int, rng_seed: int) -> list[tuple[int, float, float, float]]:
    """(extracted complexity, edges, centrality, density) per random circuit.

    Graph properties are taken on the diagram exactly as converted from the
    circuit, before any normalization.
    """
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    master = random.Random(f"{rng_seed}:correlate")
    rows = []
    for _ in range(n_samples):
        c = random_circuit(qubits, gates, rng_seed=master.getrandbits(32))
        d = from_circuit(c)
        edges, density, centrality = graph_stats(d)
        comp = complexity(extracted(d)).comp
        rows.append((comp, edges, centrality, density))
    return rows


def correlation_study(n_samples: int, qubits: int, gates: int, rng_seed: int) -> list[CorrelationRow]:
    samples = correlation_samples(n_samples, qubits, gates, rng_seed)
    comps = [s[0] for s in samples]
    out = []
    for idx, name in enumerate(PROPERTIES, start=1):
        r, p = pearson([s[idx] for s in samples], comps)
        out.append(CorrelationRow(name, r, p, len(samples)))
    return out


def format_correlation_table(rows: list[CorrelationRow]) -> str:
    lines = [f"{'Property':<12} {'r':>8} {'p':>10}"]
    for row in rows:
        if row.defined:
            lines.append(f"{row.name:<12} {row.r:>8.3f} {row.p_value:>10.3g}")
        else:
            lines.append(f"{row.name:<12} {'undef':>8} {'undef':>10}")
    return "\n".join(lines)


def run_search(seed: ZxDiagram, cfg: SearchConfig, method: str = "sa") -> OptimizationResult:
    if method == "sa":
        return anneal(seed, cfg)
    if method == "ga":
        if not isinstance(cfg, GaConfig):
            raise TypeError("the ga method needs a GaConfig")
        return evolve(seed, cfg)
    raise ValueError(f"unknown method {method!r}")


def config_from_json(text: str, ga: Optional[bool] = None) -> SearchConfig:
    data = json.loads(text)
    cls = GaConfig if (ga or (ga is None and "n_mutants" in data)) else SearchConfig
    return cls(**data)
