"""Command-line front end: optimize, benchmark, verify-rules, correlate."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from zxopt import __version__
from zxopt.circuit import (
    FIXTURES,
    Circuit,
    CircuitParseError,
    complexity,
    emit_circuit,
    load_fixture,
    parse_circuit,
    random_circuit,
)
from zxopt.extract import ExtractionStuck
from zxopt.oracle import circuits_equivalent, qubit_cap
from zxopt.rewrite import dump_trace, inject_fault
from zxopt.search import (
    REFINED_K_MAX,
    Cooling,
    GaConfig,
    Objective,
    SearchConfig,
    Weighting,
    correlation_study,
    format_correlation_table,
    reduction_pct,
    run_search,
    seed_diagram,
    extracted,
)
from zxopt.soundness import resolve_rules, run_sweep

log = logging.getLogger("zxopt")

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_EXTRACTION = 2
EXIT_VERIFY = 3

CSV_HEADER = (
    "circuit",
    "qubits",
    "gates",
    "method",
    "seed",
    "comp_before",
    "comp_after",
    "two_qubit_before",
    "two_qubit_after",
    "t_count",
    "reduction_pct",
    "wall_time_s",
)


# --------------------------------------------------------------------------- #
# Run manifests


def content_hash(data: bytes) -> str:
    """Git blob hash of ``data``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seeds: dict
    input_path: Optional[str] = None
    input_hash: Optional[str] = None
    outputs: list[str] = field(default_factory=list)
    version: str = __version__

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def replay(manifest_path: Path) -> int:
    """Re-run the command recorded in a manifest."""
    return main(RunManifest.read(manifest_path).argv)


def _manifest_path(args, default_stem: str) -> Path:
    if args.manifest:
        return Path(args.manifest)
    out = getattr(args, "output", None)
    if out:
        return Path(str(out) + ".manifest.json")
    return Path(f"zxopt-{default_stem}-manifest.json")


# --------------------------------------------------------------------------- #
# Shared search flags


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("search")
    g.add_argument("--method", choices=("sa", "ga"), default="sa")
    g.add_argument("--kmax", type=int, default=REFINED_K_MAX, help="annealing steps (default %(default)s)")
    g.add_argument("--temp", type=float, default=25.0, help="initial temperature")
    g.add_argument("--cool", type=float, default=0.005, help="cooling constant c")
    g.add_argument(
        "--cooling-schedule",
        choices=[c.value for c in Cooling],
        default=Cooling.GEOMETRIC.value,
        help="geometric: T*(1-c); literal: T*c",
    )
    g.add_argument("--p-lc", type=float, default=0.5)
    g.add_argument("--p-pivot", type=float, default=None, help="defaults to 1 - p_lc")
    g.add_argument("--p-fr", type=float, default=0.1)
    g.add_argument("--mutants", type=int, default=20)
    g.add_argument("--gens", type=int, default=40)
    g.add_argument("--restarts", type=int, default=1)
    g.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.EXTRACTED_COMPLEXITY.value)
    g.add_argument("--weighting", choices=[w.value for w in Weighting], default=Weighting.UNIFORM.value)
    g.add_argument("--seed", type=int, default=0)


def _config(args, rng_seed: Optional[int] = None, method: Optional[str] = None) -> SearchConfig:
    p_pivot = args.p_pivot if args.p_pivot is not None else 1.0 - args.p_lc
    common = dict(
        t_initial=args.temp,
        cooling=args.cool,
        k_max=args.kmax,
        p_lc=args.p_lc,
        p_pivot=p_pivot,
        p_fr=args.p_fr,
        objective=Objective(args.objective),
        subject_weighting=Weighting(args.weighting),
        rng_seed=args.seed if rng_seed is None else rng_seed,
        restarts=args.restarts,
        cooling_schedule=Cooling(args.cooling_schedule),
    )
    if (method or args.method) == "ga":
        return GaConfig(n_mutants=args.mutants, n_gens=args.gens, **common)
    return SearchConfig(**common)


# --------------------------------------------------------------------------- #
# optimize


def cmd_optimize(args) -> int:
    path = Path(args.input)
    try:
        raw = path.read_bytes()
        circ = parse_circuit(raw.decode())
    except (OSError, UnicodeDecodeError, CircuitParseError) as exc:
        print(f"error: cannot read circuit: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        seed = seed_diagram(circ)
        result = run_search(seed, cfg, args.method)
    except ExtractionStuck as exc:
        print(f"error: extraction failed: {exc}", file=sys.stderr)
        return EXIT_EXTRACTION

    before, after = complexity(circ), complexity(result.best_circuit)
    stats = {
        "input": str(path),
        "method": args.method,
        "qubits": circ.n_qubits,
        "seed_score": result.seed_score,
        "best_score": result.best_score,
        "comp_before": before.comp,
        "comp_baseline": complexity(result.seed_circuit).comp,
        "comp_after": after.comp,
        "reduction_pct": round(reduction_pct(before.comp, after.comp), 4),
        "two_qubit_before": before.two_qubit_count,
        "two_qubit_after": after.two_qubit_count,
        "t_count_before": before.t_count,
        "t_count": after.t_count,
        "wall_time": 0.0 if args.no_timing else round(result.wall_time, 6),
        "extraction_failures": result.failures,
    }
    code = EXIT_OK
    if args.verify:
        if circ.n_qubits <= qubit_cap():
            ok = circuits_equivalent(circ, result.best_circuit)
            stats["equivalent_up_to_scalar"] = ok
            if not ok:
                code = EXIT_VERIFY
        else:
            stats["equivalent_up_to_scalar"] = None
            print(f"note: {circ.n_qubits} qubits exceeds the oracle cap; not verified", file=sys.stderr)

    text = emit_circuit(result.best_circuit)
    outputs = []
    stats_text = json.dumps(stats, indent=2, sort_keys=True) + "\n"
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        stats_path = Path(args.stats) if args.stats else out.with_suffix(out.suffix + ".stats.json")
        stats_path.write_text(stats_text)
        outputs += [str(out), str(stats_path)]
    else:
        sys.stdout.write(text)
        if args.stats:
            Path(args.stats).write_text(stats_text)
            outputs.append(args.stats)
        else:
            sys.stderr.write(stats_text)
    if args.trace:
        Path(args.trace).write_text(result.trace_jsonl() + dump_trace(result.rewrite_log))
        outputs.append(args.trace)

    manifest = RunManifest(
        command="optimize",
        argv=list(args.argv),
        config=cfg.to_dict(),
        seeds={"search": cfg.rng_seed},
        input_path=str(path),
        input_hash=content_hash(raw),
        outputs=outputs,
    )
    manifest.write(_manifest_path(args, "optimize"))
    return code


# --------------------------------------------------------------------------- #
# benchmark


def _derive(seed: int, name: str) -> int:
    return random.Random(f"{seed}:{name}").getrandbits(32)


@dataclass(frozen=True)
class _Cell:
    name: str
    circuit_text: str
    method: str
    search_seed: int
    args: dict


def _run_cell(cell: _Cell) -> dict:
    circ = parse_circuit(cell.circuit_text)
    ns = argparse.Namespace(**cell.args)
    before = complexity(circ)
    row = {
        "circuit": cell.name,
        "qubits": circ.n_qubits,
        "gates": len(circ.gates),
        "method": cell.method,
        "seed": cell.search_seed,
        "comp_before": before.comp,
        "two_qubit_before": before.two_qubit_count,
    }
    start = time.perf_counter()
    try:
        if cell.method == "baseline":
            best = extracted(seed_diagram(circ))
        else:
            cfg = _config(ns, rng_seed=cell.search_seed, method=cell.method)
            best = run_search(seed_diagram(circ), cfg, cell.method).best_circuit
    except ExtractionStuck as exc:
        row.update(comp_after="", two_qubit_after="", t_count="", reduction_pct="", error=str(exc))
    else:
        after = complexity(best)
        row.update(
            comp_after=after.comp,
            two_qubit_after=after.two_qubit_count,
            t_count=after.t_count,
            reduction_pct=f"{reduction_pct(before.comp, after.comp):.4f}",
        )
    elapsed = time.perf_counter() - start
    row["wall_time_s"] = "0" if ns.no_timing else f"{elapsed:.3f}"
    return row


def _benchmark_cells(args) -> list[_Cell]:
    shared = {k: v for k, v in vars(args).items() if k not in ("func", "argv")}
    cells = []
    circuits: list[tuple[str, Circuit]] = []
    for name in args.fixtures or []:
        try:
            circuits.append((name, load_fixture(name)))
        except KeyError:
            print(f"notice: no fixture for {name!r}; skipped", file=sys.stderr)
    for n in args.qubits:
        for trial in range(args.trials):
            cseed = _derive(args.seed, f"circuit:q{n}:t{trial}")
            circuits.append((f"rand_q{n}_t{trial}", random_circuit(n, args.gates_per_qubit * n, rng_seed=cseed)))
    for name, circ in circuits:
        text = emit_circuit(circ)
        for method in args.methods:
            cells.append(_Cell(name, text, method, _derive(args.seed, f"search:{name}:{method}"), shared))
    return cells


def summarize(rows: list[dict], methods: Sequence[str]) -> str:
    """Mean reduction per qubit count and method, plus mean wall time."""
    by_q: dict[int, dict[str, list[float]]] = {}
    times: dict[str, list[float]] = {m: [] for m in methods}
    for r in rows:
        if r["reduction_pct"] == "":
            continue
        by_q.setdefault(int(r["qubits"]), {m: [] for m in methods})[r["method"]].append(float(r["reduction_pct"]))
        times[r["method"]].append(float(r["wall_time_s"]))
    head = f"{'Qubits':>6} " + " ".join(f"{m.upper():>10}" for m in methods)
    lines = ["Complexity reduction (%)", head]
    for q in sorted(by_q):
        cells = []
        for m in methods:
            vals = by_q[q][m]
            cells.append(f"{sum(vals) / len(vals):>10.1f}" if vals else f"{'-':>10}")
        lines.append(f"{q:>6} " + " ".join(cells))
    tcells = [f"{(sum(t) / len(t) if t else 0.0):>10.2f}" for t in times.values()]
    lines.append(f"{'time s':>6} " + " ".join(tcells))
    return "\n".join(lines)


def cmd_benchmark(args) -> int:
    cells = _benchmark_cells(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    outputs = []
    if args.output:
        Path(args.output).write_text(buf.getvalue())
        outputs.append(args.output)
    else:
        sys.stdout.write(buf.getvalue())
    for r in rows:
        if "error" in r:
            print(f"warning: {r['circuit']}/{r['method']}: {r['error']}", file=sys.stderr)
    summary = summarize(rows, args.methods)
    if args.summary:
        Path(args.summary).write_text(summary + "\n")
        outputs.append(args.summary)
    else:
        print(summary, file=sys.stderr)
    cfg = _config(args, method="ga" if "ga" in args.methods else "sa").to_dict()
    cfg.update(
        qubits=args.qubits,
        gates_per_qubit=args.gates_per_qubit,
        trials=args.trials,
        methods=list(args.methods),
        fixtures=list(args.fixtures or []),
    )
    RunManifest(
        command="benchmark",
        argv=list(args.argv),
        config=cfg,
        seeds={"master": args.seed, **{f"{c.name}:{c.method}": c.search_seed for c in cells}},
        outputs=outputs,
    ).write(_manifest_path(args, "benchmark"))
    return EXIT_OK


# --------------------------------------------------------------------------- #
# verify-rules


def cmd_verify_rules(args) -> int:
    try:
        rules = resolve_rules(args.rule)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    faults = list(args.inject_fault or [])

    def sweep():
        return run_sweep(rules, max_spiders=args.exhaustive, n_random=args.random, seed=args.seed, tol=args.tol)

    if faults:
        from contextlib import ExitStack

        with ExitStack() as stack:
            for f in faults:
                stack.enter_context(inject_fault(f))
            report = sweep()
    else:
        report = sweep()
    for line in report.lines():
        print(line)
    print(f"{'all rules sound' if report.passed else 'soundness failures found'} ({report.seconds:.1f}s)")
    RunManifest(
        command="verify-rules",
        argv=list(args.argv),
        config={
            "rules": [r.value for r in rules],
            "exhaustive": args.exhaustive,
            "random": args.random,
            "tol": args.tol,
            "faults": faults,
        },
        seeds={"sweep": args.seed},
    ).write(_manifest_path(args, "verify-rules"))
    return EXIT_OK if report.passed else 1


# --------------------------------------------------------------------------- #
# correlate


def cmd_correlate(args) -> int:
    rows = correlation_study(args.samples, args.qubits, args.gates, args.seed)
    table = format_correlation_table(rows)
    print(table)
    outputs = []
    if args.output:
        Path(args.output).write_text(
            json.dumps([{"property": r.name, "r": r.r, "p_value": r.p_value, "n": r.n} for r in rows], indent=2) + "\n"
        )
        outputs.append(args.output)
    RunManifest(
        command="correlate",
        argv=list(args.argv),
        config={"samples": args.samples, "qubits": args.qubits, "gates": args.gates},
        seeds={"master": args.seed},
        outputs=outputs,
    ).write(_manifest_path(args, "correlate"))
    return EXIT_OK


# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zxopt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimize one circuit file")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output circuit file (default: stdout)")
    p.add_argument("--stats", help="stats JSON path (default: <output>.stats.json, or stderr)")
    p.add_argument("--trace", help="write score trace and rewrite log as JSON lines")
    p.add_argument("--verify", action="store_true", help="oracle-check the result against the input")
    p.add_argument("--no-timing", action="store_true", help="write 0 for wall_time so reruns are byte-identical")
    p.add_argument("--manifest", help="run manifest path")
    _add_search_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("benchmark", help="random-circuit and fixture benchmark grid")
    p.add_argument("--qubits", type=int, nargs="*", default=[4, 6, 8, 10, 12, 14])
    p.add_argument("--gates-per-qubit", type=int, default=15)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--methods", nargs="+", choices=("baseline", "sa", "ga"), default=["baseline", "sa", "ga"])
    p.add_argument("--fixtures", nargs="*", default=[], help=f"bundled circuits: {', '.join(FIXTURES)}")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--no-timing", action="store_true", help="write 0 for wall_time_s so reruns are byte-identical")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.add_argument("--summary", help="summary table path (default: stderr)")
    p.add_argument("--manifest", help="run manifest path")
    _add_search_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("verify-rules", help="oracle soundness sweep over all rewrite rules")
    p.add_argument("--rule", action="append", help="restrict to a rule (repeatable): fusion, identity, "
                   "color-change, hopf, lc-simp, pivot-simp, lc, pivot")
    p.add_argument("--exhaustive", type=int, default=4, metavar="N", help="max spiders in exhaustive cases")
    p.add_argument("--random", type=int, default=200, metavar="N", help="randomized applications per rule")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="append", help=argparse.SUPPRESS)
    p.add_argument("--manifest", help="run manifest path")
    p.set_defaults(func=cmd_verify_rules)

    p = sub.add_parser("correlate", help="correlate diagram properties with extracted complexity")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--qubits", type=int, default=10)
    p.add_argument("--gates", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="JSON results path")
    p.add_argument("--manifest", help="run manifest path")
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
