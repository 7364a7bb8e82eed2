"""Batch driver: build instances, run seeded searches, verify and report.

Every satisfying assignment is decoded and re-checked against the reference
compression function before it is reported; a model that decodes to a
non-colliding pair means the encoding is broken and aborts the run with a
dump of the offending data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from . import hash_core as hc
from .cnf_encoder import CnfInstance, build_instance, decode_model, emit_dimacs, model_characteristic
from .diff_model import StartingPoint, drop_rows, load_starting_point, render_characteristic
from .propagator import DifferentialPropagator, PropagatorConfig
from .solver_kernel import SAT, UNKNOWN, solve

DEFAULT_TIMEOUT = 3600.0


class VerificationError(RuntimeError):
    """A decoded model is not a collision; the encoder or solver is wrong."""


@dataclass
class SearchConfig:
    steps: int
    start_point: str | None = None          # path; None selects the bundled one
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    timeout: float | None = DEFAULT_TIMEOUT
    conflicts: int | None = None
    bitsliced: bool = False
    wordwise: bool = False
    aux_heuristic: bool = True
    blocking: bool = False
    backend: str = "native"
    out_dir: str | None = None
    emit_dimacs: bool = False
    jobs: int = 1

    @property
    def uses_bridge(self) -> bool:
        return self.bitsliced or self.wordwise or self.blocking

    @property
    def label(self) -> str:
        parts = []
        if self.bitsliced or self.wordwise:
            parts.append("P")
        if self.blocking:
            parts.append("IB")
        return "+".join(parts) or "plain"

    def propagator_config(self) -> PropagatorConfig:
        return PropagatorConfig(bitsliced=self.bitsliced, wordwise=self.wordwise,
                                aux_heuristic=self.aux_heuristic, blocking=self.blocking)


@dataclass
class SearchResult:
    steps: int
    config: str
    seed: int
    status: str
    elapsed: float
    cv: list[int] | None = None
    m: list[int] | None = None
    m2: list[int] | None = None
    verified: bool = False
    characteristic: str | None = None
    stats: dict = field(default_factory=dict)
    budget: str | None = None


def load_config_starting_point(cfg: SearchConfig) -> StartingPoint:
    if cfg.start_point is None:
        return load_starting_point(cfg.steps)
    sp = load_starting_point(cfg.start_point)
    if sp.n != cfg.steps:
        raise ValueError(f"starting point has {sp.n} steps but {cfg.steps} were requested")
    return sp


def _model_bits(inst: CnfInstance, model: Sequence[int]) -> list[bool]:
    bits = [False] * (inst.num_vars + 1)
    for lit in model:
        if abs(lit) <= inst.num_vars:
            bits[abs(lit)] = lit > 0
    return bits


def _forensic_dump(cfg: SearchConfig, seed: int, inst: CnfInstance, model: Sequence[int]) -> str:
    path = os.path.join(cfg.out_dir or ".", f"forensic_n{cfg.steps}_seed{seed}.txt")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# steps {cfg.steps} seed {seed} config {cfg.label}\n")
        fh.write("model " + " ".join(map(str, model)) + "\n")
        fh.write(inst.varmap.dump())
    return path


def run_one(cfg: SearchConfig, seed: int, inst: CnfInstance | None = None) -> SearchResult:
    if inst is None:
        inst = build_instance(cfg.steps, load_config_starting_point(cfg))
    bridge = DifferentialPropagator(inst, cfg.propagator_config()) if cfg.uses_bridge else None
    t0 = time.monotonic()
    res = solve(inst, bridge, seed=seed, conflict_budget=cfg.conflicts, time_budget=cfg.timeout,
                backend=cfg.backend)
    elapsed = time.monotonic() - t0
    stats = dict(res.stats)
    if bridge is not None:
        stats.update(bridge.report())
    out = SearchResult(cfg.steps, cfg.label, seed, res.status, elapsed, stats=stats, budget=res.budget)
    if res.status == SAT:
        bits = _model_bits(inst, res.model)
        pair = decode_model(inst, bits)
        if not hc.verify_sfs_collision(pair.cv, pair.m, pair.m2, cfg.steps):
            path = _forensic_dump(cfg, seed, inst, res.model)
            raise VerificationError(f"model for seed {seed} does not decode to a collision; dump in {path}")
        out.cv, out.m, out.m2 = pair.cv, pair.m, pair.m2
        out.verified = True
        out.characteristic = render_characteristic(model_characteristic(inst, bits))
    return out


def _run_seed(args: tuple[SearchConfig, int]) -> SearchResult:
    cfg, seed = args
    return run_one(cfg, seed)


def run_search(cfg: SearchConfig) -> list[SearchResult]:
    """One result per seed, in seed order."""
    sp = load_config_starting_point(cfg)
    inst = build_instance(cfg.steps, sp)
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        if cfg.emit_dimacs:
            with open(os.path.join(cfg.out_dir, f"sha256_n{cfg.steps}.cnf"), "w") as fh:
                fh.write(emit_dimacs(inst, [f"{cfg.steps}-step semi-free-start collision instance"]))
            with open(os.path.join(cfg.out_dir, f"sha256_n{cfg.steps}.varmap"), "w") as fh:
                fh.write(inst.varmap.dump())
    if cfg.jobs > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            results = list(ex.map(_run_seed, [(cfg, s) for s in cfg.seeds]))
    else:
        results = [run_one(cfg, s, inst) for s in cfg.seeds]
    if cfg.out_dir:
        write_outputs(results, cfg.out_dir)
    return results


# -- reporting ------------------------------------------------------------------

CSV_FIELDS = ["steps", "config", "seed", "status", "elapsed", "verified", "cv", "m", "m2",
              "conflicts", "decisions", "propagations", "ext_propagations", "ext_clauses", "budget"]


def results_csv(results: Iterable[SearchResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow({
            "steps": r.steps, "config": r.config, "seed": r.seed, "status": r.status,
            "elapsed": f"{r.elapsed:.3f}", "verified": int(r.verified),
            "cv": hc.format_words(r.cv) if r.cv else "", "m": hc.format_words(r.m) if r.m else "",
            "m2": hc.format_words(r.m2) if r.m2 else "",
            "conflicts": r.stats.get("conflicts", ""), "decisions": r.stats.get("decisions", ""),
            "propagations": r.stats.get("propagations", ""),
            "ext_propagations": r.stats.get("ext_propagations", ""),
            "ext_clauses": r.stats.get("ext_clauses", ""), "budget": r.budget or "",
        })
    return buf.getvalue()


def summarize(results: Iterable[SearchResult]) -> dict[tuple[int, str], dict]:
    """Per (steps, config): runs, collisions found, and minimum / median solve time."""
    groups: dict[tuple[int, str], list[SearchResult]] = {}
    for r in results:
        groups.setdefault((r.steps, r.config), []).append(r)
    out = {}
    for key in sorted(groups):
        rs = groups[key]
        times = [r.elapsed for r in rs if r.status == SAT]
        out[key] = {
            "runs": len(rs),
            "solved": len(times),
            "min_time": min(times) if times else None,
            "median_time": statistics.median(times) if times else None,
        }
    return out


def summary_table(results: Iterable[SearchResult]) -> str:
    summ = summarize(results)
    configs = sorted({c for _, c in summ})
    steps = sorted({s for s, _ in summ})
    lines = ["steps " + " ".join(f"{c:>8}" for c in configs)]
    for s in steps:
        cells = []
        for c in configs:
            g = summ.get((s, c))
            cells.append(f"{g['solved']:>5}/{g['runs']:<2}" if g else f"{'-':>8}")
        lines.append(f"{s:>5} " + " ".join(cells))
    return "\n".join(lines) + "\n"


def min_time_series(results: Iterable[SearchResult]) -> dict[str, list[tuple[int, float]]]:
    """Per config, the fastest solve time at each step count (for plotting)."""
    series: dict[str, list[tuple[int, float]]] = {}
    for (s, c), g in summarize(results).items():
        if g["min_time"] is not None:
            series.setdefault(c, []).append((s, g["min_time"]))
    return series


def collision_record(r: SearchResult) -> str:
    """Chaining value, both messages and the common output as hex word lines."""
    h1 = hc.compress(r.cv, r.m, r.steps)
    return (f"h0  {hc.format_words(r.cv)}\n"
            f"M   {hc.format_words(r.m)}\n"
            f"M'  {hc.format_words(r.m2)}\n"
            f"h1  {hc.format_words(h1)}\n")


def write_outputs(results: Sequence[SearchResult], out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w") as fh:
        fh.write(results_csv(results))
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(summary_table(results))
    stats = [{"steps": r.steps, "config": r.config, "seed": r.seed, "status": r.status,
              "elapsed": r.elapsed, "stats": r.stats} for r in results]
    with open(os.path.join(out_dir, "stats.json"), "w") as fh:
        json.dump(stats, fh, indent=1, sort_keys=True)
    for r in results:
        if r.status != SAT:
            continue
        stem = f"n{r.steps}_{r.config.replace('+', '')}_seed{r.seed}"
        with open(os.path.join(out_dir, f"{stem}.characteristic.txt"), "w") as fh:
            fh.write(r.characteristic or "")
        with open(os.path.join(out_dir, f"{stem}.collision.txt"), "w") as fh:
            fh.write(collision_record(r))


def verify_csv(text: str) -> list[bool]:
    """Re-verify every SAT row of a results CSV from its recorded words alone."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        if row["status"] != SAT:
            continue
        cv = hc.parse_words(row["cv"], 8)
        m = hc.parse_words(row["m"], 16)
        m2 = hc.parse_words(row["m2"], 16)
        out.append(hc.verify_sfs_collision(cv, m, m2, int(row["steps"])))
    return out


# -- command line -------------------------------------------------------------------

def _seed_list(text: str) -> list[int]:
    seeds: list[int] = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-", 1)
            seeds.extend(range(int(a), int(b) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shasat", description="Semi-free-start collision search for step-reduced SHA-256.")
    p.add_argument("--steps", type=int, required=True, help="number of steps (compression rounds)")
    p.add_argument("--start-point", default=None, help="starting-point file; default is the bundled one for --steps")
    p.add_argument("--seeds", type=_seed_list, default=list(range(10)), help="comma list or ranges, e.g. 0-9")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds per seed")
    p.add_argument("--conflicts", type=int, default=None, help="conflict budget per seed")
    p.add_argument("--enable-prop", dest="prop", action="store_true", default=False,
                   help="bitsliced and wordwise propagation")
    p.add_argument("--no-prop", dest="prop", action="store_false")
    p.add_argument("--enable-ib", dest="ib", action="store_true", default=False, help="inconsistency blocking")
    p.add_argument("--no-ib", dest="ib", action="store_false")
    p.add_argument("--aux-heuristic", choices=("on", "off"), default="on",
                   help="treat unknown auxiliary differences as zero in wordwise propagation")
    p.add_argument("--backend", choices=("native", "cadical"), default="native")
    p.add_argument("--jobs", type=int, default=1, help="seeds run in parallel")
    p.add_argument("--emit-dimacs", action="store_true", help="write the CNF and variable map, then exit")
    p.add_argument("--out", default="results", help="output directory")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = SearchConfig(
        steps=args.steps, start_point=args.start_point, seeds=args.seeds, timeout=args.timeout,
        conflicts=args.conflicts, bitsliced=args.prop, wordwise=args.prop,
        aux_heuristic=args.aux_heuristic == "on", blocking=args.ib, backend=args.backend,
        out_dir=args.out, emit_dimacs=args.emit_dimacs, jobs=args.jobs,
    )
    if args.emit_dimacs:
        sp = load_config_starting_point(cfg)
        inst = build_instance(cfg.steps, sp)
        os.makedirs(cfg.out_dir, exist_ok=True)
        cnf = os.path.join(cfg.out_dir, f"sha256_n{cfg.steps}.cnf")
        with open(cnf, "w") as fh:
            fh.write(emit_dimacs(inst, [f"{cfg.steps}-step semi-free-start collision instance"]))
        with open(os.path.join(cfg.out_dir, f"sha256_n{cfg.steps}.varmap"), "w") as fh:
            fh.write(inst.varmap.dump())
        print(f"wrote {cnf} ({inst.num_vars} variables, {len(inst.clauses)} clauses)")
        return 0
    results = run_search(cfg)
    sys.stdout.write(summary_table(results))
    for r in results:
        print(f"seed {r.seed}: {r.status} in {r.elapsed:.1f}s" + (" (verified)" if r.verified else ""))
    return 0


__all__ = ["SearchConfig", "SearchResult", "run_search", "run_one", "drop_rows", "results_csv",
           "summarize", "summary_table", "min_time_series", "collision_record", "write_outputs",
           "verify_csv", "main", "VerificationError", "UNKNOWN"]
