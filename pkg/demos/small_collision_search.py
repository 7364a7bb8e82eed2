"""Find a short semi-free-start collision and print its characteristic.

The starting point puts a single difference in the top bit of W0 and asks
for equal states in the last four steps; everything else is left open.  By
default both the plain solver and the solver with the differential
propagator are run on the same seeds.

    python demos/small_collision_search.py --steps 9 --seeds 0-2
"""

from __future__ import annotations

import argparse

from shasat import hash_core as hc
from shasat.cnf_encoder import build_instance
from shasat.diff_model import ConditionWord, StartingPoint
from shasat.orchestrator import SearchConfig, collision_record, run_one, summary_table


def open_starting_point(n: int) -> StartingPoint:
    rows = {}
    for i in range(-4, n):
        r = {}
        if i < 0 or i >= n - 4:
            r["A"] = r["E"] = ConditionWord.fill("-")
        if i >= 0:
            r["W"] = ConditionWord.parse("x" + "-" * 31) if i == 0 else ConditionWord.fill("?")
        rows[i] = r
    return StartingPoint(n=n, rows=rows)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--timeout", type=float, default=300)
    ap.add_argument("--backend", default="native", choices=("native", "cadical"))
    args = ap.parse_args()
    lo, _, hi = args.seeds.partition("-")
    seeds = range(int(lo), int(hi or lo) + 1)

    inst = build_instance(args.steps, open_starting_point(args.steps))
    print(f"{args.steps} steps: {inst.num_vars} variables, {len(inst.clauses)} clauses")
    results = []
    for flags in ({}, {"bitsliced": True, "wordwise": True, "blocking": True}):
        for seed in seeds:
            cfg = SearchConfig(steps=args.steps, seeds=[seed], timeout=args.timeout, backend=args.backend, **flags)
            r = run_one(cfg, seed, inst)
            results.append(r)
            print(f"  {cfg.label:>5} seed {seed}: {r.status} in {r.elapsed:.1f} s")
    print(summary_table(results))
    best = min((r for r in results if r.verified), key=lambda r: r.elapsed, default=None)
    if best is not None:
        print(collision_record(best))
        print(best.characteristic)
        assert hc.verify_sfs_collision(best.cv, best.m, best.m2, args.steps)


if __name__ == "__main__":
    main()
