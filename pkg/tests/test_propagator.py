from __future__ import annotations

import random

import pytest

from shasat import hash_core as hc
from shasat.cnf_encoder import build_instance, witness_assignment
from shasat.diff_model import ConditionWord, StartingPoint
from shasat.propagator import DifferentialPropagator, PropagatorConfig
from shasat.solver_kernel import SAT, solve


@pytest.fixture(scope="module")
def inst9():
    return build_instance(9)


def _witness(rng, inst):
    cv = [rng.getrandbits(32) for _ in range(8)]
    m = [rng.getrandbits(32) for _ in range(16)]
    m2 = list(m)
    m2[rng.randrange(9)] ^= 1 << rng.randrange(32)
    return witness_assignment(inst, cv, m, m2)


def _lit_true(assign, lit):
    return assign[lit] if lit > 0 else not assign[-lit]


@pytest.mark.parametrize("seed", range(3))
def test_sound_on_a_real_pair(inst9, seed):
    """Replaying a genuine pair never triggers clauses or wrong propagations."""
    rng = random.Random(seed)
    a = _witness(rng, inst9)
    cfg = PropagatorConfig(aux_heuristic=False)
    p = DifferentialPropagator(inst9, cfg)
    order = [v for v in sorted(p.observed)]
    rng.shuffle(order)
    assigned = set()
    for step, v in enumerate(order):
        if v in assigned:
            continue
        if step % 40 == 0:
            p.on_new_level()
        lit = v if a[v] else -v
        p.on_assign(lit)
        assigned.add(v)
        if step % 7:
            continue
        while True:
            props = p.ask_propagations()
            cl = p.ask_external_clause()
            assert cl is None, f"clause {cl} against a genuine pair"
            for q in props:
                assert _lit_true(a, q)
                reason = p.ask_reason(q)
                assert reason[0] == q
                assert all(not _lit_true(a, r) for r in reason[1:])
            for q in p.decisions:
                assert _lit_true(a, q)
            if not props:
                break
            for q in props:
                if abs(q) not in assigned:
                    p.on_assign(q)
                    assigned.add(abs(q))
    assert p.report()["refinements"] > 0


def test_backtrack_clears_state(inst9):
    p = DifferentialPropagator(inst9)
    p.on_new_level()
    v = inst9.varmap.lit("W", 3, 0, 2)
    p.on_assign(v)
    p.ask_propagations()
    p.on_backtrack(0)
    assert p.val[v] is None and p.reasons == {} and len(p.graph) == 0


def test_small_search_with_all_layers():
    # 9 steps, a single message difference in W0 bit 31: the last four rows collide
    n = 9
    rows = {}
    for i in range(-4, n):
        r = {}
        if i < 0 or i >= n - 4:
            r["A"] = r["E"] = ConditionWord.fill("-")
        if i >= 0:
            r["W"] = ConditionWord.parse("x" + "-" * 31) if i == 0 else ConditionWord.fill("?" if i <= 8 else "-")
        rows[i] = r
    inst = build_instance(n, StartingPoint(n=n, rows=rows))
    bridge = DifferentialPropagator(inst, PropagatorConfig())
    r = solve(inst, bridge, seed=0, time_budget=300)
    assert r.status == SAT
    model = [False] * (inst.num_vars + 1)
    for lit in r.model:
        model[abs(lit)] = lit > 0
    from shasat.cnf_encoder import decode_model
    d = decode_model(inst, model)
    assert hc.verify_sfs_collision(d.cv, d.m, d.m2, n)
    rep = bridge.report()
    assert rep["bitsliced_rule_cache_hit_rate"] > 0
