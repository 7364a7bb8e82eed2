from __future__ import annotations

import random

import pytest

from helpers import ClauseEvaluator
from shasat import hash_core as hc
from shasat.cnf_encoder import (
    apply_starting_point, build_instance, condition_units, decode_model, emit_dimacs,
    falsified_clauses, model_characteristic, parse_dimacs, witness_assignment,
)
from shasat.diff_model import ConditionWord, StartingPoint, characteristic_from_pair


def _random_pair(rng: random.Random, n: int):
    cv = [rng.getrandbits(32) for _ in range(8)]
    m = [rng.getrandbits(32) for _ in range(16)]
    m2 = list(m)
    w = rng.randrange(min(n, 16))
    m2[w] ^= 1 << rng.randrange(32)
    return cv, m, m2


@pytest.fixture(scope="module")
def inst10():
    return build_instance(10)


def test_witness_satisfies_every_clause(inst10):
    rng = random.Random(1)
    ev = ClauseEvaluator(inst10.clauses)
    for _ in range(20):
        cv, m, m2 = _random_pair(rng, 10)
        assert ev.falsified(witness_assignment(inst10, cv, m, m2)).size == 0


def test_evaluator_agrees_with_reference(inst10):
    rng = random.Random(2)
    cv, m, m2 = _random_pair(rng, 10)
    a = witness_assignment(inst10, cv, m, m2)
    a[inst10.varmap.lit("A", 3, 7, 0)] ^= True
    ev = ClauseEvaluator(inst10.clauses)
    assert len(ev.falsified(a)) == len(falsified_clauses(inst10.clauses, a)) > 0


def test_decode_and_characteristic_of_witness(inst10):
    rng = random.Random(3)
    cv, m, m2 = _random_pair(rng, 10)
    a = witness_assignment(inst10, cv, m, m2)
    d = decode_model(inst10, a)
    assert d.cv == cv and d.m[:10] == m[:10] and d.m2[:10] == m2[:10]
    _, t1 = hc.compress_trace(cv, m, 10)
    _, t2 = hc.compress_trace(cv, m2, 10)
    assert model_characteristic(inst10, a) == characteristic_from_pair(t1, t2)


def test_condition_units():
    pos = (10, 11, 12)
    assert condition_units("?", pos) == []
    assert condition_units("-", pos) == [[-12]]
    assert condition_units("u", pos) == [[10], [-11], [12]]


def test_difference_in_chaining_value_rejected(inst10):
    rows = {-1: {"A": ConditionWord.fill("x")}}
    with pytest.raises(ValueError):
        apply_starting_point(StartingPoint(n=10, rows=rows), inst10.varmap)


def test_step_count_mismatch():
    with pytest.raises(ValueError):
        build_instance(5, StartingPoint(n=6, rows={}))


def test_shared_chaining_value_and_no_early_difference(inst10):
    vm = inst10.varmap
    assert vm.word("A", -2, 0) == vm.word("A", -2, 1)
    assert all(l == -vm.true_var for l in vm.word("E", -1, 2))


def test_dimacs_roundtrip(inst10):
    text = emit_dimacs(inst10, ["hello"])
    assert text.startswith("c hello\np cnf")
    nv, cls = parse_dimacs(text)
    assert nv == inst10.num_vars and cls == inst10.clauses


def test_encoding_is_deterministic():
    a = build_instance(6)
    b = build_instance(6)
    assert a.clauses == b.clauses and a.num_vars == b.num_vars


def test_helper_clauses_are_implied():
    # helpers only add redundant clauses: witnesses satisfy both encodings
    rng = random.Random(4)
    with_h = build_instance(6, helpers=True)
    without = build_instance(6, helpers=False)
    assert len(with_h.clauses) > len(without.clauses)
    ev = ClauseEvaluator(with_h.clauses)
    for _ in range(5):
        assert ev.falsified(witness_assignment(with_h, *_random_pair(rng, 6))).size == 0


def test_open_message_difference_gets_a_clause():
    n = 6
    rows = {i: {"A": ConditionWord.fill("-"), "E": ConditionWord.fill("-")} for i in range(-4, 0)}
    for i in range(n):
        rows[i] = {"W": ConditionWord.fill("?") if i == 2 else ConditionWord.fill("-")}
    sp = StartingPoint(n=n, rows=rows)
    inst = build_instance(n, sp)
    vm = inst.varmap
    assert sorted(inst.clauses[-1]) == sorted(vm.lit("W", 2, b, 2) for b in range(32))
    forced = dict(rows)
    forced[2] = {"W": ConditionWord.parse("x" + "?" * 31)}
    assert len(build_instance(n, StartingPoint(n=n, rows=forced)).clauses) == len(inst.clauses)
