from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from oracles import wordwise_reference
from shasat.diff_model import ConditionWord
from shasat.wordwise_engine import (
    ForcedBit, Term, assemble_equation, forced_conditions, modular_difference, split_subproblems,
    swap_runs, wordwise_propagate,
)


def W(text: str) -> ConditionWord:
    return ConditionWord.parse(text, len(text))


def engine_facts(terms, max_unknowns=10):
    res = wordwise_propagate([Term(l, W(c), s) for l, c, s in terms], len(terms[0][1]),
                             max_unknowns=max_unknowns)
    if not res.consistent:
        return None
    return {(f.label, f.bit, f.inst): f.value for f in res.forced}


def test_equal_differences_example():
    # dA = dB with A=[ux-], B=[-n-] forces the middle bit of A to u
    terms = [Term("A", W("ux-")), Term("B", W("-n-"), -1)]
    res = wordwise_propagate(terms, 3)
    out = forced_conditions(res, terms)
    assert str(out["A"]) == "uu-"
    assert str(out["B"]) == "-n-"


def test_three_word_example():
    terms = [Term("A", W("u1xxx")), Term("B", W("xx-nx")), Term("C", W("---u-"), -1)]
    prob = assemble_equation(terms, 5)
    assert prob.target == 4
    subs = split_subproblems(prob)
    ranges = [(s.lo, s.hi) for s in subs]
    assert ranges == [(1, 2), (3, 3), (4, 4)]
    labels = [sorted((prob.unknowns[k].label, prob.unknowns[k].bit) for k in s.unknowns) for s in subs]
    assert labels == [[("A", 0), ("A", 1), ("B", 0)], [("A", 2)], [("B", 3)]]
    assert subs[0].no_overflow and subs[1].no_overflow
    out = forced_conditions(wordwise_propagate(terms, 5), terms)
    assert str(out["A"]) == "u1nxx" and str(out["B"]) == "xu-nx"


def test_modular_difference_and_swap():
    assert modular_difference(W("-n-")).value == 6     # -2 mod 8
    assert not modular_difference(W("x--")).known
    assert str(swap_runs(W("un-x"))) == "nu-x"


def test_inconsistent_equation():
    res = wordwise_propagate([Term("A", W("--u")), Term("B", W("---"), -1)], 3)
    assert res.applicable and not res.consistent


def test_aux_heuristic():
    terms = [Term("A", W("x--")), Term("T", W("-?-"), 1, primary=False), Term("B", W("x--"), -1)]
    assert not wordwise_propagate(terms, 3, aux_heuristic=False).applicable
    res = wordwise_propagate(terms, 3, aux_heuristic=True)
    # with the auxiliary word taken as difference-free the top bits cancel
    assert res.applicable and res.consistent


def test_large_ranges_are_skipped():
    terms = [Term(f"A{k}", W("?" * 8)) for k in range(4)] + [Term("R", W("-" * 8), -1)]
    res = wordwise_propagate(terms, 8)
    assert res.skipped >= 1 and res.forced == []


def random_condition(rng: random.Random, width: int, free_budget: list[int]) -> str:
    out = []
    for _ in range(width):
        r = rng.random()
        if r < 0.15 and free_budget[0] >= 2:
            out.append("?")
            free_budget[0] -= 2
        elif r < 0.35 and free_budget[0] >= 1:
            out.append("x")
            free_budget[0] -= 1
        elif r < 0.5:
            out.append(rng.choice("un"))
        elif r < 0.6 and free_budget[0] >= 1:
            out.append("-")
            free_budget[0] -= 1
        else:
            out.append(rng.choice("01"))
    return "".join(out)


def random_problem(rng: random.Random, max_width=12, budget=10):
    width = rng.randint(2, max_width)
    k = rng.randint(2, 4)
    left = [budget]
    terms = [(f"T{j}", random_condition(rng, width, left), 1 if j < k - 1 else -1) for j in range(k)]
    return terms


@given(st.integers(0, 10**9))
def test_matches_word_pair_oracle(seed):
    terms = random_problem(random.Random(seed))
    assert engine_facts(terms) == wordwise_reference(terms)


def test_forced_bit_records():
    res = wordwise_propagate([Term("A", W("ux-")), Term("B", W("-n-"), -1)], 3)
    assert res.forced == [ForcedBit("A", 1, 0, 1), ForcedBit("A", 1, 1, 0)]
