from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import ALLOWED, SYMBOLS, bitslice_reference
from shasat import hash_core as hc
from shasat.diff_model import Contradiction, SYMBOL_TO_MASK
from shasat.prop_engine import (
    BitsliceEngine, BitsliceKey, LRUCache, add_word_slices, condition_of_assignment, eval_slice,
    propagate_bitslice, propagate_word, render_word, word_conds, xor_word_slices,
)

symbol = st.sampled_from(SYMBOLS)


def check(func, ins, outs, offset=0, engine=None):
    got = propagate_bitslice(BitsliceKey(func, tuple(ins), tuple(outs), offset), engine)
    want = bitslice_reference(func, ins, outs, offset)
    if want is None:
        assert got is None
    else:
        assert got is not None and got.symbols == want


def test_worked_examples():
    assert propagate_bitslice(BitsliceKey("XOR3", ("x", "x", "-"), ("?",))).outputs == ("-",)
    r = propagate_bitslice(BitsliceKey("XOR3", ("?", "?", "?"), ("?",)))
    assert r.symbols == ("?",) * 4


def test_adder_column_example():
    # X=[x-x-], Y=[x---] at bit 1 with an unknown incoming carry
    r = propagate_bitslice(BitsliceKey("ADD", ("x", "-", "?"), ("?", "?")))
    assert r.outputs[0] in ("x", "?")
    # with the carry known to carry no difference the sum bit is forced to differ
    r = propagate_bitslice(BitsliceKey("ADD", ("x", "-", "-"), ("?", "?")))
    assert r.outputs[0] == "x"


def test_contradiction_is_a_result():
    assert propagate_bitslice(BitsliceKey("XOR2", ("u", "u"), ("x",))) is None


@pytest.mark.parametrize("func", ["XOR3", "IF", "MAJ"])
def test_bitwise_exhaustive_inputs(func):
    for ins in product(SYMBOLS, repeat=3):
        check(func, ins, ("?",))


@given(st.sampled_from(["XOR2", "XOR3", "IF", "MAJ"]), st.data())
def test_bitwise_random_with_outputs(func, data):
    k = 2 if func == "XOR2" else 3
    ins = data.draw(st.lists(symbol, min_size=k, max_size=k))
    check(func, ins, (data.draw(symbol),))


@given(st.integers(1, 7), st.integers(0, 1), st.data())
def test_adders_random(k, offset, data):
    n_out = max(1, (k + offset).bit_length())
    n_out = data.draw(st.integers(1, min(3, n_out)))
    ins = data.draw(st.lists(symbol, min_size=k, max_size=k))
    outs = data.draw(st.lists(symbol, min_size=n_out, max_size=n_out))
    check("ADD", ins, outs, offset)


def test_key_arity_checked():
    with pytest.raises(ValueError):
        BitsliceKey("XOR3", ("?", "?"), ("?",))
    with pytest.raises(ValueError):
        BitsliceKey("ADD", ("?",) * 8, ("?",))
    with pytest.raises(ValueError):
        BitsliceKey("SHA", ("?",), ("?",))


@given(st.sampled_from(["XOR3", "IF", "MAJ"]), st.lists(symbol, min_size=3, max_size=3), st.integers(0, 2), symbol)
def test_monotone(func, ins, pos, tighter):
    base = propagate_bitslice(BitsliceKey(func, tuple(ins), ("?",)))
    if SYMBOL_TO_MASK[tighter] & ~SYMBOL_TO_MASK[ins[pos]]:
        return
    ins2 = list(ins)
    ins2[pos] = tighter
    refined = propagate_bitslice(BitsliceKey(func, tuple(ins2), ("?",)))
    if refined is None:
        return
    assert base is not None
    for a, b in zip(refined.symbols, base.symbols):
        assert SYMBOL_TO_MASK[a] & ~SYMBOL_TO_MASK[b] == 0


def test_cache_transparency_and_lru():
    rng = random.Random(0)
    keys = []
    for _ in range(400):
        k = rng.randint(2, 5)
        keys.append(BitsliceKey("ADD", tuple(rng.choice(SYMBOLS) for _ in range(k)), ("?", "?"), rng.randint(0, 1)))
        keys.append(BitsliceKey("MAJ", tuple(rng.choice(SYMBOLS) for _ in range(3)), (rng.choice(SYMBOLS),)))
    off, small, big = BitsliceEngine(0), BitsliceEngine(7), BitsliceEngine()
    for key in keys + keys:
        r = off.propagate(key)
        assert small.propagate(key) == r == big.propagate(key)
    assert len(small.cache) <= 7 and len(off.cache) == 0
    assert big.cache.hit_rate >= 0.5

    c = LRUCache(2)
    c.put("a", 1)
    c.put("b", 2)
    c.get("a")
    c.put("c", 3)
    assert c.get("b") is LRUCache._MISSING and c.get("a") == 1


def test_condition_of_assignment():
    assert condition_of_assignment(None, None, None) == "?"
    assert condition_of_assignment(None, None, 1) == "x"
    assert condition_of_assignment(None, None, 0) == "-"
    assert condition_of_assignment(1, None, 1) == "u"
    assert condition_of_assignment(0, 0, None) == "0"
    with pytest.raises(Contradiction):
        condition_of_assignment(1, 1, 1)


# -- word level ---------------------------------------------------------------

def test_toy_sigma_example():
    # 4-bit rotation-xor with amounts (1, 2, 3) on X=[11--]
    slices = xor_word_slices("X", "Y", (1, 2, 3), shift_last=False, width=4)
    conds = word_conds("X", "11--")
    out = propagate_word(slices, conds)
    assert render_word("Y", {**conds, **out}, 4) == "----"


def test_unknown_word_gives_nothing():
    slices = xor_word_slices("X", "Y", hc.SIGMA0_BIG, shift_last=False)
    assert propagate_word(slices, {}) == {}


@given(st.lists(st.integers(0, hc.MASK32), min_size=6, max_size=6), st.integers(0, hc.MASK32))
def test_concrete_inputs_give_concrete_outputs(vals, const):
    x, x2, y, y2, z, z2 = vals
    conds = {}
    for name, a, b in (("X", x, x2), ("Y", y, y2), ("Z", z, z2)):
        for i in range(32):
            conds[(name, i)] = next(s for s, p in ALLOWED.items() if p == ((a >> i & 1, b >> i & 1),))
    slices = add_word_slices(["X", "Y", "Z"], "R", const=const)
    out = propagate_word(slices, conds)
    r1 = (x + y + z + const) & hc.MASK32
    r2 = (x2 + y2 + z2 + const) & hc.MASK32
    for i in range(32):
        assert ALLOWED[out[("R", i)]] == ((r1 >> i & 1, r2 >> i & 1),)

    s = xor_word_slices("X", "S", hc.SIGMA0_SMALL, shift_last=True)
    out = propagate_word(s, conds)
    s1, s2 = hc.sigma_small(0, x), hc.sigma_small(0, x2)
    for i in range(32):
        assert ALLOWED[out[("S", i)]] == ((s1 >> i & 1, s2 >> i & 1),)


def test_word_contradiction_raises():
    slices = add_word_slices(["X"], "R", width=4)
    conds = {**word_conds("X", "0000"), **word_conds("R", "1---")}
    with pytest.raises(Contradiction):
        propagate_word(slices, conds)


def test_eval_slice_adder_bits():
    assert eval_slice("ADD", [1, 1, 1], 2, offset=1) == (0, 0)
    assert eval_slice("ADD", [1, 1, 1], 3, offset=1) == (0, 0, 1)
