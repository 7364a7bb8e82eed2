from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from shasat import hash_core as hc
from shasat.diff_model import (
    MASK_TO_SYMBOL, PAIRS, SYMBOL_TO_MASK, SYMBOLS, ConditionWord, Contradiction, StartingPoint,
    StartingPointError, allowed_pairs, characteristic_from_pair, condition_of_pair_set, drop_rows,
    intersect, load_bundled, parse_starting_point, render_characteristic, signed_difference_view,
    tightest_symbol, BUNDLED,
)

symbol = st.sampled_from(SYMBOLS)


def test_symbol_table():
    assert allowed_pairs("x") == {(1, 0), (0, 1)}
    assert allowed_pairs("-") == {(0, 0), (1, 1)}
    assert allowed_pairs("u") == {(1, 0)}
    assert allowed_pairs("n") == {(0, 1)}
    assert allowed_pairs("?") == set(PAIRS)
    assert condition_of_pair_set({(0, 0)}) == "0"
    assert condition_of_pair_set({(0, 0), (1, 0)}) is None


@given(symbol, symbol)
def test_intersection_is_set_intersection(a, b):
    common = allowed_pairs(a) & allowed_pairs(b)
    if not common:
        with pytest.raises(Contradiction):
            intersect(a, b)
    else:
        assert allowed_pairs(intersect(a, b)) == common


def test_printable_set_closed_under_intersection():
    for a in SYMBOLS:
        for b in SYMBOLS:
            m = SYMBOL_TO_MASK[a] & SYMBOL_TO_MASK[b]
            assert m == 0 or m in MASK_TO_SYMBOL


@given(st.integers(1, 15))
def test_tightest_symbol_covers_and_is_minimal(mask):
    s = tightest_symbol(mask)
    m = SYMBOL_TO_MASK[s]
    assert m & mask == mask
    for other in MASK_TO_SYMBOL:
        if other & mask == mask:
            assert bin(other).count("1") >= bin(m).count("1")


def test_word_text_is_msb_first():
    w = ConditionWord.parse("u" + "-" * 31)
    assert w[31] == "u" and w[0] == "-"
    assert str(w) == "u" + "-" * 31
    with pytest.raises(StartingPointError):
        ConditionWord.parse("u--")
    with pytest.raises(StartingPointError):
        ConditionWord.parse("z" * 32)


@given(st.integers(0, hc.MASK32), st.integers(0, hc.MASK32))
def test_from_values_records_the_pair(v, v2):
    w = ConditionWord.from_values(v, v2)
    for i in range(32):
        assert allowed_pairs(w[i]) == {(v >> i & 1, v2 >> i & 1)}


def _sp(n: int) -> StartingPoint:
    rows = {}
    for i in range(-4, n):
        r = {"A": ConditionWord.fill("-"), "E": ConditionWord.fill("?")}
        if i >= 0:
            r["W"] = ConditionWord.fill("x" if i == 3 else "-")
        rows[i] = r
    return StartingPoint(n=n, rows=rows)


def test_render_parse_roundtrip():
    sp = _sp(6)
    text = render_characteristic(sp, header="demo")
    assert text.startswith("# demo")
    assert parse_starting_point(text) == sp


def test_parse_rejects_gaps_and_bad_rows():
    good = render_characteristic(_sp(3)).splitlines()
    with pytest.raises(StartingPointError):
        parse_starting_point("\n".join(good[:2] + good[3:]))
    with pytest.raises(StartingPointError):
        parse_starting_point("-4: " + "-" * 32 + " " + "-" * 32 + " " + "-" * 32)
    with pytest.raises(StartingPointError):
        parse_starting_point("")


def test_absent_word_means_unconstrained():
    text = render_characteristic(StartingPoint(n=1, rows={i: {} for i in range(-4, 1)}))
    sp = parse_starting_point(text)
    assert sp.n == 1 and sp.condition("A", 0, 5) == "?"


def test_drop_rows():
    sp = _sp(28)
    cut = drop_rows(sp, 2)
    assert cut.n == 26 and max(cut.rows) == 25
    assert drop_rows(sp, 0) == sp
    with pytest.raises(ValueError):
        drop_rows(sp, 28 + 4)
    with pytest.raises(ValueError):
        drop_rows(sp, -1)


def test_characteristic_of_a_pair_and_signed_view():
    cv = list(hc.STANDARD_IV)
    m = list(range(16))
    m2 = list(m)
    m2[5] ^= 1
    _, t1 = hc.compress_trace(cv, m, 8)
    _, t2 = hc.compress_trace(cv, m2, 8)
    ch = characteristic_from_pair(t1, t2)
    assert ch.get("W", 5)[0] == "u"          # m[5] = 5 has bit 0 set
    assert str(ch.get("W", 4)) == str(ConditionWord.from_values(4, 4))
    view = signed_difference_view(ch)
    assert set(str(view.get("A", 0))) == {"-"}
    assert view.has_message_difference()


@pytest.mark.parametrize("steps", sorted(BUNDLED))
def test_bundled_starting_points_parse(steps):
    sp = load_bundled(steps)
    assert sp.n == steps
    # some message-block position is allowed to differ
    assert any(sp.condition("W", i, b) not in "-01" for i in range(16) for b in range(32))
    for i in range(steps - 4, steps):
        assert str(sp.get("A", i)) == "-" * 32 and str(sp.get("E", i)) == "-" * 32


# a 21-step collision found by a plain solver run on the bundled starting point
SP21_CV = "2e8e4e8a a900d251 3103cab0 7f7a9153 c5332e08 7d744c15 d4745f17 3b2dcf05"
SP21_M = ("3b7907bc 371c0592 a109de35 ead63918 18b2432d be17152a 7c2bbbd1 74af3c01 "
          "835808b3 6497ea07 06036382 fc6a9fb1 7e476831 ad3f22d3 48470000 91a2f050")
SP21_M2 = ("3b7907bc 371c0592 a109de35 ead63918 18b2432d be17152a 7c2bbbd2 e302770a "
           "dc0afe0f 2497ca5e 06036382 fc6a9fb1 7e476831 ad3f22d3 4846ffff 91a2f050")


def test_bundled_21_step_point_has_a_conforming_collision():
    cv, m, m2 = hc.parse_words(SP21_CV, 8), hc.parse_words(SP21_M, 16), hc.parse_words(SP21_M2, 16)
    assert hc.verify_sfs_collision(cv, m, m2, 21)
    _, t1 = hc.compress_trace(cv, m, 21)
    _, t2 = hc.compress_trace(cv, m2, 21)
    sp = load_bundled(21)
    assert characteristic_from_pair(t1, t2).refines(sp)
