from __future__ import annotations

import hashlib

import pytest
from hypothesis import given, strategies as st

from shasat import hash_core as hc

word = st.integers(0, hc.MASK32)


# Digests published with the SHA-256 standard and in common test suites.
PUBLISHED = {
    b"abc": "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    b"": "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
    b"The quick brown fox jumps over the lazy dog":
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592",
}


@pytest.mark.parametrize("msg,digest", sorted(PUBLISHED.items()))
def test_published_vectors(msg, digest):
    assert hc.sha256_single_block(msg).hex() == digest


@given(st.binary(max_size=55))
def test_matches_hashlib(data):
    assert hc.sha256_single_block(data) == hashlib.sha256(data).digest()


def test_two_block_message_rejected():
    with pytest.raises(ValueError):
        hc.sha256_single_block(b"a" * 56)


def test_rotr_and_sigmas():
    assert hc.rotr(1, 1) == 0x80000000
    assert hc.sigma_small(0, 0) == 0 and hc.sigma_big(1, 0) == 0
    x = 0x12345678
    assert hc.sigma_small(0, x) == hc.rotr(x, 7) ^ hc.rotr(x, 18) ^ (x >> 3)
    assert hc.sigma_big(0, x) == hc.rotr(x, 2) ^ hc.rotr(x, 13) ^ hc.rotr(x, 22)


@given(st.lists(word, min_size=8, max_size=8))
def test_register_order_roundtrip(regs):
    assert hc.cv_to_registers(hc.cv_from_registers(regs)) == regs


def test_standard_iv_layout():
    # A_-1 is register a, E_-1 is register e
    assert hc.STANDARD_IV[3] == 0x6A09E667
    assert hc.STANDARD_IV[7] == 0x510E527F


@given(st.lists(word, min_size=16, max_size=16), st.integers(16, 64))
def test_expansion_prefix(m, n):
    w = hc.expand_message(m, n)
    assert len(w) == n and w[:16] == m
    full = hc.expand_message(m, 64)
    assert w == full[:n]


@given(st.lists(word, min_size=8, max_size=8), st.lists(word, min_size=16, max_size=16), st.integers(1, 64))
def test_step_reduced_is_prefix_of_trace(cv, m, n):
    out, tr = hc.compress_trace(cv, m, n)
    full_out, full = hc.compress_trace(cv, m, 64)
    assert [tr.A[i] for i in range(-4, n)] == [full.A[i] for i in range(-4, n)]
    assert out == hc.compress(cv, m, n)


def test_invalid_step_count():
    with pytest.raises(ValueError):
        hc.compress(list(hc.STANDARD_IV), [0] * 16, -1)
    with pytest.raises(ValueError):
        hc.compress(list(hc.STANDARD_IV), [0] * 16, 65)


def test_identical_messages_are_not_a_collision():
    m = list(range(16))
    assert not hc.verify_sfs_collision(hc.STANDARD_IV, m, m, 20)


def test_word_text_roundtrip():
    words = [0, 1, 0xDEADBEEF]
    assert hc.parse_words(hc.format_words(words), 3) == words
    with pytest.raises(ValueError):
        hc.parse_words("00 11", 3)
