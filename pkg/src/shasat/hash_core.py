"""Bit-exact step-reduced SHA-256 compression.

State words follow the A/E recurrence form: the chaining value is the list
``[A_-4, A_-3, A_-2, A_-1, E_-4, E_-3, E_-2, E_-1]`` and each step computes

    T_i = E_{i-4} + Sigma1(E_{i-1}) + IF(E_{i-1}, E_{i-2}, E_{i-3}) + K_i + W_i
    E_i = A_{i-4} + T_i
    A_i = T_i + Sigma0(A_{i-1}) + MAJ(A_{i-1}, A_{i-2}, A_{i-3})

with all additions modulo 2**32.  Round constants and the initial hash value
are taken from FIPS 180-4.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Sequence

MASK32 = 0xFFFFFFFF

# FIPS 180-4, section 4.2.2
K: tuple[int, ...] = (
    0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1, 0x923F82A4, 0xAB1C5ED5,
    0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3, 0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174,
    0xE49B69C1, 0xEFBE4786, 0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
    0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147, 0x06CA6351, 0x14292967,
    0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13, 0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85,
    0xA2BFE8A1, 0xA81A664B, 0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
    0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A, 0x5B9CCA4F, 0x682E6FF3,
    0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208, 0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
)

# FIPS 180-4, section 5.3.3, in register order a..h
STANDARD_H0: tuple[int, ...] = (
    0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A, 0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19,
)

# Rotation/shift amounts, also used by the encoder and the propagators.
SIGMA0_SMALL = (7, 18, 3)    # rotr, rotr, shr
SIGMA1_SMALL = (17, 19, 10)
SIGMA0_BIG = (2, 13, 22)     # three rotr
SIGMA1_BIG = (6, 11, 25)

MAX_STEPS = 64


def rotr(x: int, n: int, width: int = 32) -> int:
    mask = (1 << width) - 1
    return ((x >> n) | (x << (width - n))) & mask


def sigma_small(which: int, x: int) -> int:
    """Message-expansion function sigma0 (``which=0``) or sigma1 (``which=1``)."""
    r1, r2, s = SIGMA1_SMALL if which else SIGMA0_SMALL
    return rotr(x, r1) ^ rotr(x, r2) ^ (x >> s)


def sigma_big(which: int, x: int) -> int:
    """State-update function Sigma0 (``which=0``) or Sigma1 (``which=1``)."""
    r1, r2, r3 = SIGMA1_BIG if which else SIGMA0_BIG
    return rotr(x, r1) ^ rotr(x, r2) ^ rotr(x, r3)


def bitwise_if(x: int, y: int, z: int) -> int:
    return ((x & y) ^ (~x & z)) & MASK32


def bitwise_maj(x: int, y: int, z: int) -> int:
    return (x & y) ^ (x & z) ^ (y & z)


def bitwise_func(f: str, x: int, y: int, z: int) -> int:
    if f == "IF":
        return bitwise_if(x, y, z)
    if f == "MAJ":
        return bitwise_maj(x, y, z)
    raise ValueError(f"unknown bitwise function {f!r}")


def _check_steps(n: int) -> None:
    if not 0 <= n <= MAX_STEPS:
        raise ValueError(f"step count must be in 0..{MAX_STEPS}, got {n}")


def _check_words(words: Sequence[int], count: int, what: str) -> None:
    if len(words) != count:
        raise ValueError(f"{what} needs {count} words, got {len(words)}")
    for w in words:
        if not 0 <= w <= MASK32:
            raise ValueError(f"{what} word out of range: {w!r}")


def expand_message(m: Sequence[int], n: int = MAX_STEPS) -> list[int]:
    """Return the first ``n`` expanded message words W_0..W_{n-1}."""
    _check_words(m, 16, "message block")
    _check_steps(n)
    w = list(m[:n])
    for i in range(16, n):
        w.append((sigma_small(1, w[i - 2]) + w[i - 7] + sigma_small(0, w[i - 15]) + w[i - 16]) & MASK32)
    return w


@dataclass
class StateTrace:
    """Per-step words of one compression run.

    ``A`` and ``E`` are dicts indexed from -4 to n-1; ``T`` and ``W`` are lists
    indexed from 0.
    """

    n: int
    A: dict[int, int] = field(default_factory=dict)
    E: dict[int, int] = field(default_factory=dict)
    T: list[int] = field(default_factory=list)
    W: list[int] = field(default_factory=list)

    def word(self, role: str, i: int) -> int:
        if role == "A":
            return self.A[i]
        if role == "E":
            return self.E[i]
        if role == "T":
            return self.T[i]
        if role == "W":
            return self.W[i]
        raise KeyError(role)


def compress_trace(cv: Sequence[int], m: Sequence[int], n: int) -> tuple[list[int], StateTrace]:
    """Run ``n`` steps and return ``(output chaining value, trace)``."""
    _check_words(cv, 8, "chaining value")
    w = expand_message(m, n)
    tr = StateTrace(n=n, W=w)
    a, e = tr.A, tr.E
    for j in range(4):
        a[j - 4] = cv[j]
        e[j - 4] = cv[4 + j]
    for i in range(n):
        t = (e[i - 4] + sigma_big(1, e[i - 1]) + bitwise_if(e[i - 1], e[i - 2], e[i - 3]) + K[i] + w[i]) & MASK32
        tr.T.append(t)
        e[i] = (a[i - 4] + t) & MASK32
        a[i] = (t + sigma_big(0, a[i - 1]) + bitwise_maj(a[i - 1], a[i - 2], a[i - 3])) & MASK32
    out = [(a[n - 4 + j] + cv[j]) & MASK32 for j in range(4)]
    out += [(e[n - 4 + j] + cv[4 + j]) & MASK32 for j in range(4)]
    return out, tr


def compress(cv: Sequence[int], m: Sequence[int], n: int = MAX_STEPS) -> list[int]:
    """Step-reduced compression with feed-forward; returns the new chaining value."""
    return compress_trace(cv, m, n)[0]


def verify_sfs_collision(cv: Sequence[int], m: Sequence[int], m2: Sequence[int], n: int) -> bool:
    """True iff ``m != m2`` and both compress to the same value under ``cv``."""
    if list(m) == list(m2):
        return False
    return compress(cv, m, n) == compress(cv, m2, n)


# -- conversions -----------------------------------------------------------

def cv_from_registers(h: Sequence[int]) -> list[int]:
    """Map FIPS register order (a..h) to ``[A_-4..A_-1, E_-4..E_-1]``."""
    _check_words(h, 8, "register state")
    return [h[3], h[2], h[1], h[0], h[7], h[6], h[5], h[4]]


def cv_to_registers(cv: Sequence[int]) -> list[int]:
    _check_words(cv, 8, "chaining value")
    return [cv[3], cv[2], cv[1], cv[0], cv[7], cv[6], cv[5], cv[4]]


STANDARD_IV: tuple[int, ...] = tuple(cv_from_registers(STANDARD_H0))


def pad_message(data: bytes) -> list[list[int]]:
    """FIPS padding, returned as a list of 16-word blocks."""
    bitlen = 8 * len(data)
    data = data + b"\x80" + b"\x00" * ((55 - len(data)) % 64) + struct.pack(">Q", bitlen)
    return [list(struct.unpack(">16I", data[i:i + 64])) for i in range(0, len(data), 64)]


def sha256_single_block(data: bytes) -> bytes:
    """Full 64-step SHA-256 of a message that pads to exactly one block."""
    blocks = pad_message(data)
    if len(blocks) != 1:
        raise ValueError("message does not fit in a single padded block")
    out = cv_to_registers(compress(STANDARD_IV, blocks[0], 64))
    return struct.pack(">8I", *out)


def parse_words(text: str, count: int | None = None) -> list[int]:
    """Parse space-separated hex words such as ``"afea2566 1e0a73e2 ..."``."""
    words = [int(tok, 16) for tok in text.split()]
    if count is not None:
        _check_words(words, count, "hex word list")
    return words


def format_words(words: Sequence[int]) -> str:
    return " ".join(f"{w:08x}" for w in words)
