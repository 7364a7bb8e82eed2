"""Small two-level minimiser used to build clause sets for adder columns.

A clause over variables ``0..n-1`` is returned as a tuple of signed
1-based indices, DIMACS style.  Inputs are tiny (at most ten variables) so a
plain Quine-McCluskey pass followed by a greedy cover is fast enough.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable


def prime_implicants(minterms: Iterable[int], nvars: int) -> list[tuple[int, int]]:
    """Prime implicants of the set of ``minterms`` as ``(value, care_mask)`` cubes."""
    full = (1 << nvars) - 1
    current = {(m, full) for m in minterms}
    primes: set[tuple[int, int]] = set()
    while current:
        merged: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        by_mask: dict[int, set[int]] = {}
        for v, mask in current:
            by_mask.setdefault(mask, set()).add(v)
        for mask, values in by_mask.items():
            for v in values:
                bit = 1
                while bit <= full:
                    if mask & bit and not v & bit and (v | bit) in values:
                        merged.add((v, mask & ~bit))
                        used.add((v, mask))
                        used.add((v | bit, mask))
                    bit <<= 1
        primes |= current - used
        current = merged
    return sorted(primes)


def _cube_covers(cube: tuple[int, int], m: int) -> bool:
    v, mask = cube
    return m & mask == v


def greedy_cover(primes: list[tuple[int, int]], minterms: Iterable[int]) -> list[tuple[int, int]]:
    remaining = set(minterms)
    cover_sets = [(p, {m for m in remaining if _cube_covers(p, m)}) for p in primes]
    chosen = []
    # essential primes first
    for m in sorted(remaining):
        holders = [p for p, s in cover_sets if m in s]
        if len(holders) == 1 and holders[0] not in chosen:
            chosen.append(holders[0])
    for p in chosen:
        remaining -= next(s for q, s in cover_sets if q == p)
    while remaining:
        best, best_set = max(cover_sets, key=lambda ps: (len(ps[1] & remaining), -bin(ps[0][1]).count("1")))
        chosen.append(best)
        remaining -= best_set
    return chosen


def cnf_of_relation(nvars: int, holds: Callable[[int], bool], full_primes: bool = False) -> list[tuple[int, ...]]:
    """Clauses whose models are exactly the assignments where ``holds`` is true.

    Variable ``k`` of the assignment ``a`` is ``a >> k & 1``.
    """
    falsifying = [a for a in range(1 << nvars) if not holds(a)]
    primes = prime_implicants(falsifying, nvars)
    cubes = primes if full_primes else greedy_cover(primes, falsifying)
    clauses = []
    for v, mask in cubes:
        clause = []
        for k in range(nvars):
            if mask >> k & 1:
                # the cube has x_k = bit; the blocking clause needs the opposite
                clause.append(-(k + 1) if v >> k & 1 else k + 1)
        clauses.append(tuple(clause))
    return clauses


@lru_cache(maxsize=None)
def counter_clauses(n_inputs: int, n_outputs: int, offset: int = 0) -> tuple[tuple[int, ...], ...]:
    """CNF for ``sum(inputs) + offset == outputs`` as a binary number (mod 2**n_outputs).

    Variables ``1..n_inputs`` are inputs; ``n_inputs+1..`` are the output bits
    from least significant upward.
    """
    if n_inputs < 1 or n_inputs > 7:
        raise ValueError(f"adder column supports 1..7 inputs, got {n_inputs}")
    if n_outputs < 1 or n_outputs > 3:
        raise ValueError(f"adder column supports 1..3 outputs, got {n_outputs}")
    in_mask = (1 << n_inputs) - 1
    mod = 1 << n_outputs

    def holds(a: int) -> bool:
        return (bin(a & in_mask).count("1") + offset) % mod == a >> n_inputs

    return tuple(cnf_of_relation(n_inputs + n_outputs, holds))
