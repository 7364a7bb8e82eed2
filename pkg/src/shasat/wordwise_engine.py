"""Wordwise propagation through modular differences of additions.

For an addition ``R = X_1 + ... + X_k (+ const)`` computed in both runs the
modular differences satisfy ``dX_1 + ... + dX_k - dR = 0``.  Writing ``-dR``
as the difference of ``R`` with the runs swapped (``u`` and ``n``
exchanged), every addition becomes a sum of word differences equal to zero.

Each position contributes ``(a - a') * 2**i``.  Positions marked ``x``,
``n`` or ``?`` are shifted by ``2**i`` so that all contributions are
non-negative: an ``x`` becomes one binary unknown in column ``i + 1``, an
``n`` disappears and a ``?`` becomes two unknowns in column ``i`` (``a`` and
``1 - a'``).  The shifts are collected in the target.  The resulting
bitvector equation is cut into carry-independent column ranges that are
brute-forced separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .diff_model import ConditionWord, signed_digit

MAX_UNKNOWNS = 10


@dataclass(frozen=True)
class ModularDifference:
    value: int
    known: bool
    width: int = 32


def modular_difference(w: ConditionWord) -> ModularDifference:
    """``sum (c_i - c'_i) 2**i mod 2**width`` when every digit is fixed."""
    total = 0
    for i, c in enumerate(w):
        d = signed_digit(c)
        if d is None:
            return ModularDifference(0, False, w.width)
        total += d << i
    return ModularDifference(total % (1 << w.width), True, w.width)


def swap_runs(w: ConditionWord) -> ConditionWord:
    """The same conditions with the two runs exchanged."""
    sw = {"u": "n", "n": "u"}
    return ConditionWord(tuple(sw.get(c, c) for c in w))


@dataclass(frozen=True)
class Unknown:
    """A binary unknown and where it came from.

    ``kind`` is ``"x"`` (value 1 means ``u``), ``"a"`` (the first-run bit of a
    ``?``) or ``"b"`` (one minus the second-run bit of a ``?``).  ``swapped``
    marks terms that entered the equation with the runs exchanged.
    """

    term: int
    label: object
    bit: int
    kind: str
    column: int
    swapped: bool = False
    primary: bool = True


@dataclass
class Term:
    label: object
    word: ConditionWord
    sign: int = 1           # +1 operand, -1 result
    primary: bool = True


@dataclass
class NormalizedAdditionProblem:
    width: int
    unknowns: list[Unknown]
    constants: list[int]       # constant ones per column
    target: int

    def columns(self) -> list[list[int]]:
        cols: list[list[int]] = [[] for _ in range(self.width)]
        for k, u in enumerate(self.unknowns):
            cols[u.column].append(k)
        return cols

    def holds(self, values: Sequence[int]) -> bool:
        total = sum(c << j for j, c in enumerate(self.constants))
        total += sum(v << u.column for v, u in zip(values, self.unknowns))
        return (total - self.target) % (1 << self.width) == 0


@dataclass
class Subproblem:
    lo: int                    # first column
    hi: int                    # last column (inclusive)
    unknowns: list[int]        # indices into the problem's unknowns
    carry_in: int
    target: int                # residual target bits lo..hi
    no_overflow: bool = True
    solutions: list[tuple[int, ...]] | None = None
    skipped: bool = False


def assemble_equation(terms: Sequence[Term], width: int = 32, aux_heuristic: bool = True) -> NormalizedAdditionProblem | None:
    """Normalize ``sum(sign * d(word)) = 0``.

    Non-primary (auxiliary) words must have a known modular difference, after
    turning their ``?`` into ``-`` when ``aux_heuristic`` is on; otherwise the
    equation is not applicable and ``None`` is returned.
    """
    unknowns: list[Unknown] = []
    constants = [0] * width
    shift = 0
    for t_idx, t in enumerate(terms):
        w = t.word
        if w.width != width:
            raise ValueError(f"term {t.label!r} has width {w.width}, expected {width}")
        if not t.primary:
            if aux_heuristic:
                w = ConditionWord(tuple("-" if c == "?" else c for c in w))
            if not modular_difference(w).known:
                return None
        swapped = t.sign < 0
        if swapped:
            w = swap_runs(w)
        for i, c in enumerate(w):
            if c == "u":
                constants[i] += 1
            elif c == "n":
                shift += 1 << i
            elif c == "x":
                shift += 1 << i
                if i + 1 < width:
                    unknowns.append(Unknown(t_idx, t.label, i, "x", i + 1, swapped, t.primary))
            elif c == "?":
                shift += 1 << i
                unknowns.append(Unknown(t_idx, t.label, i, "a", i, swapped, t.primary))
                unknowns.append(Unknown(t_idx, t.label, i, "b", i, swapped, t.primary))
    return NormalizedAdditionProblem(width, unknowns, constants, shift % (1 << width))


def _enumerate(prob: NormalizedAdditionProblem, cols: list[list[int]], lo: int, hi: int,
               carry_in: int) -> tuple[list[tuple[int, ...]], set[int], list[int]]:
    idx = [k for j in range(lo, hi + 1) for k in cols[j]]
    span = hi - lo + 1
    mod = 1 << span
    want = (prob.target >> lo) % mod
    base = carry_in + sum(prob.constants[j] << (j - lo) for j in range(lo, hi + 1))
    weights = [1 << (prob.unknowns[k].column - lo) for k in idx]
    sols = []
    carries = set()
    for vals in product((0, 1), repeat=len(idx)):
        total = base + sum(w for w, v in zip(weights, vals) if v)
        if total % mod == want:
            sols.append(vals)
            carries.add(total >> span)
    return sols, carries, idx


def split_subproblems(prob: NormalizedAdditionProblem, max_unknowns: int = MAX_UNKNOWNS) -> list[Subproblem] | None:
    """Scan columns upward, cutting wherever the carry out is the same for every solution.

    Ranges are solved as they are formed; a range that would need more than
    ``max_unknowns`` unknowns is returned with ``skipped`` set and the scan
    resumes after the next column that cannot receive a carry.  Returns
    ``None`` when some range has no solution (the equation is inconsistent).
    """
    cols = prob.columns()
    width = prob.width
    subs: list[Subproblem] = []
    carry = 0
    j = 0
    while j < width:
        if not cols[j]:
            s = carry + prob.constants[j]
            if (s - (prob.target >> j)) & 1:
                return None
            carry = s >> 1
            j += 1
            continue
        lo = j
        hi = j
        while True:
            count = sum(len(cols[t]) for t in range(lo, hi + 1))
            if count > max_unknowns:
                # too expensive: skip until a column no carry can reach
                cmax = carry
                t = lo
                while t < width:
                    cmax = (cmax + len(cols[t]) + prob.constants[t]) >> 1
                    t += 1
                    if cmax == 0:
                        break
                idx = [k for c in range(lo, t) for k in cols[c]]
                subs.append(Subproblem(lo, t - 1, idx, carry, (prob.target >> lo) % (1 << (t - lo)),
                                       no_overflow=False, skipped=True))
                carry = 0
                j = t
                break
            sols, carries, idx = _enumerate(prob, cols, lo, hi, carry)
            if not sols:
                return None
            if len(carries) == 1 or hi == width - 1:
                c_out = next(iter(carries)) if len(carries) == 1 else 0
                subs.append(Subproblem(lo, hi, idx, carry, (prob.target >> lo) % (1 << (hi - lo + 1)),
                                       no_overflow=carries == {0}, solutions=sols))
                carry = c_out
                j = hi + 1
                break
            hi += 1
    return subs


def solve_subproblem(prob: NormalizedAdditionProblem, sub: Subproblem,
                     max_unknowns: int = MAX_UNKNOWNS) -> list[tuple[int, ...]] | None:
    """All solutions of ``sub`` (``None`` when it has too many unknowns)."""
    if len(sub.unknowns) > max_unknowns:
        return None
    if sub.solutions is not None:
        return sub.solutions
    sols, _, _ = _enumerate(prob, prob.columns(), sub.lo, sub.hi, sub.carry_in)
    return sols


@dataclass(frozen=True)
class ForcedBit:
    """Run ``inst`` (0 or 1) of bit ``bit`` of word ``label`` must equal ``value``."""

    label: object
    bit: int
    inst: int
    value: int


def _unknown_bits(u: Unknown, v: int) -> list[tuple[int, int]]:
    """(run, value) facts implied by unknown ``u`` taking value ``v`` in its own frame."""
    if u.kind == "x":
        facts = [(0, v), (1, 1 - v)]            # v=1 is 'u'
    elif u.kind == "a":
        facts = [(0, v)]
    else:
        facts = [(1, 1 - v)]
    if u.swapped:
        facts = [(1 - inst, val) for inst, val in facts]
    return facts


def extract_propagations(prob: NormalizedAdditionProblem, subs: Sequence[Subproblem],
                         primary_only: bool = True) -> list[ForcedBit]:
    out: list[ForcedBit] = []
    seen = set()
    for sub in subs:
        if sub.skipped or not sub.solutions:
            continue
        for pos, k in enumerate(sub.unknowns):
            u = prob.unknowns[k]
            if primary_only and not u.primary:
                continue
            vals = {s[pos] for s in sub.solutions}
            if len(vals) != 1:
                continue
            for inst, val in _unknown_bits(u, vals.pop()):
                key = (u.label, u.bit, inst)
                if key in seen:
                    continue
                seen.add(key)
                out.append(ForcedBit(u.label, u.bit, inst, val))
    return out


@dataclass
class WordwiseResult:
    applicable: bool
    consistent: bool = True
    forced: list[ForcedBit] = field(default_factory=list)
    subproblems: int = 0
    skipped: int = 0


def wordwise_propagate(terms: Sequence[Term], width: int = 32, aux_heuristic: bool = True,
                       max_unknowns: int = MAX_UNKNOWNS) -> WordwiseResult:
    """Full pipeline for one addition: assemble, split, solve, extract."""
    prob = assemble_equation(terms, width, aux_heuristic)
    if prob is None:
        return WordwiseResult(False)
    subs = split_subproblems(prob, max_unknowns)
    if subs is None:
        return WordwiseResult(True, consistent=False)
    forced = extract_propagations(prob, subs)
    # drop facts already implied by the condition itself
    words = {t.label: t.word for t in terms}
    new = []
    for f in forced:
        c = words[f.label][f.bit]
        if c in "01un":
            continue
        new.append(f)
    return WordwiseResult(True, True, new, len(subs), sum(s.skipped for s in subs))


def forced_conditions(res: WordwiseResult, terms: Sequence[Term]) -> dict[object, ConditionWord]:
    """Condition words of ``terms`` tightened by the forced bits."""
    from .diff_model import SYMBOL_TO_MASK, MASK_TO_SYMBOL, PAIRS, pair_bit
    words = {t.label: list(t.word.conds) for t in terms}
    for f in res.forced:
        c = words[f.label][f.bit]
        mask = SYMBOL_TO_MASK[c]
        keep = 0
        for a, b in PAIRS:
            if (a, b)[f.inst] == f.value and mask >> pair_bit(a, b) & 1:
                keep |= 1 << pair_bit(a, b)
        words[f.label][f.bit] = MASK_TO_SYMBOL.get(keep, c)
    return {k: ConditionWord(tuple(v)) for k, v in words.items()}
