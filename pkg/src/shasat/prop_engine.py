"""Bitsliced propagation: locally perfect propagation on single bit positions.

A bitslice is one output bit of a bitwise function together with the input
bits it depends on, or one column of a multi-operand adder (addend bits plus
the incoming low and high carries as inputs; sum, low carry and high carry as
outputs).  Given a condition for every position of the slice the engine
computes, for every position, the tightest condition that still admits every
grounding of the slice.  Rules are memoised in a bounded LRU cache.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from itertools import combinations, product
from typing import Hashable, Iterable, Mapping, Sequence

from .diff_model import PAIRS, SYMBOL_TO_MASK, Contradiction, tightest_symbol, pair_bit

BITWISE_FUNCS = ("XOR2", "XOR3", "IF", "MAJ")
FUNCS = BITWISE_FUNCS + ("ADD",)
ARITY = {"XOR2": 2, "XOR3": 3, "IF": 3, "MAJ": 3}

DEFAULT_CACHE_CAPACITY = 1 << 20


def eval_bitwise(func: str, bits: Sequence[int]) -> int:
    if func == "XOR2":
        return bits[0] ^ bits[1]
    if func == "XOR3":
        return bits[0] ^ bits[1] ^ bits[2]
    x, y, z = bits
    if func == "IF":
        return y if x else z
    if func == "MAJ":
        return (x & y) | (x & z) | (y & z)
    raise ValueError(f"unknown function {func!r}")


def eval_slice(func: str, bits: Sequence[int], n_out: int, offset: int = 0) -> tuple[int, ...]:
    """Output bits of a slice for one run."""
    if func == "ADD":
        total = sum(bits) + offset
        return tuple(total >> t & 1 for t in range(n_out))
    return (eval_bitwise(func, bits),)


@dataclass(frozen=True)
class BitsliceKey:
    """Function id plus the conditions of its input and output positions."""

    func: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        if self.func not in FUNCS:
            raise ValueError(f"unknown function {self.func!r}")
        if self.func == "ADD":
            if not 1 <= len(self.inputs) <= 7 or not 1 <= len(self.outputs) <= 3:
                raise ValueError("adder slice needs 1..7 inputs and 1..3 outputs")
        elif len(self.inputs) != ARITY[self.func] or len(self.outputs) != 1:
            raise ValueError(f"{self.func} slice needs {ARITY[self.func]} inputs and one output")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.inputs + self.outputs


@dataclass(frozen=True)
class BitsliceResult:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.inputs + self.outputs


class LRUCache:
    """Bounded least-recently-used map; capacity 0 disables caching."""

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        self.capacity = capacity
        self.data: OrderedDict = OrderedDict()
        self.hits = 0
        self.misses = 0

    _MISSING = object()

    def get(self, key: Hashable):
        val = self.data.get(key, self._MISSING)
        if val is self._MISSING:
            self.misses += 1
            return self._MISSING
        self.hits += 1
        self.data.move_to_end(key)
        return val

    def put(self, key: Hashable, value) -> None:
        if self.capacity <= 0:
            return
        self.data[key] = value
        self.data.move_to_end(key)
        if len(self.data) > self.capacity:
            self.data.popitem(last=False)

    def __len__(self) -> int:
        return len(self.data)

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


def _pairs_of(mask: int) -> list[tuple[int, int]]:
    return [p for p in PAIRS if mask >> pair_bit(*p) & 1]


def _bitwise_masks(func: str, in_masks: Sequence[int], out_mask: int) -> list[int] | None:
    proj = [0] * (len(in_masks) + 1)
    for combo in product(*(_pairs_of(m) for m in in_masks)):
        y = eval_bitwise(func, [p[0] for p in combo])
        y2 = eval_bitwise(func, [p[1] for p in combo])
        ob = 1 << pair_bit(y, y2)
        if not out_mask & ob:
            continue
        for k, p in enumerate(combo):
            proj[k] |= 1 << pair_bit(*p)
        proj[-1] |= ob
    return None if not proj[-1] else proj


def _adder_masks(in_masks: Sequence[int], out_masks: Sequence[int], offset: int) -> list[int] | None:
    # states are partial counts (c, c') of ones in both runs
    k = len(in_masks)
    choices = [_pairs_of(m) for m in in_masks]
    reach = [{(0, 0)}]
    for p in range(k):
        reach.append({(c0 + a, c1 + b) for c0, c1 in reach[p] for a, b in choices[p]})
    good_final = set()
    out_proj = [0] * len(out_masks)
    for c0, c1 in reach[k]:
        t0, t1 = c0 + offset, c1 + offset
        bits = [1 << pair_bit(t0 >> t & 1, t1 >> t & 1) for t in range(len(out_masks))]
        if all(om & b for om, b in zip(out_masks, bits)):
            good_final.add((c0, c1))
            for t, b in enumerate(bits):
                out_proj[t] |= b
    if not good_final:
        return None
    good = good_final
    in_proj = [0] * k
    for p in range(k - 1, -1, -1):
        prev = set()
        for c0, c1 in reach[p]:
            for a, b in choices[p]:
                if (c0 + a, c1 + b) in good:
                    prev.add((c0, c1))
                    in_proj[p] |= 1 << pair_bit(a, b)
        good = prev
    return in_proj + out_proj


class BitsliceEngine:
    """Rule evaluation with an LRU cache and counters."""

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        self.cache = LRUCache(capacity)
        self.refinements = 0
        self.contradictions = 0

    def propagate(self, key: BitsliceKey) -> BitsliceResult | None:
        """Refined conditions for ``key``; ``None`` signals a contradiction."""
        hit = self.cache.get(key)
        if hit is not LRUCache._MISSING:
            return hit
        res = _compute(key)
        self.cache.put(key, res)
        return res

    def stats(self) -> dict[str, float]:
        return {
            "rule_cache_hits": self.cache.hits,
            "rule_cache_misses": self.cache.misses,
            "rule_cache_hit_rate": self.cache.hit_rate,
            "refinements": self.refinements,
            "contradictions": self.contradictions,
        }


def _compute(key: BitsliceKey) -> BitsliceResult | None:
    in_masks = [SYMBOL_TO_MASK[s] for s in key.inputs]
    out_masks = [SYMBOL_TO_MASK[s] for s in key.outputs]
    if key.func == "ADD":
        proj = _adder_masks(in_masks, out_masks, key.offset)
    else:
        proj = _bitwise_masks(key.func, in_masks, out_masks[0])
    if proj is None:
        return None
    syms = tuple(tightest_symbol(m) for m in proj)
    k = len(key.inputs)
    return BitsliceResult(syms[:k], syms[k:])


_default_engine = BitsliceEngine()


def propagate_bitslice(key: BitsliceKey, engine: BitsliceEngine | None = None) -> BitsliceResult | None:
    """Locally perfect propagation of one slice (``None`` = contradiction).

    >>> propagate_bitslice(BitsliceKey("XOR3", ("x", "x", "-"), ("?",))).outputs
    ('-',)
    """
    return (engine or _default_engine).propagate(key)


# -- word level -------------------------------------------------------------

@dataclass(frozen=True)
class WordSlice:
    """A slice over abstract position ids (used for word-level propagation)."""

    func: str
    inputs: tuple[Hashable, ...]
    outputs: tuple[Hashable, ...]
    offset: int = 0


def propagate_word(slices: Iterable, conds: Mapping[Hashable, str],
                   engine: BitsliceEngine | None = None) -> dict[Hashable, str]:
    """Propagate a group of slices to fixpoint.

    ``slices`` are objects with ``func``, ``inputs``, ``outputs`` and
    ``offset`` attributes whose positions index ``conds`` (missing positions
    count as ``?``).  Returns the refined positions only; raises
    :class:`Contradiction` when some slice has no grounding.
    """
    slices = list(slices)
    cur = dict(conds)
    changed_out: dict[Hashable, str] = {}
    users: dict[Hashable, list[int]] = {}
    for idx, s in enumerate(slices):
        for p in tuple(s.inputs) + tuple(s.outputs):
            users.setdefault(p, []).append(idx)
    work = list(range(len(slices)))
    queued = set(work)
    while work:
        idx = work.pop(0)
        queued.discard(idx)
        s = slices[idx]
        poss = tuple(s.inputs) + tuple(s.outputs)
        key = BitsliceKey(s.func, tuple(cur.get(p, "?") for p in s.inputs),
                          tuple(cur.get(p, "?") for p in s.outputs), s.offset)
        res = propagate_bitslice(key, engine)
        if res is None:
            raise Contradiction(f"no grounding for {key}")
        for p, old, new in zip(poss, key.symbols, res.symbols):
            if new != old:
                cur[p] = new
                changed_out[p] = new
                for j in users[p]:
                    if j not in queued:
                        queued.add(j)
                        work.append(j)
    return changed_out


def xor_word_slices(src: str, dst: str, amounts: tuple[int, int, int], shift_last: bool,
                    width: int = 32) -> list[WordSlice]:
    """Slices of ``dst = rotr(src,r1) ^ rotr(src,r2) ^ (rotr|shr)(src,r3)`` on ``width`` bits."""
    r1, r2, r3 = amounts
    out = []
    for bit in range(width):
        idx = [(bit + r1) % width, (bit + r2) % width]
        if shift_last:
            if bit + r3 < width:
                idx.append(bit + r3)
        else:
            idx.append((bit + r3) % width)
        func = "XOR3" if len(idx) == 3 else "XOR2"
        out.append(WordSlice(func, tuple((src, k) for k in idx), ((dst, bit),)))
    return out


def add_word_slices(operands: Sequence[str], result: str, width: int = 32, const: int = 0) -> list[WordSlice]:
    """Column slices of ``result = sum(operands) + const`` with carry words ``result.lo``/``result.hi``."""
    lo_max = [0] * (width + 2)
    hi_max = [0] * (width + 2)
    shapes = []
    for j in range(width):
        m = len(operands) + (const >> j & 1) + lo_max[j] + hi_max[j]
        nout = min(max(m.bit_length(), 1), width - j)
        shapes.append(nout)
        if nout >= 2:
            lo_max[j + 1] = 1
        if nout >= 3:
            hi_max[j + 2] = 1
    lo, hi = result + ".lo", result + ".hi"
    out = []
    for j in range(width):
        ins = [(w, j) for w in operands]
        if j >= 1 and shapes[j - 1] >= 2:
            ins.append((lo, j - 1))
        if j >= 2 and shapes[j - 2] >= 3:
            ins.append((hi, j - 2))
        outs = [(result, j)]
        if shapes[j] >= 2:
            outs.append((lo, j))
        if shapes[j] >= 3:
            outs.append((hi, j))
        out.append(WordSlice("ADD", tuple(ins), tuple(outs), const >> j & 1))
    return out


def word_conds(name: str, text: str) -> dict[tuple[str, int], str]:
    """Position map of an MSB-first condition string."""
    return {(name, i): c for i, c in enumerate(reversed(text))}


def render_word(name: str, conds: Mapping[tuple[str, int], str], width: int) -> str:
    return "".join(conds.get((name, i), "?") for i in reversed(range(width)))


# -- conditions from (partial) assignments ------------------------------------

def _consistent_mask(vx: int | None, vx2: int | None, vd: int | None) -> int:
    mask = 0
    for a, b in PAIRS:
        if vx is not None and a != vx:
            continue
        if vx2 is not None and b != vx2:
            continue
        if vd is not None and a ^ b != vd:
            continue
        mask |= 1 << pair_bit(a, b)
    return mask


def _build_condition_table() -> dict[tuple, tuple[str, tuple[int, ...]]]:
    """(vx, vx2, vd) -> (symbol, indices of the components that define it)."""
    table = {}
    for vals in product((None, 0, 1), repeat=3):
        mask = _consistent_mask(*vals)
        if not mask:
            continue
        sym = tightest_symbol(mask)
        assigned = [k for k in range(3) if vals[k] is not None]
        best = tuple(assigned)
        for size in range(len(assigned) + 1):
            found = None
            for sub in combinations(assigned, size):
                sv = [vals[k] if k in sub else None for k in range(3)]
                if tightest_symbol(_consistent_mask(*sv)) == sym:
                    found = sub
                    break
            if found is not None:
                best = found
                break
        table[vals] = (sym, best)
    return table


CONDITION_TABLE = _build_condition_table()


def condition_of_assignment(vx: int | None, vx2: int | None, vd: int | None) -> str:
    """Tightest symbol consistent with the (partial) values of ``x``, ``x'`` and ``x ^ x'``."""
    entry = CONDITION_TABLE.get((vx, vx2, vd))
    if entry is None:
        raise Contradiction(f"inconsistent assignment {(vx, vx2, vd)}")
    return entry[0]


# requirement on (x, x', d) imposed by each symbol
SYMBOL_REQUIREMENTS: dict[str, tuple[int | None, int | None, int | None]] = {
    "?": (None, None, None),
    "-": (None, None, 0),
    "x": (None, None, 1),
    "0": (0, 0, 0),
    "1": (1, 1, 0),
    "u": (1, 0, 1),
    "n": (0, 1, 1),
}
