"""CNF encoding of two step-reduced compression runs plus their bit differences.

Every word bit exists three times: in the first run, in the second run, and as
a difference variable tied to the other two by ``d <-> x ^ x'``.  The chaining
value is shared between the runs, so its difference literals are the constant
false literal.

Besides the clause list the encoder keeps a structural description of the
circuit (bitslices and word-level additions).  The propagation engines work
on that description; the clause database is what the SAT solver sees.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import hash_core as hc
from .diff_model import StartingPoint
from .logicmin import counter_clauses

# (literal in run 1, literal in run 2, difference literal)
Pos = tuple[int, int, int]

PRIMARY_ROLES = ("A", "E", "W")
XOR_ROLES = ("s0", "s1", "S0", "S1")


@dataclass(frozen=True)
class Slice:
    """One bit position of one operation.

    ``func`` is one of ``XOR2``, ``XOR3``, ``IF``, ``MAJ`` or ``ADD``; for
    adders ``offset`` is the constant bit folded into the column and the
    outputs are ``(sum, carry-low, carry-high)`` truncated as needed.
    """

    func: str
    inputs: tuple[Pos, ...]
    outputs: tuple[Pos, ...]
    word: tuple[str, int]
    bit: int
    offset: int = 0

    @property
    def key_shape(self) -> tuple:
        return (self.func, len(self.inputs), len(self.outputs), self.offset)


@dataclass(frozen=True)
class AddSite:
    """A word-level modular addition ``result = sum(operands) + const``."""

    kind: str                      # W, T, E or A
    step: int
    operands: tuple[tuple[str, int], ...]
    result: tuple[str, int]
    const: int = 0


@dataclass
class VarMap:
    """Bidirectional map between ``(role, step, bit, instance)`` and literals.

    ``instance`` is 0 or 1 for the two runs and 2 for the difference.
    """

    true_var: int = 1
    words: dict[tuple[str, int, int], list[int]] = field(default_factory=dict)
    names: dict[int, tuple[str, int, int, int]] = field(default_factory=dict)

    def word(self, role: str, step: int, inst: int) -> list[int]:
        return self.words[(role, step, inst)]

    def lit(self, role: str, step: int, bit: int, inst: int) -> int:
        return self.words[(role, step, inst)][bit]

    def pos(self, role: str, step: int, bit: int) -> Pos:
        return (self.words[(role, step, 0)][bit], self.words[(role, step, 1)][bit],
                self.words[(role, step, 2)][bit])

    def positions(self, role: str, step: int) -> list[Pos]:
        return list(zip(self.words[(role, step, 0)], self.words[(role, step, 1)], self.words[(role, step, 2)]))

    def has(self, role: str, step: int) -> bool:
        return (role, step, 0) in self.words

    def name(self, var: int) -> tuple[str, int, int, int] | None:
        return self.names.get(var)

    def dump(self) -> str:
        out = io.StringIO()
        for var in sorted(self.names):
            role, step, bit, inst = self.names[var]
            out.write(f"{role} {step} {bit} {inst} {var}\n")
        return out.getvalue()


@dataclass
class CnfInstance:
    n: int
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    slices: list[Slice]
    add_sites: list[AddSite]
    starting_point: StartingPoint | None = None

    def to_dimacs(self) -> str:
        return emit_dimacs(self)


# -- gate clause generators -------------------------------------------------

def encode_xor3(a: int, b: int, c: int, out: int) -> list[list[int]]:
    """``out <-> a ^ b ^ c`` with the 8 clauses that exclude each wrong row."""
    clauses = []
    for bits in range(8):
        va, vb, vc = bits & 1, bits >> 1 & 1, bits >> 2 & 1
        vo = va ^ vb ^ vc
        # forbid (a,b,c,out) = (va,vb,vc,1-vo)
        clauses.append([-a if va else a, -b if vb else b, -c if vc else c, out if vo else -out])
    return clauses


def encode_xor2(a: int, b: int, out: int) -> list[list[int]]:
    return [[a, b, -out], [-a, -b, -out], [a, -b, out], [-a, b, out]]


def encode_delta(x: int, x2: int, dx: int) -> list[list[int]]:
    return encode_xor2(x, x2, dx)


def encode_bitwise(f: str, x: int, y: int, z: int, out: int) -> list[list[int]]:
    """Prime-implicate CNF for ``out <-> f(x, y, z)`` with ``f`` in IF/MAJ."""
    if f == "IF":
        return [[-x, -y, out], [-x, y, -out], [x, -z, out], [x, z, -out],
                [-y, -z, out], [y, z, -out]]
    if f == "MAJ":
        return [[-x, -y, out], [-x, -z, out], [-y, -z, out],
                [x, y, -out], [x, z, -out], [y, z, -out]]
    raise ValueError(f"unknown bitwise function {f!r}")


def encode_addition(addends: Sequence[int], outputs: Sequence[int], offset: int = 0) -> list[list[int]]:
    """Column relation ``sum(addends) + offset == outputs`` (LSB first, mod 2**len)."""
    if len(addends) > 7:
        raise ValueError(f"a bitslice takes at most 7 addends, got {len(addends)}")
    lits = list(addends) + list(outputs)
    clauses = []
    for cl in counter_clauses(len(addends), len(outputs), offset):
        clauses.append([lits[abs(l) - 1] if l > 0 else -lits[abs(l) - 1] for l in cl])
    return clauses


def _column_shape(n_terms: int, const_bit: int, lo_in: int, hi_in: int, j: int) -> int:
    """Number of output bits needed by column ``j``."""
    max_val = n_terms + const_bit + lo_in + hi_in
    return min(max(max_val.bit_length(), 1), 32 - j)


# -- encoder ------------------------------------------------------------------

class Encoder:
    """Builds a :class:`CnfInstance`; use :func:`build_instance`."""

    def __init__(self, n: int, helpers: bool = True):
        if not 0 <= n <= hc.MAX_STEPS:
            raise ValueError(f"step count out of range: {n}")
        self.n = n
        self.helpers = helpers
        self.num_vars = 0
        self.clauses: list[list[int]] = []
        self.vm = VarMap()
        self.slices: list[Slice] = []
        self.add_sites: list[AddSite] = []
        t = self._fresh()
        self.vm.true_var = t
        self.vm.names[t] = ("TRUE", 0, 0, 0)
        self.clauses.append([t])

    @property
    def FALSE(self) -> int:
        return -self.vm.true_var

    def _fresh(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def _new_word(self, role: str, step: int, shared: bool = False) -> None:
        words = []
        for inst in (0, 1):
            if shared and inst == 1:
                words.append(words[0])
                continue
            w = []
            for bit in range(32):
                v = self._fresh()
                self.vm.names[v] = (role, step, bit, inst)
                w.append(v)
            words.append(w)
        if shared:
            dw = [self.FALSE] * 32
        else:
            dw = []
            for bit in range(32):
                d = self._fresh()
                self.vm.names[d] = (role, step, bit, 2)
                self.clauses.extend(encode_delta(words[0][bit], words[1][bit], d))
                dw.append(d)
        for inst, w in enumerate(words + [dw]):
            self.vm.words[(role, step, inst)] = w

    # -- bitwise gates ---------------------------------------------------

    def _xor_word(self, role: str, step: int, src: tuple[str, int], amounts: tuple[int, int, int], shift_last: bool) -> None:
        self._new_word(role, step)
        r1, r2, r3 = amounts
        for bit in range(32):
            idx = [(bit + r1) % 32, (bit + r2) % 32]
            if shift_last:
                if bit + r3 < 32:
                    idx.append(bit + r3)
            else:
                idx.append((bit + r3) % 32)
            ins = tuple(self.vm.pos(src[0], src[1], k) for k in idx)
            out = self.vm.pos(role, step, bit)
            for inst in (0, 1):
                lits = [p[inst] for p in ins]
                if len(lits) == 3:
                    self.clauses.extend(encode_xor3(*lits, out[inst]))
                else:
                    self.clauses.extend(encode_xor2(*lits, out[inst]))
            func = "XOR3" if len(ins) == 3 else "XOR2"
            self.slices.append(Slice(func, ins, (out,), (role, step), bit))
            if self.helpers:
                self._xor_helpers(ins, out)

    def _xor_helpers(self, ins: tuple[Pos, ...], out: Pos) -> None:
        k = len(ins)
        for pat in range(1 << k):
            if bin(pat).count("1") % 2:
                continue
            cl = [-ins[t][2] if pat >> t & 1 else ins[t][2] for t in range(k)]
            self.clauses.append(cl + [-out[2]])

    def _bitwise_word(self, f: str, role: str, step: int, srcs: Sequence[tuple[str, int]]) -> None:
        self._new_word(role, step)
        for bit in range(32):
            ins = tuple(self.vm.pos(r, s, bit) for r, s in srcs)
            out = self.vm.pos(role, step, bit)
            for inst in (0, 1):
                self.clauses.extend(encode_bitwise(f, *(p[inst] for p in ins), out[inst]))
            self.slices.append(Slice(f, ins, (out,), (role, step), bit))
            if self.helpers:
                self.clauses.append([p[2] for p in ins] + [-out[2]])

    # -- modular addition -------------------------------------------------

    def _add_word(self, kind: str, step: int, result: tuple[str, int], operands: Sequence[tuple[str, int]], const: int = 0) -> None:
        """Encode ``result = sum(operands) + const`` column by column."""
        self._new_word(*result)
        lo_role, hi_role = f"{kind}.lo", f"{kind}.hi"
        lo_word: dict[int, Pos] = {}
        hi_word: dict[int, Pos] = {}
        shapes = []
        lo_max = [0] * 34
        hi_max = [0] * 34
        for j in range(32):
            cbit = const >> j & 1
            nout = _column_shape(len(operands), cbit, lo_max[j], hi_max[j], j)
            shapes.append(nout)
            if nout >= 2:
                lo_max[j + 1] = 1
            if nout >= 3:
                hi_max[j + 2] = 1
        need_lo = any(s >= 2 for s in shapes)
        need_hi = any(s >= 3 for s in shapes)
        if need_lo:
            self._new_word(lo_role, step)
        if need_hi:
            self._new_word(hi_role, step)
        for j in range(32):
            ins = [self.vm.pos(r, s, j) for r, s in operands]
            if j >= 1 and shapes[j - 1] >= 2:
                ins.append(self.vm.pos(lo_role, step, j - 1))
            if j >= 2 and shapes[j - 2] >= 3:
                ins.append(self.vm.pos(hi_role, step, j - 2))
            outs = [self.vm.pos(*result, j)]
            if shapes[j] >= 2:
                outs.append(self.vm.pos(lo_role, step, j))
            if shapes[j] >= 3:
                outs.append(self.vm.pos(hi_role, step, j))
            cbit = const >> j & 1
            for inst in (0, 1):
                self.clauses.extend(encode_addition([p[inst] for p in ins], [p[inst] for p in outs], cbit))
            self.slices.append(Slice("ADD", tuple(ins), tuple(outs), result, j, cbit))
            if self.helpers:
                dins = [p[2] for p in ins]
                for o in outs:
                    self.clauses.append(dins + [-o[2]])
        # unused carry bits (top columns) are pinned to zero in both runs
        for role, shape_min in ((lo_role, 2), (hi_role, 3)):
            if not self.vm.has(role, step):
                continue
            for j in range(32):
                if shapes[j] < shape_min:
                    x, x2, d = self.vm.pos(role, step, j)
                    self.clauses.extend([[-x], [-x2], [-d]])
        self.add_sites.append(AddSite(kind, step, tuple(operands), result, const))

    # -- full circuit -------------------------------------------------------

    def build(self) -> None:
        n = self.n
        for i in range(-4, 0):
            self._new_word("A", i, shared=True)
            self._new_word("E", i, shared=True)
        for i in range(min(n, 16)):
            self._new_word("W", i)
        for i in range(16, n):
            self._xor_word("s0", i, ("W", i - 15), hc.SIGMA0_SMALL, shift_last=True)
            self._xor_word("s1", i, ("W", i - 2), hc.SIGMA1_SMALL, shift_last=True)
            self._add_word("W", i, ("W", i), [("s1", i), ("W", i - 7), ("s0", i), ("W", i - 16)])
        for i in range(n):
            self._xor_word("S1", i, ("E", i - 1), hc.SIGMA1_BIG, shift_last=False)
            self._bitwise_word("IF", "IF", i, [("E", i - 1), ("E", i - 2), ("E", i - 3)])
            self._add_word("T", i, ("T", i), [("E", i - 4), ("S1", i), ("IF", i), ("W", i)], hc.K[i])
            self._add_word("E", i, ("E", i), [("A", i - 4), ("T", i)])
            self._xor_word("S0", i, ("A", i - 1), hc.SIGMA0_BIG, shift_last=False)
            self._bitwise_word("MAJ", "MAJ", i, [("A", i - 1), ("A", i - 2), ("A", i - 3)])
            self._add_word("A", i, ("A", i), [("T", i), ("S0", i), ("MAJ", i)])

    def instance(self, sp: StartingPoint | None) -> CnfInstance:
        return CnfInstance(self.n, self.num_vars, self.clauses, self.vm, self.slices, self.add_sites, sp)


# -- starting points --------------------------------------------------------

_CONDITION_UNITS = {
    # symbol -> (x, x', d) requirement, None = unconstrained
    "?": (None, None, None),
    "-": (None, None, 0),
    "x": (None, None, 1),
    "0": (0, 0, 0),
    "1": (1, 1, 0),
    "u": (1, 0, 1),
    "n": (0, 1, 1),
}


def condition_units(symbol: str, pos: Pos) -> list[list[int]]:
    """Unit clauses imposing ``symbol`` on the bit pair at ``pos``."""
    out = []
    for lit, req in zip(pos, _CONDITION_UNITS[symbol]):
        if req is not None:
            out.append([lit if req else -lit])
    return out


def apply_starting_point(sp: StartingPoint, varmap: VarMap) -> list[list[int]]:
    clauses: list[list[int]] = []
    seen: set[int] = set()
    t = varmap.true_var
    for role, i, word in sp.items():
        if not varmap.has(role, i):
            continue
        for bit, sym in enumerate(word):
            if i < 0 and sym in "xun":
                raise ValueError(f"chaining-value row {role}{i} cannot carry a difference")
            for cl in condition_units(sym, varmap.pos(role, i, bit)):
                lit = cl[0]
                if lit == t or lit in seen:
                    continue
                seen.add(lit)
                clauses.append(cl)
    return clauses


def build_instance(n: int, sp: StartingPoint | None = None, helpers: bool = True) -> CnfInstance:
    """Encode two ``n``-step runs with a shared chaining value.

    ``sp`` adds its conditions as unit clauses; ``helpers`` adds the
    difference-level shortcut clauses.  A starting point that leaves the
    message difference open also gets one clause asking for some difference
    in the message block, so that equal messages are never a solution.
    """
    if sp is not None and sp.n != n:
        raise ValueError(f"starting point has {sp.n} steps, instance has {n}")
    enc = Encoder(n, helpers=helpers)
    enc.build()
    if sp is not None:
        enc.clauses.extend(apply_starting_point(sp, enc.vm))
        if not sp.has_message_difference():
            enc.clauses.append(message_difference_clause(sp, enc.vm))
    return enc.instance(sp)


def message_difference_clause(sp: StartingPoint, vm: VarMap) -> list[int]:
    """Some message-block position that may differ does differ."""
    return [vm.lit("W", i, b, 2) for i in range(min(sp.n, 16)) for b in range(32)
            if sp.condition("W", i, b) not in "-01"]


def add_helper_clauses(inst: CnfInstance) -> list[list[int]]:
    """The difference-level helper clauses for every slice of ``inst``."""
    out = []
    for s in inst.slices:
        if s.func in ("XOR2", "XOR3"):
            k = len(s.inputs)
            for pat in range(1 << k):
                if bin(pat).count("1") % 2 == 0:
                    out.append([-s.inputs[t][2] if pat >> t & 1 else s.inputs[t][2] for t in range(k)] + [-s.outputs[0][2]])
        else:
            dins = [p[2] for p in s.inputs]
            for o in s.outputs:
                out.append(dins + [-o[2]])
    return out


# -- export / witness / decoding --------------------------------------------

def emit_dimacs(inst: CnfInstance, comments: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for c in comments:
        out.write(f"c {c}\n")
    out.write(f"p cnf {inst.num_vars} {len(inst.clauses)}\n")
    for cl in inst.clauses:
        out.write(" ".join(map(str, cl)))
        out.write(" 0\n")
    return out.getvalue()


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    num_vars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line[0] == "p":
            parts = line.split()
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(cur)
    return num_vars, clauses


def word_values(tr: hc.StateTrace, sites: Sequence[AddSite]) -> dict[tuple[str, int], int]:
    """Value of every encoded word of one run, computed with :mod:`hash_core`."""
    vals: dict[tuple[str, int], int] = {}
    for i, v in tr.A.items():
        vals[("A", i)] = v
    for i, v in tr.E.items():
        vals[("E", i)] = v
    for i, v in enumerate(tr.W):
        vals[("W", i)] = v
    for i, v in enumerate(tr.T):
        vals[("T", i)] = v
    for i in range(tr.n):
        if i >= 16:
            vals[("s0", i)] = hc.sigma_small(0, tr.W[i - 15])
            vals[("s1", i)] = hc.sigma_small(1, tr.W[i - 2])
        vals[("S0", i)] = hc.sigma_big(0, tr.A[i - 1])
        vals[("S1", i)] = hc.sigma_big(1, tr.E[i - 1])
        vals[("IF", i)] = hc.bitwise_if(tr.E[i - 1], tr.E[i - 2], tr.E[i - 3])
        vals[("MAJ", i)] = hc.bitwise_maj(tr.A[i - 1], tr.A[i - 2], tr.A[i - 3])
    for site in sites:
        lo = hi = 0
        for j in range(32):
            total = sum(vals[o] >> j & 1 for o in site.operands) + (site.const >> j & 1)
            total += (lo >> (j - 1) & 1) if j >= 1 else 0
            total += (hi >> (j - 2) & 1) if j >= 2 else 0
            lo |= (total >> 1 & 1) << j
            hi |= (total >> 2 & 1) << j
        # bits that would leave the word are not encoded
        vals[(f"{site.kind}.lo", site.step)] = lo & 0x7FFFFFFF
        vals[(f"{site.kind}.hi", site.step)] = hi & 0x3FFFFFFF
    return vals


def witness_assignment(inst: CnfInstance, cv: Sequence[int], m: Sequence[int], m2: Sequence[int]) -> list[bool]:
    """Full assignment (index = variable) induced by the two runs."""
    _, t1 = hc.compress_trace(cv, m, inst.n)
    _, t2 = hc.compress_trace(cv, m2, inst.n)
    v1 = word_values(t1, inst.add_sites)
    v2 = word_values(t2, inst.add_sites)
    assign = [False] * (inst.num_vars + 1)
    assign[inst.varmap.true_var] = True
    for var, (role, step, bit, which) in inst.varmap.names.items():
        if role == "TRUE":
            continue
        if which == 0:
            assign[var] = bool(v1[(role, step)] >> bit & 1)
        elif which == 1:
            assign[var] = bool(v2[(role, step)] >> bit & 1)
        else:
            assign[var] = bool((v1[(role, step)] ^ v2[(role, step)]) >> bit & 1)
    return assign


def lit_true(assign: Sequence[bool], lit: int) -> bool:
    return assign[lit] if lit > 0 else not assign[-lit]


def falsified_clauses(clauses: Iterable[Sequence[int]], assign: Sequence[bool]) -> list[Sequence[int]]:
    return [cl for cl in clauses if not any(lit_true(assign, l) for l in cl)]


@dataclass
class DecodedPair:
    cv: list[int]
    m: list[int]
    m2: list[int]


def _word_value(varmap: VarMap, model: Sequence[bool], role: str, step: int, inst: int) -> int:
    v = 0
    for bit, lit in enumerate(varmap.word(role, step, inst)):
        if lit_true(model, lit):
            v |= 1 << bit
    return v


def decode_model(inst: CnfInstance, model: Sequence[bool]) -> DecodedPair:
    """Extract ``(CV, M, M')`` from a model indexed by variable.

    Message words beyond the step count are not encoded and come back as 0.
    """
    vm = inst.varmap
    cv = [_word_value(vm, model, "A", i, 0) for i in range(-4, 0)]
    cv += [_word_value(vm, model, "E", i, 0) for i in range(-4, 0)]
    m = [_word_value(vm, model, "W", i, 0) if vm.has("W", i) else 0 for i in range(16)]
    m2 = [_word_value(vm, model, "W", i, 1) if vm.has("W", i) else 0 for i in range(16)]
    return DecodedPair(cv, m, m2)


def model_characteristic(inst: CnfInstance, model: Sequence[bool]) -> StartingPoint:
    """Signed-difference characteristic read straight from a model."""
    from .diff_model import ConditionWord

    vm = inst.varmap
    rows: dict = {}
    for i in range(-4, inst.n):
        row = {}
        for role in PRIMARY_ROLES:
            if vm.has(role, i):
                row[role] = ConditionWord.from_values(_word_value(vm, model, role, i, 0),
                                                      _word_value(vm, model, role, i, 1))
        rows[i] = row
    return StartingPoint(n=inst.n, rows=rows)
