"""The differential propagator plugged into the solver.

It mirrors the solver trail as per-position conditions and runs, in order:
bitsliced propagation (literals with lazily built reasons), two-bit
inconsistency blocking (clauses), and wordwise propagation (suggested
decisions).  Each stage only runs when the previous ones have nothing left
to say.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnf_encoder import PRIMARY_ROLES, CnfInstance, Pos
from .diff_model import PAIRS, SYMBOL_TO_MASK, ConditionWord, pair_bit
from .prop_engine import (BITWISE_FUNCS, CONDITION_TABLE, DEFAULT_CACHE_CAPACITY, SYMBOL_REQUIREMENTS,
                          BitsliceEngine, BitsliceKey, LRUCache)
from .solver_kernel import PropagatorBridge
from .twobit_engine import EquationGraph, blocking_clause, derive_twobit
from .wordwise_engine import MAX_UNKNOWNS, Term, wordwise_propagate


@dataclass
class PropagatorConfig:
    bitsliced: bool = True
    wordwise: bool = True
    aux_heuristic: bool = True
    blocking: bool = True
    cache_capacity: int = DEFAULT_CACHE_CAPACITY
    max_unknowns: int = MAX_UNKNOWNS

    @property
    def label(self) -> str:
        parts = []
        if self.bitsliced or self.wordwise:
            parts.append("P")
        if self.blocking:
            parts.append("IB")
        return "+".join(parts) or "plain"


def _implies(mask: int, comp: int, req: int) -> bool:
    for a, b in PAIRS:
        if mask >> pair_bit(a, b) & 1 and (a, b, a ^ b)[comp] != req:
            return False
    return True


class DifferentialPropagator(PropagatorBridge):
    def __init__(self, inst: CnfInstance, config: PropagatorConfig | None = None):
        self.inst = inst
        self.cfg = config or PropagatorConfig()
        self.engine = BitsliceEngine(self.cfg.cache_capacity)
        self.ib_cache = LRUCache(self.cfg.cache_capacity)
        self.ww_cache = LRUCache(self.cfg.cache_capacity)
        vm = inst.varmap
        self.true_var = vm.true_var
        n = inst.num_vars
        self.val: list[int | None] = [None] * (n + 1)
        self.val[self.true_var] = 1
        self.slices = inst.slices
        self.slice_pos: list[tuple[Pos, ...]] = [tuple(s.inputs) + tuple(s.outputs) for s in self.slices]
        self.var_slices: list[list[int]] = [[] for _ in range(n + 1)]
        observed = set()
        for idx, poss in enumerate(self.slice_pos):
            for p in poss:
                for lit in p:
                    v = abs(lit)
                    if v != self.true_var:
                        self.var_slices[v].append(idx)
                        observed.add(v)
        self.observed = observed
        self.bitwise = [s.func in BITWISE_FUNCS for s in self.slices]
        # wordwise sites
        self.sites = inst.add_sites
        self.var_sites: list[list[int]] = [[] for _ in range(n + 1)]
        self.site_words: list[list[tuple[str, int, int]]] = []   # (role, step, sign)
        for k, site in enumerate(self.sites):
            words = [(r, s, 1) for r, s in site.operands] + [(site.result[0], site.result[1], -1)]
            self.site_words.append(words)
            for r, s, _ in words:
                for p in vm.positions(r, s):
                    for lit in p:
                        v = abs(lit)
                        if v != self.true_var:
                            self.var_sites[v].append(k)
        self.levels: list[list[int]] = [[]]
        self.dirty: set[int] = set(range(len(self.slices)))
        self.dirty_ib: set[int] = {i for i, b in enumerate(self.bitwise) if b}
        self.dirty_sites: set[int] = set(range(len(self.sites)))
        self.pending: list[int] = []
        self.reasons: dict[int, tuple] = {}
        self.level_props: list[list[int]] = [[]]
        self.clauses: list[list[int]] = []
        self.decisions: list[int] = []
        self.graph = EquationGraph()
        self.stats = {
            "bitsliced_rounds": 0, "refinements": 0, "contradictions": 0, "reasons": 0,
            "reason_literals": 0, "blocking_clauses": 0, "blocking_literals": 0,
            "equations": 0, "equations_not_applicable": 0, "equations_inconsistent": 0,
            "subproblems": 0, "subproblems_skipped": 0, "bits_forced": 0, "decisions_injected": 0,
        }

    # -- trail mirror ----------------------------------------------------------

    def on_assign(self, lit: int, fixed: bool = False) -> None:
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else 0
        (self.levels[0] if fixed else self.levels[-1]).append(v)
        self.dirty.update(self.var_slices[v])
        self.dirty_ib.update(self.var_slices[v])
        self.dirty_sites.update(self.var_sites[v])

    def on_new_level(self) -> None:
        self.levels.append([])
        self.level_props.append([])

    def on_backtrack(self, level: int) -> None:
        while len(self.levels) > level + 1:
            for v in self.levels.pop():
                self.val[v] = None
                self.dirty_sites.update(self.var_sites[v])
            for lit in self.level_props.pop():
                self.reasons.pop(lit, None)
        self.pending.clear()
        self.decisions.clear()
        for e in self.graph.backtrack(level):
            self.dirty_ib.add(e.meta[0])

    # -- helpers ---------------------------------------------------------------

    def _lit_val(self, lit: int) -> int | None:
        v = self.val[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else 1 - v

    def _cond(self, p: Pos) -> tuple[str, tuple[int, ...]]:
        vals = (self._lit_val(p[0]), self._lit_val(p[1]), self._lit_val(p[2]))
        sym, comps = CONDITION_TABLE[vals]
        lits = tuple(p[k] if vals[k] else -p[k] for k in comps)
        return sym, lits

    def _snapshot(self, idx: int) -> tuple[tuple[str, ...], tuple[tuple[int, ...], ...]]:
        syms, defs = [], []
        for p in self.slice_pos[idx]:
            s, d = self._cond(p)
            syms.append(s)
            defs.append(d)
        return tuple(syms), tuple(defs)

    def _key(self, idx: int, syms: tuple[str, ...]) -> BitsliceKey:
        s = self.slices[idx]
        k = len(s.inputs)
        return BitsliceKey(s.func, syms[:k], syms[k:], s.offset)

    def _shrink(self, idx: int, syms: tuple[str, ...], holds) -> list[int]:
        """Positions whose conditions are needed for ``holds`` (greedy relaxation)."""
        cur = list(syms)
        keep = []
        for k, s in enumerate(syms):
            if s == "?":
                continue
            cur[k] = "?"
            if not holds(tuple(cur)):
                cur[k] = s
                keep.append(k)
        return keep

    # -- bitsliced ---------------------------------------------------------------

    def _bitsliced(self) -> list[int]:
        out: list[int] = []
        proposed = set()
        dirty = sorted(self.dirty)
        self.dirty.clear()
        self.stats["bitsliced_rounds"] += 1
        for idx in dirty:
            syms, defs = self._snapshot(idx)
            res = self.engine.propagate(self._key(idx, syms))
            if res is None:
                self.stats["contradictions"] += 1
                self.engine.contradictions += 1
                keep = self._shrink(idx, syms, lambda ss, i=idx: self.engine.propagate(self._key(i, ss)) is None)
                self.clauses.append([-l for k in keep for l in defs[k]])
                # the remaining dirty slices are looked at again after the conflict
                self.dirty.update(dirty)
                return []
            poss = self.slice_pos[idx]
            for k, (old, new) in enumerate(zip(syms, res.symbols)):
                if old == new:
                    continue
                self.stats["refinements"] += 1
                self.engine.refinements += 1
                req = SYMBOL_REQUIREMENTS[new]
                for comp in range(3):
                    if req[comp] is None:
                        continue
                    lit = poss[k][comp] if req[comp] else -poss[k][comp]
                    if self._lit_val(lit) is not None or lit in proposed:
                        continue
                    proposed.add(lit)
                    self.reasons[lit] = (idx, syms, defs, k, comp, req[comp])
                    self.level_props[-1].append(lit)
                    out.append(lit)
        return out

    def ask_reason(self, lit: int) -> list[int]:
        idx, syms, defs, k, comp, req = self.reasons[lit]

        def holds(ss: tuple[str, ...]) -> bool:
            res = self.engine.propagate(self._key(idx, ss))
            return res is None or _implies(SYMBOL_TO_MASK[res.symbols[k]], comp, req)

        keep = self._shrink(idx, syms, holds)
        clause = [lit] + [-l for j in keep for l in defs[j]]
        self.stats["reasons"] += 1
        self.stats["reason_literals"] += len(clause)
        return clause

    # -- inconsistency blocking -----------------------------------------------------

    def _blocking(self) -> bool:
        level = len(self.levels) - 1
        dirty = sorted(self.dirty_ib)
        self.dirty_ib.clear()
        for n_done, idx in enumerate(dirty):
            if not self.bitwise[idx]:
                continue
            syms, defs = self._snapshot(idx)
            pats = derive_twobit(self._key(idx, syms), self.ib_cache)
            if not pats:
                continue
            ins = self.slices[idx].inputs
            for pat in pats:
                u, v = ins[pat.a][0], ins[pat.b][0]
                if u == v:
                    continue
                reason = tuple(l for d in defs for l in d)
                cyc = self.graph.add_edge(u, v, pat.z, reason, level, (idx, syms, defs, pat))
                if cyc is not None:
                    clause = self._block(cyc)
                    self.clauses.append(clause)
                    self.stats["blocking_clauses"] += 1
                    self.stats["blocking_literals"] += len(clause)
                    self.dirty_ib.update(dirty[n_done:])
                    return True
        return False

    def _block(self, cyc) -> list[int]:
        lits: list[int] = []
        seen = set()
        for e in cyc.edges:
            idx, syms, defs, pat = e.meta
            keep = self._shrink(idx, syms, lambda ss, i=idx, p=pat: p in derive_twobit(self._key(i, ss), self.ib_cache))
            for j in keep:
                for l in defs[j]:
                    if l not in seen:
                        seen.add(l)
                        lits.append(l)
        return [-l for l in lits]

    # -- wordwise ---------------------------------------------------------------------

    def _word(self, role: str, step: int) -> ConditionWord:
        return ConditionWord(tuple(self._cond(p)[0] for p in self.inst.varmap.positions(role, step)))

    def _wordwise(self) -> None:
        vm = self.inst.varmap
        dirty = sorted(self.dirty_sites)
        self.dirty_sites.clear()
        forced_lits: list[int] = []
        for k in dirty:
            terms = [Term((r, s), self._word(r, s), sign, r in PRIMARY_ROLES) for r, s, sign in self.site_words[k]]
            ckey = (tuple(t.word.conds for t in terms), tuple(t.primary for t in terms))
            res = self.ww_cache.get(ckey)
            if res is LRUCache._MISSING:
                res = wordwise_propagate(terms, 32, self.cfg.aux_heuristic, self.cfg.max_unknowns)
                self.ww_cache.put(ckey, res)
            if not res.applicable:
                self.stats["equations_not_applicable"] += 1
                continue
            self.stats["equations"] += 1
            if not res.consistent:
                self.stats["equations_inconsistent"] += 1
                continue
            self.stats["subproblems"] += res.subproblems
            self.stats["subproblems_skipped"] += res.skipped
            for f in res.forced:
                role, step = f.label
                lit = vm.lit(role, step, f.bit, f.inst)
                lit = lit if f.value else -lit
                if self._lit_val(lit) is None:
                    self.stats["bits_forced"] += 1
                    forced_lits.append(lit)
        self.decisions.extend(forced_lits)

    # -- solver callbacks ---------------------------------------------------------------

    def ask_propagations(self) -> list[int]:
        if self.clauses:
            return []
        if self.cfg.bitsliced and self.dirty:
            out = self._bitsliced()
            if out or self.clauses:
                return out
        if self.cfg.blocking and self.dirty_ib:
            if self._blocking():
                return []
        if self.cfg.wordwise and self.dirty_sites and not self.decisions:
            self._wordwise()
        return []

    def ask_external_clause(self) -> list[int] | None:
        if self.clauses:
            return self.clauses.pop(0)
        return None

    def ask_decision(self) -> int:
        while self.decisions:
            lit = self.decisions.pop(0)
            if self._lit_val(lit) is None:
                self.stats["decisions_injected"] += 1
                return lit
        return 0

    def check_model(self, model) -> bool:
        return True

    def report(self) -> dict[str, float]:
        out = dict(self.stats)
        out.update({f"bitsliced_{k}": v for k, v in self.engine.stats().items()})
        g = self.graph.stats
        out["edges_added"] = g["edges_added"]
        out["cycles_blocked"] = g["cycles"]
        out["mean_cycle_length"] = g["cycle_length_sum"] / g["cycles"] if g["cycles"] else 0.0
        out["mean_blocking_clause_length"] = (self.stats["blocking_literals"] / self.stats["blocking_clauses"]
                                              if self.stats["blocking_clauses"] else 0.0)
        out["wordwise_cache_hit_rate"] = self.ww_cache.hit_rate
        return out
