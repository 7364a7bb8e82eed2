"""A CDCL SAT solver with an external-propagator hook.

The solver is a conventional two-watched-literal CDCL loop (first-UIP
learning, VSIDS, phase saving, Luby restarts, LBD-based clause deletion).
Domain code plugs in through :class:`PropagatorBridge`: it sees every
assignment of the variables it observes, can propagate literals whose reason
clauses are only requested during conflict analysis, can suggest decisions
and can add clauses at any time.

Literals use DIMACS integers at the interface.  Internally literal ``v`` is
code ``2*v`` and ``-v`` is ``2*v + 1``.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

CADICAL_CHUNK = 2000          # conflicts per call when CaDiCaL runs under a time budget


class ContractViolation(Exception):
    """A bridge returned something the solver cannot accept."""


class PropagatorBridge:
    """Callback contract between the solver and an external propagator.

    The default implementation does nothing, so a bare instance acts as a
    null bridge.  ``observed`` restricts notifications to a set of variables;
    ``None`` means every variable.
    """

    observed: set[int] | None = None

    def on_assign(self, lit: int, fixed: bool = False) -> None:
        """``fixed`` marks root-level assignments that are never undone."""

    def on_new_level(self) -> None:
        pass

    def on_backtrack(self, level: int) -> None:
        pass

    def ask_propagations(self) -> list[int]:
        return []

    def ask_reason(self, lit: int) -> list[int]:
        raise ContractViolation(f"bridge propagated {lit} but has no reason for it")

    def ask_decision(self) -> int:
        return 0

    def ask_external_clause(self) -> list[int] | None:
        return None

    def check_model(self, model: Sequence[int]) -> bool:
        return True


NULL_BRIDGE = PropagatorBridge()

# marker stored as the reason of externally propagated variables
_EXTERNAL = ()


def lit_code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def code_lit(code: int) -> int:
    return code >> 1 if not code & 1 else -(code >> 1)


def luby(i: int) -> int:
    """i-th element (from 1) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


@dataclass
class SolverConfig:
    var_decay: float = 0.95
    restart_base: int = 100
    reduce_first: int = 2000
    reduce_inc: int = 300
    initial_phase: bool = False
    random_phase: bool = False


@dataclass
class SolveResult:
    status: str
    model: list[int] | None = None
    stats: dict[str, int] = field(default_factory=dict)
    budget: str | None = None   # which budget expired for UNKNOWN


class Solver:
    """CDCL solver over ``num_vars`` variables.

    >>> s = Solver(2, [[1, 2], [-1]])
    >>> s.solve().status
    'SAT'
    """

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = (), seed: int = 0,
                 bridge: PropagatorBridge | None = None, config: SolverConfig | None = None):
        self.num_vars = num_vars
        self.cfg = config or SolverConfig()
        self.bridge = bridge or NULL_BRIDGE
        self._null = bridge is None or bridge is NULL_BRIDGE
        self.rng = random.Random(seed)
        n2 = 2 * (num_vars + 1)
        self.lval = [0] * n2                 # 1 true, -1 false, 0 unassigned (per literal code)
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.watches: list[list[list[int]]] = [[] for _ in range(n2)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.notified = 0
        self.seen = bytearray(num_vars + 1)
        self.activity = [self.rng.random() * 1e-5 for _ in range(num_vars + 1)]
        self.var_inc = 1.0
        self.phase = bytearray([1 if self.cfg.initial_phase else 0] * (num_vars + 1))
        if self.cfg.random_phase:
            for v in range(1, num_vars + 1):
                self.phase[v] = self.rng.getrandbits(1)
        self.heap: list[tuple[float, int]] = [(-self.activity[v], v) for v in range(1, num_vars + 1)]
        heapq.heapify(self.heap)
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.pending_decisions: list[int] = []
        self.unsat = False
        self.observed = bytearray(num_vars + 1)
        obs = self.bridge.observed
        for v in (range(1, num_vars + 1) if obs is None else obs):
            self.observed[v] = 1
        self.stats = {
            "conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0,
            "learned": 0, "deleted": 0, "ext_propagations": 0, "ext_clauses": 0,
            "ext_decisions": 0, "ext_decisions_rejected": 0, "ext_reasons": 0,
        }
        for cl in clauses:
            self.add_clause(cl)

    # -- clause database ---------------------------------------------------

    def _check_lits(self, clause: Sequence[int]) -> None:
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ContractViolation(f"literal {lit} outside 1..{self.num_vars}")

    def add_clause(self, clause: Sequence[int]) -> None:
        """Add a permanent clause at the current level (usually level 0)."""
        self._check_lits(clause)
        codes = sorted({lit_code(l) for l in clause})
        for c in codes:
            if c ^ 1 in codes:
                return                       # tautology
        if self.unsat:
            return
        if self.trail_lim:
            self._add_clause_in_search(codes)
            return
        lval = self.lval
        kept = [c for c in codes if lval[c] != -1]
        if any(lval[c] == 1 for c in kept):
            return
        if not kept:
            self.unsat = True
            return
        if len(kept) == 1:
            self._assign(kept[0], None)
            if self._propagate() is not None:
                self.unsat = True
            return
        self._attach(kept)
        self.clauses.append(kept)

    def _attach(self, c: list[int]) -> None:
        self.watches[c[0]].append(c)
        self.watches[c[1]].append(c)

    def add_external_clause(self, clause: Sequence[int]) -> None:
        """Clause from outside the solver; may be falsified by the trail."""
        self._check_lits(clause)
        self.stats["ext_clauses"] += 1
        codes = sorted({lit_code(l) for l in clause})
        if any(c ^ 1 in codes for c in codes):
            return
        if not self.trail_lim:
            self.add_clause(clause)
            return
        self._add_clause_in_search(codes)

    def inject_decision(self, lit: int) -> None:
        """Use ``lit`` at the next decision point instead of the heuristic."""
        self._check_lits([lit])
        if self.lval[lit_code(lit)] != 0:
            raise ValueError(f"cannot decide on assigned variable {abs(lit)}")
        self.pending_decisions.append(lit)

    def _add_clause_in_search(self, codes: list[int]) -> None:
        lval, level = self.lval, self.level
        # order: true/unassigned first, then false by decreasing level
        def rank(c: int) -> tuple[int, int]:
            v = lval[c]
            if v == 1:
                return (0, level[c >> 1])
            if v == 0:
                return (1, 0)
            return (2, -level[c >> 1])
        codes.sort(key=rank)
        if not codes:
            self.unsat = True
            return
        if len(codes) == 1:
            c = codes[0]
            self._cancel_until(0)
            if lval[c] == -1:
                self.unsat = True
            elif lval[c] == 0:
                self._assign(c, None)
            return
        self.clauses.append(codes)
        self._attach(codes)
        v0, v1 = lval[codes[0]], lval[codes[1]]
        if v0 == 1 and v1 == -1 and level[codes[0] >> 1] > level[codes[1] >> 1]:
            # satisfied only above the level where it became unit: re-imply it there
            self._cancel_until(level[codes[1] >> 1])
            self._assign(codes[0], codes)
            return
        if v0 == 1 or (v0 == 0 and v1 == 0):
            return
        if v0 == 0:                          # unit under the trail
            blevel = level[codes[1] >> 1]
            self._cancel_until(blevel)
            self._assign(codes[0], codes)
            return
        # falsified: jump to the highest level involved
        top = level[codes[0] >> 1]
        self._cancel_until(top)
        if top == 0:
            self.unsat = True
            return
        if level[codes[1] >> 1] < top:
            self._cancel_until(level[codes[1] >> 1])
            self._assign(codes[0], codes)
            return
        self._pending_conflict = codes

    # -- assignment / propagation -----------------------------------------

    def _assign(self, code: int, reason) -> None:
        self.lval[code] = 1
        self.lval[code ^ 1] = -1
        v = code >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        trail, lval, watches = self.trail, self.lval, self.watches
        level, reason = self.level, self.reason
        dl = len(self.trail_lim)
        qhead = self.qhead
        start = qhead
        confl = None
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if lval[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if lval[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if lval[first] == -1:
                        confl = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    lval[first] = 1
                    lval[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
            if confl is not None:
                break
        self.stats["propagations"] += qhead - start
        self.qhead = qhead
        return confl

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        trail, lval, phase, act, heap = self.trail, self.lval, self.phase, self.activity, self.heap
        for k in range(len(trail) - 1, lim - 1, -1):
            code = trail[k]
            v = code >> 1
            lval[code] = 0
            lval[code ^ 1] = 0
            phase[v] = 0 if code & 1 else 1
            self.reason[v] = None
            heapq.heappush(heap, (-act[v], v))
        del trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, lim)
        if self.notified > lim:
            self.notified = lim
        if not self._null:
            self.bridge.on_backtrack(lvl)
        if len(heap) > 4 * self.num_vars + 1000:
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        lval, act = self.lval, self.activity
        self.heap = [(-act[v], v) for v in range(1, self.num_vars + 1) if lval[2 * v] == 0]
        heapq.heapify(self.heap)

    # -- heuristics ---------------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.lval[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _pick_branch(self) -> int | None:
        heap, lval, act = self.heap, self.lval, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if lval[2 * v] == 0 and -a == act[v]:
                return 2 * v if self.phase[v] else 2 * v + 1
        # stale heap; fall back to a scan
        for v in range(1, self.num_vars + 1):
            if lval[2 * v] == 0:
                return 2 * v if self.phase[v] else 2 * v + 1
        return None

    # -- reasons ------------------------------------------------------------

    def _reason_clause(self, v: int):
        r = self.reason[v]
        if r is not _EXTERNAL:
            return r
        code = 2 * v if self.lval[2 * v] == 1 else 2 * v + 1
        lit = code_lit(code)
        cl = self.bridge.ask_reason(lit)
        self.stats["ext_reasons"] += 1
        codes = self._validate_reason(lit, cl, v)
        self.reason[v] = codes
        return codes

    def _validate_reason(self, lit: int, cl: Sequence[int], v: int) -> list[int]:
        self._check_lits(cl)
        code = lit_code(lit)
        codes = [code] + sorted({lit_code(l) for l in cl} - {code})
        if lit_code(lit) not in {lit_code(l) for l in cl}:
            raise ContractViolation(f"reason for {lit} does not contain it: {list(cl)}")
        lv = self.level[v]
        for c in codes[1:]:
            if self.lval[c] != -1 or self.level[c >> 1] > lv:
                raise ContractViolation(f"reason for {lit} is not falsified-except-head: {list(cl)}")
        return codes

    # -- conflict analysis --------------------------------------------------

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen, level, trail = self.seen, self.level, self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        idx = len(trail) - 1
        p = None
        to_clear = []
        while True:
            lits = confl if p is None else confl[1:]
            for q in lits:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            path -= 1
            if path == 0:
                break
            confl = self._reason_clause(v)
            if not confl:
                raise ContractViolation(f"empty reason for variable {v} at level {level[v]}")
        learnt[0] = p ^ 1
        # local minimisation: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r is None or r is _EXTERNAL:
                keep.append(q)
                continue
            if any(not seen[x >> 1] and level[x >> 1] > 0 for x in r[1:]):
                keep.append(q)
        learnt = keep
        for v in to_clear:
            seen[v] = 0
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _reduce_db(self) -> None:
        locked = set()
        for code in self.trail:
            r = self.reason[code >> 1]
            if r is not None and r is not _EXTERNAL:
                locked.add(id(r))
        cands = [c for c in self.learnts if id(c) not in locked and self.lbd.get(id(c), 99) > 2]
        cands.sort(key=lambda c: (self.lbd.get(id(c), 99), len(c)), reverse=True)
        drop = {id(c) for c in cands[: len(cands) // 2]}
        if not drop:
            return
        for c in self.learnts:
            if id(c) in drop:
                self.lbd.pop(id(c), None)
        self.learnts = [c for c in self.learnts if id(c) not in drop]
        for k, ws in enumerate(self.watches):
            if ws:
                self.watches[k] = [c for c in ws if id(c) not in drop]
        self.stats["deleted"] += len(drop)

    # -- bridge plumbing ------------------------------------------------------

    def _notify(self) -> None:
        bridge, trail, obs = self.bridge, self.trail, self.observed
        for k in range(self.notified, len(trail)):
            code = trail[k]
            if obs[code >> 1]:
                bridge.on_assign(code_lit(code))
        self.notified = len(trail)

    def _external_round(self):
        """Run the bridge once; return a conflict clause, True if something changed, or False."""
        bridge = self.bridge
        self._notify()
        changed = False
        for lit in bridge.ask_propagations():
            self._check_lits([lit])
            code = lit_code(lit)
            val = self.lval[code]
            if val == 1:
                continue
            if val == 0:
                self._assign(code, _EXTERNAL)
                self.stats["ext_propagations"] += 1
                changed = True
                continue
            # propagated literal already false: its reason is a conflict
            cl = bridge.ask_reason(lit)
            self.stats["ext_reasons"] += 1
            self._check_lits(cl)
            if lit not in cl or any(self.lval[lit_code(l)] != -1 for l in cl):
                raise ContractViolation(f"reason for {lit} is not falsified-except-head: {list(cl)}")
            self.add_external_clause(cl)
            return True
        if changed:
            return True
        while True:
            cl = bridge.ask_external_clause()
            if cl is None:
                break
            self.add_external_clause(cl)
            changed = True
            if self.unsat or self._pending_conflict is not None:
                break
        return changed

    # -- main loop ------------------------------------------------------------

    _pending_conflict = None

    def solve(self, conflict_budget: int | None = None, time_budget: float | None = None) -> SolveResult:
        start = time.monotonic()
        st = self.stats
        if self.unsat:
            return SolveResult(UNSAT, stats=dict(st))
        if conflict_budget is not None and conflict_budget <= 0:
            return SolveResult(UNKNOWN, stats=dict(st), budget="conflicts")
        if time_budget is not None and time_budget <= 0:
            return SolveResult(UNKNOWN, stats=dict(st), budget="time")
        conflicts_at_start = st["conflicts"]
        restart_idx = 1
        restart_limit = luby(restart_idx) * self.cfg.restart_base
        since_restart = 0
        next_reduce = st["conflicts"] + self.cfg.reduce_first
        reduce_round = 0
        use_bridge = not self._null
        while True:
            confl = self._pending_conflict
            self._pending_conflict = None
            if confl is None:
                confl = self._propagate()
            if confl is None and use_bridge:
                r = self._external_round()
                if self.unsat:
                    return SolveResult(UNSAT, stats=dict(st))
                if r:
                    continue
            if confl is not None:
                st["conflicts"] += 1
                since_restart += 1
                if not self.trail_lim:
                    self.unsat = True
                    return SolveResult(UNSAT, stats=dict(st))
                learnt, blevel = self._analyze(confl)
                self._cancel_until(blevel)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = len({self.level[c >> 1] for c in learnt})
                    self._assign(learnt[0], learnt)
                st["learned"] += 1
                self.var_inc /= self.cfg.var_decay
                if conflict_budget is not None and st["conflicts"] - conflicts_at_start >= conflict_budget:
                    self._cancel_until(0)
                    return SolveResult(UNKNOWN, stats=dict(st), budget="conflicts")
                if time_budget is not None and st["conflicts"] % 64 == 0 and time.monotonic() - start > time_budget:
                    self._cancel_until(0)
                    return SolveResult(UNKNOWN, stats=dict(st), budget="time")
                continue
            # no conflict: restart / reduce / decide
            if since_restart >= restart_limit:
                since_restart = 0
                restart_idx += 1
                restart_limit = luby(restart_idx) * self.cfg.restart_base
                st["restarts"] += 1
                self._cancel_until(0)
                continue
            if st["conflicts"] >= next_reduce:
                reduce_round += 1
                next_reduce = st["conflicts"] + self.cfg.reduce_first + self.cfg.reduce_inc * reduce_round
                self._reduce_db()
            if time_budget is not None and st["decisions"] % 256 == 0 and time.monotonic() - start > time_budget:
                self._cancel_until(0)
                return SolveResult(UNKNOWN, stats=dict(st), budget="time")
            code = self._next_decision(use_bridge)
            if code is None:
                model = [v if self.lval[2 * v] == 1 else -v for v in range(1, self.num_vars + 1)]
                if use_bridge and not self.bridge.check_model(model):
                    cl = self.bridge.ask_external_clause()
                    if cl is None:
                        raise ContractViolation("check_model rejected the model without a clause")
                    self.add_external_clause(cl)
                    if self.unsat:
                        return SolveResult(UNSAT, stats=dict(st))
                    continue
                self._cancel_until(0)
                return SolveResult(SAT, model=model, stats=dict(st))
            st["decisions"] += 1
            if use_bridge:
                self._notify()
                self.bridge.on_new_level()
            self.trail_lim.append(len(self.trail))
            self._assign(code, None)

    def _next_decision(self, use_bridge: bool) -> int | None:
        while self.pending_decisions:
            lit = self.pending_decisions.pop(0)
            if self.lval[lit_code(lit)] == 0:
                self.stats["ext_decisions"] += 1
                return lit_code(lit)
            self.stats["ext_decisions_rejected"] += 1
        if use_bridge:
            self._notify()
            while True:
                lit = self.bridge.ask_decision()
                if not lit:
                    break
                self._check_lits([lit])
                if self.lval[lit_code(lit)] == 0:
                    self.stats["ext_decisions"] += 1
                    return lit_code(lit)
                self.stats["ext_decisions_rejected"] += 1
        return self._pick_branch()


def _as_formula(instance) -> tuple[int, list]:
    if hasattr(instance, "clauses") and hasattr(instance, "num_vars"):
        return instance.num_vars, instance.clauses
    num_vars, clauses = instance
    return num_vars, clauses


def solve(instance, bridge: PropagatorBridge | None = None, seed: int = 0,
          conflict_budget: int | None = None, time_budget: float | None = None,
          backend: str = "native") -> SolveResult:
    """Solve a :class:`~shasat.cnf_encoder.CnfInstance` or ``(num_vars, clauses)``.

    ``backend="cadical"`` runs the same contract on CaDiCaL through PySAT.
    """
    num_vars, clauses = _as_formula(instance)
    if backend == "native":
        return Solver(num_vars, clauses, seed=seed, bridge=bridge).solve(conflict_budget, time_budget)
    if backend == "cadical":
        return solve_cadical(num_vars, clauses, bridge, seed, conflict_budget, time_budget)
    raise ValueError(f"unknown backend {backend!r}")


def solve_clauses(num_vars: int, clauses: Iterable[Sequence[int]], seed: int = 0,
                  bridge: PropagatorBridge | None = None, conflict_budget: int | None = None,
                  time_budget: float | None = None) -> SolveResult:
    return Solver(num_vars, clauses, seed=seed, bridge=bridge).solve(conflict_budget, time_budget)


def parse_dimacs_text(text: str) -> tuple[int, list[list[int]]]:
    from .cnf_encoder import parse_dimacs
    return parse_dimacs(text)


def format_stats(stats: dict[str, int]) -> str:
    import json
    return json.dumps(stats, sort_keys=True)


# -- CaDiCaL through PySAT ---------------------------------------------------

def _pysat_adapter(bridge: PropagatorBridge):
    from pysat.engines import Propagator

    class Adapter(Propagator):
        def __init__(self) -> None:
            super().__init__()
            self.pending: list[int] | None = None

        def on_assignment(self, lit: int, fixed: bool = False) -> None:
            bridge.on_assign(lit, fixed)

        def on_new_level(self) -> None:
            bridge.on_new_level()

        def on_backtrack(self, to: int) -> None:
            self.pending = None
            bridge.on_backtrack(to)

        def check_model(self, model) -> bool:
            return bridge.check_model(list(model))

        def decide(self) -> int:
            return bridge.ask_decision()

        def propagate(self) -> list[int]:
            return list(bridge.ask_propagations())

        def provide_reason(self, lit: int) -> list[int]:
            return list(bridge.ask_reason(lit))

        def has_clause(self) -> bool:
            if self.pending is None:
                self.pending = bridge.ask_external_clause()
            return self.pending is not None

        def add_clause(self) -> list[int]:
            if self.pending is None:
                self.pending = bridge.ask_external_clause()
            cl, self.pending = self.pending, None
            return list(cl or [])

    return Adapter()


def solve_cadical(num_vars: int, clauses: Iterable[Sequence[int]], bridge: PropagatorBridge | None = None,
                  seed: int = 0, conflict_budget: int | None = None,
                  time_budget: float | None = None) -> SolveResult:
    """Run CaDiCaL (via PySAT) on the formula, optionally with ``bridge`` attached.

    The seed shuffles the clause order and the initial phases, since the
    binding exposes no random seed of its own.
    """
    from pysat.solvers import Solver as PySolver

    rng = random.Random(seed)
    cls = [list(c) for c in clauses]
    if seed:
        rng.shuffle(cls)
    st = {"conflicts": 0, "decisions": 0, "propagations": 0}
    if (conflict_budget is not None and conflict_budget <= 0) or (time_budget is not None and time_budget <= 0):
        return SolveResult(UNKNOWN, stats=st, budget="conflicts" if conflict_budget is not None and conflict_budget <= 0 else "time")
    with PySolver(name="cadical195", bootstrap_with=cls) as s:
        if seed:
            s.set_phases([v if rng.getrandbits(1) else -v for v in range(1, num_vars + 1)])
        if bridge is not None and bridge is not NULL_BRIDGE:
            s.connect_propagator(_pysat_adapter(bridge))
            obs = bridge.observed if bridge.observed is not None else range(1, num_vars + 1)
            for v in sorted(obs):
                s.observe(v)
        # the binding cannot interrupt CaDiCaL, so a time budget is enforced
        # between short conflict-limited calls (learned clauses are kept)
        deadline = None if time_budget is None else time.monotonic() + time_budget
        left = conflict_budget
        expired = False
        if left is None and deadline is None:
            res = s.solve()
        else:
            while True:
                chunk = CADICAL_CHUNK if left is None else min(CADICAL_CHUNK, left)
                s.conf_budget(chunk)
                res = s.solve_limited()
                if res is not None:
                    break
                if left is not None:
                    left -= chunk
                    if left <= 0:
                        break
                if deadline is not None and time.monotonic() >= deadline:
                    expired = True
                    break
        acc = s.accum_stats() or {}
        st = {"conflicts": acc.get("conflicts", 0), "decisions": acc.get("decisions", 0),
              "propagations": acc.get("propagations", 0)}
        if res is True:
            model = s.get_model()
            model = [l for l in model if abs(l) <= num_vars]
            return SolveResult(SAT, model=model, stats=st)
        if res is False:
            return SolveResult(UNSAT, stats=st)
        return SolveResult(UNKNOWN, stats=st, budget="time" if expired else "conflicts")
