"""Two-bit conditions and inconsistency blocking.

A two-bit condition ``x ^ y = z`` between two input bits of a bitwise slice
holds when every grounding of the slice's differential satisfies it.  The
conditions found along the search form a graph with parity-labelled edges; a
cycle whose parities sum to one cannot be satisfied, and the union of the
reasons of its edges yields a clause that blocks the current partial
assignment.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Hashable, Iterable, Sequence

from .diff_model import PAIRS, SYMBOL_TO_MASK, pair_bit
from .prop_engine import BITWISE_FUNCS, BitsliceKey, LRUCache, eval_bitwise


@dataclass(frozen=True)
class TwoBitPattern:
    """``bit[a] ^ bit[b] == z`` over first-run values of input positions ``a < b``."""

    a: int
    b: int
    z: int


def _groundings(key: BitsliceKey) -> list[tuple[tuple[int, int], ...]]:
    in_pairs = [[p for p in PAIRS if SYMBOL_TO_MASK[s] >> pair_bit(*p) & 1] for s in key.inputs]
    out_mask = SYMBOL_TO_MASK[key.outputs[0]]
    out = []
    for combo in product(*in_pairs):
        y = eval_bitwise(key.func, [p[0] for p in combo])
        y2 = eval_bitwise(key.func, [p[1] for p in combo])
        if out_mask >> pair_bit(y, y2) & 1:
            out.append(combo)
    return out


def _derive(key: BitsliceKey) -> tuple[TwoBitPattern, ...]:
    if key.func not in BITWISE_FUNCS:
        return ()
    gs = _groundings(key)
    if not gs:
        return ()
    k = len(key.inputs)
    # positions whose first-run value is the same in every grounding carry no pair information
    free = [i for i in range(k) if len({g[i][0] for g in gs}) == 2]
    out = []
    for a, b in combinations(free, 2):
        zs = {g[a][0] ^ g[b][0] for g in gs}
        if len(zs) == 1:
            out.append(TwoBitPattern(a, b, zs.pop()))
    return tuple(out)


_cache = LRUCache(1 << 16)


def derive_twobit(key: BitsliceKey, cache: LRUCache | None = None) -> tuple[TwoBitPattern, ...]:
    """Two-bit conditions among the inputs of a bitwise slice (adders yield none).

    >>> derive_twobit(BitsliceKey("XOR3", ("-", "0", "-"), ("0",)))
    (TwoBitPattern(a=0, b=2, z=0),)
    """
    cache = _cache if cache is None else cache
    hit = cache.get(key)
    if hit is not LRUCache._MISSING:
        return hit
    res = _derive(key)
    cache.put(key, res)
    return res


# -- equation graph -----------------------------------------------------------

@dataclass
class Edge:
    u: Hashable
    v: Hashable
    z: int
    reason: tuple = ()
    level: int = 0
    order: int = 0
    meta: object = None        # caller data, e.g. what is needed to shrink the reason


@dataclass
class InconsistentCycle:
    edges: list[Edge]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def parity(self) -> int:
        s = 0
        for e in self.edges:
            s ^= e.z
        return s

    def reason_literals(self) -> list[int]:
        lits: list[int] = []
        seen = set()
        for e in self.edges:
            for l in e.reason:
                if l not in seen:
                    seen.add(l)
                    lits.append(l)
        return lits


def blocking_clause(cycle: InconsistentCycle) -> list[int]:
    """Negation of the union of the reasons of the cycle's edges."""
    return [-l for l in cycle.reason_literals()]


class EquationGraph:
    """Parity graph kept consistent; backtracking removes edges above a level.

    Connectivity and parity are tracked by a union-find without path
    compression so that unions can be undone; the adjacency lists are used
    to recover a shortest cycle through a newly added inconsistent edge.
    """

    def __init__(self) -> None:
        self.adj: dict[Hashable, list[Edge]] = {}
        self.edges: list[Edge] = []
        self.parent: dict[Hashable, Hashable] = {}
        self.parity: dict[Hashable, int] = {}     # parity to parent
        self.rank: dict[Hashable, int] = {}
        self.undo: list[tuple] = []                # (level, kind, payload)
        self.pairs: dict[tuple, Edge] = {}
        self._order = 0
        self.stats = {"edges_added": 0, "cycles": 0, "cycle_length_sum": 0}

    def _find(self, x: Hashable) -> tuple[Hashable, int]:
        p = 0
        while self.parent.get(x, x) != x:
            p ^= self.parity[x]
            x = self.parent[x]
        return x, p

    def _key(self, u: Hashable, v: Hashable) -> tuple:
        return (u, v) if repr(u) <= repr(v) else (v, u)

    def add_edge(self, u: Hashable, v: Hashable, z: int, reason: Sequence[int] = (), level: int = 0,
                 meta: object = None) -> InconsistentCycle | None:
        """Insert ``u ^ v = z``; return the shortest inconsistent cycle it closes, if any.

        An inconsistent edge is not inserted, so the graph stays consistent.
        """
        if u == v:
            raise ValueError("two-bit condition needs distinct endpoints")
        key = self._key(u, v)
        old = self.pairs.get(key)
        if old is not None:
            if old.z == z:
                return None
            new = Edge(u, v, z, tuple(reason), level, self._order, meta)
            self.stats["cycles"] += 1
            self.stats["cycle_length_sum"] += 2
            return InconsistentCycle([old, new])
        ru, pu = self._find(u)
        rv, pv = self._find(v)
        e = Edge(u, v, z, tuple(reason), level, self._order, meta)
        if ru == rv and pu ^ pv != z:
            path = self._shortest_path(u, v)
            cycle = InconsistentCycle(path + [e])
            self.stats["cycles"] += 1
            self.stats["cycle_length_sum"] += len(cycle)
            return cycle
        self._order += 1
        self.adj.setdefault(u, []).append(e)
        self.adj.setdefault(v, []).append(e)
        self.edges.append(e)
        self.pairs[key] = e
        self.stats["edges_added"] += 1
        self.undo.append((level, "edge", e))
        if ru != rv:
            if self.rank.get(ru, 0) < self.rank.get(rv, 0):
                ru, rv = rv, ru
            self.parent[rv] = ru
            self.parity[rv] = pu ^ pv ^ z
            bumped = self.rank.get(ru, 0) == self.rank.get(rv, 0)
            if bumped:
                self.rank[ru] = self.rank.get(ru, 0) + 1
            self.undo.append((level, "union", (rv, ru, bumped)))
        return None

    def _shortest_path(self, src: Hashable, dst: Hashable) -> list[Edge]:
        prev: dict[Hashable, Edge | None] = {src: None}
        q = deque([src])
        while q:
            x = q.popleft()
            if x == dst:
                break
            for e in self.adj.get(x, ()):
                y = e.v if e.u == x else e.u
                if y not in prev:
                    prev[y] = e
                    q.append(y)
        path = []
        x = dst
        while prev[x] is not None:
            e = prev[x]
            path.append(e)
            x = e.v if e.u == x else e.u
        path.reverse()
        return path

    def backtrack(self, level: int) -> list[Edge]:
        """Remove every edge inserted above ``level``; returns the removed edges."""
        removed = []
        while self.undo and self.undo[-1][0] > level:
            _, kind, payload = self.undo.pop()
            if kind == "edge":
                e = payload
                self.adj[e.u].pop()
                self.adj[e.v].pop()
                self.edges.pop()
                del self.pairs[self._key(e.u, e.v)]
                removed.append(e)
            else:
                rv, ru, bumped = payload
                del self.parent[rv]
                del self.parity[rv]
                if bumped:
                    self.rank[ru] -= 1
        return removed

    def __len__(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple]:
        return {(self._key(e.u, e.v), e.z) for e in self.edges}


def shortest_odd_cycle_through(edges: Iterable[tuple[Hashable, Hashable, int]], new: tuple[Hashable, Hashable, int]) -> int | None:
    """Exhaustive reference: length of the shortest inconsistent simple cycle using ``new``."""
    edges = list(edges)
    u, v, z = new
    adj: dict[Hashable, list[tuple[Hashable, int, int]]] = {}
    for k, (a, b, w) in enumerate(edges):
        adj.setdefault(a, []).append((b, w, k))
        adj.setdefault(b, []).append((a, w, k))
    best = None

    def dfs(x: Hashable, parity: int, visited: set, length: int) -> None:
        nonlocal best
        if best is not None and length + 1 >= best:
            return
        if x == v:
            if parity ^ z == 1:
                best = length + 1
            return
        for y, w, _ in adj.get(x, ()):
            if y not in visited:
                visited.add(y)
                dfs(y, parity ^ w, visited, length + 1)
                visited.discard(y)

    dfs(u, 0, {u}, 0)
    return best
