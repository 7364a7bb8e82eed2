"""Independent brute-force references used by the tests.

Nothing here imports the propagation code under test; the only shared
pieces are the condition alphabet and the plain Boolean functions.
"""

from __future__ import annotations

from itertools import product

ALLOWED = {
    "0": ((0, 0),), "1": ((1, 1),), "u": ((1, 0),), "n": ((0, 1),),
    "x": ((1, 0), (0, 1)), "-": ((0, 0), (1, 1)),
    "?": ((0, 0), (1, 0), (0, 1), (1, 1)),
}
SYMBOL_OF = {frozenset(v): k for k, v in ALLOWED.items()}
SYMBOLS = tuple(ALLOWED)


def tightest(pairs: set) -> str:
    """Smallest symbol whose allowed set contains ``pairs``."""
    best = "?"
    for s, allowed in ALLOWED.items():
        if pairs <= set(allowed) and len(allowed) < len(ALLOWED[best]):
            best = s
    return best


def boolean(func: str, bits) -> int:
    if func == "XOR2":
        return bits[0] ^ bits[1]
    if func == "XOR3":
        return bits[0] ^ bits[1] ^ bits[2]
    if func == "IF":
        return bits[1] if bits[0] else bits[2]
    if func == "MAJ":
        return int(bits[0] + bits[1] + bits[2] >= 2)
    raise ValueError(func)


def slice_outputs(func: str, bits, n_out: int, offset: int) -> tuple:
    if func == "ADD":
        t = sum(bits) + offset
        return tuple(t >> k & 1 for k in range(n_out))
    return (boolean(func, bits),)


def slice_groundings(func: str, inputs, outputs, offset: int = 0):
    """Every assignment of pairs to all positions that both runs realise."""
    out = []
    for combo in product(*(ALLOWED[s] for s in inputs)):
        y = slice_outputs(func, [p[0] for p in combo], len(outputs), offset)
        y2 = slice_outputs(func, [p[1] for p in combo], len(outputs), offset)
        opairs = tuple(zip(y, y2))
        if all(p in ALLOWED[s] for p, s in zip(opairs, outputs)):
            out.append(combo + opairs)
    return out


def bitslice_reference(func: str, inputs, outputs, offset: int = 0):
    """Tightest symbols per position, or ``None`` when nothing conforms."""
    gs = slice_groundings(func, inputs, outputs, offset)
    if not gs:
        return None
    return tuple(tightest({g[k] for g in gs}) for k in range(len(inputs) + len(outputs)))


def twobit_reference(func: str, inputs, output):
    """``{(a, b): z}`` for input positions whose first-run bits always xor to ``z``."""
    gs = slice_groundings(func, inputs, (output,))
    if not gs:
        return {}
    k = len(inputs)
    free = [i for i in range(k) if len({g[i][0] for g in gs}) == 2]
    out = {}
    for ai, a in enumerate(free):
        for b in free[ai + 1:]:
            zs = {g[a][0] ^ g[b][0] for g in gs}
            if len(zs) == 1:
                out[(a, b)] = zs.pop()
    return out


def word_pairs(cond: str):
    """All (v, v') for an MSB-first condition string."""
    width = len(cond)
    for combo in product(*(ALLOWED[c] for c in reversed(cond))):
        v = sum(p[0] << i for i, p in enumerate(combo))
        v2 = sum(p[1] << i for i, p in enumerate(combo))
        yield v, v2


def wordwise_reference(terms):
    """Forced (label, bit, run) -> value over all word pairs with ``sum sign*(v - v') = 0``.

    ``terms`` is a list of ``(label, cond, sign)``.  Returns ``None`` when no
    word pairs satisfy the equation; facts on positions already fixed to
    ``0``, ``1``, ``u`` or ``n`` are left out.
    """
    width = len(terms[0][1])
    mod = 1 << width
    options = [list(word_pairs(c)) for _, c, _ in terms]
    seen: dict[tuple, set] = {}
    found = False
    for choice in product(*options):
        if sum(sign * (v - v2) for (_, _, sign), (v, v2) in zip(terms, choice)) % mod:
            continue
        found = True
        for (label, cond, _), (v, v2) in zip(terms, choice):
            for bit in range(width):
                for run, val in ((0, v), (1, v2)):
                    seen.setdefault((label, bit, run), set()).add(val >> bit & 1)
    if not found:
        return None
    forced = {}
    for (label, bit, run), vals in seen.items():
        cond = dict((l, c) for l, c, _ in terms)[label]
        if cond[width - 1 - bit] in "01un":
            continue
        if len(vals) == 1:
            forced[(label, bit, run)] = next(iter(vals))
    return forced


def shortest_inconsistent_cycle(n_vertices: int, edges, new):
    """Length of the shortest simple cycle through ``new`` with odd parity (BFS over (vertex, parity, visited))."""
    u, v, z = new
    adj = {i: [] for i in range(n_vertices)}
    for a, b, w in edges:
        adj[a].append((b, w))
        adj[b].append((a, w))
    best = None
    stack = [(u, 0, frozenset([u]), 0)]
    while stack:
        x, par, vis, length = stack.pop()
        if best is not None and length + 1 >= best:
            continue
        if x == v:
            if par ^ z == 1:
                best = length + 1
            continue
        for y, w in adj[x]:
            if y not in vis:
                stack.append((y, par ^ w, vis | {y}, length + 1))
    return best
