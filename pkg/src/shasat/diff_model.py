"""Differential conditions on bit pairs, condition words and starting points.

A condition is stored as a 4-bit mask over the possible pairs ``(x, x')``;
bit ``x | (x' << 1)`` is set when that pair is allowed.  Only the seven masks
with a printable symbol occur in practice and the set is closed under
intersection (apart from the empty mask, which signals a contradiction).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Sequence

# pair (x, x') -> bit index
def pair_bit(x: int, x2: int) -> int:
    return x | (x2 << 1)


PAIRS = ((0, 0), (1, 0), (0, 1), (1, 1))

SYMBOL_TO_MASK: dict[str, int] = {
    "0": 0b0001,
    "u": 0b0010,
    "n": 0b0100,
    "1": 0b1000,
    "x": 0b0110,
    "-": 0b1001,
    "?": 0b1111,
}
MASK_TO_SYMBOL: dict[int, str] = {m: s for s, m in SYMBOL_TO_MASK.items()}
SYMBOLS = "?-x01un"
TOP = SYMBOL_TO_MASK["?"]


class Contradiction(Exception):
    """Raised when two conditions on the same bit pair have no common pair."""


class StartingPointError(ValueError):
    """Malformed starting-point or characteristic text."""


def allowed_pairs(symbol: str) -> set[tuple[int, int]]:
    mask = SYMBOL_TO_MASK[symbol]
    return {p for p in PAIRS if mask >> pair_bit(*p) & 1}


def mask_of_pairs(pairs: Iterable[tuple[int, int]]) -> int:
    mask = 0
    for x, x2 in pairs:
        mask |= 1 << pair_bit(x, x2)
    return mask


def condition_of_pair_set(pairs: Iterable[tuple[int, int]]) -> str | None:
    """Symbol whose allowed set equals ``pairs``; ``None`` if no symbol fits."""
    return MASK_TO_SYMBOL.get(mask_of_pairs(pairs))


def intersect(a: str, b: str) -> str:
    mask = SYMBOL_TO_MASK[a] & SYMBOL_TO_MASK[b]
    if not mask:
        raise Contradiction(f"{a!r} and {b!r} are disjoint")
    return MASK_TO_SYMBOL[mask]


def tightest_symbol(mask: int) -> str:
    """Smallest printable condition whose allowed set contains ``mask``."""
    if mask in MASK_TO_SYMBOL:
        return MASK_TO_SYMBOL[mask]
    best = TOP
    for m in MASK_TO_SYMBOL:
        if m & mask == mask and bin(m).count("1") < bin(best).count("1"):
            best = m
    return MASK_TO_SYMBOL[best]


def condition_of_values(x: int, x2: int) -> str:
    return MASK_TO_SYMBOL[1 << pair_bit(x, x2)]


def signed_digit(symbol: str) -> int | None:
    """Contribution of the pair to ``x - x'``; ``None`` when not fixed."""
    if symbol in "-01":
        return 0
    if symbol == "u":
        return 1
    if symbol == "n":
        return -1
    return None


# -- condition words -------------------------------------------------------

@dataclass(frozen=True)
class ConditionWord:
    """Per-bit conditions of a word pair, ``conds[0]`` is the LSB."""

    conds: tuple[str, ...]

    def __post_init__(self) -> None:
        for c in self.conds:
            if c not in SYMBOL_TO_MASK:
                raise StartingPointError(f"unknown condition symbol {c!r}")

    @classmethod
    def parse(cls, text: str, width: int = 32) -> "ConditionWord":
        """Parse the MSB-first textual form (``"[ux-]"`` brackets optional)."""
        text = text.strip().strip("[]")
        if len(text) != width:
            raise StartingPointError(f"condition word needs {width} symbols, got {len(text)}: {text!r}")
        return cls(tuple(reversed(text)))

    @classmethod
    def fill(cls, symbol: str, width: int = 32) -> "ConditionWord":
        return cls((symbol,) * width)

    @classmethod
    def from_values(cls, v: int, v2: int, width: int = 32) -> "ConditionWord":
        return cls(tuple(condition_of_values(v >> i & 1, v2 >> i & 1) for i in range(width)))

    @property
    def width(self) -> int:
        return len(self.conds)

    def __str__(self) -> str:
        return "".join(reversed(self.conds))

    def __getitem__(self, i: int) -> str:
        return self.conds[i]

    def __iter__(self) -> Iterator[str]:
        return iter(self.conds)

    def masks(self) -> list[int]:
        return [SYMBOL_TO_MASK[c] for c in self.conds]

    def refines(self, other: "ConditionWord") -> bool:
        """Pointwise allowed-set inclusion."""
        return all(SYMBOL_TO_MASK[a] & ~SYMBOL_TO_MASK[b] == 0 for a, b in zip(self.conds, other.conds))

    def intersect(self, other: "ConditionWord") -> "ConditionWord":
        return ConditionWord(tuple(intersect(a, b) for a, b in zip(self.conds, other.conds)))

    def has_difference(self) -> bool:
        return any(c in "xun" for c in self.conds)

    def hamming_weight(self) -> int:
        return sum(c in "xun" for c in self.conds)


# -- starting points and characteristics ----------------------------------

ROLES = ("A", "E", "W")


@dataclass
class StartingPoint:
    """Condition words for rows ``-4..n-1``.

    ``rows[i]`` maps a role to its :class:`ConditionWord`; a missing role means
    no constraint (all ``?``).  Rows ``-4..-1`` never carry a W entry.
    """

    n: int
    rows: dict[int, dict[str, ConditionWord]] = field(default_factory=dict)

    def get(self, role: str, i: int) -> ConditionWord | None:
        return self.rows.get(i, {}).get(role)

    def condition(self, role: str, i: int, bit: int) -> str:
        w = self.get(role, i)
        return "?" if w is None else w[bit]

    def items(self) -> Iterator[tuple[str, int, ConditionWord]]:
        for i in sorted(self.rows):
            for role in ROLES:
                w = self.rows[i].get(role)
                if w is not None:
                    yield role, i, w

    def refines(self, other: "StartingPoint") -> bool:
        if self.n != other.n:
            return False
        for role, i, w in other.items():
            mine = self.get(role, i)
            if mine is None or not mine.refines(w):
                return False
        return True

    def has_message_difference(self) -> bool:
        return any(role == "W" and w.has_difference() for role, i, w in self.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StartingPoint):
            return NotImplemented
        return self.n == other.n and dict(self.items_map()) == dict(other.items_map())

    def items_map(self) -> Iterator[tuple[tuple[str, int], ConditionWord]]:
        for role, i, w in self.items():
            yield (role, i), w


# A characteristic has exactly the same shape; the alias documents intent.
Characteristic = StartingPoint

_ROW_RE = re.compile(r"^\s*(-?\d+)\s*:\s*(\S+)\s+(\S+)(?:\s+(\S+))?\s*$")


def parse_starting_point(text: str) -> StartingPoint:
    """Parse ``i: <A> <E> <W|.>`` rows; ``#`` starts a comment.

    Rows must be contiguous from -4 upward; the step count is the number of
    rows from 0.  A word written as ``.`` is absent.
    """
    rows: dict[int, dict[str, ConditionWord]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _ROW_RE.match(line)
        if not m:
            raise StartingPointError(f"line {lineno}: cannot parse {raw!r}")
        i = int(m.group(1))
        if i in rows:
            raise StartingPointError(f"line {lineno}: duplicate row {i}")
        words = [m.group(2), m.group(3), m.group(4)]
        if i < 0 and words[2] not in (None, "."):
            raise StartingPointError(f"line {lineno}: row {i} cannot have a W word")
        row: dict[str, ConditionWord] = {}
        for role, tok in zip(ROLES, words):
            if tok is None or tok == ".":
                continue
            try:
                row[role] = ConditionWord.parse(tok)
            except StartingPointError as exc:
                raise StartingPointError(f"line {lineno}: {exc}") from None
        rows[i] = row
    if not rows:
        raise StartingPointError("no rows")
    lo, hi = min(rows), max(rows)
    if lo != -4:
        raise StartingPointError(f"rows must start at -4, first row is {lo}")
    missing = sorted(set(range(lo, hi + 1)) - set(rows))
    if missing:
        raise StartingPointError(f"missing rows: {missing}")
    return StartingPoint(n=hi + 1, rows=rows)


def render_characteristic(sp: StartingPoint, header: str | None = None) -> str:
    """Text form with one row per step (columns A, E, W), MSB on the left."""
    blank = "."
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    for i in range(-4, sp.n):
        row = sp.rows.get(i, {})
        cols = [str(row[r]) if r in row else blank for r in ROLES]
        if i < 0:
            cols = cols[:2] + ["."]
        lines.append(f"{i:>3}: {cols[0]} {cols[1]} {cols[2]}")
    return "\n".join(lines) + "\n"


def drop_rows(sp: StartingPoint, k: int) -> StartingPoint:
    """Remove the last ``k`` step rows."""
    if k < 0 or k > sp.n:
        raise ValueError(f"cannot drop {k} rows from a {sp.n}-step starting point")
    n = sp.n - k
    return StartingPoint(n=n, rows={i: dict(r) for i, r in sp.rows.items() if i < n})


def characteristic_from_pair(tr1, tr2) -> StartingPoint:
    """Fully concrete characteristic of two :class:`~shasat.hash_core.StateTrace` runs."""
    rows: dict[int, dict[str, ConditionWord]] = {}
    for i in range(-4, tr1.n):
        row = {
            "A": ConditionWord.from_values(tr1.A[i], tr2.A[i]),
            "E": ConditionWord.from_values(tr1.E[i], tr2.E[i]),
        }
        if i >= 0:
            row["W"] = ConditionWord.from_values(tr1.W[i], tr2.W[i])
        rows[i] = row
    return StartingPoint(n=tr1.n, rows=rows)


def signed_difference_view(sp: StartingPoint) -> StartingPoint:
    """Replace ``0``/``1`` by ``-`` so only the signed differences remain."""
    def strip(w: ConditionWord) -> ConditionWord:
        return ConditionWord(tuple("-" if c in "01" else c for c in w))

    return StartingPoint(n=sp.n, rows={i: {r: strip(w) for r, w in row.items()} for i, row in sp.rows.items()})


# -- bundled data ------------------------------------------------------------

BUNDLED = {21: "sp21.txt", 25: "sp25.txt", 28: "sp28.txt", 38: "sp38.txt"}


def bundled_text(name: str) -> str:
    return resources.files("shasat.data").joinpath(name).read_text()


def load_bundled(steps: int) -> StartingPoint:
    return parse_starting_point(bundled_text(BUNDLED[steps]))


def starting_point_for(steps: int) -> StartingPoint:
    """Smallest bundled starting point with at least ``steps`` rows, cut down to ``steps``."""
    for base in sorted(BUNDLED):
        if base >= steps:
            return drop_rows(load_bundled(base), base - steps)
    raise ValueError(f"no bundled starting point covers {steps} steps")


def checksum(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def load_starting_point(path_or_steps: str | int) -> StartingPoint:
    if isinstance(path_or_steps, int) or str(path_or_steps).isdigit():
        return starting_point_for(int(path_or_steps))
    with open(path_or_steps) as fh:
        return parse_starting_point(fh.read())
