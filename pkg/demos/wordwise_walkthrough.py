"""Walk through wordwise propagation on two small additions.

Run with ``python demos/wordwise_walkthrough.py``.
"""

from __future__ import annotations

from shasat.diff_model import ConditionWord
from shasat.wordwise_engine import Term, assemble_equation, forced_conditions, split_subproblems, wordwise_propagate


def show(title: str, terms: list[Term], width: int) -> None:
    print(f"== {title}")
    for t in terms:
        print(f"   {'+' if t.sign > 0 else '-'} {t.label}: [{t.word}]")
    prob = assemble_equation(terms, width)
    print(f"   normalized: {len(prob.unknowns)} unknowns, constants per column {prob.constants}, target {prob.target}")
    for sub in split_subproblems(prob):
        names = [f"{prob.unknowns[k].label}{prob.unknowns[k].bit}" for k in sub.unknowns]
        print(f"   columns {sub.lo}..{sub.hi}: unknowns {names}, {len(sub.solutions or [])} solutions")
    res = wordwise_propagate(terms, width)
    for label, word in forced_conditions(res, terms).items():
        print(f"   {label} -> [{word}]")
    print()


def main() -> None:
    w = lambda s: ConditionWord.parse(s, len(s))
    show("two words with equal modular difference",
         [Term("A", w("ux-")), Term("B", w("-n-"), -1)], 3)
    show("A + B = C on five bits",
         [Term("A", w("u1xxx")), Term("B", w("xx-nx")), Term("C", w("---u-"), -1)], 5)


if __name__ == "__main__":
    main()
