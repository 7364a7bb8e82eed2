"""Shared test utilities: fast clause evaluation and small instances."""

from __future__ import annotations

import numpy as np


class ClauseEvaluator:
    """Vectorised check of a fixed clause list against many assignments."""

    def __init__(self, clauses):
        width = max(len(c) for c in clauses)
        var = np.zeros((len(clauses), width), dtype=np.int64)
        neg = np.zeros((len(clauses), width), dtype=bool)
        pad = np.ones((len(clauses), width), dtype=bool)
        for k, cl in enumerate(clauses):
            for j, lit in enumerate(cl):
                var[k, j] = abs(lit)
                neg[k, j] = lit < 0
                pad[k, j] = False
        self.var, self.neg, self.pad = var, neg, pad

    def falsified(self, assign) -> np.ndarray:
        a = np.asarray(assign, dtype=bool)
        lit = a[self.var] ^ self.neg
        lit &= ~self.pad
        return np.flatnonzero(~lit.any(axis=1))
