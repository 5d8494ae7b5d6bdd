"""Independent test oracles.

Deliberately naive implementations used only to cross-check the package:
the permutation oracle enumerates all m! orders with plain Python loops
and must stay independent of the production coalition-enumeration code.
"""

from __future__ import annotations

import itertools

import numpy as np


def coalition_value(model, background_rows: np.ndarray, x: np.ndarray, coalition) -> float:
    """Mean raw score over background rows with ``coalition`` taken from x."""
    rows = np.array(background_rows, dtype=float)
    for j in coalition:
        rows[:, j] = x[j]
    return float(np.mean(model.decision_function(rows)))


def permutation_shapley(model, background_rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Average marginal contribution over every feature permutation."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    values: dict[frozenset, float] = {}

    def v(coalition: frozenset) -> float:
        if coalition not in values:
            values[coalition] = coalition_value(model, background_rows, x, sorted(coalition))
        return values[coalition]

    totals = np.zeros(m)
    count = 0
    for perm in itertools.permutations(range(m)):
        members: set[int] = set()
        for j in perm:
            before = v(frozenset(members))
            members.add(j)
            totals[j] += v(frozenset(members)) - before
        count += 1
    return totals / count


def linear_shapley(weights: np.ndarray, background_rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Closed form for a linear score: phi_i = w_i * (x_i - mean of column i)."""
    return np.asarray(weights) * (np.asarray(x) - np.asarray(background_rows).mean(axis=0))
