"""Causal effects of classical stochastic channels."""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog

from ..channels import StochasticChannel


def _q(q) -> np.ndarray:
    return q.q if isinstance(q, StochasticChannel) else np.asarray(q, dtype=float)


def classical_ace(q) -> float:
    """Largest total-variation distance between two output columns."""
    q = _q(q)
    n = q.shape[1]
    if n < 2:
        raise ValueError("need at least two input values")
    diffs = np.abs(q[:, :, None] - q[:, None, :]).sum(axis=0) / 2
    return float(diffs.max())


class ClassicalMin(NamedTuple):
    value: float
    pair: tuple[np.ndarray, np.ndarray]


def classical_ce_min(q) -> ClassicalMin:
    """Minimum causal effect over disjoint-support distribution pairs, by LP.

    For every split of the inputs into two non-empty sets ``S``/``S^c`` we
    minimize ``||q (P - P')||_1 / 2`` over distributions supported on
    ``S`` and ``S^c``; the global value is the smallest LP optimum.
    """
    q = _q(q)
    n_out, n = q.shape
    best = ClassicalMin(np.inf, (None, None))
    idx = np.arange(n)
    for k in range(1, n // 2 + 1):
        for s in combinations(idx, k):
            if 2 * k == n and 0 not in s:
                continue
            mask = np.isin(idx, s)
            res = _split_lp(q, mask)
            if res.value < best.value:
                best = res
    return best


def _split_lp(q: np.ndarray, mask: np.ndarray) -> ClassicalMin:
    # variables: x (n input weights, +x on S, -x on S^c), t (n_out slacks)
    n_out, n = q.shape
    sgn = np.where(mask, 1.0, -1.0)
    qs = q * sgn
    c = np.concatenate([np.zeros(n), np.full(n_out, 0.5)])
    a_ub = np.block([[qs, -np.eye(n_out)], [-qs, -np.eye(n_out)]])
    b_ub = np.zeros(2 * n_out)
    a_eq = np.zeros((2, n + n_out))
    a_eq[0, :n] = mask
    a_eq[1, :n] = ~mask
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1, 1],
                  bounds=[(0, None)] * (n + n_out), method="highs")
    if not res.success:
        raise RuntimeError(f"LP failed: {res.message}")
    x = res.x[:n]
    p, p2 = np.where(mask, x, 0.0), np.where(mask, 0.0, x)
    val = float(np.abs(q @ (p - p2)).sum() / 2)
    return ClassicalMin(val, (p, p2))


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def capacity_lower_bound(ce_max_value: float) -> float:
    """Single-letter capacity lower bound ``1 - h2((1 - CE_max)/2)``."""
    if not -1e-12 <= ce_max_value <= 1 + 1e-12:
        raise ValueError(f"causal effect {ce_max_value} outside [0, 1]")
    v = min(max(ce_max_value, 0.0), 1.0)
    return 1.0 - binary_entropy((1 - v) / 2)
