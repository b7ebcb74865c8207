"""Weighted-sparsity calculus: norms, s-term approximations, Stechkin bounds.

Conventions: coefficient vectors are numpy arrays aligned to the canonical
order of an index set; weight vectors are arrays of the same length with
entries >= 1; supports are 0-based position arrays into that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def fits_budget(used: float, w2: float, s: float) -> bool:
    """Whether adding squared weight w2 keeps the total within budget s,
    with a relative slack absorbing roundoff in the squared weights."""
    return used + w2 <= s * (1.0 + 1e-12) + 1e-12


def weighted_norm(x, omega, p: float) -> float:
    """(sum omega_j^(2-p) |x_j|^p)^(1/p) for 0 < p <= 2."""
    if not 0 < p <= 2:
        raise ValueError("p must lie in (0, 2]")
    x = np.abs(np.asarray(x, dtype=float))
    omega = np.asarray(omega, dtype=float)
    if p == 2:
        return float(np.linalg.norm(x))
    return float(np.sum(omega ** (2.0 - p) * x**p) ** (1.0 / p))


def weighted_l0(x, omega) -> float:
    """Sum of squared weights over exactly-nonzero entries."""
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return float(np.sum(omega[x != 0.0] ** 2))


def weighted_cardinality(support, omega) -> float:
    omega = np.asarray(omega, dtype=float)
    return float(np.sum(omega[np.asarray(support, dtype=int)] ** 2))


@dataclass(frozen=True)
class ApproxResult:
    """Support and error of a weighted s-term approximation."""

    support: tuple[int, ...]
    error: float
    budget: float
    p: float
    flavor: str  # "quasi_best" | "exact_best"

    def to_json(self) -> str:
        return json.dumps(
            {
                "support": list(self.support),
                "error": self.error,
                "budget": self.budget,
                "p": self.p,
                "flavor": self.flavor,
            }
        )


def _tail_error(x, omega, support, p) -> float:
    mask = np.ones(len(x), dtype=bool)
    mask[list(support)] = False
    return weighted_norm(np.asarray(x)[mask], np.asarray(omega)[mask], p)


def quasi_best_approx(x, omega, s: float, p: float) -> ApproxResult:
    """Greedy sort-and-fill approximation under the weighted budget s.

    Positions are sorted by |x_j|^p * omega_j^(-p) descending (ties: lower
    position first) and admitted while the cumulative squared weight stays
    within s; admission stops at the first position that would exceed it.
    """
    if s < 0:
        raise ValueError("budget s must be >= 0")
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    score = np.abs(x) ** p / omega**p
    order = np.lexsort((np.arange(len(x)), -score))
    support = []
    used = 0.0
    for j in order:
        w2 = omega[j] ** 2
        if not fits_budget(used, w2, s):
            break
        support.append(int(j))
        used += w2
    return ApproxResult(
        tuple(sorted(support)), _tail_error(x, omega, support, p), s, p, "quasi_best"
    )


def _budget_supports(omega, s: float):
    """All supports S (as sorted tuples) with omega(S) <= s, by DFS."""
    omega = np.asarray(omega, dtype=float)
    n = len(omega)
    w2 = omega**2
    suffix_min = np.full(n + 1, np.inf)
    for j in range(n - 1, -1, -1):
        suffix_min[j] = min(suffix_min[j + 1], w2[j])
    out = []
    stack = [(0, (), 0.0)]
    while stack:
        start, sup, used = stack.pop()
        out.append(sup)
        for j in range(start, n):
            if fits_budget(used, w2[j], s):
                stack.append((j + 1, sup + (j,), used + w2[j]))
    return out


def best_approx_oracle(x, omega, s: float, p: float) -> ApproxResult:
    """Exact best weighted s-term approximation by exhaustive support scan.

    Capped at 24 coordinates; ties broken by lexicographically smallest
    support.
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if len(x) > 24:
        raise ValueError("exhaustive oracle is capped at 24 coordinates")
    if s < 0:
        raise ValueError("budget s must be >= 0")
    best = None
    for sup in _budget_supports(omega, s):
        err = _tail_error(x, omega, sup, p)
        key = (err, sup)
        if best is None or key < best:
            best = key
    err, sup = best
    return ApproxResult(sup, err, s, p, "exact_best")


def stechkin_bound(x, omega, s: float, p: float, q: float) -> float:
    """(s - max omega^2)^(1/q - 1/p) * ||x||_{omega,p} for p < q <= 2."""
    if not 0 < p < q <= 2:
        raise ValueError("need 0 < p < q <= 2")
    omega = np.asarray(omega, dtype=float)
    winf2 = float(np.max(omega) ** 2)
    if s <= winf2:
        raise ValueError(f"need s > max omega^2 = {winf2}")
    return (s - winf2) ** (1.0 / q - 1.0 / p) * weighted_norm(x, omega, p)


def lp_norm_domination(x, omega, p: float) -> tuple[float, float]:
    """(||x||_{omega^alpha,1}, ||x||_{omega,p}) with alpha = 2/p - 1, p < 1.

    The first norm never exceeds the second; violated only by an
    implementation fault, so it is asserted here.
    """
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    omega = np.asarray(omega, dtype=float)
    alpha = 2.0 / p - 1.0
    lhs = weighted_norm(x, omega**alpha, 1.0)
    rhs = weighted_norm(x, omega, p)
    assert lhs <= rhs * (1.0 + 1e-12) + 1e-300
    return lhs, rhs
