"""Certification of weighted restricted-isometry and null-space properties.

All checks here are empirical measurements on concrete matrices: supports of
weighted cardinality <= s are enumerated (or sampled), Gram blocks are
eigen-decomposed, and the recovery inequalities are evaluated directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .sampling import RandomStream
from .wsparse import fits_budget

DEFAULT_SUPPORT_CAP = 10**6


class SupportCapError(RuntimeError):
    """Raised when the exhaustive support scan would exceed its cap; use
    sampled mode instead."""


@dataclass(frozen=True)
class RipReport:
    s: float
    delta: float
    argmax_support: tuple[int, ...]
    supports_scanned: int
    method: str  # "exhaustive" | "sampled"

    def to_json(self) -> str:
        doc = {
            "s": self.s,
            "delta": self.delta,
            "argmax_support": list(self.argmax_support),
            "supports_scanned": self.supports_scanned,
            "method": self.method,
        }
        if self.method == "sampled":
            doc["note"] = "sampled scan: delta is a lower bound"
        return json.dumps(doc)


@dataclass
class NspReport:
    rho: float
    tau: float
    trials: int
    violations: list = field(default_factory=list)
    support_mode: str = "exhaustive"

    def to_json(self) -> str:
        doc = {
            "rho": self.rho,
            "tau": self.tau,
            "trials": self.trials,
            "support_mode": self.support_mode,
            "violations": self.violations,
        }
        if self.support_mode == "quasi_best":
            doc["note"] = "greedy support surrogate: a lower-bound check"
        return json.dumps(doc)


def _weights_vec(omega, n):
    omega = np.asarray(omega, dtype=float)
    if omega.ndim == 0:
        omega = np.full(n, float(omega))
    return omega


def budget_supports(omega, s: float, cap: int = DEFAULT_SUPPORT_CAP):
    """All supports with omega(S) <= s, DFS in canonical order, capped."""
    omega = np.asarray(omega, dtype=float)
    w2 = omega**2
    n = len(omega)
    out = []
    stack = [(0, (), 0.0)]
    while stack:
        start, sup, used = stack.pop()
        out.append(sup)
        if len(out) > cap:
            raise SupportCapError(
                f"more than {cap} budget-feasible supports; use sampled mode"
            )
        for j in range(n - 1, start - 1, -1):
            if fits_budget(used, w2[j], s):
                stack.append((j + 1, sup + (j,), used + w2[j]))
    return out


def _spectral_deviation(A, support):
    if not support:
        return 0.0
    G = A[:, support].T @ A[:, support]
    ev = linalg.eigvalsh(G)
    return float(max(ev[-1] - 1.0, 1.0 - ev[0]))


def wrip_constant(
    A: np.ndarray,
    omega,
    s: float,
    mode: str = "exhaustive",
    *,
    cap: int = DEFAULT_SUPPORT_CAP,
    n_supports: int = 1000,
    stream: RandomStream | None = None,
) -> RipReport:
    """delta_{omega,s} = max over supports with omega(S) <= s of
    ||A_S^T A_S - I||_2.

    Exhaustive mode scans every budget-feasible support (eigenvalues are
    only computed on inclusion-maximal supports, which dominate by Cauchy
    interlacing).  Sampled mode greedily fills random permutations and
    reports a lower bound.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    omega = _weights_vec(omega, n)
    w2 = omega**2
    if mode == "exhaustive":
        supports = budget_supports(omega, s, cap)
        best = (0.0, ())
        for sup in supports:
            used = float(np.sum(w2[list(sup)]))
            rest = np.setdiff1d(np.arange(n), sup, assume_unique=True)
            if len(rest) and fits_budget(used, np.min(w2[rest]), s):
                continue  # non-maximal: dominated by a superset
            dev = _spectral_deviation(A, sup)
            if dev > best[0] + 1e-15 or (abs(dev - best[0]) <= 1e-15 and sup < best[1]):
                best = (dev, sup)
        return RipReport(s, best[0], best[1], len(supports), "exhaustive")
    if mode == "sampled":
        if stream is None:
            stream = RandomStream(0)
        rng = stream.generator()
        best = (0.0, ())
        for _ in range(n_supports):
            perm = rng.permutation(n)
            sup, used = [], 0.0
            for j in perm:
                if fits_budget(used, w2[j], s):
                    sup.append(int(j))
                    used += w2[j]
            sup = tuple(sorted(sup))
            dev = _spectral_deviation(A, sup)
            if dev > best[0]:
                best = (dev, sup)
        return RipReport(s, best[0], best[1], n_supports, "sampled")
    raise ValueError(f"unknown mode {mode!r}")


def rip_to_nsp_constants(delta_3s: float) -> tuple[float, float, bool]:
    """(rho, tau, valid) with rho = 2*delta/(1-delta), tau = sqrt(1+delta)/(1-delta);
    valid means delta < 1/3 so the null-space property of order s follows."""
    if not 0.0 <= delta_3s < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    rho = 2.0 * delta_3s / (1.0 - delta_3s)
    tau = math.sqrt(1.0 + delta_3s) / (1.0 - delta_3s)
    return rho, tau, delta_3s < 1.0 / 3.0


def _support_masks(supports, n):
    M = np.zeros((len(supports), n), dtype=bool)
    for i, sup in enumerate(supports):
        M[i, list(sup)] = True
    return M


def check_nsp_empirical(
    A: np.ndarray,
    omega,
    s: float,
    rho: float,
    tau: float,
    trials: int,
    stream: RandomStream,
    support_mode: str = "exhaustive",
) -> NspReport:
    """Empirical check of ||v_S||_2 <= (rho/sqrt(s)) ||v_{S^c}||_{omega,1}
    + tau ||A v||_2 over random Gaussian v plus kernel vectors of A.

    Exhaustive mode (N <= 20) checks every budget-feasible support;
    quasi_best greedily maximizes ||v_S||_2 under the budget, a lower-bound
    surrogate.  Report-only.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if support_mode == "exhaustive" and n > 20:
        raise ValueError("exhaustive support scan requires N <= 20")
    omega = _weights_vec(omega, n)
    w2 = omega**2
    rng = stream.generator()
    kernel = linalg.null_space(A)

    if support_mode == "exhaustive":
        supports = budget_supports(omega, s)
        M = _support_masks(supports, n)
    elif support_mode != "quasi_best":
        raise ValueError(f"unknown support mode {support_mode!r}")

    report = NspReport(rho, tau, trials, support_mode=support_mode)
    for t in range(trials):
        v = rng.standard_normal(n)
        if kernel.shape[1] and t % 2 == 1:
            v = kernel @ rng.standard_normal(kernel.shape[1])
        Av = float(np.linalg.norm(A @ v))
        wv = omega * np.abs(v)
        total = float(np.sum(wv))
        if support_mode == "exhaustive":
            lhs = np.sqrt(M @ v**2)
            rhs = (rho / math.sqrt(s)) * (total - M @ wv) + tau * Av
            bad = np.flatnonzero(lhs > rhs * (1.0 + 1e-12) + 1e-15)
            for i in bad:
                report.violations.append(
                    {
                        "trial": t,
                        "support": list(supports[i]),
                        "lhs": float(lhs[i]),
                        "rhs": float(rhs[i]),
                    }
                )
        else:
            order = np.lexsort((np.arange(n), -(v**2) / w2))
            sup, used = [], 0.0
            for j in order:
                if not fits_budget(used, w2[j], s):
                    break
                sup.append(int(j))
                used += w2[j]
            lhs = float(np.linalg.norm(v[sup]))
            rhs = (rho / math.sqrt(s)) * (total - float(np.sum(wv[sup]))) + tau * Av
            if lhs > rhs * (1.0 + 1e-12) + 1e-15:
                report.violations.append(
                    {"trial": t, "support": sup, "lhs": lhs, "rhs": rhs}
                )
    return report


def error_bound_check(A: np.ndarray, omega, s: float, x, z, rho: float, tau: float) -> dict:
    """Evaluate both recovery inequalities implied by the null space property.

    l1:  ||z-x||_{omega,1} <= (1+rho)/(1-rho) (||z||_{omega,1} - ||x||_{omega,1}
         + 2 sigma_s(x)_{omega,1}) + 2 tau sqrt(s)/(1-rho) ||A(z-x)||_2
    l2:  requires s >= 2 max(omega)^2, constants
         C1 = 2 sqrt(2) (1+rho)^2/(1-rho), C2 = tau + 2 sqrt(2) tau (1+rho)/(1-rho).
    Report-only; margins = rhs - lhs.
    """
    from .wsparse import best_approx_oracle, weighted_norm

    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    n = A.shape[1]
    omega = _weights_vec(omega, n)
    if not rho < 1.0:
        raise ValueError("need rho < 1")

    sigma = best_approx_oracle(x, omega, s, 1.0).error
    res = float(np.linalg.norm(A @ (z - x)))
    defect = weighted_norm(z, omega, 1.0) - weighted_norm(x, omega, 1.0)

    lhs1 = weighted_norm(z - x, omega, 1.0)
    rhs1 = (1.0 + rho) / (1.0 - rho) * (defect + 2.0 * sigma) + (
        2.0 * tau * math.sqrt(s) / (1.0 - rho)
    ) * res
    report = {
        "l1": {"lhs": lhs1, "rhs": rhs1, "margin": rhs1 - lhs1},
        "sigma_s": float(sigma),
    }
    winf2 = float(np.max(omega) ** 2)
    if s >= 2.0 * winf2:
        C1 = 2.0 * math.sqrt(2.0) * (1.0 + rho) ** 2 / (1.0 - rho)
        C2 = tau + 2.0 * math.sqrt(2.0) * tau * (1.0 + rho) / (1.0 - rho)
        lhs2 = float(np.linalg.norm(x - z))
        rhs2 = C1 / math.sqrt(s) * (defect + 2.0 * sigma) + C2 * res
        report["l2"] = {"lhs": lhs2, "rhs": rhs2, "margin": rhs2 - lhs2}
    else:
        report["l2"] = {
            "applicable": False,
            "reason": f"s = {s} < 2 max(omega)^2 = {2.0 * winf2}",
        }
    return report


def check_disjoint_support_bound(
    A: np.ndarray,
    omega,
    s: float,
    t: float,
    delta_st: float,
    trials: int,
    stream: RandomStream,
) -> list:
    """|<Au, Av>| <= delta_{omega,s+t} ||u|| ||v|| for disjointly supported
    u, v with budgets s and t.  Returns the list of violations (expected
    empty when delta was computed exhaustively at budget s+t)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    omega = _weights_vec(omega, n)
    w2 = omega**2
    rng = stream.generator()
    violations = []
    for k in range(trials):
        perm = rng.permutation(n)
        su, used = [], 0.0
        for j in perm:
            if fits_budget(used, w2[j], s):
                su.append(int(j))
                used += w2[j]
        sv, used = [], 0.0
        for j in perm[::-1]:
            if j in su:
                continue
            if fits_budget(used, w2[j], t):
                sv.append(int(j))
                used += w2[j]
        if not su or not sv:
            continue
        u = np.zeros(n)
        v = np.zeros(n)
        u[su] = rng.standard_normal(len(su))
        v[sv] = rng.standard_normal(len(sv))
        lhs = abs(float((A @ u) @ (A @ v)))
        rhs = delta_st * float(np.linalg.norm(u) * np.linalg.norm(v))
        if lhs > rhs * (1.0 + 1e-12) + 1e-15:
            violations.append({"trial": k, "lhs": lhs, "rhs": rhs})
    return violations
