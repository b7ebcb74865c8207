"""Reconstruction methods: weighted l1 programs, baselines, and test oracles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

SUPPORT_THRESHOLD = 1e-8  # relative to ||z||_2, for support reporting only


@dataclass(frozen=True)
class ConstraintSpec:
    """Equality constraint A z = y or l2-ball ||A z - y|| <= eta."""

    kind: str  # "equality" | "ball"
    eta: float = 0.0

    def __post_init__(self):
        if self.kind not in {"equality", "ball"}:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")


@dataclass
class SolverResult:
    coefficients: np.ndarray
    iterations: int
    primal_residual: float
    duality_gap: float
    objective: float
    status: str  # "converged" | "max_iter" | "infeasible"
    certificate: np.ndarray | None = None
    flags: dict = field(default_factory=dict)

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
        z = self.coefficients
        return np.flatnonzero(np.abs(z) > threshold * np.linalg.norm(z))


def _as_weights(omega, n: int) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.ndim == 0:
        omega = np.full(n, float(omega))
    if omega.shape != (n,) or np.any(omega < 1.0 - 1e-12):
        raise ValueError("weights must be a length-N vector with entries >= 1")
    return omega


def _operator_norm(B: np.ndarray, tol: float = 1e-6, max_iter: int = 500) -> float:
    rng = np.random.default_rng(0)
    v = rng.standard_normal(B.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = B.T @ (B @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        val = math.sqrt(norm)
        if abs(val - prev) <= tol * val:
            return val
        prev = val
    return prev


def _polish_vertex(A, y, omega, z, rel_cut=1e-6):
    """Drop sub-tolerance entries of an LP vertex and refit on the support.

    Keeps the polished solution only when it is no worse in feasibility or
    weighted objective; otherwise returns the raw vertex unchanged."""
    zmax = np.max(np.abs(z))
    if zmax == 0.0:
        return z
    keep = np.abs(z) > rel_cut * zmax
    if keep.all():
        return z
    coef, *_ = np.linalg.lstsq(A[:, keep], y, rcond=None)
    cand = np.zeros_like(z)
    cand[keep] = coef
    res_old = np.linalg.norm(A @ z - y)
    res_new = np.linalg.norm(A @ cand - y)
    obj_old = float(np.sum(omega * np.abs(z)))
    obj_new = float(np.sum(omega * np.abs(cand)))
    tol = 1e-9 * (1.0 + np.linalg.norm(y))
    if res_new <= max(res_old, tol) and obj_new <= obj_old + 1e-9 * (1.0 + obj_old):
        return cand
    return z


def solve_wl1(
    A: np.ndarray,
    y: np.ndarray,
    omega,
    constraint: ConstraintSpec = ConstraintSpec("equality"),
    *,
    max_iter: int = 50000,
    tol_feas: float = 1e-9,
    tol_gap: float = 1e-8,
    check_every: int = 50,
) -> SolverResult:
    """min sum omega_j |z_j| subject to A z = y or ||A z - y|| <= eta.

    The equality-constrained problem is solved exactly as a linear program
    (split positive/negative parts, HiGHS); the ball-constrained problem by
    primal-dual splitting (Chambolle-Pock) in rescaled coordinates with a
    duality-gap stopping rule.  The returned certificate is a dual vector u
    with |(A^T u)_j| <= omega_j and (A^T u)_j ~ omega_j sign(z_j) on the
    support.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    if y.shape != (m,):
        raise ValueError("y length must match the row count of A")
    omega = _as_weights(omega, n)
    eta = constraint.eta if constraint.kind == "ball" else 0.0

    # infeasibility: eta below the least-squares residual of the range
    z_ls, *_ = np.linalg.lstsq(A, y, rcond=None)
    ls_res = np.linalg.norm(A @ z_ls - y)
    if ls_res > eta + 1e-7 * (1.0 + np.linalg.norm(y)):
        return SolverResult(
            np.zeros(n), 0, ls_res, math.inf, 0.0, "infeasible",
            flags={"least_squares_residual": float(ls_res)},
        )

    if constraint.kind == "equality":
        res = optimize.linprog(
            np.concatenate([omega, omega]),
            A_eq=np.hstack([A, -A]),
            b_eq=y,
            bounds=(0, None),
            method="highs",
        )
        if res.status == 0:
            z = res.x[:n] - res.x[n:]
            z = _polish_vertex(A, y, omega, z)
            u = np.asarray(res.eqlin.marginals, dtype=float)
            scale = max(1.0, float(np.max(np.abs(A.T @ u) / omega)))
            u /= scale
            obj = float(np.sum(omega * np.abs(z)))
            return SolverResult(
                coefficients=z,
                iterations=int(getattr(res, "nit", 0)),
                primal_residual=float(np.linalg.norm(A @ z - y)),
                duality_gap=obj - float(y @ u),
                objective=obj,
                status="converged",
                certificate=u,
            )
        # fall through to the splitting scheme on LP failure

    B = A / omega[None, :]
    ynorm = np.linalg.norm(y)
    if ynorm == 0.0 and eta >= 0.0:
        return SolverResult(np.zeros(n), 0, 0.0, 0.0, 0.0, "converged",
                            certificate=np.zeros(m))

    L = _operator_norm(B)
    if L == 0.0:
        return SolverResult(np.zeros(n), 0, float(ynorm), math.inf, 0.0, "infeasible")
    tau = sigma = 0.99 / L

    x = np.zeros(n)
    x_bar = x.copy()
    u = np.zeros(m)
    status = "max_iter"
    it = max_iter
    feas = math.inf
    gap = math.inf
    for k in range(1, max_iter + 1):
        # dual: project the shifted point onto the eta-ball around y
        v = u + sigma * (B @ x_bar)
        w = v / sigma
        if eta == 0.0:
            proj = y
        else:
            diff = w - y
            dn = np.linalg.norm(diff)
            proj = y + diff * (min(1.0, eta / dn) if dn > 0 else 0.0)
        u = v - sigma * proj
        # primal: soft-threshold
        x_new = x - tau * (B.T @ u)
        x_new = np.sign(x_new) * np.maximum(np.abs(x_new) - tau, 0.0)
        x_bar = 2.0 * x_new - x
        x = x_new
        if k % check_every == 0 or k == max_iter:
            feas = max(0.0, np.linalg.norm(B @ x - y) - eta)
            obj = float(np.sum(np.abs(x)))
            u_cert = -u
            scale = max(1.0, np.max(np.abs(B.T @ u_cert)))
            u_hat = u_cert / scale
            dual_val = float(y @ u_hat - eta * np.linalg.norm(u_hat))
            gap = obj - dual_val
            if feas <= tol_feas * (1.0 + ynorm) and abs(gap) <= tol_gap * (1.0 + obj):
                status = "converged"
                it = k
                break

    z = x / omega
    u_cert = -u
    scale = max(1.0, np.max(np.abs(B.T @ u_cert)))
    return SolverResult(
        coefficients=z,
        iterations=it,
        primal_residual=float(feas),
        duality_gap=float(gap),
        objective=float(np.sum(omega * np.abs(z))),
        status=status,
        certificate=u_cert / scale,
    )


def lp_oracle_wl1(A: np.ndarray, y: np.ndarray, omega) -> SolverResult:
    """Exact equality-constrained minimizer by basic-feasible-solution scan.

    Splits z = z+ - z-, enumerates bases of [A, -A] in lexicographic column
    order and keeps the cheapest feasible vertex.  Capped at m <= 6, N <= 10.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    if m > 6 or n > 10:
        raise ValueError("oracle capped at m <= 6, N <= 10")
    omega = _as_weights(omega, n)

    B = np.hstack([A, -A])
    c = np.concatenate([omega, omega])
    r = np.linalg.matrix_rank(np.hstack([B, y[:, None]]), tol=1e-11)
    rank_B = np.linalg.matrix_rank(B, tol=1e-11)
    if r > rank_B:
        return SolverResult(np.zeros(n), 0, float(np.linalg.norm(y)), math.inf,
                            0.0, "infeasible")
    if rank_B < m:
        # reduce to a full-row-rank system on the row space
        U, s, _ = np.linalg.svd(B)
        rows = U[:, :rank_B].T
        B, y = rows @ B, rows @ y
        m = rank_B

    best_obj = math.inf
    best_w = None
    found = False
    for cols in itertools.combinations(range(2 * n), m):
        sub = B[:, cols]
        if abs(np.linalg.det(sub)) < 1e-11:
            continue
        w_basic = np.linalg.solve(sub, y)
        if np.min(w_basic) < -1e-9:
            continue
        found = True
        obj = float(c[list(cols)] @ np.maximum(w_basic, 0.0))
        if obj < best_obj - 1e-12:
            best_obj = obj
            best_w = (cols, np.maximum(w_basic, 0.0))
    if not found:
        return SolverResult(np.zeros(n), 0, float(np.linalg.norm(y)), math.inf,
                            0.0, "infeasible")
    cols, w_basic = best_w
    w = np.zeros(2 * n)
    w[list(cols)] = w_basic
    z = w[:n] - w[n:]
    return SolverResult(
        coefficients=z,
        iterations=0,
        primal_residual=float(np.linalg.norm(A @ z - y)),
        duality_gap=0.0,
        objective=best_obj,
        status="converged",
    )


def certify_optimality(
    A: np.ndarray,
    y: np.ndarray,
    omega,
    z: np.ndarray,
    constraint: ConstraintSpec = ConstraintSpec("equality"),
    tol: float = 1e-6,
    dual: np.ndarray | None = None,
) -> dict:
    """KKT report for the weighted l1 program (report-only, never raises).

    Checks |(A^T u)_j| <= omega_j (1 + tol) globally and sign alignment
    (A^T u)_j ~ omega_j sign(z_j) on the thresholded support; the dual is
    taken from the solver when provided, else fit by least squares on the
    support.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    m, n = A.shape
    omega = _as_weights(omega, n)
    eta = constraint.eta if constraint.kind == "ball" else 0.0

    znorm = np.linalg.norm(z)
    support = np.flatnonzero(np.abs(z) > SUPPORT_THRESHOLD * znorm) if znorm else np.array([], int)
    if dual is None:
        if len(support):
            target = omega[support] * np.sign(z[support])
            dual, *_ = np.linalg.lstsq(A[:, support].T, target, rcond=None)
        else:
            dual = np.zeros(m)
    g = A.T @ dual
    max_dual_violation = float(np.max(np.abs(g) / omega) - 1.0)
    if len(support):
        sign_violation = float(
            np.max(np.abs(g[support] - omega[support] * np.sign(z[support])))
        )
    else:
        sign_violation = 0.0
    # duality gap with the scaled-feasible dual
    scale = max(1.0, float(np.max(np.abs(g) / omega)))
    u_hat = dual / scale
    primal = float(np.sum(omega * np.abs(z)))
    dual_val = float(y @ u_hat - eta * np.linalg.norm(u_hat))
    gap = primal - dual_val
    feas = max(0.0, float(np.linalg.norm(A @ z - y)) - eta)
    ok = (
        max_dual_violation <= tol
        and sign_violation <= tol * float(np.max(omega))
        and abs(gap) <= tol * (1.0 + primal)
        and feas <= tol * (1.0 + np.linalg.norm(y))
    )
    return {
        "ok": bool(ok),
        "max_dual_violation": max_dual_violation,
        "support_sign_violation": sign_violation,
        "gap": float(gap),
        "feasibility_residual": feas,
    }


def solve_wl2(A: np.ndarray, y: np.ndarray, alpha) -> SolverResult:
    """min sum alpha_j^2 z_j^2 subject to A z = y (closed form)."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim == 0:
        alpha = np.full(n, float(alpha))
    Dinv_At = A.T / alpha[:, None] ** 2
    G = A @ Dinv_At
    flags = {}
    try:
        c, low = linalg.cho_factor(G)
        lam = linalg.cho_solve((c, low), y)
    except linalg.LinAlgError:
        lam, *_ = np.linalg.lstsq(G, y, rcond=None)
        flags["rank_deficient"] = True
    z = Dinv_At @ lam
    res = float(np.linalg.norm(A @ z - y))
    return SolverResult(z, 0, res, 0.0, float(np.sum(alpha**2 * z**2)),
                        "converged", flags=flags)


def solve_least_squares(A: np.ndarray, y: np.ndarray, d: int) -> SolverResult:
    """Least-squares fit on the first d columns, zero-padded to N."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    if d > m:
        raise ValueError(f"need d <= m, got d={d}, m={m}")
    coef, *_ = np.linalg.lstsq(A[:, :d], y, rcond=None)
    z = np.zeros(n)
    z[:d] = coef
    res = float(np.linalg.norm(A[:, :d] @ coef - y))
    return SolverResult(z, 0, res, 0.0, res, "converged")


def solve_exact(A: np.ndarray, y: np.ndarray) -> SolverResult:
    """Square solve on the first m columns; ill-conditioned systems fall
    back to least squares with a flag."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    m, n = A.shape
    if n < m:
        raise ValueError("need at least m columns")
    sq = A[:, :m]
    flags = {}
    cond = np.linalg.cond(sq)
    if not np.isfinite(cond) or cond > 1e12:
        coef, *_ = np.linalg.lstsq(sq, y, rcond=None)
        flags["ill_conditioned"] = True
    else:
        lu, piv = linalg.lu_factor(sq)
        coef = linalg.lu_solve((lu, piv), y)
    z = np.zeros(n)
    z[:m] = coef
    res = float(np.linalg.norm(sq @ coef - y))
    return SolverResult(z, 0, res, 0.0, res, "converged", flags=flags)
