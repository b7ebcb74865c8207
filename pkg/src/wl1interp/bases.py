"""Orthonormal systems: pointwise evaluation, sup-norm bounds, sampling matrices.

All families are realized in real form and orthonormal with respect to a
probability measure on their domain:

- ``real_trigonometric`` on [-1, 1] with dt/2; position 1 is the constant,
  positions 2k / 2k+1 are sqrt(2)*cos(k*pi*t) / sqrt(2)*sin(k*pi*t).
- ``chebyshev`` on [-1, 1] with the Chebyshev measure; degree 0 is the
  constant, degree k >= 1 is sqrt(2)*cos(k*arccos(t)).
- ``legendre`` on [-1, 1] with dt/2 (so L_k(1) = sqrt(2k+1)).
- ``legendre_preconditioned``: Q_k = (pi/2)^(1/2) (1-t^2)^(1/4) L_k,
  orthonormal under the Chebyshev measure.
- tensor products of the above (multi-index of per-axis indices).
- ``spherical_harmonics_real`` in coordinates (phi, theta), orthonormal
  under the uniform probability measure sin(theta)/(4 pi).
- ``spherical_preconditioned``: |sin^2(theta) cos(theta)|^(1/6) envelope,
  orthonormal under |tan(theta)|^(1/3) d(theta) d(phi) (normalized).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import sampling
from .indexsets import IndexSet

_1D_FAMILIES = {"real_trigonometric", "chebyshev", "legendre", "legendre_preconditioned"}
_SPHERE_FAMILIES = {"spherical_harmonics_real", "spherical_preconditioned"}

# calibrated constant for the preconditioned spherical sup-norm rule
# C * max(1, l)^(1/6); checked against grid maxima up to l = 50 in tests
SPHERICAL_SUP_C = 2.4


class DomainError(ValueError):
    """Evaluation point outside the family's domain."""


@dataclass(frozen=True)
class OrthonormalSystem:
    """Descriptor of an orthonormal basis family.

    1-D polynomial families are indexed by degree; the real trigonometric
    family by 1-based position; tensor families by per-axis multi-indices;
    spherical families by (l, k) pairs with |k| <= l.
    """

    family: str
    dimension: int = 1
    spherical_sup_c: float = SPHERICAL_SUP_C

    def __post_init__(self):
        if self.family not in _1D_FAMILIES | _SPHERE_FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}")
        if self.family in _SPHERE_FAMILIES:
            object.__setattr__(self, "dimension", 2)
        elif self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def measure(self) -> sampling.SamplingMeasure:
        if self.family == "real_trigonometric" or self.family == "legendre":
            tag = "uniform_interval" if self.dimension == 1 else "uniform_box"
        elif self.family in {"chebyshev", "legendre_preconditioned"}:
            tag = "chebyshev_1d" if self.dimension == 1 else "chebyshev_tensor"
        elif self.family == "spherical_harmonics_real":
            tag = "sphere_uniform"
        else:
            tag = "sphere_tan13"
        return sampling.SamplingMeasure(tag, self.dimension)

    def is_odd_function(self, index) -> bool:
        """Whether the basis function is odd under t -> -t (parity diagnostic)."""
        if self.family in _SPHERE_FAMILIES:
            raise ValueError("parity diagnostic applies to interval families only")
        idx = _as_index_tuple(index, self.dimension)
        if self.family == "real_trigonometric":
            # sin entries sit at odd positions >= 3
            return any(j >= 3 and j % 2 == 1 for j in idx)
        return any(k % 2 == 1 for k in idx)


def _as_index_tuple(index, d) -> tuple[int, ...]:
    if isinstance(index, (int, np.integer)):
        idx = (int(index),)
    else:
        idx = tuple(int(v) for v in index)
    if len(idx) != d:
        raise ValueError(f"index {idx} has wrong arity for dimension {d}")
    return idx


def _eval_1d(family: str, k: int, t: np.ndarray) -> np.ndarray:
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise DomainError("points must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    if family == "real_trigonometric":
        if k < 1:
            raise ValueError("trigonometric positions are 1-based")
        if k == 1:
            return np.ones_like(t)
        freq = k // 2
        if k % 2 == 0:
            return math.sqrt(2.0) * np.cos(freq * math.pi * t)
        return math.sqrt(2.0) * np.sin(freq * math.pi * t)
    if family == "chebyshev":
        if k < 0:
            raise ValueError("degrees start at 0")
        if k == 0:
            return np.ones_like(t)
        return math.sqrt(2.0) * np.cos(k * np.arccos(t))
    if family in {"legendre", "legendre_preconditioned"}:
        if k < 0:
            raise ValueError("degrees start at 0")
        # recurrence for orthonormal Legendre under dt/2
        if k == 0:
            val = np.ones_like(t)
        else:
            p_prev, p_cur = np.ones_like(t), t.copy()
            for n in range(1, k):
                p_next = ((2 * n + 1) * t * p_cur - n * p_prev) / (n + 1)
                p_prev, p_cur = p_cur, p_next
            val = math.sqrt(2 * k + 1) * p_cur
        if family == "legendre_preconditioned":
            val = math.sqrt(math.pi / 2.0) * (1.0 - t * t) ** 0.25 * val
        return val
    raise AssertionError(family)


def _norm_assoc_legendre(l_max: int, m: int, ct: np.ndarray, st: np.ndarray) -> list:
    """Fully normalized associated Legendre p_l^m(cos) for l = m..l_max.

    Normalized so that the real spherical harmonics built from them are
    orthonormal w.r.t. the solid-angle measure sin(theta) d(theta) d(phi).
    Condon-Shortley sign omitted (irrelevant for orthonormality).
    """
    p_mm = np.full_like(ct, 1.0 / math.sqrt(4.0 * math.pi))
    for mm in range(1, m + 1):
        p_mm = math.sqrt((2 * mm + 1) / (2.0 * mm)) * st * p_mm
    out = [p_mm]
    if l_max == m:
        return out
    p_prev, p_cur = p_mm, math.sqrt(2 * m + 3) * ct * p_mm
    out.append(p_cur)
    for l in range(m + 2, l_max + 1):
        a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        p_next = a * (ct * p_cur - b * p_prev)
        p_prev, p_cur = p_cur, p_next
        out.append(p_cur)
    return out


def _eval_sphere(system: OrthonormalSystem, ell: int, k: int, pts: np.ndarray) -> np.ndarray:
    if abs(k) > ell:
        raise ValueError(f"need |k| <= l, got (l, k) = ({ell}, {k})")
    phi, theta = pts[:, 0], pts[:, 1]
    if np.any((theta < -1e-12) | (theta > math.pi + 1e-12)):
        raise DomainError("theta must lie in [0, pi]")
    ct, st = np.cos(theta), np.sin(theta)
    m = abs(k)
    p = _norm_assoc_legendre(ell, m, ct, st)[ell - m]
    if k == 0:
        y = p
    elif k > 0:
        y = math.sqrt(2.0) * p * np.cos(k * phi)
    else:
        y = math.sqrt(2.0) * p * np.sin(m * phi)
    if system.family == "spherical_harmonics_real":
        # orthonormal under the uniform *probability* measure
        return math.sqrt(4.0 * math.pi) * y
    env = (st * st * np.abs(ct)) ** (1.0 / 6.0)
    return math.sqrt(sampling.tan13_normalizer()) * env * y


def evaluate(system: OrthonormalSystem, index, t) -> np.ndarray | float:
    """Evaluate one basis function at one point or an array of points."""
    t = np.asarray(t, dtype=float)
    scalar = False
    if system.family in _SPHERE_FAMILIES:
        idx = _as_index_tuple(index, 2)
        if t.ndim == 1:
            t, scalar = t[None, :], True
        out = _eval_sphere(system, idx[0], idx[1], t)
    else:
        idx = _as_index_tuple(index, system.dimension)
        if system.dimension == 1:
            if t.ndim == 0:
                t, scalar = t[None], True
            out = _eval_1d(system.family, idx[0], t)
        else:
            if t.ndim == 1:
                t, scalar = t[None, :], True
            out = np.ones(t.shape[0])
            for axis, k in enumerate(idx):
                out = out * _eval_1d(system.family, k, t[:, axis])
    return float(out[0]) if scalar else out


def sup_norm_bound(system: OrthonormalSystem, index) -> float:
    """Analytic upper bound on the sup norm of one basis function."""
    if system.family in _SPHERE_FAMILIES:
        ell, _ = _as_index_tuple(index, 2)
        if system.family == "spherical_harmonics_real":
            return math.sqrt(2 * ell + 1)
        return system.spherical_sup_c * max(1, ell) ** (1.0 / 6.0)
    idx = _as_index_tuple(index, system.dimension)
    if system.family == "real_trigonometric":
        return math.prod(1.0 if j == 1 else math.sqrt(2.0) for j in idx)
    if system.family == "chebyshev":
        return 2.0 ** (sum(1 for k in idx if k != 0) / 2.0)
    if system.family == "legendre":
        return math.sqrt(math.prod(2 * k + 1 for k in idx))
    # preconditioned Legendre: sqrt(2 + 1/k) <= sqrt(3) per axis
    return math.sqrt(3.0) ** system.dimension


@dataclass(frozen=True)
class SamplingMatrix:
    """Dense m x N matrix of basis evaluations at sample points."""

    values: np.ndarray
    system: OrthonormalSystem
    indices: tuple
    points: np.ndarray
    normalized: bool

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def save(self, path_base) -> None:
        """Binary column-major float64 dump plus a JSON sidecar."""
        base = Path(path_base)
        np.asfortranarray(self.values, dtype="<f8").T.tofile(base.with_suffix(".bin"))
        doc = {
            "m": int(self.m),
            "N": int(self.n_columns),
            "family": self.system.family,
            "dimension": self.system.dimension,
            "normalized": self.normalized,
            "points": np.atleast_2d(self.points.T).T.tolist()
            if self.points.ndim > 1
            else self.points.tolist(),
            "indices": [[int(v) for v in np.atleast_1d(i)] for i in self.indices],
        }
        base.with_suffix(".json").write_text(json.dumps(doc))

    @staticmethod
    def load(path_base) -> "SamplingMatrix":
        base = Path(path_base)
        doc = json.loads(base.with_suffix(".json").read_text())
        raw = np.fromfile(base.with_suffix(".bin"), dtype="<f8")
        values = raw.reshape((doc["N"], doc["m"])).T
        system = OrthonormalSystem(doc["family"], doc["dimension"])
        points = np.asarray(doc["points"], dtype=float)
        indices = tuple(tuple(i) for i in doc["indices"])
        return SamplingMatrix(values, system, indices, points, doc["normalized"])


def sampling_matrix(
    system: OrthonormalSystem,
    index_set,
    points,
    normalized: bool = False,
) -> SamplingMatrix:
    """Assemble the matrix A[l, j] = psi_j(t_l), optionally divided by sqrt(m)."""
    indices = tuple(index_set)
    if not indices:
        raise ValueError("index set must be nonempty")
    pts = np.asarray(points, dtype=float)
    m = pts.shape[0]
    cols = []
    for j, index in enumerate(indices):
        try:
            cols.append(np.asarray(evaluate(system, index, pts), dtype=float))
        except DomainError as exc:
            raise DomainError(f"column {j} (index {index}): {exc}") from exc
    values = np.column_stack(cols)
    if normalized:
        values = values / math.sqrt(m)
    return SamplingMatrix(values, system, indices, pts, normalized)


def _gauss_rule(system: OrthonormalSystem, n: int):
    """Per-axis nodes/weights of the n-point Gauss rule for the system measure."""
    if system.family == "chebyshev":
        i = np.arange(1, n + 1)
        nodes = np.cos((2 * i - 1) * math.pi / (2 * n))
        weights = np.full(n, 1.0 / n)
    elif system.family == "legendre_preconditioned":
        # Gauss-Legendre nodes with the preconditioner envelope divided out:
        # exact for products Q_j Q_k against the Chebyshev measure, since
        # Q_j Q_k / v(t)^2 is a polynomial
        nodes, weights = np.polynomial.legendre.leggauss(n)
        envelope = (math.pi / 2.0) * np.sqrt(1.0 - nodes * nodes)
        weights = weights / (2.0 * envelope)
    else:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        weights = weights / 2.0
    return nodes, weights


def gram_check(system: OrthonormalSystem, index_set, quadrature) -> float:
    """Max |G - I| entry of the Gram matrix under the given quadrature.

    ``quadrature`` is ``("gauss", n)`` (interval families only) or
    ``("montecarlo", n, seed)``.
    """
    indices = tuple(index_set)
    kind = quadrature[0]
    if kind == "gauss":
        if system.family in _SPHERE_FAMILIES:
            raise ValueError("gauss quadrature is not available on the sphere")
        n = quadrature[1]
        nodes1, weights1 = _gauss_rule(system, n)
        if system.dimension == 1:
            pts, wts = nodes1, weights1
        else:
            grids = np.meshgrid(*([nodes1] * system.dimension), indexing="ij")
            pts = np.column_stack([g.ravel() for g in grids])
            wgrids = np.meshgrid(*([weights1] * system.dimension), indexing="ij")
            wts = np.prod(np.stack([w.ravel() for w in wgrids]), axis=0)
    elif kind == "montecarlo":
        # accumulate the Gram matrix in chunks to bound memory
        n, seed = quadrature[1], quadrature[2]
        stream = sampling.RandomStream(seed)
        pts = sampling.draw_points(system.measure, n, stream)
        gram = np.zeros((len(indices), len(indices)))
        chunk = 100_000
        for lo in range(0, n, chunk):
            block = pts[lo : lo + chunk]
            values = np.column_stack(
                [np.asarray(evaluate(system, index, block), dtype=float)
                 for index in indices]
            )
            gram += values.T @ values
        gram /= n
        return float(np.max(np.abs(gram - np.eye(len(indices)))))
    else:
        raise ValueError(f"unknown quadrature kind {kind!r}")
    values = np.column_stack(
        [np.asarray(evaluate(system, index, pts), dtype=float) for index in indices]
    )
    gram = values.T @ (values * wts[:, None])
    return float(np.max(np.abs(gram - np.eye(len(indices)))))
