"""Reproducible i.i.d. sampling from the orthogonalization measures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

PRNG_ALGORITHM = "philox4x64"


@dataclass(frozen=True)
class RandomStream:
    """Splittable counter-based random stream: (master seed, stream index)."""

    seed: int
    stream: int = 0
    algorithm: str = PRNG_ALGORITHM

    def generator(self) -> np.random.Generator:
        if self.algorithm != PRNG_ALGORITHM:
            raise ValueError(f"unknown PRNG algorithm {self.algorithm!r}")
        key = np.array([self.seed % 2**64, self.stream % 2**64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, index, self.algorithm)


@dataclass(frozen=True)
class SamplingMeasure:
    """Tagged probability measure on the sampling domain.

    Tags: ``uniform_interval``, ``uniform_box``, ``chebyshev_1d``,
    ``chebyshev_tensor``, ``sphere_uniform``, ``sphere_flat``,
    ``sphere_tan13``.  Sphere points are (phi, theta) pairs in
    [0, 2*pi) x [0, pi).
    """

    tag: str
    dimension: int = 1

    def __post_init__(self):
        if self.tag not in {
            "uniform_interval",
            "uniform_box",
            "chebyshev_1d",
            "chebyshev_tensor",
            "sphere_uniform",
            "sphere_flat",
            "sphere_tan13",
        }:
            raise ValueError(f"unknown measure tag {self.tag!r}")
        if self.tag in {"uniform_interval", "chebyshev_1d"} and self.dimension != 1:
            raise ValueError(f"{self.tag} is one-dimensional")
        if self.tag.startswith("sphere") and self.dimension != 2:
            object.__setattr__(self, "dimension", 2)


# normalizer of |tan(theta)|^(1/3) d(theta) d(phi) over the sphere chart
@lru_cache(maxsize=1)
def tan13_normalizer() -> float:
    val, _ = integrate.quad(
        lambda th: abs(math.tan(th)) ** (1.0 / 3.0),
        0.0,
        math.pi,
        points=[math.pi / 2],
        limit=200,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    return 2.0 * math.pi * val


@lru_cache(maxsize=1)
def _tan13_inverse_cdf() -> PchipInterpolator:
    """Monotone-cubic inverse CDF of theta under |tan|^(1/3), graded at pi/2."""
    half = math.pi / 2.0
    # nodes clustered geometrically toward the integrable singularity
    gap = np.geomspace(1e-12, half, 4000)
    left = half - gap[::-1]
    theta = np.concatenate([[0.0], left, [half], (math.pi - left)[::-1], [math.pi]])
    theta = np.unique(theta)
    dens = np.abs(np.tan(theta)) ** (1.0 / 3.0)
    # |tan| blows up at pi/2; integrate each cell analytically-gradedly via
    # high-order Gauss on the cell (density is smooth inside each cell)
    nodes, wts = np.polynomial.legendre.leggauss(16)
    a, b = theta[:-1], theta[1:]
    mid, radius = (a + b) / 2.0, (b - a) / 2.0
    tt = mid[:, None] + radius[:, None] * nodes[None, :]
    cell = (np.abs(np.tan(tt)) ** (1.0 / 3.0) @ wts) * radius
    cdf = np.concatenate([[0.0], np.cumsum(cell)])
    cdf /= cdf[-1]
    cdf, keep = np.unique(cdf, return_index=True)
    return PchipInterpolator(cdf, theta[keep])


def draw_points(measure: SamplingMeasure, m: int, stream: RandomStream) -> np.ndarray:
    """Draw m i.i.d. points; shape (m,) for 1-D measures, (m, d) otherwise."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = stream.generator()
    tag, d = measure.tag, measure.dimension
    if tag == "uniform_interval":
        return rng.uniform(-1.0, 1.0, size=m)
    if tag == "uniform_box":
        return rng.uniform(-1.0, 1.0, size=(m, d))
    if tag == "chebyshev_1d":
        return np.cos(math.pi * rng.uniform(0.0, 1.0, size=m))
    if tag == "chebyshev_tensor":
        return np.cos(math.pi * rng.uniform(0.0, 1.0, size=(m, d)))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=m)
    if tag == "sphere_uniform":
        theta = np.arccos(1.0 - 2.0 * rng.uniform(0.0, 1.0, size=m))
    elif tag == "sphere_flat":
        theta = rng.uniform(0.0, math.pi, size=m)
    else:  # sphere_tan13
        theta = _tan13_inverse_cdf()(rng.uniform(0.0, 1.0, size=m))
    return np.column_stack([phi, theta])


def measure_pdf(measure: SamplingMeasure, t) -> float:
    """Density w.r.t. the coordinate Lebesgue measure; +inf at singular points."""
    tag, d = measure.tag, measure.dimension
    if tag == "uniform_interval":
        return 0.5
    if tag == "uniform_box":
        return 0.5**d
    if tag == "chebyshev_1d":
        t = float(np.asarray(t).reshape(()))
        if abs(t) >= 1.0:
            return math.inf
        return 1.0 / (math.pi * math.sqrt(1.0 - t * t))
    if tag == "chebyshev_tensor":
        t = np.asarray(t, dtype=float).reshape(-1)
        if np.any(np.abs(t) >= 1.0):
            return math.inf
        return float(np.prod(1.0 / (math.pi * np.sqrt(1.0 - t * t))))
    _, theta = np.asarray(t, dtype=float).reshape(-1)
    if tag == "sphere_uniform":
        return math.sin(theta) / (4.0 * math.pi)
    if tag == "sphere_flat":
        return 1.0 / (2.0 * math.pi * math.pi)
    if abs(theta - math.pi / 2.0) < 1e-300:
        return math.inf
    return abs(math.tan(theta)) ** (1.0 / 3.0) / tan13_normalizer()


def points_to_csv(points: np.ndarray) -> str:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 1 and pts.shape[1] > 1 and points.ndim == 1:
        pts = pts.T
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in pts) + "\n"


def sidecar(measure: SamplingMeasure, stream: RandomStream) -> dict:
    return {
        "measure": measure.tag,
        "dimension": measure.dimension,
        "algorithm": stream.algorithm,
        "seed": stream.seed,
        "stream": stream.stream,
    }
