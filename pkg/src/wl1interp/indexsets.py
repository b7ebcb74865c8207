"""Index universes, weight schemes, weighted cardinality and truncation sets."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ENUMERATION_BUDGET = 10**7

MultiIndex = tuple[int, ...]


class EnumerationBudgetError(RuntimeError):
    """Raised when building an index set would exceed the enumeration cap."""


class TruncationNotFiniteError(RuntimeError):
    """Raised when a truncation set cannot be shown to be finite."""


def _degree_key(k: MultiIndex) -> tuple:
    deg = 1
    for kl in k:
        deg *= kl + 1
    return (deg, k)


@dataclass(frozen=True)
class IndexSet:
    """Ordered finite collection of d-dimensional multi-indices.

    The canonical ordering is nondecreasing in the product degree
    prod(k_l + 1), with lexicographic tie-breaking.  Positions are 1-based.
    """

    dimension: int
    members: tuple[MultiIndex, ...]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        seen = {}
        for i, k in enumerate(self.members):
            if len(k) != self.dimension:
                raise ValueError(f"member {k} has wrong arity for d={self.dimension}")
            if k in seen:
                raise ValueError(f"duplicate member {k}")
            seen[k] = i + 1
        object.__setattr__(self, "_pos", seen)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, k) -> bool:
        return tuple(k) in self._pos

    def position(self, k) -> int:
        """1-based canonical position of a member."""
        return self._pos[tuple(k)]

    def subset(self, members) -> "IndexSet":
        members = [tuple(k) for k in members]
        for k in members:
            if k not in self._pos:
                raise ValueError(f"{k} is not a member of this index set")
        members.sort(key=_degree_key)
        return IndexSet(self.dimension, tuple(members))

    def to_json(self, weights=None) -> str:
        doc = {"d": self.dimension, "members": [list(k) for k in self.members]}
        if weights is not None:
            doc["weights"] = [float(w) for w in weights]
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "IndexSet":
        doc = json.loads(text)
        return IndexSet(doc["d"], tuple(tuple(k) for k in doc["members"]))


def build_index_set(kind: str, **kw) -> IndexSet:
    """Build a canonical index set.

    kind is one of:
      - ``range_1d``: 1-based positions ``{1..N}`` (keyword ``N``)
      - ``tensor_box``: ``{0..N_per_axis}^d`` (keywords ``d``, ``N_per_axis``)
      - ``hyperbolic_cross``: ``{k in N_0^d : prod(k_l+1) <= s}`` (keywords ``d``, ``s``)
    """
    budget = kw.pop("budget", DEFAULT_ENUMERATION_BUDGET)
    if kind == "range_1d":
        N = kw.pop("N")
        if kw:
            raise TypeError(f"unexpected arguments {sorted(kw)}")
        if N < 1:
            raise ValueError("N must be >= 1")
        if N > budget:
            raise EnumerationBudgetError(f"range_1d of size {N} exceeds budget {budget}")
        return IndexSet(1, tuple((j,) for j in range(1, N + 1)))
    if kind == "tensor_box":
        d, N = kw.pop("d"), kw.pop("N_per_axis")
        if kw:
            raise TypeError(f"unexpected arguments {sorted(kw)}")
        if d < 1 or N < 0:
            raise ValueError("need d >= 1 and N_per_axis >= 0")
        if d * math.log2(N + 2) > math.log2(budget) + 1 or (N + 1) ** d > budget:
            raise EnumerationBudgetError(
                f"tensor_box({d}, {N}) has {(N + 1) ** d} members, budget is {budget}"
            )
        members = [()]
        for _ in range(d):
            members = [k + (j,) for k in members for j in range(N + 1)]
        members.sort(key=_degree_key)
        return IndexSet(d, tuple(members))
    if kind == "hyperbolic_cross":
        d, s = kw.pop("d"), kw.pop("s")
        if kw:
            raise TypeError(f"unexpected arguments {sorted(kw)}")
        if d < 1 or s < 1:
            raise ValueError("need d >= 1 and s >= 1")
        members = []

        def extend(prefix, degree):
            if len(members) > budget:
                raise EnumerationBudgetError(f"hyperbolic cross exceeds budget {budget}")
            if len(prefix) == d:
                members.append(prefix)
                return
            k = 0
            while degree * (k + 1) <= s:
                extend(prefix + (k,), degree * (k + 1))
                k += 1

        extend((), 1)
        members.sort(key=_degree_key)
        return IndexSet(d, tuple(members))
    raise ValueError(f"unknown index set kind {kind!r}")


# -- weight schemes ---------------------------------------------------------

_POSITION_KINDS = {"power", "linear", "sqrt"}
_MULTI_KINDS = {"sobolev", "mixed", "hyperbolic", "legendre_dominating"}


@dataclass(frozen=True)
class WeightScheme:
    """Rule omega_j >= 1 attached to indices.

    Position kinds (``power(alpha)``, ``linear``, ``sqrt``) act on 1-based
    1-D positions; multi-index kinds act on members of an IndexSet;
    ``spherical`` acts on (l, k) pairs; ``table`` carries explicit values.
    All evaluations are clamped below at 1.
    """

    kind: str
    param: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        known = (
            {"constant", "spherical", "table"} | _POSITION_KINDS | _MULTI_KINDS
        )
        if self.kind not in known:
            raise ValueError(f"unknown weight scheme kind {self.kind!r}")
        if self.kind in {"constant", "power", "sobolev", "mixed", "spherical"} and self.param is None:
            raise ValueError(f"scheme {self.kind!r} requires a parameter")
        if self.kind == "table" and self.table is None:
            raise ValueError("table scheme requires explicit values")

    def weight_of(self, index) -> float:
        """Evaluate the weight at a position or multi-index, clamped at 1."""
        if self.kind == "constant":
            return max(1.0, float(self.param))
        if self.kind in _POSITION_KINDS:
            j = _as_position(index, self.kind)
            if self.kind == "power":
                return max(1.0, float(j) ** (self.param / 2.0))
            if self.kind == "linear":
                return max(1.0, float(j))
            return max(1.0, math.sqrt(j))
        if self.kind == "table":
            j = _as_position(index, self.kind)
            return max(1.0, float(self.table[j - 1]))
        k = _as_multi(index)
        if self.kind == "sobolev":
            return max(1.0, (1.0 + math.sqrt(sum(kl * kl for kl in k))) ** self.param)
        if self.kind == "mixed":
            return max(1.0, math.prod((1.0 + abs(kl)) ** self.param for kl in k))
        if self.kind == "hyperbolic":
            return max(1.0, math.sqrt(math.prod(kl + 1 for kl in k)))
        if self.kind == "legendre_dominating":
            return max(1.0, math.sqrt(math.prod(2 * kl + 1 for kl in k)))
        if self.kind == "spherical":
            ell = k[0]
            return max(1.0, self.param * float(ell) ** (1.0 / 6.0))
        raise AssertionError(self.kind)

    def is_positional(self) -> bool:
        return self.kind in _POSITION_KINDS or self.kind == "table"

    def weights_for(self, index_set: IndexSet) -> np.ndarray:
        """Weight vector over the canonical order of an index set.

        Positional schemes use the canonical 1-based position; the others
        evaluate the member itself.
        """
        if self.kind == "constant":
            return np.full(len(index_set), max(1.0, float(self.param)))
        if self.is_positional():
            return np.array(
                [self.weight_of(j) for j in range(1, len(index_set) + 1)]
            )
        return np.array([self.weight_of(k) for k in index_set])


def _as_position(index, kind) -> int:
    if isinstance(index, tuple):
        if len(index) != 1:
            raise TypeError(
                f"1-D scheme {kind!r} applied to multi-index {index}"
            )
        index = index[0]
    j = int(index)
    if j < 1:
        raise ValueError(f"positions are 1-based, got {j}")
    return j


def _as_multi(index) -> MultiIndex:
    if isinstance(index, (int, np.integer)):
        return (int(index),)
    return tuple(int(kl) for kl in index)


def weight_of(scheme: WeightScheme, index) -> float:
    return scheme.weight_of(index)


def weighted_cardinality(members, scheme: WeightScheme, index_set: IndexSet | None = None) -> float:
    """omega(S) = sum of squared weights over S.

    For positional schemes, S is interpreted through the positions of its
    members in ``index_set`` (or the members themselves when they already
    are 1-D positions).
    """
    total = 0.0
    for k in members:
        if scheme.is_positional() and index_set is not None:
            w = scheme.weight_of(index_set.position(k))
        else:
            w = scheme.weight_of(k)
        total += w * w
    return total


def truncation_set(
    universe: IndexSet | None,
    scheme: WeightScheme,
    s: float,
    rule: str = "half_budget",
    *,
    p: float | None = None,
    v_scheme: WeightScheme | None = None,
    scan_cap: int = 10**6,
) -> IndexSet:
    """Finite truncation of a universe under a weight scheme.

    ``half_budget`` keeps indices with ``omega_j^2 <= s/2``; ``theorem62``
    keeps ``omega_j * v_j^(1-2/p) >= s^(1/2-1/p)`` with ``v_j`` defaulting
    to ``2*omega_j^2``.  ``universe=None`` means the countable family of 1-D
    positions ``1, 2, 3, ...`` and requires the predicate to eventually fail
    for good (coercive scheme).
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if rule == "half_budget":
        def keep(w, v):
            return w * w <= s / 2.0
    elif rule == "theorem62":
        if p is None or not (0 < p <= 1):
            raise ValueError("theorem62 rule requires 0 < p <= 1")
        thresh = s ** (0.5 - 1.0 / p)

        def keep(w, v):
            return w * v ** (1.0 - 2.0 / p) >= thresh
    else:
        raise ValueError(f"unknown truncation rule {rule!r}")

    def v_of(index):
        if rule != "theorem62":
            return None
        if v_scheme is not None:
            return v_scheme.weight_of(index)
        w = scheme.weight_of(index)
        return 2.0 * w * w

    if universe is not None:
        kept = []
        for i, k in enumerate(universe, start=1):
            idx = i if scheme.is_positional() else k
            if keep(scheme.weight_of(idx), v_of(idx)):
                kept.append(k)
        kept.sort(key=_degree_key)
        return IndexSet(universe.dimension, tuple(kept))

    # countable 1-D positions: scan until the predicate stays false
    kept = []
    miss_run = 0
    j = 0
    while j < scan_cap:
        j += 1
        if keep(scheme.weight_of(j), v_of(j)):
            kept.append((j,))
            miss_run = 0
        else:
            miss_run += 1
            if miss_run >= 1000:
                break
    else:
        raise TruncationNotFiniteError(
            f"truncation not finite within scan cap {scan_cap}; "
            "scheme does not appear coercive"
        )
    return IndexSet(1, tuple(kept))
