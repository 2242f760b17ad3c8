"""Exact shattering coefficients, VC dimensions and Sauer sums."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapExceededError, ValidationError
from .instance import (
    EXPANSION_CAP,
    FiniteDomain,
    Group,
    GroupFamily,
    HypothesisClass,
    restrict_class,
)

MAX_SUBSETS = 10**6


@dataclass(frozen=True)
class BinaryClassView:
    """A finite class materialized as distinct label vectors over ``points``.

    Labels may be 0/1 indicators or -1/+1 signs; only distinctness matters.
    """

    points: tuple[str, ...]
    patterns: frozenset

    def __post_init__(self):
        pts = tuple(self.points)
        pats = frozenset(tuple(int(v) for v in p) for p in self.patterns)
        if any(len(p) != len(pts) for p in pats):
            raise ValidationError("pattern length does not match point count")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "patterns", pats)

    def __len__(self):
        return len(self.patterns)

    @classmethod
    def from_groups(cls, G: GroupFamily, domain: FiniteDomain) -> BinaryClassView:
        return cls(domain.points, frozenset(
            tuple(1 if x in g.members else 0 for x in domain) for g in G))

    @classmethod
    def from_hypotheses(cls, H: HypothesisClass, domain: FiniteDomain,
                        cap: int = EXPANSION_CAP) -> BinaryClassView:
        return cls(domain.points, frozenset(H.expand(domain, cap)))

    @classmethod
    def from_restriction(cls, H: HypothesisClass, g: Group, domain: FiniteDomain) -> BinaryClassView:
        return cls(domain.ordered(g.members), frozenset(restrict_class(H, g, domain)))

    @classmethod
    def from_concepts(cls, concepts: Iterable[Mapping[str, int]], domain: FiniteDomain) -> BinaryClassView:
        return cls(domain.points, frozenset(tuple(c[x] for x in domain) for c in concepts))

    def bits(self) -> np.ndarray:
        """Patterns as a 0/1 matrix, rows sorted."""
        if not self.patterns:
            return np.zeros((0, len(self.points)), dtype=np.int64)
        return (np.array(sorted(self.patterns), dtype=np.int64) > 0).astype(np.int64)


def _distinct_on(bits: np.ndarray, subset: tuple[int, ...]) -> int:
    weights = 1 << np.arange(len(subset), dtype=np.int64)
    return len(np.unique(bits[:, list(subset)] @ weights))


def shattering_coefficient(view: BinaryClassView, k: int, max_subsets: int = MAX_SUBSETS) -> int:
    """Largest number of distinct k-tuples the class realizes on k points.

    Points may repeat, so for k at or above the number of points the answer
    is simply the number of distinct patterns.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    n = len(view.points)
    npat = len(view.patterns)
    if npat == 0:
        return 0
    if k >= n:
        return npat
    if math.comb(n, k) > max_subsets:
        raise CapExceededError(f"C({n}, {k}) subsets exceeds cap {max_subsets}")
    bits = view.bits()
    ceiling = min(npat, 2**k)
    best = 0
    for subset in itertools.combinations(range(n), k):
        best = max(best, _distinct_on(bits, subset))
        if best == ceiling:
            break
    return best


def vc_dimension(view: BinaryClassView, max_subsets: int = MAX_SUBSETS) -> int:
    """Largest k such that some k points are shattered (0 if none).

    Only sizes with 2**k <= |patterns| are tried, and each size is subject to
    the k-subset cap.
    """
    n = len(view.points)
    d = 0
    for k in range(1, n + 1):
        if 2**k > len(view.patterns):
            break
        if shattering_coefficient(view, k, max_subsets) < 2**k:
            break
        d = k
    return d


def sauer_bound(k: int, d: int) -> int:
    """Sum of C(k, i) for i = 0..min(d, k)."""
    if k < 0 or d < 0:
        raise ValidationError("k and d must be non-negative")
    return sum(math.comb(k, i) for i in range(min(d, k) + 1))
