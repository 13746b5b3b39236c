"""b-metric spaces: finite distance-matrix spaces and power-distance intervals.

A b-metric space relaxes the triangle inequality to
``d(x, y) <= s * (d(x, z) + d(z, y))`` for a constant ``s >= 1``.  Two
concrete families are supported:

* :class:`FiniteSpace` -- an explicit point set with a distance matrix.
  Validation computes the smallest admissible constant by an exhaustive
  scan over all ordered triples.
* :class:`AnalyticSpace` -- a real interval ``[lo, hi]`` carrying the
  distance ``|x - y| ** p``; the constant ``2 ** (p - 1)`` always works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import (
    AsymmetricMatrix,
    ConstantTooSmall,
    EmptySequence,
    NegativeEntry,
    NonFiniteEntry,
    NonpositiveRadius,
    NonzeroDiagonal,
    PointOutOfDomain,
    TailLongerThanSequence,
    TooManyPoints,
    ZeroOffDiagonal,
)

# Matrix entries are exact data: zero tests on finite spaces use equality.
# Analytic distances are computed, so "zero" there means below this cutoff.
DELTA_ZERO = 1e-12

# Cap for the O(n^3) validation scan; desk-scale instances only.
MAX_FINITE_POINTS = 256

# Tail-window policy for liminf/limsup estimation.
MIN_TAIL = 10


@dataclass(frozen=True)
class FiniteSpace:
    """Finite b-metric space backed by a symmetric distance matrix."""

    dist: tuple[tuple[float, ...], ...]
    s: float

    @property
    def n(self) -> int:
        return len(self.dist)

    @property
    def points(self) -> range:
        return range(self.n)

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < self.n

    def distance(self, x: int, y: int) -> float:
        if not self.contains(x) or not self.contains(y):
            raise PointOutOfDomain(f"point out of domain: {x!r}, {y!r}")
        return self.dist[x][y]

    def is_zero(self, d: float) -> bool:
        return d == 0.0

    def diameter(self) -> float:
        return max((max(row) for row in self.dist), default=0.0)


@dataclass(frozen=True)
class AnalyticSpace:
    """Interval ``[lo, hi]`` with distance ``|x - y| ** p`` and ``s = 2**(p-1)``."""

    lo: float
    hi: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError("interval endpoints must be finite with lo < hi")
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise ValueError("exponent p must be >= 1")

    @property
    def s(self) -> float:
        return 2.0 ** (self.p - 1.0)

    def contains(self, x) -> bool:
        return isinstance(x, (float, int, np.floating)) and self.lo <= x <= self.hi

    def distance(self, x: float, y: float) -> float:
        if not self.contains(x) or not self.contains(y):
            raise PointOutOfDomain(f"point out of domain: {x!r}, {y!r}")
        return abs(x - y) ** self.p

    def is_zero(self, d: float) -> bool:
        return d < DELTA_ZERO

    def diameter(self) -> float:
        return (self.hi - self.lo) ** self.p


Space = FiniteSpace | AnalyticSpace


@dataclass(frozen=True)
class BoundReport:
    """Result of the liminf/limsup sandwich check around a convergent sequence."""

    lower: float
    liminf_est: float
    limsup_est: float
    upper: float
    holds: bool

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "liminf_est": self.liminf_est,
            "limsup_est": self.limsup_est,
            "upper": self.upper,
            "holds": self.holds,
        }


def _min_constant(d: np.ndarray) -> float:
    """Smallest s making d[i,j] <= s*(d[i,k]+d[k,j]) hold for all triples.

    The scan is exact on the float data: after taking the max ratio the
    inequality is re-checked and s is nudged up by ulps if division/
    multiplication rounding left a triple uncovered.
    """
    n = d.shape[0]
    s = 1.0
    for k in range(n):
        denom = d[:, k][:, None] + d[k, :][None, :]
        mask = np.ones((n, n), dtype=bool)
        np.fill_diagonal(mask, False)
        mask[k, :] = False
        mask[:, k] = False
        mask &= denom > 0.0
        if mask.any():
            ratio = np.max(d[mask] / denom[mask])
            if ratio > s:
                s = float(ratio)
    while True:
        ok = True
        for k in range(n):
            denom = d[:, k][:, None] + d[k, :][None, :]
            mask = np.ones((n, n), dtype=bool)
            np.fill_diagonal(mask, False)
            mask[k, :] = False
            mask[:, k] = False
            if np.any(d[mask] > s * denom[mask]):
                ok = False
                break
        if ok:
            return s
        s = math.nextafter(s, math.inf)


def validate_finite_space(matrix: Sequence[Sequence[float]],
                          max_points: int = MAX_FINITE_POINTS) -> FiniteSpace:
    """Validate a distance matrix and return a FiniteSpace with the minimal constant.

    Raises AsymmetricMatrix, NegativeEntry, ZeroOffDiagonal, NonzeroDiagonal,
    NonFiniteEntry or TooManyPoints on bad input.
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise ValueError("matrix must be square and non-empty")
    n = d.shape[0]
    if n > max_points:
        raise TooManyPoints(f"{n} points exceeds cap {max_points}")
    if not np.all(np.isfinite(d)):
        raise NonFiniteEntry("matrix entries must be finite")
    if np.any(d < 0.0):
        i, j = np.argwhere(d < 0.0)[0]
        raise NegativeEntry(f"negative distance at ({i}, {j})", witness=(int(i), int(j)))
    if np.any(np.diagonal(d) != 0.0):
        i = int(np.argwhere(np.diagonal(d) != 0.0)[0][0])
        raise NonzeroDiagonal(f"nonzero diagonal at ({i}, {i})", witness=(i, i))
    if not np.array_equal(d, d.T):
        i, j = np.argwhere(d != d.T)[0]
        raise AsymmetricMatrix(f"asymmetry at ({i}, {j})", witness=(int(i), int(j)))
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] == 0.0):
        i, j = [(int(a), int(b)) for a, b in np.argwhere((d == 0.0) & off)][0]
        raise ZeroOffDiagonal(f"zero distance between distinct points ({i}, {j})",
                              witness=(i, j))
    s = _min_constant(d)
    return FiniteSpace(dist=tuple(tuple(float(v) for v in row) for row in d), s=s)


def distance(space: Space, x, y) -> float:
    """Distance between two points of the space (raises PointOutOfDomain)."""
    return space.distance(x, y)


def ball_membership(space: Space, center, radius: float, candidate) -> bool:
    """Strict membership test d(center, candidate) < radius."""
    if not radius > 0.0:
        raise NonpositiveRadius(f"radius must be positive, got {radius}")
    return space.distance(center, candidate) < radius


def check_limit_bounds(space: Space, seq: Sequence, x_star, y_star,
                       tail: int | None = None, tol: float = 1e-8) -> BoundReport:
    """Estimate liminf/limsup of d(x_n, y_star) and test the 1/s .. s sandwich.

    The estimates are the min/max over the last ``tail`` entries (default:
    last 25% of the sequence, at least MIN_TAIL entries, clamped to the
    sequence length).  For a sequence genuinely converging to ``x_star`` the
    report holds up to ``tol``.
    """
    m = len(seq)
    if m == 0:
        raise EmptySequence("sequence is empty")
    if tail is not None:
        if tail > m:
            raise TailLongerThanSequence(f"tail {tail} exceeds sequence length {m}")
        if tail < 1:
            raise TailLongerThanSequence("tail must be at least 1")
        window = tail
    else:
        window = min(m, max(MIN_TAIL, m // 4))
    vals = [space.distance(x, y_star) for x in seq[-window:]]
    liminf_est = min(vals)
    limsup_est = max(vals)
    dxy = space.distance(x_star, y_star)
    lower = dxy / space.s
    upper = space.s * dxy
    holds = (lower <= liminf_est + tol) and (limsup_est <= upper + tol)
    return BoundReport(lower=lower, liminf_est=liminf_est,
                       limsup_est=limsup_est, upper=upper, holds=holds)


# --- JSON interface ---------------------------------------------------------

def space_to_json(space: Space) -> dict:
    if isinstance(space, FiniteSpace):
        return {"dist": [list(row) for row in space.dist], "s": space.s}
    return {"lo": space.lo, "hi": space.hi, "p": space.p}


def space_from_json(obj: dict) -> Space:
    """Build a space from its JSON document.

    Finite form: {"dist": [[...], ...], "s": optional override >= computed
    minimum}.  Analytic form: {"lo": .., "hi": .., "p": ..}.
    """
    if "dist" in obj:
        fs = validate_finite_space(obj["dist"])
        if "s" in obj and obj["s"] is not None:
            given = float(obj["s"])
            if given < fs.s:
                raise ConstantTooSmall(
                    f"declared constant {given} below computed minimum {fs.s}")
            fs = replace(fs, s=given)
        return fs
    if {"lo", "hi", "p"} <= set(obj):
        return AnalyticSpace(lo=float(obj["lo"]), hi=float(obj["hi"]), p=float(obj["p"]))
    raise ValueError("space document must contain either 'dist' or 'lo'/'hi'/'p'")
