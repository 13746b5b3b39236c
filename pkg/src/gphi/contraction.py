"""Self-maps, certification of the gauged contraction condition, and adapters.

The central check is condition (G): for every pair x, y with
``d(Tx, Ty) != 0``,

    G(d(Tx, Ty)) <= phi(G(d(x, y))).

On finite spaces the check is exhaustive over unordered pairs and yields a
definitive verdict; on interval spaces pairs are drawn from a seeded
low-discrepancy sequence and a clean sample is reported as
inconclusive-positive ("certified-on-sample").

Two adapters translate classical formulations into the gauged one:

* ``from_F_contraction``: an inequality ``F(d(Tx,Ty)) <= psi(F(d(x,y)))``
  is equivalent to condition (G) for ``G = exp(F)`` and
  ``phi = exp . psi . ln``.
* ``to_czerwik_form``: for a strictly increasing invertible gauge the
  condition is equivalent to the plain comparison-function inequality
  ``d(Tx,Ty) <= (G^-1 . phi . G)(d(x,y))``.
"""

from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import (
    DomainRestricted,
    ModeUnsupportedWarning,
    NotInvertible,
    PointOutOfDomain,
    PsiNotDiverging,
    PsiNotNondecreasing,
)
from .gauges import (
    ConjugatePhi,
    ExpOfFGauge,
    ExpPsiLnPhi,
    RealForm,
    gauge_eval,
    phi_eval,
)
from .spaces import AnalyticSpace, FiniteSpace, Space

SAMPLE_PAIRS_DEFAULT = 4096

# R2 low-discrepancy sequence increments (inverse powers of the plastic number).
_R2_A1 = 0.7548776662466927
_R2_A2 = 0.5698402909980532
_GOLDEN = 0.6180339887498949


@dataclass(frozen=True)
class FiniteMap:
    """Self-map of a finite space given by an image array."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))

    def describe(self) -> dict:
        return {"map": list(self.mapping)}


@dataclass(frozen=True)
class AffineMap:
    """x -> a*x + b on an interval space."""

    a: float
    b: float

    def describe(self) -> dict:
        return {"affine": {"a": self.a, "b": self.b}}


@dataclass(frozen=True)
class TabulatedMap:
    """Monotone right-constant step map on an interval space."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        ts = [t for t, _ in pts]
        vs = [v for _, v in pts]
        if not pts or sorted(ts) != ts or len(set(ts)) != len(ts):
            raise ValueError("breakpoints must be strictly increasing")
        if vs != sorted(vs):
            raise ValueError("tabulated map must be monotone non-decreasing")
        object.__setattr__(self, "points", pts)

    def describe(self) -> dict:
        return {"tabulated": [list(p) for p in self.points]}


OperatorSpec = FiniteMap | AffineMap | TabulatedMap


def validate_operator(space: Space, T: OperatorSpec) -> None:
    """Check the self-map property of T on the given space."""
    if isinstance(T, FiniteMap):
        if not isinstance(space, FiniteSpace):
            raise ValueError("finite map needs a finite space")
        if len(T.mapping) != space.n:
            raise ValueError(f"map length {len(T.mapping)} != {space.n} points")
        for i, v in enumerate(T.mapping):
            if not 0 <= v < space.n:
                raise PointOutOfDomain(f"image of point {i} is {v}, outside the space")
        return
    if not isinstance(space, AnalyticSpace):
        raise ValueError("analytic maps need an interval space")
    if isinstance(T, AffineMap):
        # affine maps are monotone, so the image extremes sit at the endpoints
        for x in (space.lo, space.hi):
            y = T.a * x + T.b
            if not space.contains(y):
                raise PointOutOfDomain(f"affine image {y} of {x} leaves the interval")
        return
    for t, v in T.points:
        if not space.contains(v):
            raise PointOutOfDomain(f"tabulated value {v} leaves the interval")


def apply(T: OperatorSpec, space: Space, x):
    """Apply the operator to a point of the space."""
    if isinstance(T, FiniteMap):
        if not space.contains(x):
            raise PointOutOfDomain(f"point {x!r} not in space")
        return T.mapping[x]
    if not space.contains(x):
        raise PointOutOfDomain(f"point {x!r} not in interval")
    if isinstance(T, AffineMap):
        return T.a * x + T.b
    ts = [p[0] for p in T.points]
    idx = bisect_right(ts, x) - 1
    return T.points[max(idx, 0)][1]


@dataclass(frozen=True)
class ViolationWitness:
    x: object
    y: object
    d_xy: float
    d_txty: float
    g_of_d: float
    g_of_dt: float
    phi_bound: float

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "d_xy": self.d_xy,
                "d_txty": self.d_txty, "g_of_d": self.g_of_d,
                "g_of_dt": self.g_of_dt, "phi_bound": self.phi_bound}


@dataclass(frozen=True)
class ContractionCertificate:
    verdict: str                      # "certified" | "violated" | "inconclusive"
    checked_pairs: int
    violation_witness: ViolationWitness | None
    sampling_mode: dict
    note: str | None = None
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "checked_pairs": self.checked_pairs,
            "violation_witness":
                self.violation_witness.to_json() if self.violation_witness else None,
            "sampling_mode": self.sampling_mode,
            "note": self.note,
            "provenance": self.provenance,
        }


def _check_pair(space, T, G, phi, x, y) -> ViolationWitness | None:
    """Check condition (G) on one pair; None means satisfied or vacuous."""
    d = space.distance(x, y)
    if space.is_zero(d):
        # identified points carry no information (and Tx = Ty follows)
        return None
    tx, ty = apply(T, space, x), apply(T, space, y)
    dt = space.distance(tx, ty)
    if space.is_zero(dt):
        return None
    g_of_d = gauge_eval(G, d)
    g_of_dt = gauge_eval(G, dt)
    bound = phi_eval(phi, g_of_d)
    if g_of_dt <= bound:
        return None
    return ViolationWitness(x=x, y=y, d_xy=d, d_txty=dt,
                            g_of_d=g_of_d, g_of_dt=g_of_dt, phi_bound=bound)


def _sample_pairs(space: AnalyticSpace, seed: int, count: int):
    """Deterministic low-discrepancy pairs in the interval (R2 sequence)."""
    u = (0.5 + seed * _GOLDEN) % 1.0
    v = (0.25 + seed * _GOLDEN * _GOLDEN) % 1.0
    span = space.hi - space.lo
    for _ in range(count):
        u = (u + _R2_A1) % 1.0
        v = (v + _R2_A2) % 1.0
        yield space.lo + u * span, space.lo + v * span


def certify_condition_G(space: Space, T: OperatorSpec, G, phi,
                        mode: str = "auto", seed: int = 0,
                        samples: int = SAMPLE_PAIRS_DEFAULT) -> ContractionCertificate:
    """Certify condition (G) for an operator on a space.

    Finite spaces are scanned exhaustively over all unordered pairs in
    lexicographic order (a definitive verdict); interval spaces are sampled.
    Pairs whose image distance is zero satisfy the condition vacuously and
    are skipped.  The violation witness, when present, is the first
    violating pair in the canonical order.
    """
    validate_operator(space, T)
    provenance = {"gauge": G.describe(), "phi": phi.describe()}

    if isinstance(space, FiniteSpace):
        if mode == "random":
            warnings.warn(
                "random sampling requested on a finite space where the "
                "exhaustive scan is feasible; running exhaustively",
                ModeUnsupportedWarning)
        n = space.n
        checked = 0
        for i in range(n):
            for j in range(i + 1, n):
                checked += 1
                w = _check_pair(space, T, G, phi, i, j)
                if w is not None:
                    return ContractionCertificate(
                        "violated", checked_pairs=n * (n - 1) // 2,
                        violation_witness=w,
                        sampling_mode={"kind": "exhaustive"},
                        provenance=provenance)
        return ContractionCertificate(
            "certified", checked_pairs=checked, violation_witness=None,
            sampling_mode={"kind": "exhaustive"}, provenance=provenance)

    if mode == "exhaustive":
        raise ValueError("exhaustive certification is not available on interval spaces")
    sampling = {"kind": "random", "seed": seed, "count": samples}
    for x, y in _sample_pairs(space, seed, samples):
        w = _check_pair(space, T, G, phi, x, y)
        if w is not None:
            return ContractionCertificate(
                "violated", checked_pairs=samples, violation_witness=w,
                sampling_mode=sampling, provenance=provenance)
    return ContractionCertificate(
        "inconclusive", checked_pairs=samples, violation_witness=None,
        sampling_mode=sampling, note="certified-on-sample",
        provenance=provenance)


def check_F_inequality(space: Space, T: OperatorSpec, F: RealForm,
                       psi: RealForm) -> ViolationWitness | None:
    """Directly check F(d(Tx,Ty)) <= psi(F(d(x,y))) over all unordered pairs.

    Finite spaces only; same canonical pair order, same vacuous-skip rule as
    the gauged certifier, so verdicts and witnesses are comparable.
    """
    if not isinstance(space, FiniteSpace):
        raise ValueError("direct F-inequality scan is exhaustive, finite spaces only")
    validate_operator(space, T)
    for i in range(space.n):
        for j in range(i + 1, space.n):
            d = space.distance(i, j)
            if space.is_zero(d):
                continue
            tx, ty = apply(T, space, i), apply(T, space, j)
            dt = space.distance(tx, ty)
            if space.is_zero(dt):
                continue
            lhs = F.fn(dt)
            bound = psi.fn(F.fn(d))
            if lhs > bound:
                return ViolationWitness(
                    x=i, y=j, d_xy=d, d_txty=dt,
                    g_of_d=F.fn(d), g_of_dt=lhs, phi_bound=bound)
    return None


def from_F_contraction(F: RealForm, psi: RealForm,
                       test_grid=(0.5, 1.0, 2.0), budget: int = 10_000,
                       floor: float = -60.0,
                       metadata: dict | None = None) -> tuple[ExpOfFGauge, ExpPsiLnPhi]:
    """Translate an (F, psi) contraction pair into a gauge/comparison pair.

    Returns ``G = exp(F)`` and ``phi = exp . psi . ln``.  psi must be
    non-decreasing (checked on a sampled grid, PsiNotNondecreasing otherwise)
    and its iterates must head to -inf; a sampled iterate that stalls exactly
    raises PsiNotDiverging.  The original inequality holds for a pair of
    points iff condition (G) holds for the returned pair.
    """
    probes = sorted(set(
        [float(t) for t in test_grid]
        + [x / 4.0 for x in range(-40, 41)]))
    prev_x = prev_v = None
    for x in probes:
        v = psi.fn(x)
        if prev_v is not None and v < prev_v:
            raise PsiNotNondecreasing(
                f"psi decreases between {prev_x} and {x}",
                witness={"x1": prev_x, "v1": prev_v, "x2": x, "v2": v})
        prev_x, prev_v = x, v

    for t in test_grid:
        u = float(t)
        for _ in range(budget):
            nxt = psi.fn(u)
            if nxt < floor:
                break
            if nxt >= u:
                raise PsiNotDiverging(
                    f"psi iterates stall at {nxt} starting from {t}",
                    witness={"t": t, "stuck_at": nxt})
            u = nxt

    gauge = ExpOfFGauge(F)
    comp = ExpPsiLnPhi(psi, metadata=tuple(sorted((metadata or {}).items())))
    return gauge, comp


def to_czerwik_form(G, phi) -> ConjugatePhi:
    """Composite comparison function G^-1 . phi . G for invertible gauges.

    Requires a strictly increasing gauge with a computable inverse.  When the
    gauge's range has a positive lower bound L, the composite leaves (0, inf)
    wherever phi dips to or below L; such gauges raise DomainRestricted with
    a witness argument.
    """
    if not G.strictly_increasing():
        raise NotInvertible("gauge is not strictly increasing")
    try:
        G.inverse_eval(G.eval(1.0))
    except NotInvertible:
        raise
    except DomainRestricted:
        pass
    low = G.known_inf()
    if low is not None and low > 0.0:
        probes = [low * (1.0 + 2.0 ** -k) for k in range(1, 50)]
        probes += [low * (1.0 + 2.0 ** k) for k in range(0, 20)]
        for u in probes:
            if phi_eval(phi, u) <= low:
                t = G.inverse_eval(u)
                raise DomainRestricted(
                    f"composite leaves (0, inf) near t = {t}",
                    witness={"t": t, "g_t": u, "phi_g_t": phi_eval(phi, u),
                             "range_low": low})
    return ConjugatePhi(gauge=G, inner=phi)


# --- JSON interface ----------------------------------------------------------

def operator_from_json(obj: dict) -> OperatorSpec:
    if "map" in obj:
        return FiniteMap(tuple(obj["map"]))
    if "affine" in obj:
        return AffineMap(a=float(obj["affine"]["a"]), b=float(obj["affine"]["b"]))
    if "tabulated" in obj:
        return TabulatedMap(tuple((t, v) for t, v in obj["tabulated"]))
    raise ValueError("operator document must contain 'map', 'affine' or 'tabulated'")


def operator_to_json(T: OperatorSpec) -> dict:
    return T.describe()
