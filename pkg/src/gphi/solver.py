"""Picard iteration and verification of the quantitative convergence lemmas.

``picard_iterate`` runs the orbit ``x_k = T^k x0`` and stops on an exact
fixed point (per the space's zero convention), on a confirmed small-step
tolerance, or on budget.  The remaining operations verify, on concrete
orbits, each quantitative step of the convergence argument for certified
instances: the G1 finite-termination property, the block index ``m_eps``,
the invariant ball, the step-chaining bound, and the final Cauchy bound
``4 * s**3 * eps``.

Orbits that stop on an exact fixed point are treated as constantly extended
beyond the stopping index (``T x* = x*``), so block indices like ``m*n`` that
fall past the recorded stop are well defined.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass

from .contraction import FiniteMap, OperatorSpec, apply, validate_operator
from .errors import (
    BudgetExhausted,
    NonpositiveRadius,
    OrbitTooShort,
    TailNotSmall,
)
from .gauges import n_epsilon
from .spaces import FiniteSpace, Space, space_from_json, space_to_json

RECORD_CAP_DEFAULT = 100_000
TAIL_WINDOW_DEFAULT = 1_000
CONFIRM_STEPS = 3
TOL_DEFAULT = 1e-10
WALK_CAP_DEFAULT = 2_000_000


@dataclass(frozen=True)
class PicardTrace:
    """Recorded orbit of a Picard iteration."""

    space: Space
    x0: object
    orbit: tuple
    indices: tuple[int, ...]
    step_dists: tuple[float, ...]
    stop_reason: str            # exact-fixed-point | tolerance-met | budget-exhausted
    fixed_point: object | None
    k_stop: int
    cycle: tuple | None = None

    @property
    def max_index(self) -> int:
        return self.indices[-1]

    def point_at(self, k: int):
        """Orbit point x_k: recorded, or the fixed point past an exact stop."""
        pos = bisect_left(self.indices, k)
        if pos < len(self.indices) and self.indices[pos] == k:
            return self.orbit[pos]
        if self.stop_reason == "exact-fixed-point" and k >= self.k_stop:
            return self.fixed_point
        raise OrbitTooShort(f"orbit index {k} not recorded")

    def step_at(self, k: int) -> float:
        """Step distance d(x_k, x_{k+1}), zero past an exact stop."""
        if 0 <= k < len(self.step_dists):
            return self.step_dists[k]
        if self.stop_reason == "exact-fixed-point" and k >= self.k_stop:
            return 0.0
        raise OrbitTooShort(f"step index {k} not recorded")

    def to_json(self) -> dict:
        return {
            "space": space_to_json(self.space),
            "x0": self.x0,
            "orbit": list(self.orbit),
            "indices": list(self.indices),
            "step_dists": list(self.step_dists),
            "stop_reason": self.stop_reason,
            "fixed_point": self.fixed_point,
            "k_stop": self.k_stop,
            "cycle": list(self.cycle) if self.cycle is not None else None,
        }


def trace_from_json(obj: dict) -> PicardTrace:
    space = space_from_json(obj["space"])
    return PicardTrace(
        space=space, x0=obj["x0"], orbit=tuple(obj["orbit"]),
        indices=tuple(obj["indices"]), step_dists=tuple(obj["step_dists"]),
        stop_reason=obj["stop_reason"], fixed_point=obj["fixed_point"],
        k_stop=obj["k_stop"],
        cycle=tuple(obj["cycle"]) if obj.get("cycle") is not None else None)


@dataclass(frozen=True)
class CauchyDiagnostics:
    """Quantities assembled by the Cauchy-bound verification."""

    eps: float
    n: int
    m: int
    m0: int
    m_bar: int
    bound: float
    max_observed: float
    pairs_checked: int
    holds: bool

    def to_json(self) -> dict:
        return {"eps": self.eps, "n": self.n, "m": self.m, "m0": self.m0,
                "m_bar": self.m_bar, "bound": self.bound,
                "max_observed": self.max_observed,
                "pairs_checked": self.pairs_checked, "holds": self.holds}


class _Recorder:
    """Strided head plus full tail window, bounded total memory."""

    def __init__(self, cap: int, tail: int):
        self.tail = deque(maxlen=tail)
        self.head: list[tuple[int, object]] = []
        self.head_cap = max(cap - tail, 16)
        self.stride = 1

    def add(self, idx: int, pt):
        self.tail.append((idx, pt))
        if idx % self.stride == 0:
            self.head.append((idx, pt))
            if len(self.head) > self.head_cap:
                self.stride *= 2
                self.head = [e for e in self.head if e[0] % self.stride == 0]

    def merged(self) -> list[tuple[int, object]]:
        combined = dict(self.head)
        combined.update(dict(self.tail))
        return sorted(combined.items())


def picard_iterate(space: Space, T: OperatorSpec, x0, max_iter: int = 10_000,
                   tol: float = TOL_DEFAULT, record_cap: int = RECORD_CAP_DEFAULT,
                   tail_window: int = TAIL_WINDOW_DEFAULT) -> PicardTrace:
    """Run the orbit x, Tx, T^2 x, ... and record a trace.

    Stops on an exact fixed point (zero step per the space's convention), on
    ``CONFIRM_STEPS`` consecutive steps below ``tol``, or after ``max_iter``
    steps.  On finite spaces a revisit of an earlier point (a cycle of length
    at least 2) stops the run early with a cycle annotation; under certified
    hypotheses such a cycle falsifies the convergence theorem and is
    surfaced via stop_reason budget-exhausted.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    validate_operator(space, T)
    if not space.contains(x0):
        from .errors import PointOutOfDomain
        raise PointOutOfDomain(f"start point {x0!r} not in space")

    rec = _Recorder(record_cap, tail_window)
    rec.add(0, x0)
    steps: list[float] = []
    finite = isinstance(space, FiniteSpace)
    seen = {x0: 0} if finite else None
    full = [x0] if finite else None

    x = x0
    stop_reason = "budget-exhausted"
    fixed_point = None
    k_stop = max_iter
    cycle = None

    for k in range(max_iter):
        xn = apply(T, space, x)
        d = space.distance(x, xn)
        steps.append(d)
        rec.add(k + 1, xn)
        if finite:
            full.append(xn)
        if space.is_zero(d):
            stop_reason = "exact-fixed-point"
            fixed_point = xn
            k_stop = k
            break
        if finite:
            if xn in seen:
                start = seen[xn]
                cycle = tuple(full[start:k + 1])
                stop_reason = "budget-exhausted"
                k_stop = k + 1
                break
            seen[xn] = k + 1
        if len(steps) >= CONFIRM_STEPS and all(s < tol for s in steps[-CONFIRM_STEPS:]):
            stop_reason = "tolerance-met"
            fixed_point = xn
            k_stop = k + 1
            break
        x = xn

    recorded = rec.merged()
    return PicardTrace(
        space=space, x0=x0,
        orbit=tuple(p for _, p in recorded),
        indices=tuple(i for i, _ in recorded),
        step_dists=tuple(steps),
        stop_reason=stop_reason, fixed_point=fixed_point,
        k_stop=k_stop, cycle=cycle)


class OrbitWalker:
    """Lazy orbit access with fixed-point freeze and finite-cycle fast path."""

    def __init__(self, space: Space, T: OperatorSpec, x0,
                 max_steps: int = WALK_CAP_DEFAULT):
        self.space = space
        self.T = T
        self.max_steps = max_steps
        self.pts = [x0]
        self.frozen_at: int | None = None
        self.cycle: tuple[int, int] | None = None   # (start, period)
        self.seen = {x0: 0} if isinstance(space, FiniteSpace) else None

    def point(self, k: int):
        if self.frozen_at is not None and k >= self.frozen_at:
            return self.pts[self.frozen_at]
        if self.cycle is not None:
            start, period = self.cycle
            if k >= start:
                return self.pts[start + (k - start) % period]
        while len(self.pts) <= k:
            x = self.pts[-1]
            xn = apply(self.T, self.space, x)
            if self.space.is_zero(self.space.distance(x, xn)):
                self.frozen_at = len(self.pts) - 1
                return self.pts[self.frozen_at]
            if self.seen is not None and xn in self.seen:
                start = self.seen[xn]
                self.cycle = (start, len(self.pts) - start)
                return self.point(k)
            if self.seen is not None:
                self.seen[xn] = len(self.pts)
            self.pts.append(xn)
            if len(self.pts) > self.max_steps:
                raise OrbitTooShort(
                    f"orbit walk exceeded {self.max_steps} steps without settling")
        return self.pts[k]


def enumerate_fixed_points(space: FiniteSpace, T: FiniteMap) -> set[int]:
    """Exact fixed-point set of a finite self-map."""
    validate_operator(space, T)
    return {i for i, v in enumerate(T.mapping) if v == i}


def verify_g1_termination(trace: PicardTrace) -> bool:
    """True iff the orbit became exactly constant in finitely many steps.

    For instances certified with a positive-infimum gauge this must hold: an
    infinite non-repeating orbit would drive the gauge values to zero.
    """
    return trace.stop_reason == "exact-fixed-point"


def m_epsilon(space: Space, T: OperatorSpec, x0, n: int, eps: float, s: float,
              budget: int = 10_000) -> int:
    """Smallest m with d(x_{(m+1)n}, x_{mn}) < eps/(2s), scanning m = 1, 2, ...

    Since T^n x_{mn} = x_{(m+1)n}, this is the block-displacement index of the
    convergence argument.  Raises BudgetExhausted past the scan budget, which
    on a certified instance signals a hypothesis violation.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not eps > 0.0:
        raise NonpositiveRadius("eps must be positive")
    thr = eps / (2.0 * s)
    walker = OrbitWalker(space, T, x0)
    for m in range(1, budget + 1):
        a = walker.point(m * n)
        b = walker.point((m + 1) * n)
        d = space.distance(b, a)
        if space.is_zero(d) or d < thr:
            return m
    raise BudgetExhausted(f"no block index within budget {budget}")


def _m_epsilon_on_trace(trace: PicardTrace, n: int, eps: float, s: float,
                        budget: int) -> int:
    """Smallest checkable block index on the recorded (or extended) orbit.

    Thinned traces may lack intermediate block indices; those are skipped,
    since any m with the block-displacement property is a valid witness.
    """
    thr = eps / (2.0 * s)
    space = trace.space
    for m in range(1, budget + 1):
        try:
            a = trace.point_at(m * n)
            b = trace.point_at((m + 1) * n)
        except OrbitTooShort:
            if m * n > trace.max_index and trace.stop_reason != "exact-fixed-point":
                raise
            continue
        d = space.distance(b, a)
        if space.is_zero(d) or d < thr:
            return m
    raise BudgetExhausted(f"no block index within budget {budget}")


def verify_invariant_ball(space: Space, T: OperatorSpec, trace: PicardTrace,
                          eps: float, n: int, m: int, samples: int = 128) -> bool:
    """Check T^n(B(x_{mn}, eps)) stays inside B(x_{mn}, eps).

    Exhaustive over points of a finite space; on interval spaces the ball is
    an interval and gets a deterministic sample of ``samples`` points.
    ``n`` and ``m`` are meant to come from n_epsilon and m_epsilon for the
    same eps, which is what makes the containment a theorem on certified
    instances.
    """
    if not eps > 0.0:
        raise NonpositiveRadius("eps must be positive")
    center = trace.point_at(m * n)
    if isinstance(space, FiniteSpace):
        candidates = [u for u in space.points if space.distance(u, center) < eps]
    else:
        r = eps ** (1.0 / space.p)
        lo = max(space.lo, center - r)
        hi = min(space.hi, center + r)
        raw = [lo + (hi - lo) * i / (samples - 1) for i in range(samples)] \
            if samples > 1 else [lo]
        candidates = [u for u in raw if space.distance(u, center) < eps]
    for u in candidates:
        v = OrbitWalker(space, T, u).point(n)
        if not space.distance(v, center) < eps:
            return False
    return True


def verify_step_chaining(trace: PicardTrace, n: int, eps: float,
                         s: float) -> tuple[int, bool]:
    """Find the block index m0 past which n-blocks stay eps-close to their base.

    Computes the first step index k0 after which all recorded steps are below
    eps/(n*s**n) (zero-class steps count as below any positive threshold),
    sets m0 = ceil((k0+1)/n), and then verifies d(x_{mn}, x_{mn+p}) < eps for
    all checkable m >= m0 and p in {0, ..., n-1}, together with the chained
    bound sum s^(i+1) d(x_{mn+i}, x_{mn+i+1}) < eps that implies it.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    space = trace.space
    steps = trace.step_dists
    sn = s ** n                                # may overflow to inf
    thr = eps / (n * sn)                       # 0.0 when sn overflows

    def qualifies(d: float) -> bool:
        return space.is_zero(d) or d < thr

    last_bad = -1
    for j, d in enumerate(steps):
        if not qualifies(d):
            last_bad = j
    k0 = last_bad + 1
    if k0 >= len(steps) and trace.stop_reason != "exact-fixed-point":
        raise TailNotSmall(
            f"no recorded tail with steps below {thr}")

    m0 = -(-(k0 + 1) // n)
    holds = True
    m = m0
    while m * n <= trace.max_index:
        base = m * n
        m += 1
        try:
            x_base = trace.point_at(base)
            block = [trace.point_at(base + p) for p in range(n)]
            block_steps = [trace.step_at(base + i) for i in range(n - 1)]
        except OrbitTooShort:
            continue
        acc = 0.0
        spow = 1.0
        for p in range(1, n):
            spow *= s
            d_step = block_steps[p - 1]
            if not space.is_zero(d_step):
                acc += spow * d_step
            d_direct = space.distance(x_base, block[p])
            if not (d_direct < eps and acc < eps):
                holds = False
    return m0, holds


def verify_cauchy_bound(space: Space, trace: PicardTrace, G, phi, eps: float,
                        level: float = 1.0, n_budget: int = 10_000,
                        m_budget: int = 10_000,
                        pair_limit: int = 10_000) -> CauchyDiagnostics:
    """Assemble n, m, m0 and check d(x_{k1}, x_{k2}) <= 4*s^3*eps in the tail.

    k1, k2 range over recorded indices at or past m_bar * n with
    m_bar = max(m, m0); when the pair count would exceed ``pair_limit`` the
    index list is strided deterministically.  Budget and truncation errors
    from the sub-steps propagate.
    """
    s = space.s
    n = n_epsilon(G, phi, s, eps, level=level, budget=n_budget)
    m = _m_epsilon_on_trace(trace, n, eps, s, m_budget)
    m0, _ = verify_step_chaining(trace, n, eps, s)
    m_bar = max(m, m0)
    cutoff = m_bar * n

    pos = bisect_left(trace.indices, cutoff)
    pts = list(trace.orbit[pos:])
    if trace.stop_reason == "exact-fixed-point":
        pts.append(trace.fixed_point)
    if not pts:
        raise OrbitTooShort(f"trace truncated before index {cutoff}")

    max_pts = max(2, int((2 * pair_limit) ** 0.5) + 1)
    if len(pts) > max_pts:
        stride = -(-len(pts) // max_pts)
        pts = pts[::stride] + [pts[-1]]

    max_obs = 0.0
    checked = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = space.distance(pts[i], pts[j])
            checked += 1
            if d > max_obs:
                max_obs = d
    bound = 4.0 * s ** 3 * eps
    return CauchyDiagnostics(
        eps=eps, n=n, m=m, m0=m0, m_bar=m_bar, bound=bound,
        max_observed=max_obs, pairs_checked=checked,
        holds=max_obs <= bound)
