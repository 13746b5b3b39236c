"""Comparison functions, gauge functions, and their class certification.

Two function classes drive the contraction condition:

* comparison functions ``phi``: non-decreasing self-maps of (0, inf) whose
  n-fold iterates tend to 0 at every point;
* gauge functions ``G``: maps (0, inf) -> (0, inf), certified either by a
  positive infimum (class G1) or by the equivalence
  ``G(a_n) -> 0  iff  a_n -> 0`` (class G2).

Both limit conditions are only semi-decidable by finite evaluation, so
certification verdicts are three-valued (yes / no / inconclusive) and carry
evidence.  Built-in analytic families additionally expose closed forms for
their infima and interval sup/inf, which removes sampling doubt; tabulated
functions use right-constant steps, which makes sup/inf over intervals exact.

The module also computes the two quantitative thresholds used by the
convergence analysis: ``epsilon0`` (the radius below which a G2 gauge is
uniformly <= 1 near zero and uniformly positive away from zero) and
``n_epsilon`` (the iteration count after which distances below eps shrink
below eps/(2s) for any certified operator).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    BudgetExhausted,
    DomainRestricted,
    EmptyGrid,
    NonpositiveArgument,
    NotInvertible,
    NoValidEpsilon,
    NotStrictlyIncreasing,
)

PHI_BUDGET_DEFAULT = 10 ** 6
PHI_TOL_DEFAULT = 1e-9
PER_DECADE_DEFAULT = 512
GRID_LO_DECADE = -9
GRID_HI_DECADE = 9

# Sampled infimum estimates below this floor are treated as "inf = 0".
INF_FLOOR = 1e-12

_DYADIC_DOWN = [2.0 ** -k for k in range(0, 80)]
_DYADIC_UP = [2.0 ** k for k in range(0, 80)]


def _safe_exp(x: float) -> float:
    # exp saturating to +inf instead of raising; the real value is finite but
    # beyond double range, and sup/inf comparisons stay sound with inf
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def log_grid(lo_decade: int = GRID_LO_DECADE, hi_decade: int = GRID_HI_DECADE,
             per_decade: int = PER_DECADE_DEFAULT) -> list[float]:
    """Log-spaced evaluation grid: per_decade points per decade, inclusive ends."""
    pts = []
    for dec in range(lo_decade, hi_decade):
        for i in range(per_decade):
            pts.append(10.0 ** (dec + i / per_decade))
    pts.append(10.0 ** hi_decade)
    return pts


# --- scalar forms (used by exp-of-F gauges and the adapter) -----------------

@dataclass(frozen=True)
class RealForm:
    """A named scalar function with optional analytic facts attached.

    ``inf_value`` is the infimum over the form's domain ((0, inf) for gauge
    exponents, all of R for adapter shifts); ``diverges_iff_zero`` states
    whether ``fn(a_n) -> -inf`` holds exactly when ``a_n -> 0``.
    ``json_form`` is the loadable document for parameterized forms.
    """

    name: str
    fn: Callable[[float], float]
    inverse: Callable[[float], float] | None = None
    increasing: bool | None = None
    inf_value: float | None = None
    diverges_iff_zero: bool | None = None
    json_form: object = None

    def __call__(self, x: float) -> float:
        return self.fn(x)

    def describe(self):
        return self.json_form if self.json_form is not None else self.name


LN = RealForm("ln", math.log, math.exp, increasing=True,
              inf_value=-math.inf, diverges_iff_zero=True)

IDENTITY_FORM = RealForm("identity", lambda x: x, lambda y: y, increasing=True,
                         inf_value=0.0, diverges_iff_zero=False)


def affine_form(a: float, b: float) -> RealForm:
    """Form x -> a*x + b on (0, inf); a must be nonzero."""
    if a == 0.0:
        raise ValueError("affine form needs a != 0")
    inf_v = b if a > 0 else -math.inf
    return RealForm(f"affine({a!r},{b!r})", lambda x: a * x + b,
                    lambda y: (y - b) / a, increasing=a > 0,
                    inf_value=inf_v, diverges_iff_zero=False,
                    json_form={"affine": {"a": a, "b": b}})


def shift_form(tau: float) -> RealForm:
    """Form t -> t - tau on all of R (the classical contraction shift)."""
    return RealForm(f"shift({tau!r})", lambda t: t - tau, lambda y: y + tau,
                    increasing=True, inf_value=-math.inf,
                    diverges_iff_zero=False, json_form={"shift": tau})


def _tabulate(points) -> tuple[tuple[float, float], ...]:
    pts = tuple((float(t), float(v)) for t, v in points)
    if not pts:
        raise ValueError("tabulated function needs at least one breakpoint")
    ts = [t for t, _ in pts]
    if sorted(ts) != ts or len(set(ts)) != len(ts):
        raise ValueError("breakpoints must be strictly increasing")
    if any(v <= 0.0 for _, v in pts):
        raise ValueError("tabulated values must be positive")
    return pts


def _step_eval(points, t: float) -> float:
    # Right-constant: value at the largest breakpoint <= t; below the first
    # breakpoint, the first value.
    ts = [p[0] for p in points]
    idx = bisect_right(ts, t) - 1
    return points[max(idx, 0)][1]


# --- comparison function families -------------------------------------------

@dataclass(frozen=True)
class LinearPhi:
    """phi(t) = c * t with 0 < c < 1."""

    c: float

    def __post_init__(self):
        if not (0.0 < self.c < 1.0):
            raise ValueError("linear comparison function needs 0 < c < 1")

    def eval(self, t: float) -> float:
        return self.c * t

    def known_decay(self):
        return True

    def known_monotone(self):
        return True

    def describe(self) -> dict:
        return {"family": "linear", "c": self.c}


@dataclass(frozen=True)
class HyperbolicPhi:
    """phi(t) = t / (1 + a*t) with a > 0; iterates decay like t/(1 + n*a*t)."""

    a: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValueError("hyperbolic comparison function needs a > 0")

    def eval(self, t: float) -> float:
        return t / (1.0 + self.a * t)

    def known_decay(self):
        return True

    def known_monotone(self):
        return True

    def describe(self) -> dict:
        return {"family": "hyperbolic", "a": self.a}


@dataclass(frozen=True)
class ShiftedPhi:
    """phi(t) = exp(-tau) * t: a constant shift transported through exp/ln.

    ``base`` is optional provenance metadata naming the gauge the shift was
    paired with on the adapter path; it does not change the values.
    """

    tau: float
    base: object | None = None

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("shift must be positive")

    def eval(self, t: float) -> float:
        return math.exp(-self.tau) * t

    def known_decay(self):
        return True

    def known_monotone(self):
        return True

    def describe(self) -> dict:
        out = {"family": "shifted", "tau": self.tau}
        if self.base is not None:
            out["base"] = self.base.describe()
        return out


@dataclass(frozen=True)
class TabulatedPhi:
    """Right-constant step function given by (t, phi(t)) breakpoints."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", _tabulate(self.points))

    def eval(self, t: float) -> float:
        return _step_eval(self.points, t)

    def known_decay(self):
        return None

    def known_monotone(self):
        vals = [v for _, v in self.points]
        return True if vals == sorted(vals) else False

    def describe(self) -> dict:
        return {"family": "tabulated", "points": [list(p) for p in self.points]}


@dataclass(frozen=True)
class ExpPsiLnPhi:
    """phi = exp . psi . ln, the comparison function induced by an adapter shift.

    ``metadata`` carries optional classical-condition annotations from the
    adapter; it never affects evaluation.
    """

    psi: RealForm
    metadata: tuple = ()

    def eval(self, t: float) -> float:
        return _safe_exp(self.psi.fn(math.log(t)))

    def known_decay(self):
        return None

    def known_monotone(self):
        return self.psi.increasing

    def describe(self) -> dict:
        out = {"family": "exp_psi_ln", "psi": self.psi.describe()}
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out


@dataclass(frozen=True)
class ConjugatePhi:
    """The composite G^-1 . phi . G for an invertible strictly increasing gauge.

    Membership of the inner function propagates: conjugation by a strictly
    increasing bijection of (0, inf) preserves monotonicity and iterate decay
    (the iterates are G^-1(phi^n(G(t)))).
    """

    gauge: object
    inner: object

    def eval(self, t: float) -> float:
        return self.gauge.inverse_eval(phi_eval(self.inner, self.gauge.eval(t)))

    def known_decay(self):
        return self.inner.known_decay()

    def known_monotone(self):
        return self.inner.known_monotone()

    def describe(self) -> dict:
        return {"family": "conjugate", "gauge": self.gauge.describe(),
                "inner": self.inner.describe()}


Phi = LinearPhi | HyperbolicPhi | ShiftedPhi | TabulatedPhi | ExpPsiLnPhi | ConjugatePhi


def phi_eval(phi, t: float) -> float:
    """Evaluate a comparison function at t > 0."""
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise NonpositiveArgument(f"comparison functions take positive reals, got {t!r}")
    return phi.eval(float(t))


def phi_iterate(phi, t: float, n: int) -> float:
    """n-fold composition phi^n(t); n = 0 returns t."""
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise NonpositiveArgument(f"comparison functions take positive reals, got {t!r}")
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    u = float(t)
    for _ in range(n):
        u = phi.eval(u)
    return u


@dataclass(frozen=True)
class PhiCertificate:
    verdict: str                      # "member" | "non-member" | "inconclusive"
    witness: dict | None = None
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness,
                "evidence": self.evidence}


def certify_phi(phi, grid, budget: int = PHI_BUDGET_DEFAULT,
                tol: float = PHI_TOL_DEFAULT) -> PhiCertificate:
    """Certify membership of phi in the comparison-function class on a grid.

    Checks positivity and monotonicity on the grid, rejects any point with
    phi(t) >= t (iterates from such a point can never decay), then settles
    iterate decay: closed-form families are decided analytically, opaque
    families by iterating each grid point until the value drops below
    ``tol`` or ``budget`` is exhausted.
    """
    pts = sorted(set(float(t) for t in grid))
    if not pts:
        raise EmptyGrid("certification grid is empty")
    if budget < 1:
        raise ValueError("budget must be at least 1")

    prev_t = prev_v = None
    for t in pts:
        v = phi_eval(phi, t)
        if not v > 0.0:
            return PhiCertificate("non-member",
                                  witness={"kind": "nonpositive-value", "t": t, "phi_t": v})
        if prev_v is not None and v < prev_v:
            return PhiCertificate(
                "non-member",
                witness={"kind": "monotonicity", "t1": prev_t, "phi_t1": prev_v,
                         "t2": t, "phi_t2": v})
        prev_t, prev_v = t, v

    for t in pts:
        v = phi_eval(phi, t)
        if v >= t:
            # For a globally non-decreasing phi, phi(t) >= t forces
            # phi^n(t) >= t for all n: definitive stagnation.  Without that
            # knowledge the verdict stays inconclusive.
            verdict = "non-member" if phi.known_monotone() is True else "inconclusive"
            return PhiCertificate(
                verdict, witness={"kind": "stagnation", "t": t, "phi_t": v})

    decay = phi.known_decay()
    if decay is True:
        return PhiCertificate("member", evidence={
            "decay": "closed-form", "grid_points": len(pts), "tol": tol})
    if decay is False:
        return PhiCertificate("non-member",
                              witness={"kind": "known-non-convergent"})

    worst_k = 0
    for t in pts:
        u = t
        reached = False
        for k in range(1, budget + 1):
            u_next = phi.eval(u)
            if u_next < tol:
                worst_k = max(worst_k, k)
                reached = True
                break
            if u_next >= u:
                verdict = ("non-member" if phi.known_monotone() is True
                           else "inconclusive")
                return PhiCertificate(
                    verdict, witness={"kind": "stagnant-iterate", "t": t,
                                      "stuck_at": u_next, "k": k})
            u = u_next
        if not reached:
            return PhiCertificate(
                "inconclusive",
                witness={"kind": "budget", "t": t, "reached": u, "budget": budget},
                evidence={"tol": tol})
    return PhiCertificate("member", evidence={
        "decay": "iterated", "grid_points": len(pts), "tol": tol,
        "max_iterations": worst_k})


def check_phi_strict_decrease(phi, grid) -> tuple[bool, list[dict]]:
    """Check phi(t) < t on every grid point; reports witnesses, never raises."""
    witnesses = []
    for t in grid:
        v = phi.eval(float(t))
        if not v < t:
            witnesses.append({"t": float(t), "phi_t": v})
    return (not witnesses, witnesses)


# --- gauge families ----------------------------------------------------------

@dataclass(frozen=True)
class IdentityGauge:
    """G(a) = a."""

    def eval(self, a: float) -> float:
        return a

    def known_inf(self):
        return 0.0

    def known_g2(self):
        return True

    def strictly_increasing(self):
        return True

    def inverse_eval(self, y: float) -> float:
        return y

    def sup_below(self, eps: float):
        return eps

    def inf_above(self, thr: float):
        return thr

    def inf_from(self, eps: float, hi: float):
        return eps

    def describe(self) -> dict:
        return {"family": "identity"}


@dataclass(frozen=True)
class PowerGauge:
    """G(a) = a ** q with q > 0."""

    q: float

    def __post_init__(self):
        if not self.q > 0.0:
            raise ValueError("power gauge needs q > 0")

    def eval(self, a: float) -> float:
        return a ** self.q

    def known_inf(self):
        return 0.0

    def known_g2(self):
        return True

    def strictly_increasing(self):
        return True

    def inverse_eval(self, y: float) -> float:
        return y ** (1.0 / self.q)

    def sup_below(self, eps: float):
        return eps ** self.q

    def inf_above(self, thr: float):
        return thr ** self.q

    def inf_from(self, eps: float, hi: float):
        return eps ** self.q

    def describe(self) -> dict:
        return {"family": "power", "q": self.q}


@dataclass(frozen=True)
class AffinePlusGauge:
    """G(a) = c + a with c > 0; the infimum c keeps it in class G1."""

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError("affine-plus gauge needs c > 0")

    def eval(self, a: float) -> float:
        return self.c + a

    def known_inf(self):
        return self.c

    def known_g2(self):
        return False

    def strictly_increasing(self):
        return True

    def inverse_eval(self, y: float) -> float:
        if not y > self.c:
            raise DomainRestricted(
                f"value {y} outside gauge range ({self.c}, inf)")
        return y - self.c

    def sup_below(self, eps: float):
        return self.c + eps

    def inf_above(self, thr: float):
        return self.c + thr

    def inf_from(self, eps: float, hi: float):
        return self.c + eps

    def describe(self) -> dict:
        return {"family": "affine_plus", "c": self.c}


@dataclass(frozen=True)
class ExpOfFGauge:
    """G = exp(F) for a scalar form F on (0, inf)."""

    f: RealForm

    def eval(self, a: float) -> float:
        return _safe_exp(self.f.fn(a))

    def known_inf(self):
        if self.f.inf_value is None:
            return None
        return math.exp(self.f.inf_value)

    def known_g2(self):
        return self.f.diverges_iff_zero

    def strictly_increasing(self):
        return self.f.increasing is True

    def inverse_eval(self, y: float) -> float:
        if self.f.inverse is None:
            raise NotInvertible(f"form {self.f.name} exposes no inverse")
        return self.f.inverse(math.log(y))

    def sup_below(self, eps: float):
        if self.f.increasing is True:
            return _safe_exp(self.f.fn(eps))
        return None

    def inf_above(self, thr: float):
        if self.f.increasing is True:
            return _safe_exp(self.f.fn(thr))
        return None

    def inf_from(self, eps: float, hi: float):
        if self.f.increasing is True:
            return _safe_exp(self.f.fn(eps))
        return None

    def describe(self) -> dict:
        return {"family": "exp_of_f", "f": self.f.describe()}


@dataclass(frozen=True)
class TabulatedGauge:
    """Right-constant step gauge; its range is the finite set of table values."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", _tabulate(self.points))

    def eval(self, a: float) -> float:
        return _step_eval(self.points, a)

    def known_inf(self):
        return min(v for _, v in self.points)

    def known_g2(self):
        # A step gauge takes finitely many positive values, so G(a_n) cannot
        # tend to 0 along a_n -> 0.
        return False

    def strictly_increasing(self):
        return False

    def inverse_eval(self, y: float):
        raise NotInvertible("step gauges are not invertible")

    def _region_values(self, lo: float | None, hi: float | None) -> list[float]:
        ts = [p[0] for p in self.points]
        vals = []
        for i, (t, v) in enumerate(self.points):
            nxt = ts[i + 1] if i + 1 < len(ts) else math.inf
            left = t if i > 0 else 0.0      # first value extends to 0+
            if (lo is None or nxt > lo) and (hi is None or left < hi):
                vals.append(v)
        return vals

    def sup_below(self, eps: float):
        return max(self._region_values(None, eps))

    def inf_above(self, thr: float):
        return min(self._region_values(thr, None))

    def inf_from(self, eps: float, hi: float):
        return min(self._region_values(eps, hi))

    def describe(self) -> dict:
        return {"family": "tabulated", "points": [list(p) for p in self.points]}


Gauge = IdentityGauge | PowerGauge | AffinePlusGauge | ExpOfFGauge | TabulatedGauge


def gauge_eval(G, a: float) -> float:
    """Evaluate a gauge at a > 0."""
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0.0):
        raise NonpositiveArgument(f"gauges take positive reals, got {a!r}")
    return G.eval(float(a))


def _sampled_sup_below(G, eps: float, grid) -> float:
    pts = [t for t in grid if 0.0 < t < eps]
    pts += [eps * 2.0 ** -k for k in range(1, 40)]
    return max(G.eval(t) for t in pts if t > 0.0)


def _sampled_inf_above(G, thr: float, grid) -> float:
    pts = [t for t in grid if t > thr]
    pts += [thr * (1.0 + 2.0 ** -k) for k in range(0, 40)]
    return min(G.eval(t) for t in pts)


def _sampled_inf_from(G, eps: float, hi: float, grid) -> float:
    pts = [t for t in grid if eps <= t <= hi]
    if not pts:
        pts = [eps]
    return min(G.eval(t) for t in pts)


def sup_below(G, eps: float, grid=None) -> float:
    """sup of G over (0, eps): closed form when available, else sampled."""
    v = G.sup_below(eps)
    if v is not None:
        return v
    return _sampled_sup_below(G, eps, grid if grid is not None else log_grid())


def inf_above(G, thr: float, grid=None) -> float:
    """inf of G over (thr, inf): closed form when available, else sampled."""
    v = G.inf_above(thr)
    if v is not None:
        return v
    return _sampled_inf_above(G, thr, grid if grid is not None else log_grid())


@dataclass(frozen=True)
class ClassCertificate:
    in_g1: str                         # "yes" | "no" | "inconclusive"
    in_g2: str
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"in_g1": self.in_g1, "in_g2": self.in_g2, "evidence": self.evidence}


def certify_gauge_class(G, grid=None, tol: float = PHI_TOL_DEFAULT) -> ClassCertificate:
    """Certify membership of a gauge in classes G1 and/or G2.

    G1 ("inf G > 0") is answered "yes" only from an analytic lower bound for
    the family; "no" always carries a sampled witness sequence driving the
    gauge below any positive level.  G2 is decided from family knowledge when
    available, otherwise by the sampling scheme: evaluate along a dyadic
    refinement a = 2^-k (direction a -> 0) and along a = 2^k together with
    per-region infima (direction G -> 0 forces a -> 0).  The grid should
    span at least [tol, 1/tol] on a log scale, as the default one does.
    """
    if grid is None:
        grid = log_grid()
    grid = sorted(set(float(t) for t in grid))
    if not grid:
        raise EmptyGrid("certification grid is empty")

    down = [(a, G.eval(a)) for a in _DYADIC_DOWN]
    up = [(a, G.eval(a)) for a in _DYADIC_UP]
    down_tail = down[-12:]
    evidence: dict = {
        "grid_lo": grid[0], "grid_hi": grid[-1], "grid_points": len(grid),
        "refinement_tail": [[a, v] for a, v in down_tail],
        "inf_grid_estimate": min(G.eval(t) for t in grid),
        "sup_grid_estimate": max(G.eval(t) for t in grid),
    }

    ki = G.known_inf()
    if ki is not None:
        if ki > 0.0:
            in_g1 = "yes"
            evidence["inf_closed_form"] = ki
        else:
            in_g1 = "no"
            evidence["g1_witness"] = [[a, v] for a, v in down_tail]
    else:
        est = min(v for _, v in down)
        if est < tol:
            in_g1 = "no"
            evidence["g1_witness"] = [[a, v] for a, v in down if v < tol][:12]
        else:
            in_g1 = "inconclusive"

    kg2 = G.known_g2()
    if kg2 is True:
        in_g2 = "yes"
        evidence["g2"] = "closed-form"
    elif kg2 is False:
        in_g2 = "no"
        tail_min = min(v for _, v in down_tail)
        bad = [[a, v] for a, v in up if v < tol][:12]
        if tail_min < tol and bad:
            # direction G -> 0 fails: gauge vanishes away from zero
            evidence["g2_witness"] = {"kind": "vanishes-away-from-zero",
                                      "sequence": bad}
        else:
            # direction a -> 0 fails: G approaches a nonzero limit
            evidence["g2_witness"] = {
                "kind": "values-do-not-vanish",
                "sequence": [[a, v] for a, v in down_tail]}
    else:
        to_zero = all(v < tol for _, v in down[-10:])
        stuck_up = [[a, v] for a, v in up if v < tol]
        region_ok = all(
            _sampled_inf_from(G, eps, grid[-1], grid) > 0.0
            for eps in grid[:: max(1, len(grid) // 64)])
        if to_zero and region_ok and not stuck_up:
            in_g2 = "yes"
            evidence["g2"] = "sampled"
        elif not to_zero and min(v for _, v in down[-10:]) >= tol:
            in_g2 = "no"
            evidence["g2_witness"] = {
                "kind": "values-do-not-vanish",
                "sequence": [[a, v] for a, v in down_tail]}
        elif stuck_up:
            in_g2 = "no"
            evidence["g2_witness"] = {"kind": "vanishes-away-from-zero",
                                      "sequence": stuck_up[:12]}
        else:
            in_g2 = "inconclusive"

    return ClassCertificate(in_g1=in_g1, in_g2=in_g2, evidence=evidence)


def classify_increasing_gauge(G, grid=None) -> str:
    """Dichotomy for strictly increasing gauges: returns "G1" or "G2".

    A strictly increasing gauge always lies in the union of the two classes:
    if its infimum is positive it is in G1, otherwise monotonicity forces
    G(a) -> 0 along a -> 0+ and the gauge is in G2.
    """
    if grid is None:
        grid = log_grid()
    pts = sorted(set(float(t) for t in grid))
    if not pts:
        raise EmptyGrid("classification grid is empty")
    prev_t, prev_v = pts[0], G.eval(pts[0])
    for t in pts[1:]:
        v = G.eval(t)
        if not v > prev_v:
            raise NotStrictlyIncreasing(
                f"gauge not strictly increasing between {prev_t} and {t}",
                witness={"t1": prev_t, "v1": prev_v, "t2": t, "v2": v})
        prev_t, prev_v = t, v

    ki = G.known_inf()
    if ki is not None:
        return "G1" if ki > 0.0 else "G2"
    est = math.inf
    a = pts[0]
    for _ in range(120):
        est = min(est, G.eval(a))
        if est <= INF_FLOOR:
            break
        a *= 0.5
        if a == 0.0:
            break
    return "G1" if est > INF_FLOOR else "G2"


def epsilon0(G, grid=None, level: float = 1.0) -> float:
    """Largest grid value eps0 with sup G on (0, eps0) <= level and positive
    infima on every region [eps, grid-max] for grid eps below eps0.

    Presupposes a gauge certified in class G2; raises NoValidEpsilon when no
    grid value qualifies (which contradicts G2 membership and signals a
    certification failure upstream).
    """
    if grid is None:
        grid = log_grid()
    pts = sorted(set(float(t) for t in grid))
    if not pts:
        raise EmptyGrid("epsilon0 grid is empty")
    hi = pts[-1]
    inf_ok = []
    for t in pts:
        v = G.inf_from(t, hi)
        if v is None:
            v = _sampled_inf_from(G, t, hi, pts)
        inf_ok.append(v > 0.0)
    prefix_ok = []
    acc = True
    for ok in inf_ok:
        prefix_ok.append(acc)
        acc = acc and ok
    # prefix_ok[i] == all regions below pts[i] have positive infimum
    for i in range(len(pts) - 1, -1, -1):
        sb = G.sup_below(pts[i])
        if sb is None:
            sb = _sampled_sup_below(G, pts[i], pts)
        if sb <= level and prefix_ok[i] and inf_ok[i]:
            return pts[i]
    raise NoValidEpsilon(
        f"no grid value has sup below {level}; gauge cannot be in G2")


def n_epsilon(G, phi, s: float, eps: float, level: float = 1.0,
              budget: int = 10_000) -> int:
    """Smallest n <= budget with inf of G over (eps/(2s), inf) > phi^n(level).

    The returned n witnesses the shrinking step of the convergence argument:
    for any operator certified against (G, phi), distances below eps map
    under T^n to distances below eps/(2s).  The comparison is strict, as the
    argument requires.  Callers must supply eps below the gauge's epsilon0
    for the given level and a certified comparison function.
    """
    if not eps > 0.0:
        raise NonpositiveArgument("eps must be positive")
    if not s >= 1.0:
        raise ValueError("b-metric constant must be >= 1")
    if not level > 0.0:
        raise NonpositiveArgument("level must be positive")
    thr = eps / (2.0 * s)
    target = inf_above(G, thr)
    u = level
    for n in range(1, budget + 1):
        u = phi.eval(u)
        if target > u:
            return n
    raise BudgetExhausted(
        f"phi^n({level}) did not drop below {target} within {budget} iterations")


# --- JSON interface ----------------------------------------------------------

def phi_from_json(obj: dict):
    fam = obj["family"]
    if fam == "linear":
        return LinearPhi(float(obj["c"]))
    if fam == "hyperbolic":
        return HyperbolicPhi(float(obj["a"]))
    if fam == "shifted":
        base = gauge_from_json(obj["base"]) if obj.get("base") else None
        return ShiftedPhi(float(obj["tau"]), base=base)
    if fam == "tabulated":
        return TabulatedPhi(tuple((t, v) for t, v in obj["points"]))
    raise ValueError(f"unknown comparison-function family {fam!r}")


def _form_from_json(obj) -> RealForm:
    if obj == "ln":
        return LN
    if obj == "identity":
        return IDENTITY_FORM
    if isinstance(obj, dict) and "affine" in obj:
        return affine_form(float(obj["affine"]["a"]), float(obj["affine"]["b"]))
    if isinstance(obj, dict) and "shift" in obj:
        return shift_form(float(obj["shift"]))
    raise ValueError(f"unknown scalar form {obj!r}")


def gauge_from_json(obj: dict):
    fam = obj["family"]
    if fam == "identity":
        return IdentityGauge()
    if fam == "power":
        return PowerGauge(float(obj["q"]))
    if fam == "affine_plus":
        return AffinePlusGauge(float(obj["c"]))
    if fam == "exp_of_f":
        return ExpOfFGauge(_form_from_json(obj["f"]))
    if fam == "tabulated":
        return TabulatedGauge(tuple((t, v) for t, v in obj["points"]))
    raise ValueError(f"unknown gauge family {fam!r}")
