"""Weight functions, measures, function specifications and norms.

The central objects are ``PsiFunction`` (a positive weight on an exponent
interval), ``MeasureSpec`` (the handful of one-dimensional measures used by
the operator catalog), ``FunctionSpec`` (a function with enough structural
annotation that its L_p norms can be computed stably at extreme exponents)
and the norms themselves: ``lp_norm`` and the grand-Lebesgue ``bgls_norm``,
a supremum of |f|_p / psi(p) over an adaptive exponent grid.

All norms are handled in log scale internally; gamma-type norm values at
large exponents overflow doubles long before they stop being meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import (
    DivergentIntegral,
    DivergentSum,
    EmptySupport,
    NoRoot,
    UnboundedNorm,
    UnknownTail,
)
from .quad import Domain, QuadResult, log_integrate, log_integrate_peaked

_NEG_INF = float("-inf")

_MEASURE_KINDS = ("lebesgue", "power", "log", "titchmarsh", "counting")


@dataclass(frozen=True)
class MeasureSpec:
    """Measure on a one-dimensional domain.

    kinds: plain Lebesgue ``dx``; ``power`` for x^(-r) dx; ``log`` for dt/t;
    ``titchmarsh`` for the exponent-dependent weight |x|^(p-2) dx used by the
    Fourier inequality; ``counting`` on the positive integers.
    """

    domain: Domain
    kind: str = "lebesgue"
    r: float = 0.0

    def __post_init__(self):
        if self.kind not in _MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")

    def log_weight(self, x, p: float):
        """log of the density against dx at points x."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("lebesgue", "counting"):
            return np.zeros_like(x)
        if self.kind == "power":
            return -self.r * np.log(np.abs(x))
        if self.kind == "log":
            return -np.log(np.abs(x))
        return (p - 2.0) * np.log(np.abs(x))  # titchmarsh

    def log_density_neglog(self, u, p: float):
        """log density against du after x = e^(-u)."""
        u = np.asarray(u, dtype=float)
        if self.kind == "lebesgue":
            return -u
        if self.kind == "power":
            return -(1.0 - self.r) * u
        if self.kind == "log":
            return np.zeros_like(u)
        if self.kind == "titchmarsh":
            return -(p - 1.0) * u
        raise ValueError("counting measure has no continuous density")

    def log_density_log(self, w, p: float):
        """log density against dw after x = e^(w)."""
        w = np.asarray(w, dtype=float)
        if self.kind == "lebesgue":
            return w
        if self.kind == "power":
            return (1.0 - self.r) * w
        if self.kind == "log":
            return np.zeros_like(w)
        if self.kind == "titchmarsh":
            return (p - 1.0) * w
        raise ValueError("counting measure has no continuous density")

    @property
    def cache_key(self):
        return (self.kind, self.r, self.domain.lower, self.domain.upper)


def lebesgue(lower: float = 0.0, upper: float = math.inf) -> MeasureSpec:
    return MeasureSpec(Domain(lower, upper), "lebesgue")


def power_measure(r: float, lower: float = 0.0, upper: float = math.inf) -> MeasureSpec:
    return MeasureSpec(Domain(lower, upper), "power", r)


def log_measure(lower: float = 0.0, upper: float = math.inf) -> MeasureSpec:
    return MeasureSpec(Domain(lower, upper), "log")


@dataclass
class PsiFunction:
    """Weight psi on an exponent interval (a, b), positive and continuous.

    The point-mass kind is the degenerate weight equal to one at a single
    exponent r and infinite elsewhere; the grand norm then collapses to the
    plain L_r norm, which ``bgls_norm`` implements exactly.
    """

    a: float
    b: float
    eval_fn: Callable[[float], float]
    kind: str = "custom"
    r: Optional[float] = None
    label: str = "psi"
    mass: float = 1.0   # point-mass value at r

    def __call__(self, p: float) -> float:
        if self.kind == "point-mass":
            return self.mass if p == self.r else math.inf
        if not (self.a < p < self.b):
            return math.inf
        return float(self.eval_fn(p))

    def log_value(self, p: float) -> float:
        v = self(p)
        if v == math.inf:
            return math.inf
        if v <= 0:
            raise ValueError(f"psi must be positive, got {v} at p={p}")
        return math.log(v)

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)

    def scaled(self, c: float) -> "PsiFunction":
        return PsiFunction(self.a, self.b, lambda p: c * self.eval_fn(p),
                           kind=self.kind, r=self.r, label=f"{c}*{self.label}")


def point_mass_psi(r: float, a: float = 1.0, b: float = math.inf,
                   mass: float = 1.0) -> PsiFunction:
    return PsiFunction(a, b, lambda p: mass, kind="point-mass", r=r,
                       label=f"pointmass({r})", mass=mass)


def psi_power_family(a: float, b: float, beta: float, gamma: float) -> PsiFunction:
    """Two-sided power weight (p-a)^(-beta) (b-p)^(-gamma).

    For b = inf the convention flips gamma negative and the weight switches
    to the pure power p^(-gamma) beyond the matching point h, the root of
    (h-a)^(-beta) = h^(-gamma) in (a, inf).
    """
    if not (1.0 <= a < b):
        raise ValueError("need 1 <= a < b")
    if math.isfinite(b):
        if beta < 0 or gamma < 0:
            raise ValueError("finite-b branch needs beta, gamma >= 0")
        return PsiFunction(
            a, b, lambda p: (p - a) ** (-beta) * (b - p) ** (-gamma),
            kind="power-family", label=f"psi_power({a},{b},{beta},{gamma})")
    if gamma >= 0:
        raise ValueError("b = inf requires gamma < 0")

    def gap(h):
        return -beta * math.log(h - a) + gamma * math.log(h)

    if beta == 0.0:
        # continuity equation reads 1 = h^(-gamma); root h = 1 must lie in (a, inf)
        raise NoRoot("no matching point: constant left branch with a >= 1")
    lo, hi = a + 1e-12, a + 1.0
    while gap(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise NoRoot("continuity equation has no root below 1e12")
    h = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)

    def eval_fn(p, _h=h):
        if p < _h:
            return (p - a) ** (-beta)
        return p ** (-gamma)

    psi = PsiFunction(a, b, eval_fn, kind="power-family",
                      label=f"psi_power({a},inf,{beta},{gamma})")
    psi.h = h
    return psi


@dataclass
class FunctionSpec:
    """A real function plus the annotations the norm machinery needs.

    ``log_abs_neglog`` evaluates log|f(e^(-u))| and ``log_abs_log``
    evaluates log|f(e^(w))|; they let L_p integrands at exponents far past
    the overflow threshold be assembled without ever forming f(x) itself.
    ``log_lp_override`` lets a function carry a bespoke norm routine
    (operator images with their own stable representations).
    """

    name: str
    domain: Domain
    eval_fn: Callable          # vectorized x -> f(x)
    log_abs_neglog: Optional[Callable] = None
    log_abs_log: Optional[Callable] = None
    closed_form_log_lp: Optional[Callable] = None   # p -> log |f|_p
    canonical_measure: Optional[MeasureSpec] = None
    log_lp_override: Optional[Callable] = None      # (p, measure) -> log |f|_p
    level_measure: Optional[Callable] = None        # eps -> mu{|f| > eps}
    sup_abs: Optional[float] = None

    def __call__(self, x):
        return self.eval_fn(np.asarray(x, dtype=float))

    @property
    def cache_key(self):
        return self.name


_LP_CACHE: dict = {}


def clear_norm_cache():
    _LP_CACHE.clear()


def lp_norm(f: FunctionSpec, p: float, m: MeasureSpec,
            tol: float = 1e-9) -> float:
    """log of the L_p norm of f against the measure m, by quadrature.

    Raises DivergentIntegral when f is not in L_p(m).
    """
    if m.kind == "counting":
        raise ValueError("use discrete.lp_seq_norm for counting measure")
    if p == math.inf:
        return _log_ess_sup(f, m)
    if p < 1.0:
        raise ValueError("exponent must satisfy p >= 1")

    key = (f.cache_key, m.cache_key, round(p, 12))
    if key in _LP_CACHE:
        val = _LP_CACHE[key]
        if isinstance(val, Exception):
            raise val
        return val
    try:
        if f.log_lp_override is not None:
            val = f.log_lp_override(p, m)
        else:
            val = _lp_norm_impl(f, p, m, tol)
    except DivergentIntegral as exc:
        _LP_CACHE[key] = exc
        raise
    _LP_CACHE[key] = val
    return val


def _lp_norm_impl(f: FunctionSpec, p: float, m: MeasureSpec, tol: float) -> float:
    lo = max(f.domain.lower, m.domain.lower)
    hi = min(f.domain.upper, m.domain.upper)
    pieces: list[float] = []
    errs: list[float] = []

    covered_lo, covered_hi = lo, hi

    if lo == 0.0 and f.log_abs_neglog is not None:
        c = min(hi, 1.0)
        u_lo = -math.log(c) if c < math.inf else _NEG_INF

        def integrand_u(u):
            return p * np.asarray(f.log_abs_neglog(u), dtype=float) \
                + m.log_density_neglog(u, p)

        res = log_integrate_peaked(integrand_u, Domain(u_lo, math.inf), tol)
        pieces.append(res.value)
        errs.append(res.abs_error_estimate)
        covered_lo = c

    if hi == math.inf and f.log_abs_log is not None:
        c2 = max(lo, 1.0)

        def integrand_w(w):
            return p * np.asarray(f.log_abs_log(w), dtype=float) \
                + m.log_density_log(w, p)

        res = log_integrate_peaked(integrand_w, Domain(math.log(c2), math.inf), tol)
        pieces.append(res.value)
        errs.append(res.abs_error_estimate)
        covered_hi = c2

    if covered_lo < covered_hi:
        def integrand_x(x):
            with np.errstate(all="ignore"):
                fv = np.abs(np.asarray(f.eval_fn(x), dtype=float))
                out = np.where(fv > 0, p * np.log(fv), _NEG_INF)
            return out + m.log_weight(x, p)

        sing = tuple(s for s in f.domain.singularities
                     if covered_lo <= s.location <= covered_hi)
        res = log_integrate(integrand_x, Domain(covered_lo, covered_hi, sing), tol)
        pieces.append(res.value)
        errs.append(res.abs_error_estimate)

    finite = [v for v in pieces if v != _NEG_INF]
    if not finite:
        return _NEG_INF
    total = float(logsumexp(pieces))
    return total / p


def _log_ess_sup(f: FunctionSpec, m: MeasureSpec) -> float:
    """Essential sup by dense sampling; measures here are mutually
    absolutely continuous with Lebesgue so plain sup sampling is adequate
    for the continuous catalog."""
    lo = max(f.domain.lower, m.domain.lower)
    hi = min(f.domain.upper, m.domain.upper)
    pts = []
    if lo == 0.0 or (math.isfinite(lo) and lo >= 0):
        base = max(lo, 1e-12)
        top = hi if math.isfinite(hi) else 1e12
        pts.append(np.geomspace(base, top, 4001))
    else:
        pts.append(np.linspace(lo if math.isfinite(lo) else -1e6,
                               hi if math.isfinite(hi) else 1e6, 4001))
    xs = np.concatenate(pts)
    xs = xs[(xs > lo) & (xs < hi)]
    with np.errstate(all="ignore"):
        vals = np.abs(np.asarray(f.eval_fn(xs), dtype=float))
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return _NEG_INF
    best = float(vals.max())
    return math.log(best) if best > 0 else _NEG_INF


def log_lp(f: FunctionSpec, p: float, m: MeasureSpec, tol: float = 1e-9) -> float:
    """Like lp_norm but prefers an attached closed form (fast path for the
    grand-norm grids; the closed forms themselves are validated against
    quadrature by the test suite)."""
    if f.closed_form_log_lp is not None and (
            f.canonical_measure is None or f.canonical_measure.cache_key == m.cache_key):
        return float(f.closed_form_log_lp(p))
    return lp_norm(f, p, m, tol)


@dataclass
class BglsNorm:
    log_value: float
    argmax_p: float
    grid_points: int

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def bgls_norm(f: FunctionSpec, psi: PsiFunction, m: MeasureSpec,
              rel_tol: float = 1e-7, p_cap: float = 1024.0,
              use_closed_forms: bool = True, endpoint_depth: int = 11,
              max_rounds: int = 14) -> BglsNorm:
    """Grand-Lebesgue norm: sup over p in (a, b) of |f|_p / psi(p).

    The sup runs on a geometric grid refined toward both endpoints and
    around the running argmax until the value stabilizes; a sup that keeps
    growing at the grid edge raises UnboundedNorm.
    """
    if psi.kind == "point-mass":
        # degenerate weight: exact reduction to the plain L_r norm
        lv = log_lp(f, psi.r, m) if use_closed_forms else lp_norm(f, psi.r, m)
        return BglsNorm(lv - math.log(psi.mass), psi.r, 1)

    a, b = psi.support
    norm_at = (lambda p: log_lp(f, p, m)) if use_closed_forms \
        else (lambda p: lp_norm(f, p, m))

    def ratio(p: float) -> float:
        try:
            lv = norm_at(p)
        except DivergentIntegral:
            return _NEG_INF
        lpsi = psi.log_value(p)
        if lpsi == math.inf:
            return _NEG_INF
        return lv - lpsi

    grid = _initial_grid(a, b, p_cap, endpoint_depth)
    values = {p: ratio(p) for p in grid}

    best_p = max(values, key=values.get)
    best = values[best_p]
    gains: list[float] = []
    converged = False
    for _round in range(max_rounds):
        new_pts = _refine_around(sorted(values), best_p, a, b, p_cap)
        new_pts = [p for p in new_pts if p not in values]
        if not new_pts:
            converged = True
            break
        for p in new_pts:
            values[p] = ratio(p)
        new_best_p = max(values, key=values.get)
        gains.append(values[new_best_p] - best)
        best_p, best = new_best_p, values[new_best_p]
        if _round >= 2 and gains[-1] <= rel_tol:
            converged = True
            break
    if not converged and len(gains) >= 3:
        # a sup attained in an endpoint limit climbs with shrinking gains;
        # steadily accelerating gains on a geometric grid mean divergence
        g3 = gains[-3:]
        if g3[2] > 1.3 * g3[1] > 1.3 * 1.3 * g3[0] and g3[2] > 0.05:
            raise UnboundedNorm(
                f"ratio climbing with growing gains at p={best_p:.6g}")

    if best == _NEG_INF:
        raise DivergentIntegral("no exponent with a finite ratio")
    return BglsNorm(best, best_p, len(values))


def _initial_grid(a: float, b: float, p_cap: float,
                  endpoint_depth: int = 11) -> list[float]:
    pts = set()
    if math.isfinite(b):
        span = b - a
        for k in range(1, endpoint_depth + 1):
            s = 2.0 ** (-k)
            pts.add(a + span * s)
            pts.add(a + span * (1 - s))
        pts.add(0.5 * (a + b))
    else:
        for k in range(1, endpoint_depth + 1):
            pts.add(a + 2.0 ** (-k))
        p = max(2.0 * max(a, 1.0), a + 1.0)
        while p <= p_cap:
            pts.add(p)
            p *= 2.0
    return sorted(x for x in pts if a < x and x < b and x >= 1.0)


def _refine_around(pts: list[float], best_p: float, a: float, b: float,
                   p_cap: float) -> list[float]:
    out = []
    i = pts.index(best_p)
    if i > 0:
        out.append(0.5 * (pts[i - 1] + best_p))
    elif best_p > a:
        out.append(a + 0.5 * (best_p - a))
    if i < len(pts) - 1:
        out.append(0.5 * (best_p + pts[i + 1]))
    elif math.isfinite(b):
        out.append(best_p + 0.5 * (b - best_p))
    elif best_p * 2 <= p_cap:
        out.append(best_p * 2.0)
    # keep probing both endpoints as well
    lo0 = pts[0]
    out.append(a + 0.5 * (lo0 - a))
    if math.isfinite(b):
        out.append(b - 0.5 * (b - pts[-1]))
    return [p for p in out if a < p < b and p >= 1.0]


def natural_psi(f, m: MeasureSpec, p_cap: float = 256.0) -> PsiFunction:
    """The weight p -> |f|_p with support equal to the detected finiteness
    interval.  Accepts a FunctionSpec or a discrete SequenceSpec."""
    from . import discrete  # local import to keep module layering simple

    if isinstance(f, discrete.SequenceSpec):
        raw_norm = lambda p: discrete.lp_seq_norm(f, p)
    else:
        raw_norm = lambda p: log_lp(f, p, m)
    label = f"natural({f.name})"

    cache: dict[float, float] = {}

    def norm_at(p: float) -> float:
        if p not in cache:
            cache[p] = raw_norm(p)
        return cache[p]

    def finite(p: float) -> bool:
        try:
            norm_at(p)
            return True
        except (DivergentIntegral, DivergentSum):
            return False

    probes = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0,
              24.0, 32.0, 48.0, 64.0, 96.0]
    probes = [p for p in probes if p <= p_cap]
    flags = [finite(p) for p in probes]
    if not any(flags):
        raise EmptySupport(f"{label}: no finite L_p norm for p in [1, {p_cap}]")

    first = flags.index(True)
    last = len(flags) - 1 - flags[::-1].index(True)
    # lower endpoint
    if first == 0:
        a = 1.0
    else:
        lo, hi = probes[first - 1], probes[first]
        for _ in range(24):
            mid = 0.5 * (lo + hi)
            if finite(mid):
                hi = mid
            else:
                lo = mid
        a = hi
    # upper endpoint
    if last == len(probes) - 1:
        b = math.inf
    else:
        lo, hi = probes[last], probes[last + 1]
        for _ in range(24):
            mid = 0.5 * (lo + hi)
            if finite(mid):
                lo = mid
            else:
                hi = mid
        b = lo

    def eval_fn(p):
        return math.exp(norm_at(p))

    return PsiFunction(a, b, eval_fn, kind="natural", label=label)


@dataclass
class TailFunction:
    """Distribution function Z(eps) = mu{|f| > eps}, nonincreasing.

    ``jumps`` lists level-set boundaries (descending) with ``counts`` the
    constant value of Z between consecutive jumps; below the last listed
    jump, Z falls back to ``eval_fn`` (a smooth envelope with a certified
    step error of at most one count).
    """

    eval_fn: Callable
    sup_abs: float
    jumps: tuple = ()
    counts: tuple = ()

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        return np.asarray(self.eval_fn(eps), dtype=float)


def tail_function(f, m: MeasureSpec, eps: float) -> float:
    """mu{|f| > eps} for a FunctionSpec (continuous) or via the discrete
    module for sequences."""
    from . import discrete

    if isinstance(f, discrete.SequenceSpec):
        return float(discrete.seq_tail_count(f, eps))
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if f.sup_abs is not None and eps >= f.sup_abs:
        return 0.0
    if f.level_measure is not None:
        return float(f.level_measure(eps))
    raise UnknownTail(
        f"{f.name}: no level-measure annotation and no monotonicity certificate")


def norm_from_tail(Z: TailFunction, p: float, tol: float = 1e-9) -> float:
    """log |f|_p recovered from the layer-cake formula
    |f|_p^p = p * integral of y^(p-1) Z(y) dy."""
    if p < 1.0:
        raise ValueError("p >= 1 required")
    pieces = []
    if len(Z.jumps) >= 2:
        # Z is constant between consecutive jumps; integrate the staircase
        # part exactly (counts[i] is the value of Z on (jumps[i+1], jumps[i]))
        ys = np.asarray(Z.jumps, dtype=float)       # descending
        cnts = np.asarray(Z.counts, dtype=float)
        mass = float(np.sum(cnts * (ys[:-1] ** p - ys[1:] ** p)))
        pieces.append(math.log(mass) if mass > 0 else _NEG_INF)
        y_floor = float(ys[-1])
    else:
        y_floor = Z.sup_abs

    if y_floor > 0:
        def integrand(y):
            zy = Z(y)
            with np.errstate(all="ignore"):
                out = np.where(zy > 0, (p - 1.0) * np.log(y) + np.log(zy), _NEG_INF)
            return out

        res = log_integrate_peaked(integrand, Domain(0.0, y_floor), tol)
        pieces.append(res.value)

    finite = [v for v in pieces if v != _NEG_INF]
    if not finite:
        return _NEG_INF
    total = math.log(p) + float(logsumexp(pieces))
    return total / p


# ---------------------------------------------------------------------------
# generic FunctionSpec constructors used across the package


def indicator(c: float, d: float) -> FunctionSpec:
    span = d - c

    def ev(x):
        return ((x > c) & (x < d)).astype(float)

    return FunctionSpec(
        name=f"indicator({c},{d})",
        domain=Domain(c, d),
        eval_fn=ev,
        closed_form_log_lp=lambda p: math.log(span) / p,
        canonical_measure=MeasureSpec(Domain(c, d), "lebesgue"),
        level_measure=lambda eps: span if eps < 1.0 else 0.0,
        sup_abs=1.0,
    )


def inverse_beyond_one() -> FunctionSpec:
    """f(x) = 1/x on (1, inf); |f|_p = (p-1)^(-1/p)."""

    def ev(x):
        return np.where(x > 1.0, 1.0 / x, 0.0)

    return FunctionSpec(
        name="f0_inv",
        domain=Domain(1.0, math.inf),
        eval_fn=ev,
        log_abs_log=lambda w: -np.asarray(w, dtype=float),
        closed_form_log_lp=lambda p: -math.log(p - 1.0) / p if p > 1
        else _raise_divergent(p),
        canonical_measure=MeasureSpec(Domain(1.0, math.inf), "lebesgue"),
        level_measure=lambda eps: max(1.0 / eps - 1.0, 0.0) if eps > 0 else math.inf,
        sup_abs=1.0,
    )


def _raise_divergent(p):
    raise DivergentIntegral(f"norm diverges at p={p}")
