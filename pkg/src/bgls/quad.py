"""Adaptive double-exponential quadrature with a log-domain path.

Handles finite, semi-infinite and doubly infinite intervals, integrable
endpoint singularities (power and log-power), Cauchy principal values and
oscillatory tails.  Every routine has a log-domain twin so that quantities
which overflow double precision (gamma-type integrals at large exponents)
can be accumulated as log-values via stable log-sum-exp.

The engine is a tanh-sinh / exp-sinh family: the integration variable is
mapped so that the transformed integrand decays doubly exponentially, and
the trapezoid rule on the mapped axis is refined by halving the step until
two successive levels agree.  Node windows are extended adaptively; a tail
summand that refuses to decay is the divergence signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .errors import DivergentIntegral, NonConvergence, PoleOutsideDomain

DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12

_NEG_INF = float("-inf")
_SIGNIFICANT = 60.0  # log-scale window below the peak that still matters
_KINDS = ("power", "log-power", "jump", "oscillatory")


@dataclass(frozen=True)
class Singularity:
    """Annotation of a non-smooth point of an integrand."""

    location: float
    kind: str = "power"
    exponent: float = 0.0
    frequency: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown singularity kind {self.kind!r}")
        if self.kind == "power" and self.exponent <= -1.0:
            raise ValueError("power singularity must be integrable (exponent > -1)")


@dataclass(frozen=True)
class Domain:
    """Extended-real interval with singularity annotations."""

    lower: float
    upper: float
    singularities: tuple[Singularity, ...] = ()

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("domain requires lower < upper")
        for s in self.singularities:
            if not (self.lower <= s.location <= self.upper):
                raise ValueError("singularity outside closed domain")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def interior_splits(self) -> list[float]:
        return sorted({s.location for s in self.singularities
                       if self.lower < s.location < self.upper})


@dataclass
class QuadResult:
    """Integral estimate.  In log mode ``value`` is log|integral| and
    ``abs_error_estimate`` bounds the relative error of the linear value."""

    value: float
    abs_error_estimate: float
    evaluations: int
    log_mode: bool = False
    sign: int = 1

    @property
    def linear_value(self) -> float:
        if self.log_mode:
            return self.sign * math.exp(self.value)
        return self.value


def _logcosh(t: np.ndarray) -> np.ndarray:
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


class _Map:
    """Change of variables t -> x with log-weight log|dx/dt|."""

    t_cap = 6.0

    def transform(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


class _TanhSinh(_Map):
    t_cap = 6.0

    def __init__(self, a: float, b: float):
        self.a = a
        self.b = b
        self.rad = 0.5 * (b - a)

    def transform(self, t):
        u = 0.5 * math.pi * np.sinh(t)
        # distance to the nearer endpoint, computed without tanh saturation:
        # 1 - tanh|u| = 2 e^{-2|u|} / (1 + e^{-2|u|})
        e = np.exp(-2.0 * np.abs(u))
        delta = self.rad * 2.0 * e / (1.0 + e)
        x = np.where(t <= 0, self.a + delta, self.b - delta)
        logw = (math.log(self.rad) + math.log(0.5 * math.pi)
                + _logcosh(t) - 2.0 * _logcosh(u))
        return x, logw


class _ExpSinh(_Map):
    """Maps onto (a, inf) for sign=+1 or (-inf, a) for sign=-1."""

    t_cap = 6.7

    def __init__(self, a: float, sign: int = 1):
        self.a = a
        self.sign = sign

    def transform(self, t):
        g = 0.5 * math.pi * np.sinh(t)
        g = np.clip(g, -745.0, 700.0)
        x = self.a + self.sign * np.exp(g)
        logw = math.log(0.5 * math.pi) + _logcosh(t) + g
        return x, logw


def _panelize(d: Domain) -> list[tuple[float, float]]:
    pts = [d.lower] + d.interior_splits() + [d.upper]
    panels = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if lo == _NEG_INF and hi == math.inf:
            panels.extend([(lo, 0.0), (0.0, hi)])
        else:
            panels.append((lo, hi))
    return panels


def _map_for(lo: float, hi: float) -> _Map:
    if math.isfinite(lo) and math.isfinite(hi):
        return _TanhSinh(lo, hi)
    if math.isfinite(lo):
        return _ExpSinh(lo, +1)
    if math.isfinite(hi):
        return _ExpSinh(hi, -1)
    raise ValueError("doubly infinite panel should have been split")


class _PanelWorker:
    """Shared node/window logic for one mapped panel (log-scale terms)."""

    def __init__(self, term_fn: Callable[[np.ndarray], np.ndarray], t_cap: float):
        self.term_fn = term_fn      # t-array -> per-node log contribution
        self.t_cap = t_cap
        self.evaluations = 0
        self.t_lo = -3.0
        self.t_hi = 3.0
        self.peak = _NEG_INF

    def _probe(self, ts: np.ndarray) -> np.ndarray:
        self.evaluations += ts.size
        vals = self.term_fn(ts)
        finite = vals[np.isfinite(vals)]
        if finite.size:
            self.peak = max(self.peak, float(finite.max()))
        return vals

    def extend_window(self):
        """Push window edges until the summand is negligible; growing
        edge summands signal a divergent integral."""
        self._probe(np.linspace(-3.0, 3.0, 25))
        for sign in (-1, 1):
            edge = 3.0
            history = []
            while edge < self.t_cap - 1e-9:
                edge = min(edge + 0.5, self.t_cap)
                val = float(self._probe(np.array([sign * edge]))[0])
                history.append(val)
                if val < self.peak - _SIGNIFICANT:
                    break
            if sign < 0:
                self.t_lo = -edge
            else:
                self.t_hi = edge
            if len(history) >= 5:
                tail = history[-5:]
                growing = all(b > a for a, b in zip(tail[:-1], tail[1:]))
                if growing and tail[-1] > self.peak - _SIGNIFICANT:
                    raise DivergentIntegral(
                        "edge summand keeps growing under window extension")
            if history and history[-1] > self.peak - _SIGNIFICANT:
                # ran into the cap while still significant
                if len(history) >= 2 and history[-1] > history[0]:
                    raise DivergentIntegral(
                        "summand does not decay toward the domain endpoint")
                raise NonConvergence(
                    "tail still significant at the node-window cap")

    def levels(self, max_level: int):
        for level in range(max_level + 1):
            h = 0.5 * 2.0 ** (-level)
            ks = np.arange(math.ceil(self.t_lo / h), math.floor(self.t_hi / h) + 1)
            ts = ks * h
            vals = self._probe(ts)
            yield level, h, vals


def _panel_quad_log(term_fn, t_cap, tol, max_level):
    worker = _PanelWorker(term_fn, t_cap)
    worker.extend_window()
    if worker.peak == _NEG_INF:
        return _NEG_INF, 0.0, worker.evaluations
    prev = None
    last_diff = math.inf
    for level, h, vals in worker.levels(max_level):
        finite = vals[np.isfinite(vals)]
        cur = math.log(h) + (float(logsumexp(finite)) if finite.size else _NEG_INF)
        if prev is not None and level >= 3:
            last_diff = abs(cur - prev)
            if last_diff <= tol:
                return cur, last_diff, worker.evaluations
        prev = cur
    raise NonConvergence(f"log-mode panel stalled with diff {last_diff:.3e}")


def _make_log_terms(log_f, mp: _Map, lo: float, hi: float):
    """Wrap a log-integrand as t -> log(weight) + log f(x(t))."""

    def log_terms(ts):
        x, logw = mp.transform(ts)
        inside = (x > lo) & (x < hi)
        out = np.full(ts.shape, _NEG_INF)
        if not inside.any():
            return out
        with np.errstate(all="ignore"):
            fv = np.asarray(log_f(x[inside]), dtype=float)
        vals = logw[inside] + fv
        vals[np.isnan(vals)] = _NEG_INF
        out[inside] = vals
        return out

    return log_terms


def integrate(f, d: Domain, tol: float = DEFAULT_REL_TOL,
              tol_abs: float = DEFAULT_ABS_TOL, *,
              max_level: int = 10) -> QuadResult:
    """Adaptive integral of a (possibly signed) integrand over ``d``.

    ``f`` must accept numpy arrays.  Interior singularities listed in the
    domain become panel boundaries; integrable endpoint singularities are
    absorbed by the double-exponential maps.
    """
    total = 0.0
    err = 0.0
    evals = 0
    for lo, hi in _panelize(d):
        mp = _map_for(lo, hi)

        def term_fn(ts, _mp=mp, _lo=lo, _hi=hi):
            x, logw = _mp.transform(ts)
            inside = (x > _lo) & (x < _hi)
            vals = np.zeros(ts.shape)
            if inside.any():
                with np.errstate(all="ignore"):
                    fv = np.asarray(f(x[inside]), dtype=float)
                fv = np.where(np.isfinite(fv), fv, 0.0)
                vals[inside] = fv * np.exp(logw[inside])
            return vals

        value, perr, n = _linear_panel(term_fn, mp.t_cap, tol, tol_abs, max_level)
        total += value
        err += perr
        evals += n
    return QuadResult(total, err, evals)


def _linear_panel(term_fn, t_cap, tol, tol_abs, max_level):
    """Trapezoid refinement on the mapped axis for signed integrands."""
    # window extension based on |terms|
    evals = 0
    t_lo, t_hi = -3.0, 3.0
    coarse_ts = np.linspace(-3.0, 3.0, 25)
    coarse = term_fn(coarse_ts)
    evals += coarse_ts.size
    peak = float(np.max(np.abs(coarse))) if coarse.size else 0.0

    for sign in (-1, 1):
        edge = 3.0
        history = []
        while edge < t_cap - 1e-9:
            edge = min(edge + 0.5, t_cap)
            val = float(term_fn(np.array([sign * edge]))[0])
            evals += 1
            history.append(abs(val))
            peak = max(peak, abs(val))
            if peak == 0.0 or abs(val) <= peak * math.exp(-_SIGNIFICANT):
                break
        if sign < 0:
            t_lo = -edge
        else:
            t_hi = edge
        if len(history) >= 5:
            tail = history[-5:]
            if all(b > a * (1.0 + tol) for a, b in zip(tail[:-1], tail[1:])) \
                    and tail[-1] > peak * math.exp(-_SIGNIFICANT) * 0.99:
                raise DivergentIntegral(
                    "summand grows under window extension")
        if history and history[-1] > peak * math.exp(-30.0):
            if len(history) >= 2 and history[-1] > history[0]:
                raise DivergentIntegral(
                    "summand does not decay toward the domain endpoint")
            raise NonConvergence("tail still significant at the window cap")

    if peak == 0.0:
        return 0.0, 0.0, evals

    prev = None
    last_diff = math.inf
    for level in range(max_level + 1):
        h = 0.5 * 2.0 ** (-level)
        ks = np.arange(math.ceil(t_lo / h), math.floor(t_hi / h) + 1)
        ts = ks * h
        vals = term_fn(ts)
        evals += ts.size
        cur = h * float(np.sum(vals))
        if prev is not None and level >= 3:
            last_diff = abs(cur - prev)
            if last_diff <= max(tol * abs(cur), tol_abs):
                return cur, last_diff, evals
        prev = cur
    raise NonConvergence(f"panel stalled with diff {last_diff:.3e}")


def log_integrate(log_f, d: Domain, tol: float = DEFAULT_REL_TOL, *,
                  max_level: int = 10) -> QuadResult:
    """log of the integral of a nonnegative integrand given as log f.

    Accumulation uses log-sum-exp of log-weight + log-integrand, so values
    like the log of a gamma-type integral never leave the log scale.
    """
    panel_logs = []
    panel_errs = []
    evals = 0
    for lo, hi in _panelize(d):
        mp = _map_for(lo, hi)
        term_fn = _make_log_terms(log_f, mp, lo, hi)
        val, err, n = _panel_quad_log(term_fn, mp.t_cap, tol, max_level)
        panel_logs.append(val)
        panel_errs.append(err)
        evals += n
    if all(v == _NEG_INF for v in panel_logs):
        return QuadResult(_NEG_INF, 0.0, evals, log_mode=True, sign=0)
    total = float(logsumexp(panel_logs))
    # combine per-panel relative errors weighted by their share of the mass
    rel = sum(math.exp(v - total) * e for v, e in zip(panel_logs, panel_errs)
              if v != _NEG_INF)
    return QuadResult(total, rel, evals, log_mode=True, sign=1)


def log_integrate_peaked(log_f, d: Domain, tol: float = DEFAULT_REL_TOL, *,
                         max_level: int = 10) -> QuadResult:
    """log-integral that first locates the integrand's maximum and splits
    the domain there.

    Norm integrands at large exponents concentrate their mass in a narrow
    window far from the endpoints (gamma-type profiles peaking at u ~ m or
    exponential profiles with tiny decay rates); splitting at the peak turns
    each half into an endpoint-concentrated integral, which the
    double-exponential maps resolve quickly.
    """
    lo, hi = d.lower, d.upper
    evals = 0

    def probe_points():
        if math.isfinite(lo) and math.isfinite(hi):
            t = np.geomspace(1e-9, 0.5, 80)
            return np.concatenate([lo + (hi - lo) * t, hi - (hi - lo) * t])
        if math.isfinite(lo):
            span = 1e8
            while True:
                pts = lo + np.geomspace(1e-9, span, 200)
                vals = np.asarray(log_f(pts), dtype=float)
                vals[np.isnan(vals)] = _NEG_INF
                if not np.isfinite(vals).any() or \
                        int(np.argmax(vals)) < pts.size - 5 or span >= 1e30:
                    probe_points.cache = (pts, vals)
                    return pts
                span *= 1e4
        # (-inf, hi) or (-inf, inf); mirror / center on 0
        if math.isfinite(hi):
            t = np.geomspace(1e-9, 1e8, 200)
            return hi - t
        return np.concatenate([-np.geomspace(1e-9, 1e8, 100),
                               np.geomspace(1e-9, 1e8, 100)])

    pts = probe_points()
    if hasattr(probe_points, "cache"):
        pts, vals = probe_points.cache
    else:
        vals = np.asarray(log_f(pts), dtype=float)
        vals[np.isnan(vals)] = _NEG_INF
    evals += pts.size
    order = np.argsort(pts)
    pts, vals = pts[order], vals[order]
    if not np.isfinite(vals).any():
        return log_integrate(log_f, d, tol, max_level=max_level)
    k = int(np.argmax(vals))
    # bisection refinement of the bracketing triple (coarse peak is enough
    # for a good split point)
    if 0 < k < pts.size - 1:
        a, b, c = pts[k - 1], pts[k], pts[k + 1]
        vb = vals[k]
        for _ in range(30):
            if c - a <= 1e-3 * max(abs(b), 1.0):
                break
            m1, m2 = 0.5 * (a + b), 0.5 * (b + c)
            v = np.asarray(log_f(np.array([m1, m2])), dtype=float)
            evals += 2
            j = int(np.argmax([v[0], vb, v[1]]))
            if j == 0:
                a, b, c, vb = a, m1, b, v[0]
            elif j == 2:
                a, b, c, vb = b, m2, c, v[1]
            else:
                a, c = m1, m2
        peak = b
    else:
        peak = pts[k]

    inner = (lo < peak < hi) and (peak - lo) > 1e-12 * max(abs(lo), 1.0) \
        and (hi - peak) > 1e-12 * max(abs(peak), 1.0)
    if not inner:
        res = log_integrate(log_f, d, tol, max_level=max_level)
        res.evaluations += evals
        return res
    left = log_integrate(log_f, Domain(lo, peak), tol, max_level=max_level)
    right = log_integrate(log_f, Domain(peak, hi), tol, max_level=max_level)
    evals += left.evaluations + right.evaluations
    parts = [left.value, right.value]
    if all(v == _NEG_INF for v in parts):
        return QuadResult(_NEG_INF, 0.0, evals, log_mode=True, sign=0)
    total = float(logsumexp(parts))
    rel = sum(math.exp(v - total) * e for v, e in
              zip(parts, [left.abs_error_estimate, right.abs_error_estimate])
              if v != _NEG_INF)
    return QuadResult(total, rel, evals, log_mode=True, sign=1)


def integrate_pv(f, d: Domain, pole: float, tol: float = DEFAULT_REL_TOL,
                 tol_abs: float = DEFAULT_ABS_TOL) -> QuadResult:
    """Symmetric-limit principal value across a simple pole.

    The symmetric window around the pole is folded, s -> f(pole+s)+f(pole-s),
    which cancels the simple pole analytically and realizes the symmetric
    limit exactly; the remaining outer panels are regular integrals.
    """
    if not (d.lower < pole < d.upper):
        raise PoleOutsideDomain(f"pole {pole} not interior to ({d.lower}, {d.upper})")
    half = min(pole - d.lower, d.upper - pole) / 2.0
    if not math.isfinite(half):
        half = 1.0

    def folded(s):
        return f(pole + s) + f(pole - s)

    total = 0.0
    err = 0.0
    evals = 0
    # folded window: regular integrand, keep nodes away from s=0 rounding
    mp = _TanhSinh(0.0, half)
    mp.t_cap = 3.0

    def term_fn(ts):
        x, logw = mp.transform(ts)
        inside = (x > 0) & (x < half)
        vals = np.zeros(ts.shape)
        if inside.any():
            with np.errstate(all="ignore"):
                fv = np.asarray(folded(x[inside]), dtype=float)
            fv = np.where(np.isfinite(fv), fv, 0.0)
            vals[inside] = fv * np.exp(logw[inside])
        return vals

    v, e, n = _linear_panel(term_fn, mp.t_cap, tol, tol_abs, max_level=10)
    total, err, evals = total + v, err + e, evals + n

    for lo, hi in ((d.lower, pole - half), (pole + half, d.upper)):
        if hi - lo > 0:
            sub = Domain(lo, hi, tuple(s for s in d.singularities
                                       if lo < s.location < hi))
            res = integrate(f, sub, tol, tol_abs)
            total += res.value
            err += res.abs_error_estimate
            evals += res.evaluations
    return QuadResult(total, err, evals)


def integrate_oscillatory(f, a: float, omega: float,
                          tol: float = DEFAULT_REL_TOL,
                          max_half_periods: int = 4000) -> QuadResult:
    """Integral over (a, inf) of an integrand oscillating at frequency omega.

    Sums contributions between consecutive zeros of the oscillation and
    accelerates the (eventually alternating) partial sums with the Wynn
    epsilon algorithm.
    """
    nodes, weights = np.polynomial.legendre.leggauss(24)
    half = math.pi / omega
    partial = []
    s = 0.0
    evals = 0
    best = None
    best_err = math.inf
    for k in range(max_half_periods):
        lo = a + k * half
        hi = lo + half
        x = 0.5 * (lo + hi) + 0.5 * half * nodes
        s += 0.5 * half * float(np.sum(weights * f(x)))
        evals += x.size
        partial.append(s)
        if len(partial) >= 8 and len(partial) % 2 == 0:
            est, err = _wynn_epsilon(np.array(partial[-min(len(partial), 40):]))
            if err < best_err:
                best, best_err = est, err
            if best is not None and best_err <= tol * max(abs(best), 1e-300):
                return QuadResult(best, best_err, evals)
    if best is None:
        raise NonConvergence("oscillatory sum did not stabilize")
    if best_err > 1e3 * tol * max(abs(best), 1e-300):
        raise NonConvergence(f"oscillatory acceleration stalled at {best_err:.3e}")
    return QuadResult(best, best_err, evals)


def _wynn_epsilon(s: np.ndarray) -> tuple[float, float]:
    """Epsilon-algorithm acceleration of a partial-sum sequence."""
    n = s.size
    eps = np.zeros((n + 1, n))
    eps[1, :] = s
    last_even = s[-1]
    prev_even = s[-1]
    for k in range(2, n + 1):
        m = n - k + 1
        for j in range(m):
            denom = eps[k - 1, j + 1] - eps[k - 1, j]
            if denom == 0:
                denom = 1e-300
            eps[k, j] = eps[k - 2, j + 1] + 1.0 / denom
        if k % 2 == 1:
            prev_even = last_even
            last_even = eps[k - 1, m]
    col = n if n % 2 == 1 else n - 1
    best = eps[col, 0]
    prev = eps[col - 2, 1] if col >= 3 else s[-1]
    return float(best), abs(float(best) - float(prev))
