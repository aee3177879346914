"""Extremal function families and the numerical sharpness studies.

Each study computes the ratio R = |T f| / (bound * |f|) in grand-norm or
L_p form on an approach sequence toward the critical exponent, Richardson
extrapolates the limit, and compares it against the constant the theory
predicts.  The studies are numerical witnesses (lower-bound evidence with
controlled extrapolation), not proofs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from . import discrete
from .errors import BadParams, UnknownTheorem
from .extrapolate import richardson
from .gammatools import exp_scaled_upper_gamma
from .operators import (
    apply_hilbert,
    f_weight_bound,
    fourier_abs,
    fourier_weighted_bound,
    make_kernel,
    phi_closed_form,
    riesz_h,
    t_lambda_bound,
    t_lambda_lower_candidates,
    t_lambda_source_exponent,
    trig_series,
    u_alpha_bound_candidates,
    u_lambda_bound,
)
from .quad import Domain, Singularity, integrate, log_integrate, log_integrate_peaked
from .spaces import FunctionSpec, MeasureSpec, lebesgue, log_measure, power_measure

_NEG_INF = float("-inf")


def stirling_envelope(c: float, delta: float) -> float:
    """exp(-c) * (1 + c/delta)^delta: the finite-delta value of the witness
    ratios whose limit in delta is one.  Pure arithmetic."""
    return math.exp(-c) * (1.0 + c / delta) ** delta


# ---------------------------------------------------------------------------
# extremal families


@dataclass
class ExtremalFamily:
    identifier: str
    builder: Callable              # params -> FunctionSpec
    regime: str                    # which endpoint the family probes
    param_names: tuple = ("delta",)

    def __call__(self, *params) -> FunctionSpec:
        return self.builder(*params)


def g_delta(delta: float) -> FunctionSpec:
    """|log x|^delta on (0,1); |g|_p = Gamma(delta p + 1)^(1/p)."""
    if delta <= 0:
        raise BadParams("delta > 0")

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.abs(np.log(x)) ** delta
        return np.where((x > 0) & (x < 1), v, 0.0)

    return FunctionSpec(
        name=f"g_delta({delta})",
        domain=Domain(0.0, 1.0, (Singularity(0.0, "log-power", delta),)),
        eval_fn=ev,
        log_abs_neglog=lambda u: delta * np.log(np.asarray(u, dtype=float)),
        closed_form_log_lp=lambda p: math.lgamma(delta * p + 1.0) / p,
        canonical_measure=lebesgue(0.0, 1.0),
    )


def f_delta(delta: float) -> FunctionSpec:
    """x^(-1) (log x)^delta on (1, inf);
    |f|_p = Gamma(delta p + 1)^(1/p) / (p-1)^(delta + 1/p)."""
    if delta <= 0:
        raise BadParams("delta > 0")

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.log(x) ** delta / x
        return np.where(x > 1, v, 0.0)

    def closed(p):
        if p <= 1.0:
            from .errors import DivergentIntegral
            raise DivergentIntegral(f"diverges at p={p}")
        return (math.lgamma(delta * p + 1.0)
                - (delta * p + 1.0) * math.log(p - 1.0)) / p

    return FunctionSpec(
        name=f"f_delta({delta})",
        domain=Domain(1.0, math.inf),
        eval_fn=ev,
        log_abs_log=lambda w: delta * np.log(np.asarray(w, dtype=float))
        - np.asarray(w, dtype=float),
        closed_form_log_lp=closed,
        canonical_measure=lebesgue(0.0, math.inf),
    )


def f_alpha_delta(alpha: float, delta: float) -> FunctionSpec:
    """x^(-alpha) (log x)^delta on (1, inf);
    |f|_p = (alpha p - 1)^(-delta - 1/p) Gamma(delta p + 1)^(1/p)."""
    if not (0 < alpha < 1) or delta <= 0:
        raise BadParams("alpha in (0,1), delta > 0")

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = x ** (-alpha) * np.log(x) ** delta
        return np.where(x > 1, v, 0.0)

    def closed(p):
        if alpha * p <= 1.0:
            from .errors import DivergentIntegral
            raise DivergentIntegral(f"diverges at p={p}")
        return (math.lgamma(delta * p + 1.0)
                - (delta * p + 1.0) * math.log(alpha * p - 1.0)) / p

    return FunctionSpec(
        name=f"f_alpha_delta({alpha},{delta})",
        domain=Domain(1.0, math.inf),
        eval_fn=ev,
        log_abs_log=lambda w: -alpha * np.asarray(w, dtype=float)
        + delta * np.log(np.asarray(w, dtype=float)),
        closed_form_log_lp=closed,
        canonical_measure=lebesgue(0.0, math.inf),
    )


def g_alpha_delta(alpha: float, delta: float) -> FunctionSpec:
    """x^(-alpha) |log x|^delta on (0, 1);
    |g|_p = (1 - alpha p)^(-delta - 1/p) Gamma(delta p + 1)^(1/p)."""
    if not (0 < alpha < 1) or delta <= 0:
        raise BadParams("alpha in (0,1), delta > 0")

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = x ** (-alpha) * np.abs(np.log(x)) ** delta
        return np.where((x > 0) & (x < 1), v, 0.0)

    def closed(p):
        if alpha * p >= 1.0:
            from .errors import DivergentIntegral
            raise DivergentIntegral(f"diverges at p={p}")
        return (math.lgamma(delta * p + 1.0)
                - (delta * p + 1.0) * math.log(1.0 - alpha * p)) / p

    return FunctionSpec(
        name=f"g_alpha_delta({alpha},{delta})",
        domain=Domain(0.0, 1.0, (Singularity(0.0, "power", -alpha),)),
        eval_fn=ev,
        log_abs_neglog=lambda u: alpha * np.asarray(u, dtype=float)
        + delta * np.log(np.asarray(u, dtype=float)),
        closed_form_log_lp=closed,
        canonical_measure=lebesgue(0.0, 1.0),
    )


def u_lambda_f0(delta: float) -> FunctionSpec:
    """|log t|^(-delta) supported on (0, 1/e), measured against dt/t;
    |f|_{p,nu} = (p delta - 1)^(-1/p).

    Support stops at 1/e: on (1/e, 1) the profile |log t|^(-delta) is not
    p-integrable against dt/t for p > 1/delta, and the stated closed form
    is exactly the (0, 1/e) integral.
    """
    if not (0 < delta < 1):
        raise BadParams("delta in (0,1)")
    top = math.exp(-1.0)

    def ev(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            v = np.abs(np.log(t)) ** (-delta)
        return np.where((t > 0) & (t < top), v, 0.0)

    def closed(p):
        if p * delta <= 1.0:
            from .errors import DivergentIntegral
            raise DivergentIntegral(f"diverges at p={p}")
        return -math.log(p * delta - 1.0) / p

    def neglog(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            return np.where(u > 1.0, -delta * np.log(u), _NEG_INF)

    return FunctionSpec(
        name=f"u_lambda_f0({delta})",
        domain=Domain(0.0, top),
        eval_fn=ev,
        log_abs_neglog=neglog,
        closed_form_log_lp=closed,
        canonical_measure=log_measure(0.0, math.inf),
    )


def indicator_family(c: float, d: float) -> FunctionSpec:
    from .spaces import indicator

    return indicator(c, d)


def hilbert_indicator_image(c: float = 0.0, d: float = 1.0) -> FunctionSpec:
    """(1/pi) log|(x-c)/(x-d)|, the Hilbert transform of the unit indicator."""
    if d <= c:
        raise BadParams("d > c")

    def ev(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = np.log(np.abs((x - c) / (x - d))) / math.pi
        return v

    spec = FunctionSpec(
        name=f"v1({c},{d})",
        domain=Domain(-math.inf, math.inf),
        eval_fn=ev,
        log_lp_override=lambda p, m: _v1_log_lp(c, d, p),
    )
    return spec


def _v1_log_lp(c: float, d: float, p: float) -> float:
    """log |v1|_p, assembled from three symmetric regions.

    On the unit normalization xi = (x - c)/(d - c) the profile
    |log|xi/(xi-1)||/pi is symmetric both about xi = 1/2 and under
    xi -> 1 - xi reflected across the support, so the whole line reduces to
    (0, 1/2), (1, 2) and (2, inf) doubled; each region gets the coordinate
    that keeps the log spike or the 1/(pi x) tail exactly representable.
    """
    span = d - c
    logpi = math.log(math.pi)

    # (0, 1/2), doubled for (1/2, 1): u = -log xi, value u + log(1 - e^-u)
    def near_support(u):
        u = np.asarray(u, dtype=float)
        val = u + np.log1p(-np.exp(-u))
        with np.errstate(all="ignore"):
            lg = np.where(val > 0, np.log(val), _NEG_INF)
        return p * (lg - logpi) - u

    part_inner = log_integrate_peaked(
        near_support, Domain(math.log(2.0), math.inf), 1e-9).value

    # (1, 2), doubled for (-1, 0): s = -log(xi - 1), value log(e^s + 1)
    def near_edge(s):
        s = np.asarray(s, dtype=float)
        val = np.logaddexp(s, 0.0)
        return p * (np.log(val) - logpi) - s

    part_edge = log_integrate_peaked(near_edge, Domain(0.0, math.inf), 1e-9).value

    # (2, inf), doubled for (-inf, -1): w = log xi, value -log(1 - 1/xi);
    # beyond w = 30 the profile is e^(-w) to machine precision
    def far_tail(w):
        w = np.asarray(w, dtype=float)
        t = np.exp(-np.minimum(w, 700.0))
        with np.errstate(all="ignore"):
            lg = np.where(w < 30.0,
                          np.log(-np.log1p(-np.where(w < 30.0, t, 0.5))),
                          -w)
        return p * (lg - logpi) + w

    part_tail = log_integrate_peaked(
        far_tail, Domain(math.log(2.0), math.inf), 1e-9).value

    total = math.log(2.0) + float(logsumexp([part_inner, part_edge, part_tail])) \
        + math.log(span)
    return total / p


def zygmund_series(kind: str, delta: float, N: int = 10**6) -> FunctionSpec:
    """Partial sums of the slowly-converging trigonometric extremals:
    sin series sum n^(-1) (log n)^delta sin(nx) (odd) and its conjugate
    cos series (even), on (-pi, pi)."""
    coef = lambda k: np.where(k >= 2, np.log(np.maximum(k, 2.0)) ** delta / k, 0.0)

    def ev(x):
        return trig_series(coef, N, x, kind=kind)

    return FunctionSpec(
        name=f"zygmund_{kind}({delta},N={N})",
        domain=Domain(-math.pi, math.pi),
        eval_fn=ev,
    )


_FAMILIES = {
    "g_delta": ExtremalFamily("g_delta", g_delta, regime="p->inf"),
    "f_delta": ExtremalFamily("f_delta", f_delta, regime="p->1+"),
    "f_alpha_delta": ExtremalFamily("f_alpha_delta", f_alpha_delta,
                                    regime="p->1/alpha+",
                                    param_names=("alpha", "delta")),
    "g_alpha_delta": ExtremalFamily("g_alpha_delta", g_alpha_delta,
                                    regime="p->1/alpha-",
                                    param_names=("alpha", "delta")),
    "u_lambda_f0": ExtremalFamily("u_lambda_f0", u_lambda_f0,
                                  regime="p->1/delta+"),
    "indicator": ExtremalFamily("indicator", indicator_family,
                                regime="any", param_names=("c", "d")),
}


def extremal(identifier: str, *params) -> FunctionSpec:
    """Catalog lookup, e.g. extremal("g_delta", 2.0)."""
    if identifier == "f0_inv":
        from .spaces import inverse_beyond_one

        return inverse_beyond_one()
    if identifier not in _FAMILIES:
        raise BadParams(f"unknown extremal family {identifier!r}")
    return _FAMILIES[identifier](*params)


# ---------------------------------------------------------------------------
# ratio reports


@dataclass
class RatioRow:
    p: float
    param: float
    ratio: float
    envelope: Optional[float] = None


@dataclass
class RatioReport:
    theorem: str
    target: float
    rows: list = field(default_factory=list)
    extrapolated: dict = field(default_factory=dict)   # param -> (limit, unc)
    verdict: bool = False
    notes: str = ""

    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=_NEG_INF)

    def to_json(self) -> str:
        payload = {
            "theorem": self.theorem,
            "target": self.target,
            "rows": [vars(r) for r in self.rows],
            "extrapolated": {str(k): list(v) for k, v in self.extrapolated.items()},
            "verdict": bool(self.verdict),
            "notes": self.notes,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        lines = ["theorem,p,param,ratio,envelope,target,verdict"]
        for r in self.rows:
            env = "" if r.envelope is None else f"{r.envelope!r}"
            lines.append(f"{self.theorem},{r.p!r},{r.param!r},{r.ratio!r},"
                         f"{env},{self.target!r},{self.verdict}")
        return "\n".join(lines) + "\n"


def _approach_sequence(endpoint: float, direction: int, start_gap: float,
                       n: int = 5) -> list[float]:
    """Geometric approach p_k = endpoint + direction * start_gap / 2^k."""
    return [endpoint + direction * start_gap * 2.0 ** (-k) for k in range(n)]


# ---------------------------------------------------------------------------
# the individual theorem studies


def _tm_gdelta_log_ratio(delta: float, p: float) -> float:
    """log R(p) for the max-kernel operator on the log-power family, via the
    incomplete-gamma representation of the image."""

    def integrand(u):
        u = np.asarray(u, dtype=float)
        img = exp_scaled_upper_gamma(delta + 1.0, u) + u ** (delta + 1.0) / (delta + 1.0)
        return p * np.log(img) - u

    part1 = log_integrate_peaked(integrand, Domain(0.0, math.inf), 1e-10).value
    part2 = p * math.lgamma(delta + 1.0) - math.log(p - 1.0)
    log_num = np.logaddexp(part1, part2) / p
    log_den = math.log(phi_closed_form("max", p)) + math.lgamma(delta * p + 1.0) / p
    return float(log_num - log_den)


def verify_t3(deltas=(2.0, 4.0, 8.0), p_start: float = 32.0,
              n_points: int = 5) -> RatioReport:
    """Max-kernel witness: R(p, delta) should rise to the Stirling envelope
    as p -> inf and to one as delta -> inf."""
    report = RatioReport(theorem="T3", target=1.0)
    for delta in deltas:
        ps = [p_start * 2.0**k for k in range(n_points)]
        vals = [math.exp(_tm_gdelta_log_ratio(delta, p)) for p in ps]
        env = stirling_envelope(1.0, delta)
        for p, v in zip(ps, vals):
            report.rows.append(RatioRow(p=p, param=delta, ratio=v, envelope=env))
        # extrapolate in 1/p (values listed from the coarsest gap)
        limit, unc = richardson(vals)
        report.extrapolated[delta] = (limit, unc)
    report.verdict = all(
        lim <= 1.0 + 1e-6 and abs(lim - stirling_envelope(1.0, d)) <= 0.05
        for d, (lim, unc) in report.extrapolated.items())
    return report


def verify_t4(alpha: float = 0.5, deltas=(2.0, 4.0), gap0: float = 0.25,
              n_points: int = 5) -> RatioReport:
    """Interior-exponent kernel witness near p -> 1/alpha + 0, using the
    shifted-power kernel with matching z -> 0 exponent."""
    from .operators import image_function, trs_phi_closed
    from .spaces import lp_norm

    rr = 0.5
    ss = rr - (1.0 - alpha)  # kernel exponent alpha = 1 + s - r
    kernel = make_kernel("power_rs", rr, ss)
    m = lebesgue(0.0, math.inf)
    report = RatioReport(theorem="T4", target=1.0)
    endpoint = 1.0 / alpha
    for delta in deltas:
        f = f_alpha_delta(alpha, delta)
        img = image_function(kernel, f)
        vals = []
        ps = _approach_sequence(endpoint, +1, gap0, n_points)
        for p in ps:
            log_num = img.log_lp_override(p, m)
            log_den = math.log(trs_phi_closed(rr, ss, p)) + f.closed_form_log_lp(p)
            v = math.exp(log_num - log_den)
            vals.append(v)
            report.rows.append(RatioRow(p=p, param=delta, ratio=v,
                                        envelope=stirling_envelope(1.0, delta)))
        limit, unc = richardson(vals)
        report.extrapolated[delta] = (limit, unc)
    report.verdict = all(lim <= 1.0 + 1e-6 for lim, _ in report.extrapolated.values())
    return report


def _t_lambda_image_log_lp(lam: float, p: float) -> float:
    """log |T_lambda f0|_p for f0 = x^(-1) 1_(x>1), stable at p near 1/lam.

    With A(eps) = integral over (eps, inf) of dz/(z (1+z)^lam) the image at
    x = e^w is x^(-lam) A(1/x); A(eps) = -log eps + C - E(eps) with E a
    power series at zero.
    """
    # C = integral_0^1 ((1+z)^(-lam) - 1)/z dz + integral_1^inf dz/(z(1+z)^lam)
    def b1(z):
        return ((1.0 + z) ** (-lam) - 1.0) / z

    C1 = integrate(b1, Domain(0.0, 1.0), 1e-12).value
    C2 = integrate(lambda z: 1.0 / (z * (1.0 + z) ** lam),
                   Domain(1.0, math.inf), 1e-12).value
    C = C1 + C2

    # E(eps) = sum_{k>=1} binom(-lam, k) eps^k / k, |eps| < 1
    coefs = []
    c = 1.0
    for k in range(1, 60):
        c *= (-lam - k + 1.0) / k
        coefs.append(c / k)

    def log_u(w):
        """log u(e^w) over the whole line."""
        w = np.asarray(w, dtype=float)
        out = np.empty_like(w)
        big = w >= 0.7
        if big.any():
            eps = np.exp(-w[big])
            E = np.zeros_like(eps)
            powe = eps.copy()
            for ck in coefs:
                E += ck * powe
                powe *= eps
            out[big] = -lam * w[big] + np.log(w[big] + C - E)
        small = ~big
        if small.any():
            for i in np.nonzero(small)[0]:
                x = math.exp(float(w[i]))
                val = integrate(lambda y: 1.0 / (y * (x + y) ** lam),
                                Domain(1.0, math.inf), 1e-11).value
                out[i] = math.log(val)
        return out

    def integrand(w):
        w = np.asarray(w, dtype=float)
        return p * log_u(w) + w

    parts = [log_integrate_peaked(integrand, Domain(-math.inf, 0.0), 1e-9).value,
             log_integrate_peaked(integrand, Domain(0.0, math.inf), 1e-9).value]
    return float(logsumexp(parts)) / p


def verify_t5(lam: float = 0.5, gap0: float = 0.08, n_points: int = 5) -> RatioReport:
    """Shifted-power operator on x^(-1) 1_(x>1): the ratio against the
    sine-constant bound approaches lam * Gamma(1 + 1/lam)^lam as the image
    exponent drops to 1/lam."""
    from .spaces import inverse_beyond_one

    f = inverse_beyond_one()
    gamma_branch, entropy_branch = t_lambda_lower_candidates(lam)
    report = RatioReport(
        theorem="T5", target=gamma_branch,
        notes="entropy-branch candidate exceeds one and is reported only")
    endpoint = 1.0 / lam
    ps = _approach_sequence(endpoint, +1, gap0, n_points)
    vals = []
    for p in ps:
        log_num = _t_lambda_image_log_lp(lam, p)
        q = t_lambda_source_exponent(lam, p)
        log_den = math.log(t_lambda_bound(lam, p)) + f.closed_form_log_lp(q)
        v = math.exp(log_num - log_den)
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=lam, ratio=v))
    limit, unc = richardson(vals)
    report.extrapolated[lam] = (limit, unc)
    report.verdict = limit >= gamma_branch - 0.01 and report.max_ratio() <= 1.0 + 1e-6
    report.notes += f"; entropy branch e^h = {entropy_branch:.6f}"
    return report


def _u_lambda_image_log_lp(lam: float, delta: float, p: float) -> float:
    """log |U_lambda f0|_{p, dt/t} via the shifted-tail representation
    U(e^(-u)) = integral over (0, inf) of e^(-(1-lam) y) (u + y)^(-delta) dy
    for u >= 1, and U(t) = t^(lam-1) * const on the flat side.

    The outer integral runs in v = log u: near the critical exponent its
    mass spreads out to u ~ exp(1/(p delta - 1))."""
    rate = 1.0 - lam
    # constant side: t > 1/e, U(t) = t^(lam-1) * C with
    # C = integral over (1, inf) of e^(-rate v) v^(-delta) dv
    C = integrate(lambda v: np.exp(-rate * v) * v ** (-delta),
                  Domain(1.0, math.inf), 1e-12).value
    flat = p * math.log(C) + p * rate - math.log(p * rate)

    # inner integral on a fixed dyadic Gauss grid
    nodes, weights = np.polynomial.legendre.leggauss(24)
    edges = [0.0]
    top = 60.0 / rate
    width = min(1.0, top / 20)
    while edges[-1] < top:
        edges.append(min(edges[-1] + width, top))
        width *= 1.6
    ys = []
    ws = []
    for a, b in zip(edges[:-1], edges[1:]):
        ys.append(0.5 * (a + b) + 0.5 * (b - a) * nodes)
        ws.append(0.5 * (b - a) * weights)
    ys = np.concatenate(ys)
    ws = np.concatenate(ws)
    wexp = ws * np.exp(-rate * ys)
    corr = float(np.sum(ys * wexp))  # first moment, for the far asymptote

    def log_U_of_v(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty_like(v)
        near = v <= 30.0
        if near.any():
            u = np.exp(v[near])
            vals = (u[:, None] + ys[None, :]) ** (-delta)
            out[near] = np.log(vals @ wexp)
        far = ~near
        if far.any():
            # (u+y)^(-delta) = u^(-delta) (1 - delta y/u + ...)
            out[far] = -delta * v[far] \
                + math.log(1.0 / rate) \
                + np.log1p(-delta * corr * rate * np.exp(-v[far]))
        return out

    def integrand(v):
        v = np.asarray(v, dtype=float)
        return p * log_U_of_v(v) + v

    tail = log_integrate_peaked(integrand, Domain(0.0, math.inf), 1e-9).value
    return float(np.logaddexp(flat, tail)) / p


def verify_t7(lam: float = 0.5, delta: float = 0.6, gap0: float = 0.0512,
              n_points: int = 5, probe_gap: float = 1e-4) -> RatioReport:
    """Averaging operator on the multiplicative half line: the ratio against
    1/(1-lam) approaches one as p drops to 1/delta."""
    f = u_lambda_f0(delta)
    report = RatioReport(theorem="T7", target=1.0)
    endpoint = 1.0 / delta
    bound = u_lambda_bound(lam)
    ps = _approach_sequence(endpoint, +1, gap0, n_points) + [endpoint + probe_gap]
    vals = []
    for p in ps:
        log_num = _u_lambda_image_log_lp(lam, delta, p)
        log_den = math.log(bound) + f.closed_form_log_lp(p)
        v = math.exp(log_num - log_den)
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=delta, ratio=v))
    limit, unc = richardson(vals[:n_points])
    report.extrapolated[delta] = (limit, unc)
    probe = vals[-1]
    report.verdict = probe >= 0.99 and report.max_ratio() <= 1.0 + 1e-6
    report.notes = f"ratio at endpoint + {probe_gap:g}: {probe:.6f}"
    return report


def u_alpha_image_log_lp(alpha: float, delta: float, p: float) -> float:
    """Closed form: |U_alpha f_Delta|_p with the image
    (delta+1)^(-1) x^(-alpha) (log x)^(delta+1) on (1, inf)."""
    if alpha * p <= 1.0:
        from .errors import DivergentIntegral
        raise DivergentIntegral(f"diverges at p={p}")
    return (math.lgamma((delta + 1.0) * p + 1.0)
            - ((delta + 1.0) * p + 1.0) * math.log(alpha * p - 1.0)) / p \
        - math.log(delta + 1.0)


def verify_t8(alpha: float = 0.5, deltas=(2.0, 6.0), gap0: float = 0.25,
              n_points: int = 5) -> RatioReport:
    """Weighted Hardy average: with the reciprocal-gap constant the ratio
    approaches the Stirling envelope; the (alpha - 1/p)^(-alpha) candidate
    blows up and is reported as rejected."""
    report = RatioReport(theorem="T8", target=1.0)
    endpoint = 1.0 / alpha
    rejected_max = 0.0
    for delta in deltas:
        f = f_alpha_delta(alpha, delta)
        ps = _approach_sequence(endpoint, +1, gap0, n_points)
        vals = []
        for p in ps:
            log_num = u_alpha_image_log_lp(alpha, delta, p)
            cand_alpha, cand_one = u_alpha_bound_candidates(alpha, p, "upper")
            log_den = math.log(cand_one) + f.closed_form_log_lp(p)
            v = math.exp(log_num - log_den)
            vals.append(v)
            report.rows.append(RatioRow(p=p, param=delta, ratio=v,
                                        envelope=stirling_envelope(1.0, delta)))
            rejected = math.exp(log_num - math.log(cand_alpha)
                                - f.closed_form_log_lp(p))
            rejected_max = max(rejected_max, rejected)
        limit, unc = richardson(vals)
        report.extrapolated[delta] = (limit, unc)
    report.verdict = all(lim <= 1.0 + 1e-6 for lim, _ in report.extrapolated.values())
    report.notes = (f"(alpha-1/p)^(-alpha) candidate reaches ratio "
                    f"{rejected_max:.3f}; rejected by the data")
    return report


def f_weight_image_log_lp(r: float, delta: float, p: float) -> float:
    """Closed form: the integration operator sends the log-power profile to
    |log x|^(delta+1)/(delta+1) on (0,1); weighted norm against x^(-r) dx."""
    if r >= 1.0:
        raise BadParams("sharpness study runs the r < 1 branch")
    return (math.lgamma((delta + 1.0) * p + 1.0)
            - ((delta + 1.0) * p + 1.0) * math.log(1.0 - r)) / p \
        - math.log(delta + 1.0)


def g_delta_weighted_log_lp(r: float, delta: float, p: float) -> float:
    """|g_delta|_{p,r}^p = Gamma(delta p + 1)/|1-r|^(p delta + 1)."""
    return (math.lgamma(delta * p + 1.0)
            - (delta * p + 1.0) * math.log(abs(1.0 - r))) / p


def verify_t9(r: float = 0.0, deltas=(2.0, 4.0, 8.0), p_start: float = 32.0,
              n_points: int = 5) -> RatioReport:
    """Weighted integration operator: ratio against p/|r-1| rises to the
    Stirling envelope as p -> inf."""
    report = RatioReport(theorem="T9", target=1.0)
    for delta in deltas:
        ps = [p_start * 2.0**k for k in range(n_points)]
        vals = []
        for p in ps:
            log_num = f_weight_image_log_lp(r, delta, p)
            log_den = math.log(f_weight_bound(r, p)) \
                + g_delta_weighted_log_lp(r, delta, p)
            v = math.exp(log_num - log_den)
            vals.append(v)
            report.rows.append(RatioRow(p=p, param=delta, ratio=v,
                                        envelope=stirling_envelope(1.0, delta)))
        limit, unc = richardson(vals)
        report.extrapolated[delta] = (limit, unc)
    report.verdict = all(
        lim <= 1.0 + 1e-6 and abs(lim - stirling_envelope(1.0, d)) <= 0.05
        for d, (lim, unc) in report.extrapolated.items())
    return report


def _fourier_f0_weighted_log_lp(p: float) -> float:
    """log of the weighted norm of the unitary transform of x^(-1) 1_(x>1):
    |F(t)| = (2 pi)^(-1/2) hypot(Ci t, pi/2 - Si t), weight |t|^(p-2)."""
    from scipy.special import sici

    euler_gamma = 0.5772156649015329

    def integrand(w):
        # |F| is even in t, so the half line t = e^w suffices; below
        # t = 1e-8 use Ci(t) = gamma + log(t) + O(t^2) directly in w
        w = np.asarray(w, dtype=float)
        t = np.exp(np.clip(w, -700, 700))
        with np.errstate(all="ignore"):
            si, ci = sici(t)
        small = w < math.log(1e-8)
        ci = np.where(small, euler_gamma + w, ci)
        si = np.where(small, 0.0, si)
        mag = np.hypot(ci, math.pi / 2.0 - si) / math.sqrt(2.0 * math.pi)
        with np.errstate(all="ignore"):
            lg = np.where(mag > 0, np.log(mag), _NEG_INF)
        return p * lg + (p - 1.0) * w

    res_lo = log_integrate_peaked(integrand, Domain(-math.inf, 0.0), 1e-9)
    # the t > 1 branch carries the residual sici oscillation; its share of
    # the total is O(p-1), so a looser internal tolerance costs nothing
    res_hi = log_integrate_peaked(integrand, Domain(0.0, math.log(1e8)), 2e-6)
    # |F(t)| <= sqrt(2/pi)/t for large t: beyond 1e8 the tail of the weighted
    # integral is below (2/pi)^(p/2) * 1e8^(-1) and never matters at p <= 2
    total = float(np.logaddexp(res_lo.value, res_hi.value)) + math.log(2.0)
    return total / p


def verify_t10(gap0: float = 0.08, n_points: int = 5) -> RatioReport:
    """Fourier weighted-norm witness near p -> 1+.

    With the unitary normalization the measured limit sits near
    2/sqrt(2 pi) = 0.798 rather than the nominal one; the report records
    the measured constant (the plain normalization would violate its own
    bound, see the Plancherel check at p = 2)."""
    from .spaces import inverse_beyond_one

    f = inverse_beyond_one()
    report = RatioReport(theorem="T10", target=1.0)
    ps = _approach_sequence(1.0, +1, gap0, n_points)
    vals = []
    for p in ps:
        log_num = _fourier_f0_weighted_log_lp(p)
        log_den = math.log(fourier_weighted_bound(p)) + f.closed_form_log_lp(p)
        v = math.exp(log_num - log_den)
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=1.0, ratio=v))
    limit, unc = richardson(vals)
    report.extrapolated[1.0] = (limit, unc)
    report.verdict = report.max_ratio() <= 1.0 + 1e-6
    report.notes = f"measured limit {limit:.4f}; 2/sqrt(2 pi) = {2/math.sqrt(2*math.pi):.4f}"
    return report


def verify_t11_p1(gap0: float = 0.064, n_points: int = 5) -> RatioReport:
    """Hilbert transform of the unit indicator: (p-1) |v1|_p -> 2/pi."""
    report = RatioReport(theorem="T11(p->1)", target=2.0 / math.pi)
    ps = _approach_sequence(1.0, +1, gap0, n_points)
    vals = []
    for p in ps:
        lv = _v1_log_lp(0.0, 1.0, p)
        v = (p - 1.0) * math.exp(lv)
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=0.0, ratio=v))
    limit, unc = richardson(vals)
    report.extrapolated[0.0] = (limit, unc)
    report.verdict = 0.6302 <= limit <= 0.6430
    return report


def periodic_extremal_log_norm(kind: str, delta: float, p: float,
                               N: int = 10**6, u_cut: float = 8.0,
                               _cache: dict = {}) -> float:
    """log L_p norm on (-pi, pi) of the trigonometric extremal partial sum.

    Measured part: |x| in (e^(-u_cut), pi) from the N-term partial sums
    (their truncation error at x >= e^(-8) is a fraction of a percent for
    N = 1e6).  Continuation part: below e^(-u_cut) the partial sum has not
    converged, so the Zygmund small-x profile continues the integrand:
    0.5 pi u^delta for the sine series, u^(delta+1)/(delta+1) for the
    conjugate cosine series.
    """
    key = (kind, delta, N, u_cut)
    if key not in _cache:
        coef = lambda k: np.where(k >= 2, np.log(np.maximum(k, 2.0)) ** delta / k, 0.0)
        # fixed composite Gauss grid on u = -log|x| in (-log pi, u_cut)
        nodes, weights = np.polynomial.legendre.leggauss(24)
        edges = np.linspace(-math.log(math.pi), u_cut, 65)
        us = []
        ws = []
        for a, b in zip(edges[:-1], edges[1:]):
            us.append(0.5 * (a + b) + 0.5 * (b - a) * nodes)
            ws.append(0.5 * (b - a) * weights)
        us = np.concatenate(us)
        ws = np.concatenate(ws)
        xs = np.exp(-us)
        vals = np.abs(trig_series(coef, N, xs, kind=kind))
        _cache[key] = (us, ws, vals)
    us, ws, vals = _cache[key]
    with np.errstate(all="ignore"):
        logs = np.where(vals > 0, p * np.log(vals), _NEG_INF) - us + np.log(ws)
    measured = float(logsumexp(logs[np.isfinite(logs)]))

    if kind == "sin":
        def cont(u):
            u = np.asarray(u, dtype=float)
            return p * (math.log(0.5 * math.pi) + delta * np.log(u)) - u
    else:
        def cont(u):
            u = np.asarray(u, dtype=float)
            return p * ((delta + 1.0) * np.log(u) - math.log(delta + 1.0)) - u

    continuation = log_integrate_peaked(cont, Domain(u_cut, math.inf), 3e-8).value
    # both half lines contribute equally (odd/even symmetry)
    return (float(np.logaddexp(measured, continuation)) + math.log(2.0)) / p


def verify_t11_pinf(delta: float = 1.0, ps=(8.0, 16.0, 32.0),
                    N: int = 10**6) -> RatioReport:
    """Periodic side: ratio of the conjugate-series norm to h(p) times the
    sine-series norm.

    The honest per-exponent limit of this ratio is the Stirling envelope
    e^(-1) (1 + 1/delta)^delta, which exceeds 2/pi already at delta = 1;
    the nominal 2/pi target cannot be met by these witnesses (see notes).
    """
    report = RatioReport(theorem="T11(p->inf)", target=2.0 / math.pi)
    vals = []
    for p in ps:
        log_num = periodic_extremal_log_norm("cos", delta, p, N)
        log_den = math.log(riesz_h(p)) + periodic_extremal_log_norm("sin", delta, p, N)
        v = math.exp(log_num - log_den)
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=delta, ratio=v,
                                    envelope=stirling_envelope(1.0, delta)))
    increasing = all(b > a for a, b in zip(vals[:-1], vals[1:]))
    cap = (2.0 / math.pi) * 1.02
    report.verdict = increasing and all(v <= cap for v in vals)
    report.notes = (f"values {['%.4f' % v for v in vals]}; "
                    f"per-p limit = Stirling envelope {stirling_envelope(1.0, delta):.4f} "
                    f"> 2/pi; see ledger on the nominal target")
    return report


def verify_t12(delta: float = 2.0, ps=(1.1, 1.3)) -> RatioReport:
    """Discrete/continuous coherence: the max-kernel ratio on the sampled
    sequence tracks the continuous ratio at matched exponents."""
    report = RatioReport(theorem="T12", target=1.0)
    x = discrete.power_log_sequence(1.0, delta)
    y = discrete.max_op_image(delta)
    f = f_delta(delta)
    from .operators import image_function
    from .spaces import lp_norm

    kernel = make_kernel("max")
    img = image_function(kernel, f)
    m = lebesgue(0.0, math.inf)
    worst = 0.0
    for p in ps:
        bound = phi_closed_form("max", p)
        r_disc = math.exp(discrete.lp_seq_norm(y, p) - math.log(bound)
                          - discrete.lp_seq_norm(x, p))
        r_cont = math.exp(img.log_lp_override(p, m) - math.log(bound)
                          - f.closed_form_log_lp(p))
        rel = abs(r_disc - r_cont) / r_cont
        worst = max(worst, rel)
        report.rows.append(RatioRow(p=p, param=delta, ratio=r_disc,
                                    envelope=r_cont))
    report.verdict = worst <= 0.05
    report.notes = f"max discrete/continuous deviation {worst:.4f}"
    return report


def verify_t13(deltas=(1.0, 2.0), ps=(1.25, 1.5, 2.0, 3.0)) -> RatioReport:
    """Triangular-matrix bound p/(p-L): empirical ratios for a selection of
    weight sequences (no attainment asserted; the statement carries no
    proof)."""
    report = RatioReport(theorem="T13", target=1.0)
    cases = [
        ("cesaro", lambda k: np.ones_like(k), 1.0),
        ("lambda=k", lambda k: np.asarray(k, dtype=float), 0.5),
    ]
    ok = True
    for name, lam, L in cases:
        A = discrete.bennett_matrix(lam, name)
        Lhat, idx, mono, _ = discrete.bennett_L(lam, N=10**4)
        if abs(Lhat - L) > 1e-12:
            ok = False
        for delta in deltas:
            x = discrete.power_log_sequence(1.0, delta)
            for p in ps:
                if p <= L:
                    continue
                # finite-section ratio: exact rows up to a cap
                n_cap = 4096
                ys = np.array([discrete.apply_matrix(A, x, n)
                               for n in range(1, n_cap + 1)])
                num = float(np.sum(np.abs(ys) ** p)) ** (1.0 / p)
                den = math.exp(discrete.lp_seq_norm(x, p))
                ratio = num / (p / (p - L) * den)
                report.rows.append(RatioRow(p=p, param=delta, ratio=ratio))
                if ratio > 1.0 + 1e-6:
                    ok = False
    report.verdict = ok
    report.notes = "finite-section lower bounds only"
    return report


def verify_t14(alpha: float = 0.5, delta: float = 6.0, gap0: float = 0.256,
               n_points: int = 5, kind: str = "power_mean") -> RatioReport:
    """Power-mean matrix witness near p -> 1/alpha + 0."""
    report = RatioReport(theorem="T14", target=1.0)
    x = discrete.power_log_sequence(alpha, delta)
    if kind == "power_mean":
        y = discrete.power_mean_image(alpha, delta)
    else:
        y = discrete.power_ratio_image(alpha, delta)
    endpoint = 1.0 / alpha
    ps = _approach_sequence(endpoint, +1, gap0, n_points)
    vals = []
    env = stirling_envelope(1.0, delta)
    for p in ps:
        bound = alpha * p / (alpha * p - 1.0)
        v = math.exp(discrete.lp_seq_norm(y, p) - math.log(bound)
                     - discrete.lp_seq_norm(x, p))
        vals.append(v)
        report.rows.append(RatioRow(p=p, param=delta, ratio=v, envelope=env))
    limit, unc = richardson(vals)
    report.extrapolated[delta] = (limit, unc)
    report.verdict = limit >= 0.9 * env and report.max_ratio() <= 1.0 + 1e-6
    return report


_THEOREMS = {
    "T3": verify_t3,
    "T4": verify_t4,
    "T5": verify_t5,
    "T7": verify_t7,
    "T8": verify_t8,
    "T9": verify_t9,
    "T10": verify_t10,
    "T11": None,  # dispatched by side below
    "T12": verify_t12,
    "T13": verify_t13,
    "T14": verify_t14,
}


def verify_theorem(theorem_id: str, **config) -> RatioReport:
    """Front door used by the CLI: dispatches the witness study for a
    theorem id; T11 takes side="p1" or side="pinf"."""
    if theorem_id == "T11":
        side = config.pop("side", "p1")
        if side == "p1":
            return verify_t11_p1(**config)
        if side == "pinf":
            return verify_t11_pinf(**config)
        raise UnknownTheorem(f"T11 side {side!r}")
    fn = _THEOREMS.get(theorem_id)
    if fn is None:
        raise UnknownTheorem(f"no study for {theorem_id!r}")
    return fn(**config)
