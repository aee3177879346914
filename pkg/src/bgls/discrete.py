"""Sequence-space counterpart: l_p norms with certified truncation,
lower-triangular averaging matrices and the discrete operator catalog.

Infinite sums are split into an exact head and a tail bracketed by
integrals of monotone envelopes, so every norm carries a certified
two-sided error.  Near critical exponents the tail integral holds almost
all of the mass; it is evaluated in log coordinates through the quadrature
engine, which keeps sums whose effective support sits at k ~ exp(1e4)
perfectly tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import DivergentIntegral, DivergentSum, NoCertificate
from .quad import Domain, log_integrate_peaked

_NEG_INF = float("-inf")


@dataclass
class DecayCertificate:
    """Two-sided monotone envelopes for the terms beyond ``monotone_from``.

    ``log_env_lo`` and ``log_env_hi`` take w = log t for real t and must
    satisfy env_lo(k) <= |x(k)| <= env_hi(k) for k >= monotone_from, with
    both envelopes nonincreasing there.
    """

    monotone_from: int
    log_env_lo: Callable
    log_env_hi: Callable


@dataclass
class SequenceSpec:
    """Sequence x(k), k >= 1, with enough structure for certified norms."""

    name: str
    eval_fn: Callable                      # int array -> values
    certificate: Optional[DecayCertificate] = None
    finite_support: Optional[int] = None
    closed_form_log_lp: Optional[Callable] = None
    sup_abs: Optional[float] = None

    def __call__(self, k):
        return np.asarray(self.eval_fn(np.asarray(k)), dtype=float)

    @property
    def cache_key(self):
        return self.name


def _log_tail_integral(log_env, p: float, a: float, tol: float) -> float:
    """log of the integral over (a, inf) of env(t)^p dt, in w = log t."""

    def integrand(w):
        return p * np.asarray(log_env(w), dtype=float) + w

    res = log_integrate_peaked(integrand, Domain(math.log(a), math.inf), tol)
    return res.value


def _log_head_sum(x: SequenceSpec, p: float, n: int,
                  chunk: int = 1 << 20) -> float:
    parts = []
    start = 1
    while start <= n:
        stop = min(start + chunk - 1, n)
        ks = np.arange(start, stop + 1)
        with np.errstate(all="ignore"):
            vals = np.abs(x(ks))
            logs = np.where(vals > 0, p * np.log(vals), _NEG_INF)
        finite = logs[np.isfinite(logs)]
        if finite.size:
            parts.append(float(logsumexp(finite)))
        start = stop + 1
    return float(logsumexp(parts)) if parts else _NEG_INF


def lp_seq_norm(x: SequenceSpec, p: float, tol: float = 1e-6,
                n_cap: int = 10**8) -> float:
    """log of the l_p norm, certified by envelope-integral tail brackets."""
    lo, hi, _ = lp_seq_norm_bracket(x, p, tol, n_cap)
    return 0.5 * (lo + hi)


def lp_seq_norm_bracket(x: SequenceSpec, p: float, tol: float = 1e-6,
                        n_cap: int = 10**8) -> tuple[float, float, float]:
    """(log lower bound, log upper bound, achieved width) for log |x|_p."""
    if p == math.inf:
        v = _seq_sup(x)
        return v, v, 0.0
    if p < 1.0:
        raise ValueError("p >= 1 required")
    if x.finite_support is not None:
        head = _log_head_sum(x, p, x.finite_support)
        return head / p, head / p, 0.0
    if x.certificate is None:
        raise NoCertificate(f"{x.name}: no decay certificate")
    cert = x.certificate

    n = max(4096, cert.monotone_from)
    while True:
        head = _log_head_sum(x, p, n)
        try:
            tail_hi = _log_tail_integral(cert.log_env_hi, p, n, 3e-8)
            tail_lo = _log_tail_integral(cert.log_env_lo, p, n + 1, 3e-8)
        except DivergentIntegral as exc:
            raise DivergentSum(f"{x.name}: |x|_{p} = inf") from exc
        # unimodal-envelope slack: the sum-vs-integral comparison can be
        # off by one term; widen the bracket by the largest envelope term
        ws = math.log(n) + np.geomspace(1e-9, 2e6, 200)
        with np.errstate(all="ignore"):
            probe = p * np.asarray(cert.log_env_hi(ws), dtype=float)
        probe = probe[np.isfinite(probe)]
        if probe.size:
            max_term = float(probe.max())
            tail_hi = float(np.logaddexp(tail_hi, max_term))
            if tail_lo > max_term:
                tail_lo = tail_lo + math.log1p(-math.exp(max_term - tail_lo))
            else:
                tail_lo = _NEG_INF
        total_hi = float(logsumexp([head, tail_hi]))
        total_lo = float(logsumexp([head, tail_lo]))
        width = total_hi - total_lo
        if width <= tol * p:
            return total_lo / p, total_hi / p, width / p
        if n >= n_cap:
            raise NoCertificate(
                f"{x.name}: bracket width {width:.2e} above tol at n_cap={n_cap}")
        n *= 4


def _seq_sup(x: SequenceSpec) -> float:
    n = x.finite_support or (
        (x.certificate.monotone_from if x.certificate else 0) + 10_000)
    n = max(n, 1000)
    vals = np.abs(x(np.arange(1, n + 1)))
    best = float(vals.max())
    return math.log(best) if best > 0 else _NEG_INF


def seq_tail_count(x: SequenceSpec, eps: float) -> int:
    """Exact count of k with |x(k)| > eps (monotone certificate required
    beyond the head window)."""
    if eps < 0:
        raise ValueError("eps >= 0 required")
    if x.finite_support is not None:
        vals = np.abs(x(np.arange(1, x.finite_support + 1)))
        return int(np.sum(vals > eps))
    if x.certificate is None:
        raise NoCertificate(f"{x.name}: no decay certificate")
    if eps == 0.0:
        raise DivergentSum("infinitely many nonzero terms")
    m0 = max(x.certificate.monotone_from, 1)
    head_vals = np.abs(x(np.arange(1, m0 + 1)))
    count = int(np.sum(head_vals > eps))
    # |x| is nonincreasing beyond m0: find the last index above eps
    lo = m0
    if abs(float(x(np.array([m0 + 1]))[0])) <= eps:
        return count
    hi = 2 * m0 + 2
    while abs(float(x(np.array([hi]))[0])) > eps:
        lo = hi
        hi *= 2
        if hi > 10**18:
            raise DivergentSum("level set appears infinite")
    lo = max(lo, m0 + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if abs(float(x(np.array([mid]))[0])) > eps:
            lo = mid
        else:
            hi = mid
    return count + (lo - m0)


def seq_tail_function(x: SequenceSpec, head: int = 1200):
    """TailFunction (staircase + envelope) for a monotone-certified sequence."""
    from .spaces import TailFunction

    ks = np.arange(1, head + 1)
    vals = np.abs(x(ks))
    if not np.all(np.diff(vals) < 0):
        raise NoCertificate(f"{x.name}: head not strictly decreasing")

    def eval_fn(eps):
        eps = np.atleast_1d(np.asarray(eps, dtype=float))
        return np.array([seq_tail_count(x, e) if e > 0 else math.inf
                         for e in eps])

    return TailFunction(eval_fn=eval_fn, sup_abs=float(vals.max()),
                        jumps=tuple(vals), counts=tuple(range(1, head)))


# ---------------------------------------------------------------------------
# sequence constructors


def power_sequence(alpha: float) -> SequenceSpec:
    """x(k) = k^(-alpha)."""

    def ev(k):
        k = np.asarray(k, dtype=float)
        return k ** (-alpha)

    cert = DecayCertificate(
        monotone_from=1,
        log_env_lo=lambda w: -alpha * np.asarray(w, dtype=float),
        log_env_hi=lambda w: -alpha * np.asarray(w, dtype=float),
    )
    return SequenceSpec(name=f"pow({alpha})", eval_fn=ev, certificate=cert,
                        sup_abs=1.0)


def power_log_sequence(alpha: float, delta: float) -> SequenceSpec:
    """x(k) = k^(-alpha) (log k)^delta, the endpoint witness family."""

    def ev(k):
        k = np.asarray(k, dtype=float)
        with np.errstate(all="ignore"):
            out = k ** (-alpha) * np.where(k > 1, np.log(k), 0.0) ** delta
        return np.where(k >= 1, out, 0.0)

    m0 = int(math.ceil(math.exp(delta / alpha))) + 2 if alpha > 0 else 10

    def env(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(all="ignore"):
            return -alpha * w + delta * np.log(w)

    cert = DecayCertificate(monotone_from=max(m0, 3),
                            log_env_lo=env, log_env_hi=env)
    return SequenceSpec(name=f"powlog({alpha},{delta})", eval_fn=ev,
                        certificate=cert)


def unit_sequence(index: int = 1) -> SequenceSpec:
    def ev(k):
        k = np.asarray(k)
        return (k == index).astype(float)

    return SequenceSpec(name=f"e{index}", eval_fn=ev, finite_support=index,
                        sup_abs=1.0)


# ---------------------------------------------------------------------------
# triangular matrices


@dataclass
class TriangularMatrixSpec:
    """Lower-triangular averaging matrix.

    kinds: ``bennett`` with a(n,k) = lambda(k)/Lambda(n); ``power_mean``
    with a(n,k) = n^(-alpha) (k^alpha - (k-1)^alpha); ``power_ratio`` with
    a(n,k) = k^(alpha-1) / sum_{i<=n} i^(alpha-1); ``explicit`` rows.
    """

    kind: str
    name: str
    lam: Optional[Callable] = None       # k-array -> lambda(k)
    alpha: Optional[float] = None
    rows: Optional[list] = None

    def row(self, n: int) -> np.ndarray:
        ks = np.arange(1, n + 1, dtype=float)
        if self.kind == "bennett":
            lam = np.asarray(self.lam(ks), dtype=float)
            if lam[0] <= 0 or np.any(lam < 0):
                raise ValueError("need lambda(1) > 0 and lambda(k) >= 0")
            return lam / lam.sum()
        if self.kind == "power_mean":
            a = self.alpha
            return n ** (-a) * (ks**a - (ks - 1.0) ** a)
        if self.kind == "power_ratio":
            a = self.alpha
            w = ks ** (a - 1.0)
            return w / w.sum()
        if self.kind == "explicit":
            r = np.zeros(n)
            src = np.asarray(self.rows[n - 1], dtype=float)
            r[: src.size] = src[:n]
            return r
        raise ValueError(f"unknown matrix kind {self.kind!r}")


def cesaro_matrix() -> TriangularMatrixSpec:
    return TriangularMatrixSpec("bennett", "cesaro", lam=lambda k: np.ones_like(k))


def bennett_matrix(lam: Callable, name: str) -> TriangularMatrixSpec:
    return TriangularMatrixSpec("bennett", name, lam=lam)


def power_mean_matrix(alpha: float) -> TriangularMatrixSpec:
    return TriangularMatrixSpec("power_mean", f"power_mean({alpha})", alpha=alpha)


def power_ratio_matrix(alpha: float) -> TriangularMatrixSpec:
    return TriangularMatrixSpec("power_ratio", f"power_ratio({alpha})", alpha=alpha)


def apply_matrix(A: TriangularMatrixSpec, x: SequenceSpec, n: int) -> float:
    """(T_A x)(n), an exact finite sum for triangular kinds."""
    row = A.row(n)
    vals = x(np.arange(1, n + 1))
    return float(np.dot(row, vals))


def bennett_L(lam: Callable, N: int = 10**5):
    """Running sup of Lambda(n+1)/lambda(n+1) - Lambda(n)/lambda(n).

    Returns (L, attained index, nondecreasing flag, first differences).
    """
    ks = np.arange(1, N + 2, dtype=float)
    lamv = np.asarray(lam(ks), dtype=float)
    if lamv[0] <= 0:
        raise ValueError("lambda(1) > 0 required")
    Lam = np.cumsum(lamv)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = Lam / lamv
    diffs = ratio[1:] - ratio[:-1]
    finite = np.where(np.isfinite(diffs), diffs, -math.inf)
    idx = int(np.argmax(finite))
    L = float(finite[idx])
    running = np.maximum.accumulate(finite)
    monotone = bool(np.all(diffs[1:] >= diffs[:-1] - 1e-15))
    return L, idx + 1, monotone, diffs[:10].copy()


# ---------------------------------------------------------------------------
# catalog of discrete operators with infinite rows (certified tails)


def apply_discrete_op(name: str, x: SequenceSpec, n: int,
                      tol: float = 1e-9, log_patch: str = "limit") -> float:
    """The classical sequence operators.

    ``T0``: (1/n) * sum_{k<=n} x(k);  ``Tplus``: sum_k x(k)/(k+n);
    ``Tmax``: sum_k x(k)/max(k,n);  ``Td``: sum_{k>=n} x(k)/k;
    ``Tlog``: sum_k x(k) log(k/n)/(k-n) with the diagonal entry k = n
    patched to 1/n (the continuous kernel's limit) or to 0 when
    ``log_patch="zero"``.
    """
    if name == "T0":
        return float(np.sum(x(np.arange(1, n + 1))) / n)
    if name == "Td":
        return _certified_tail_sum(x, term_weight=lambda k: 1.0 / k,
                                   log_weight=lambda w: -w,
                                   start=n, tol=tol)
    if name == "Tplus":
        return _certified_tail_sum(x, term_weight=lambda k: 1.0 / (k + n),
                                   log_weight=lambda w: -np.logaddexp(w, math.log(n)),
                                   start=1, tol=tol)
    if name == "Tmax":
        head = float(np.sum(x(np.arange(1, n + 1))) / n)
        tail = _certified_tail_sum(x, term_weight=lambda k: 1.0 / k,
                                   log_weight=lambda w: -w,
                                   start=n + 1, tol=tol)
        return head + tail
    if name == "Tlog":
        def weights(k):
            k = np.asarray(k, dtype=float)
            diag_val = (1.0 / n) if log_patch == "limit" else 0.0
            with np.errstate(all="ignore"):
                off = np.log(k / n) / (k - n)
            return np.where(k == n, diag_val, off)

        # tail starts past 64 n, where log(k/n)/(k-n) <= (64/63) log(k/n)/k
        def log_w(w):
            w = np.asarray(w, dtype=float)
            return np.log(w - math.log(n)) - w + math.log(64.0 / 63.0)

        return _certified_tail_sum(x, term_weight=weights, log_weight=log_w,
                                   start=1, tol=tol,
                                   plain_cutoff=max(64 * n, 4096))
    raise ValueError(f"unknown discrete operator {name!r}")


# ---------------------------------------------------------------------------
# certified images of the witness family under the averaging matrices
#
# For x(k) = k^(-alpha) (log k)^delta the matrix images admit two-sided
# envelopes built from exact prefix sums plus integral brackets of the
# remaining monotone summands; that is what lets the ratio studies reach
# exponents where the norm mass sits at k ~ exp(1e4).


def _powerlog_prefix_brackets(delta: float, K0: int):
    """Brackets for S(n) = sum_{k<=n} k^(-1) (log k)^delta beyond K0."""
    ks = np.arange(1, K0 + 1, dtype=float)
    with np.errstate(all="ignore"):
        terms = np.where(ks > 1, (np.log(ks)) ** delta / ks, 0.0)
    SK = float(np.sum(terms))

    def G(a, logb):
        # integral of (log t)^(delta+1)' style primitive between a and e^logb
        la = math.log(a)
        return (logb ** (delta + 1.0) - la ** (delta + 1.0)) / (delta + 1.0)

    def lo(logn):
        # sum_{K0 < k <= n} >= integral_{K0+1}^{n+1}
        logn = np.asarray(logn, dtype=float)
        top = np.logaddexp(logn, 0.0)  # log(n+1)
        return SK + (top ** (delta + 1.0)
                     - math.log(K0 + 1) ** (delta + 1.0)) / (delta + 1.0)

    def hi(logn):
        logn = np.asarray(logn, dtype=float)
        return SK + (logn ** (delta + 1.0)
                     - math.log(K0) ** (delta + 1.0)) / (delta + 1.0)

    return SK, lo, hi


def power_mean_image(alpha: float, delta: float, K0: int = 1 << 15) -> SequenceSpec:
    """y = T_A x for a(n,k) = n^(-alpha)(k^alpha - (k-1)^alpha) and
    x(k) = k^(-alpha) (log k)^delta, with certified envelopes beyond K0."""
    from .gammatools import log_upper_gamma

    if not (0 < alpha < 1):
        raise ValueError("alpha in (0,1) required")
    if K0 <= math.exp(delta) + 2:
        raise ValueError("K0 must exceed the mode of (log t)^delta / t")
    ks = np.arange(1, K0 + 1, dtype=float)
    w = ks**alpha - (ks - 1.0) ** alpha
    with np.errstate(all="ignore"):
        xv = np.where(ks > 1, ks ** (-alpha) * np.log(ks) ** delta, 0.0)
    prefix = np.cumsum(w * xv)
    sK = float(prefix[-1])

    # w_k lies between alpha*k^(alpha-1) and alpha*(k-1)^(alpha-1); beyond K0
    # the surplus term is below 2 alpha (1-alpha) k^(-2) (log k)^delta, whose
    # total is 2 alpha (1-alpha) Gamma(delta+1, log K0)
    E0 = 2.0 * alpha * (1.0 - alpha) * math.exp(
        float(log_upper_gamma(delta + 1.0, math.log(K0))[0]))

    def G_lo(logn):
        top = np.logaddexp(np.asarray(logn, dtype=float), 0.0)
        return alpha * (top ** (delta + 1.0)
                        - math.log(K0 + 1) ** (delta + 1.0)) / (delta + 1.0)

    def G_hi(logn):
        logn = np.asarray(logn, dtype=float)
        return alpha * (logn ** (delta + 1.0)
                        - math.log(K0) ** (delta + 1.0)) / (delta + 1.0)

    def env(w_, lohi):
        w_ = np.asarray(w_, dtype=float)
        if lohi == "lo":
            s = sK + G_lo(w_)
        else:
            s = sK + G_hi(w_) + E0
        with np.errstate(all="ignore"):
            return -alpha * w_ + np.log(np.maximum(s, 1e-300))

    def ev(n):
        n = np.atleast_1d(np.asarray(n))
        out = np.empty(n.shape, dtype=float)
        small = n <= K0
        if small.any():
            out[small] = n[small] ** (-alpha) * prefix[n[small].astype(int) - 1]
        big = ~small
        if big.any():
            logn = np.log(n[big].astype(float))
            mid = sK + 0.5 * (G_lo(logn) + G_hi(logn) + E0)
            out[big] = n[big] ** (-alpha) * mid
        return out

    cert = DecayCertificate(monotone_from=K0,
                            log_env_lo=lambda w_: env(w_, "lo"),
                            log_env_hi=lambda w_: env(w_, "hi"))
    return SequenceSpec(name=f"power_mean({alpha})[powlog({alpha},{delta})]",
                        eval_fn=ev, certificate=cert)


def power_ratio_image(alpha: float, delta: float, K0: int = 1 << 15) -> SequenceSpec:
    """y = T_A x for a(n,k) = k^(alpha-1)/sum_(i<=n) i^(alpha-1) on the same
    witness family; here k^(alpha-1) x(k) = k^(-1) (log k)^delta exactly."""
    if not (0 < alpha < 1):
        raise ValueError("alpha in (0,1) required")
    ks = np.arange(1, K0 + 1, dtype=float)
    with np.errstate(all="ignore"):
        num_terms = np.where(ks > 1, np.log(ks) ** delta / ks, 0.0)
    num_prefix = np.cumsum(num_terms)
    den_prefix = np.cumsum(ks ** (alpha - 1.0))
    numK = float(num_prefix[-1])
    denK = float(den_prefix[-1])

    def num_lo(logn):
        top = np.logaddexp(np.asarray(logn, dtype=float), 0.0)
        return numK + (top ** (delta + 1.0)
                       - math.log(K0 + 1) ** (delta + 1.0)) / (delta + 1.0)

    def num_hi(logn):
        logn = np.asarray(logn, dtype=float)
        return numK + (logn ** (delta + 1.0)
                       - math.log(K0) ** (delta + 1.0)) / (delta + 1.0)

    # the denominator grows like n^alpha / alpha; keep it in log coordinates
    def log_den_lo(logn):
        logn = np.asarray(logn, dtype=float)
        return alpha * logn + np.log(np.maximum(
            denK * np.exp(-alpha * logn)
            + (np.exp(alpha * np.logaddexp(logn, 0.0) - alpha * logn)
               - (K0 + 1.0) ** alpha * np.exp(-alpha * logn)) / alpha, 1e-300))

    def log_den_hi(logn):
        logn = np.asarray(logn, dtype=float)
        return alpha * logn + np.log(
            denK * np.exp(-alpha * logn)
            + (1.0 - float(K0) ** alpha * np.exp(-alpha * logn)) / alpha)

    def env(w_, lohi):
        w_ = np.asarray(w_, dtype=float)
        if lohi == "lo":
            return np.log(np.maximum(num_lo(w_), 1e-300)) - log_den_hi(w_)
        return np.log(np.maximum(num_hi(w_), 1e-300)) - log_den_lo(w_)

    def ev(n):
        n = np.atleast_1d(np.asarray(n))
        out = np.empty(n.shape, dtype=float)
        small = n <= K0
        if small.any():
            idx = n[small].astype(int) - 1
            out[small] = num_prefix[idx] / den_prefix[idx]
        big = ~small
        if big.any():
            logn = np.log(n[big].astype(float))
            out[big] = np.exp(0.5 * (env(logn, "lo") + env(logn, "hi")))
        return out

    cert = DecayCertificate(monotone_from=K0,
                            log_env_lo=lambda w_: env(w_, "lo"),
                            log_env_hi=lambda w_: env(w_, "hi"))
    return SequenceSpec(name=f"power_ratio({alpha})[powlog({alpha},{delta})]",
                        eval_fn=ev, certificate=cert)


def max_op_image(delta: float, K0: int = 1 << 15) -> SequenceSpec:
    """Discrete max-kernel operator applied to x(k) = k^(-1) (log k)^delta:
    y(n) = n^(-1) sum_(k<=n) x(k) + sum_(k>n) x(k)/k."""
    from .gammatools import log_upper_gamma

    ks = np.arange(1, K0 + 1, dtype=float)
    with np.errstate(all="ignore"):
        xv = np.where(ks > 1, np.log(ks) ** delta / ks, 0.0)
        qv = np.where(ks > 1, np.log(ks) ** delta / ks**2, 0.0)
    P_prefix = np.cumsum(xv)
    PK = float(P_prefix[-1])
    Q_prefix = np.cumsum(qv)
    QK = float(Q_prefix[-1])
    # Q(n) = sum_{k>n} (log k)^delta / k^2; brackets via the monotone integral
    q_lo = lambda n: np.exp(log_upper_gamma(delta + 1.0, np.log(n + 1.0)))
    q_hi = lambda n: np.exp(log_upper_gamma(delta + 1.0, np.log(np.maximum(n, 2.0))))

    def P_lo(logn):
        top = np.logaddexp(np.asarray(logn, dtype=float), 0.0)
        return PK + (top ** (delta + 1.0)
                     - math.log(K0 + 1) ** (delta + 1.0)) / (delta + 1.0)

    def P_hi(logn):
        logn = np.asarray(logn, dtype=float)
        return PK + (logn ** (delta + 1.0)
                     - math.log(K0) ** (delta + 1.0)) / (delta + 1.0)

    def env(w_, lohi):
        # log of P(n)/n + Q(n) with n = e^w, entirely in log coordinates
        w_ = np.asarray(w_, dtype=float)
        if lohi == "lo":
            log_avg = np.log(np.maximum(P_lo(w_), 1e-300)) - w_
            log_q = log_upper_gamma(delta + 1.0, np.logaddexp(w_, 0.0))
        else:
            log_avg = np.log(np.maximum(P_hi(w_), 1e-300)) - w_
            log_q = log_upper_gamma(delta + 1.0, w_)
        return np.logaddexp(log_avg, log_q)

    def ev(n):
        n = np.atleast_1d(np.asarray(n))
        out = np.empty(n.shape, dtype=float)
        small = n <= K0
        if small.any():
            idx = n[small].astype(int) - 1
            nf = n[small].astype(float)
            out[small] = P_prefix[idx] / nf + (QK - Q_prefix[idx]) \
                + 0.5 * float(q_lo(float(K0)) + q_hi(float(K0)))
        big = ~small
        if big.any():
            logn = np.log(n[big].astype(float))
            out[big] = np.exp(0.5 * (env(logn, "lo") + env(logn, "hi")))
        return out

    cert = DecayCertificate(monotone_from=K0,
                            log_env_lo=lambda w_: env(w_, "lo"),
                            log_env_hi=lambda w_: env(w_, "hi"))
    return SequenceSpec(name=f"tmax_d[powlog(1,{delta})]",
                        eval_fn=ev, certificate=cert)


def cesaro_harmonic_image() -> SequenceSpec:
    """y(n) = H_n / n, the Cesaro average of x(k) = 1/k, with the classical
    bracket log n + gamma < H_n < log n + gamma + 1/(2n)."""
    gamma = 0.5772156649015329
    K0 = 1 << 16
    H = np.cumsum(1.0 / np.arange(1, K0 + 1, dtype=float))

    def ev(n):
        n = np.atleast_1d(np.asarray(n))
        out = np.empty(n.shape, dtype=float)
        small = n <= K0
        if small.any():
            idx = n[small].astype(int) - 1
            out[small] = H[idx] / n[small].astype(float)
        big = ~small
        if big.any():
            nf = n[big].astype(float)
            out[big] = (np.log(nf) + gamma + 0.25 / nf) / nf
        return out

    cert = DecayCertificate(
        monotone_from=2,
        log_env_lo=lambda w: np.log(np.asarray(w, dtype=float) + gamma)
        - np.asarray(w, dtype=float),
        log_env_hi=lambda w: np.log(np.asarray(w, dtype=float) + gamma
                                    + 0.5 * np.exp(-np.asarray(w, dtype=float)))
        - np.asarray(w, dtype=float),
    )
    return SequenceSpec(name="cesaro[harmonic]", eval_fn=ev, certificate=cert)


def _certified_tail_sum(x: SequenceSpec, term_weight: Callable,
                        log_weight: Callable, start: int, tol: float,
                        plain_cutoff: int = 0) -> float:
    """sum_{k >= start} w(k) x(k) with an integral tail bound.

    Head terms summed exactly; beyond N the product envelope
    env_hi(t) * w(t) is integrated (both factors nonincreasing there).
    """
    if x.finite_support is not None:
        ks = np.arange(start, x.finite_support + 1, dtype=float)
        if ks.size == 0:
            return 0.0
        return float(np.sum(term_weight(ks) * x(ks)))
    if x.certificate is None:
        raise NoCertificate(f"{x.name}: no decay certificate")
    cert = x.certificate
    N = max(4096, cert.monotone_from, start, plain_cutoff)
    ks = np.arange(start, N + 1, dtype=float)
    head = float(np.sum(term_weight(ks) * x(ks)))

    def integrand(w):
        return np.asarray(cert.log_env_hi(w), dtype=float) \
            + np.asarray(log_weight(w), dtype=float) + w

    try:
        res = log_integrate_peaked(integrand, Domain(math.log(N), math.inf), 3e-8)
        tail_hi = math.exp(res.value)
    except DivergentIntegral as exc:
        raise DivergentSum(f"{x.name}: series diverges") from exc
    if abs(head) > 0 and tail_hi > 10 * tol * abs(head):
        # grow once; the envelope integral bounds the remainder
        N2 = 64 * N
        ks = np.arange(start, N2 + 1, dtype=float)
        head = float(np.sum(term_weight(ks) * x(ks)))
        res = log_integrate_peaked(integrand, Domain(math.log(N2), math.inf), 3e-8)
        tail_hi = math.exp(res.value)
    return head + 0.5 * tail_hi
