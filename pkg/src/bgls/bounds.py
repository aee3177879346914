"""Operator-norm bound functionals, the exponent-transfer function nu, the
weight-transformation catalog and the grand-norm inequality checker.

Conventions: an operator maps L_q of the source measure into L_p of the
target measure and ``BoundFunction.eval_fn(p, q)`` bounds that norm (first
index = image exponent).  The transfer function is

    nu(p) = inf over q of bound(p, q) * psi(q),

so a function with |f|_q <= psi(q) everywhere has |T f|_p <= nu(p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConstraintViolation, DivergentIntegral, OutOfRegion
from .quad import Domain, integrate
from .spaces import (
    FunctionSpec,
    MeasureSpec,
    PsiFunction,
    bgls_norm,
    log_lp,
)

_INF = math.inf


@dataclass
class KernelSpec:
    """A bimeasurable kernel K(s1, s2) with its coordinate measures."""

    eval_fn: Callable            # (s1 array, s2 array) -> values (broadcast)
    domain1: Domain
    domain2: Domain
    symmetric: bool = False
    nonnegative: bool = True
    name: str = "kernel"

    def __call__(self, s1, s2):
        return np.asarray(self.eval_fn(np.asarray(s1, dtype=float),
                                       np.asarray(s2, dtype=float)), dtype=float)


@dataclass
class BoundFunction:
    """Upper bound for the operator norm on the exponent plane.

    kinds: ``diagonal`` (finite only at q = p), ``uc`` (finite only on the
    curve q = w(p)), ``general``.
    """

    kind: str
    eval_fn: Callable                  # (p_image, q_source) -> bound or inf
    support_p: tuple = (1.0, _INF)
    w: Optional[Callable] = None       # image exponent -> source exponent
    W: Optional[Callable] = None       # image exponent -> constant on the curve
    diag: Optional[Callable] = None

    def __call__(self, p: float, q: float) -> float:
        return float(self.eval_fn(p, q))


def diagonal_bound(diag: Callable, support=(1.0, _INF)) -> BoundFunction:
    def eval_fn(p, q):
        if q != p:
            return _INF
        return diag(p)

    return BoundFunction("diagonal", eval_fn, support_p=support, diag=diag,
                         w=lambda p: p, W=diag)


def uc_bound(w: Callable, W: Callable, support=(1.0, _INF)) -> BoundFunction:
    def eval_fn(p, q):
        if abs(q - w(p)) > 1e-12 * max(1.0, abs(q)):
            return _INF
        return W(p)

    return BoundFunction("uc", eval_fn, support_p=support, w=w, W=W)


def general_bound(eval_fn: Callable, support=(1.0, _INF)) -> BoundFunction:
    return BoundFunction("general", eval_fn, support_p=support)


# ---------------------------------------------------------------------------
# essential sups of kernel sections (sampling + refinement; certified only
# for continuous kernels)


def _sample_points(d: Domain, n: int = 96) -> np.ndarray:
    lo, hi = d.lower, d.upper
    if math.isfinite(lo) and math.isfinite(hi):
        return np.linspace(lo + (hi - lo) * 1e-6, hi - (hi - lo) * 1e-6, n)
    base = max(lo, 0.0)
    return base + np.geomspace(1e-6, 1e6, n)


def _section_sup(section_value: Callable, d: Domain) -> float:
    pts = _sample_points(d)
    vals = np.array([section_value(float(s)) for s in pts])
    best_i = int(np.argmax(vals))
    best = float(vals[best_i])
    # local refinement around the sampled max
    lo = pts[max(best_i - 1, 0)]
    hi = pts[min(best_i + 1, pts.size - 1)]
    for _ in range(2):
        sub = np.linspace(lo, hi, 9)
        sv = np.array([section_value(float(s)) for s in sub])
        j = int(np.argmax(sv))
        best = max(best, float(sv[j]))
        lo = sub[max(j - 1, 0)]
        hi = sub[min(j + 1, sub.size - 1)]
    return best


def _row_integral(K: KernelSpec, s1: float, power: float = 1.0,
                  tol: float = 1e-9) -> float:
    def integrand(s2):
        return np.abs(K(np.full_like(s2, s1), s2)) ** power

    return integrate(integrand, K.domain2, tol).value


def _col_integral(K: KernelSpec, s2: float, power: float = 1.0,
                  tol: float = 1e-9) -> float:
    def integrand(s1):
        return np.abs(K(s1, np.full_like(s1, s2))) ** power

    return integrate(integrand, K.domain1, tol).value


def k1_bound(K: KernelSpec, p: float) -> float:
    """Schur-type bound: [sup_s2 int |K| dmu1]^(1-1/p) [sup_s1 int |K| dmu2]^(1/p)."""
    if not (1.0 <= p):
        raise ConstraintViolation("p >= 1 required")
    col_sup = _section_sup(lambda s2: _col_integral(K, s2), K.domain2)
    row_sup = _section_sup(lambda s1: _row_integral(K, s1), K.domain1)
    if not (math.isfinite(col_sup) and math.isfinite(row_sup)):
        raise DivergentIntegral("a Schur integral diverges")
    inv_p = 0.0 if p == _INF else 1.0 / p
    return col_sup ** (1.0 - inv_p) * row_sup ** inv_p


def k2_bound(K: KernelSpec, p: float, p1: float, p2: float) -> tuple[float, float]:
    """Mixed-power bound M1^(1/p1 - p2/(p p1)) * M2^(1/p) with the target
    exponent r = p p1/(p - p2); p = p2 is the r = inf limiting case.

    Constraint set: 1 <= p, p1, p2 < inf; r in [1, inf]; q <= q2 with all
    conjugates q = p', q1 = p1', q2 = p2'.
    """
    for name, val in (("p", p), ("p1", p1), ("p2", p2)):
        if not (1.0 <= val < _INF):
            raise ConstraintViolation(f"{name} must lie in [1, inf), got {val}")
    if p < p2:
        raise ConstraintViolation(
            f"r = p*p1/(p-p2) negative: needs p >= p2 (q <= q2 fails too)")
    r = _INF if p == p2 else p * p1 / (p - p2)
    if r < 1.0:
        raise ConstraintViolation(f"r = {r} below 1")
    M1 = _section_sup(lambda s1: _row_integral(K, s1, power=p2), K.domain1)
    M2 = _section_sup(lambda s2: _col_integral(K, s2, power=p1), K.domain2)
    if not (math.isfinite(M1) and math.isfinite(M2)):
        raise DivergentIntegral("a power integral diverges")
    bound = M1 ** (1.0 / p1 - p2 / (p * p1)) * M2 ** (1.0 / p)
    return r, bound


def k3_bound(K: KernelSpec, p: float, r: float, tol: float = 1e-8) -> float:
    """Mixed-norm integral {int dmu1 [int |K|^q dmu2]^(r/q)}^(1/r), q = p'."""
    if not (1.0 < p < _INF and 1.0 < r < _INF):
        raise ConstraintViolation("p, r in (1, inf) required")
    q = p / (p - 1.0)

    def outer(s1):
        s1 = np.atleast_1d(np.asarray(s1, dtype=float))
        out = np.empty_like(s1)
        for i, s in enumerate(s1):
            inner = _row_integral(K, float(s), power=q, tol=tol)
            out[i] = inner ** (r / q)
        return out

    val = integrate(outer, K.domain1, tol).value
    return val ** (1.0 / r)


def k4_bound(K: KernelSpec, p: float, r: float | None = None,
             p1: float | None = None, p2: float | None = None) -> float:
    """Pointwise minimum of the applicable finite bounds; +inf if none."""
    candidates = []
    try:
        candidates.append(k1_bound(K, p))
    except DivergentIntegral:
        pass
    if p1 is not None and p2 is not None:
        try:
            candidates.append(k2_bound(K, p, p1, p2)[1])
        except (DivergentIntegral, ConstraintViolation):
            pass
    try:
        candidates.append(k3_bound(K, p, r if r is not None else p))
    except (DivergentIntegral, ConstraintViolation):
        pass
    finite = [c for c in candidates if math.isfinite(c)]
    return min(finite) if finite else _INF


# ---------------------------------------------------------------------------
# the transfer function nu


@dataclass
class NuResult:
    value: float
    q_star: float


def nu_transfer(bound: BoundFunction, psi: PsiFunction, p: float) -> NuResult:
    """nu(p) = inf over q in the weight's support of bound(p, q) psi(q).

    Point-mass weights reduce to the bound slice exactly; UC bounds reduce
    to W(p) psi(w(p)); otherwise a log-q bracketing scan plus golden-section
    refinement (ties resolved toward smaller q)."""
    if psi.kind == "point-mass":
        return NuResult(bound(p, psi.r) * 1.0, psi.r)
    a, b = psi.support
    if bound.kind == "uc":
        q = bound.w(p)
        if not (a < q < b):
            return NuResult(_INF, q)
        return NuResult(bound.W(p) * psi(q), q)
    if bound.kind == "diagonal":
        if not (a < p < b):
            return NuResult(_INF, p)
        return NuResult(bound.diag(p) * psi(p), p)

    def objective(q: float) -> float:
        v = bound(p, q)
        if not math.isfinite(v):
            return _INF
        pv = psi(q)
        if not math.isfinite(pv):
            return _INF
        return v * pv

    hi = b if math.isfinite(b) else max(64.0, 64.0 * a)
    qs = np.exp(np.linspace(math.log(a + 1e-9), math.log(hi), 64))
    qs = qs[(qs > a) & (qs < b)]
    vals = np.array([objective(float(q)) for q in qs])
    if not np.isfinite(vals).any():
        return NuResult(_INF, math.nan)
    i = int(np.argmin(vals))
    lo = qs[max(i - 1, 0)]
    hi2 = qs[min(i + 1, qs.size - 1)]
    # golden-section on log q
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    la, lb = math.log(lo), math.log(hi2)
    c = lb - gr * (lb - la)
    d = la + gr * (lb - la)
    fc, fd = objective(math.exp(c)), objective(math.exp(d))
    for _ in range(80):
        if lb - la < 1e-12:
            break
        if fc <= fd:  # ties toward smaller q
            lb, d, fd = d, c, fc
            c = lb - gr * (lb - la)
            fc = objective(math.exp(c))
        else:
            la, c, fc = c, d, fd
            d = la + gr * (lb - la)
            fd = objective(math.exp(d))
    q_star = math.exp(0.5 * (la + lb))
    return NuResult(min(objective(q_star), float(vals[i])), q_star)


def nu_support(bound: BoundFunction, psi: PsiFunction,
               p_grid=None) -> tuple[float, float]:
    """(c, d): the interval where nu is finite, located by scanning."""
    if p_grid is None:
        p_grid = np.exp(np.linspace(0.0, math.log(512.0), 96))
    finite = [p for p in p_grid if math.isfinite(nu_transfer(bound, psi, float(p)).value)]
    if not finite:
        return (math.nan, math.nan)
    return (min(finite), max(finite))


def nu_psi_function(bound: BoundFunction, psi: PsiFunction) -> PsiFunction:
    """nu as a weight usable in grand-norm computations."""
    from .spaces import point_mass_psi

    if psi.kind == "point-mass":
        # the infimum collapses onto the single source exponent
        if bound.kind == "diagonal":
            return point_mass_psi(psi.r, mass=bound.diag(psi.r) * psi.mass)
        if bound.kind == "uc":
            # image exponent solving w(p) = r
            lo, hi = bound.support_p
            hi = hi if math.isfinite(hi) else 4096.0
            ps = np.linspace(lo + 1e-9, hi, 4096)
            vals = np.array([bound.w(float(p)) - psi.r for p in ps])
            sign = np.sign(vals)
            flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
            if flips.size == 0:
                raise OutOfRegion("no image exponent maps onto the point mass")
            from scipy.optimize import brentq

            p_star = brentq(lambda p: bound.w(p) - psi.r,
                            ps[flips[0]], ps[flips[0] + 1], xtol=1e-13)
            return point_mass_psi(p_star, mass=bound.W(p_star) * psi.mass)
    c, d = nu_support(bound, psi)
    if math.isnan(c):
        raise OutOfRegion("nu is nowhere finite")
    return PsiFunction(c * (1 - 1e-12), d * (1 + 1e-12) if math.isfinite(d) else _INF,
                       lambda p: nu_transfer(bound, psi, p).value,
                       kind="transformed", label=f"nu[{psi.label}]")


# ---------------------------------------------------------------------------
# grand-norm inequality checker


@dataclass
class InequalityReport:
    ratio: float
    image_norm: float
    source_norm: float
    image_argmax: float
    source_argmax: float
    passed: bool


def theorem1_check(op, psi: PsiFunction, f: FunctionSpec,
                   source_measure: MeasureSpec | None = None,
                   target_measure: MeasureSpec | None = None,
                   tolerance: float = 1e-6, grid_rel_tol: float = 1e-4,
                   p_cap: float = 128.0) -> InequalityReport:
    """Checks ||T f||_{G(nu)} <= ||f||_{G(psi)} numerically.

    ``op`` is an OperatorSpec; nu is built from its bound function and the
    supplied weight.  Both grand norms run on the same adaptive exponent
    grid policy; the grid supremum is a lower bound of the true supremum,
    which keeps the check one-sided and honest."""
    source_measure = source_measure or op.source_measure
    target_measure = target_measure or op.target_measure
    src = bgls_norm(f, psi, source_measure, rel_tol=grid_rel_tol, p_cap=p_cap,
                    endpoint_depth=8, max_rounds=6)
    nu = nu_psi_function(op.bound, psi)
    if op.image is None:
        raise ValueError(f"{op.identifier}: no image constructor")
    tf = op.image(f)
    img = bgls_norm(tf, nu, target_measure, rel_tol=grid_rel_tol, p_cap=p_cap,
                    endpoint_depth=8, max_rounds=6)
    ratio = math.exp(img.log_value - src.log_value)
    return InequalityReport(ratio=ratio,
                            image_norm=img.value, source_norm=src.value,
                            image_argmax=img.argmax_p,
                            source_argmax=src.argmax_p,
                            passed=ratio <= 1.0 + tolerance)


# ---------------------------------------------------------------------------
# weight transformation catalog


def transformed_psi(rule: str, psi: PsiFunction, **params) -> PsiFunction:
    """The weight transformations induced by the operator bounds.

    phi:        psi(p) -> phi(p) psi(p)            (homogeneous kernels)
    t_lambda:   [pi/sin(pi/(p lam))]^lam * psi(p/(p(1-lam)+1))
    u_alpha:    (alpha - 1/p)^(-alpha) psi(p), support p > 1/alpha
    weighted:   p psi(p)                           (integration operator)
    fourier:    p^2 psi(p)/(p-1)
    hilbert:    h(p) psi(p) with h the Riesz norm function
    bennett:    p/(p - L) psi(p), support p > L
    discrete_alpha: alpha p/(alpha p - 1) psi(p), support p > 1/alpha
    sublinear:  Phi(p) psi(p) for a user-supplied shape Phi
    riesz_potential: [(p - p_minus)(p_plus - p)]^(-kappa) psi(p)
    """
    from .operators import riesz_h, t_lambda_bound, t_lambda_source_exponent

    a, b = psi.support
    if rule == "phi":
        phi = params["phi"]
        return PsiFunction(a, b, lambda p: phi(p) * psi(p), kind="transformed",
                           label=f"phi*{psi.label}")
    if rule == "t_lambda":
        lam = params["lam"]
        lo = max(1.0 / lam, a)

        def eval_fn(p):
            q = t_lambda_source_exponent(lam, p)
            return t_lambda_bound(lam, p) * psi(q)

        return PsiFunction(lo, math.inf, eval_fn, kind="transformed",
                           label=f"psi_(lambda={lam})")
    if rule == "u_alpha":
        alpha = params["alpha"]
        lo = max(1.0 / alpha, a)
        return PsiFunction(lo, b, lambda p: (alpha - 1.0 / p) ** (-alpha) * psi(p),
                           kind="transformed", label=f"psi_alpha({alpha})")
    if rule == "weighted":
        return PsiFunction(a, b, lambda p: p * psi(p), kind="transformed",
                           label=f"p*{psi.label}")
    if rule == "fourier":
        return PsiFunction(a, b, lambda p: p * p / (p - 1.0) * psi(p),
                           kind="transformed", label=f"psi_F[{psi.label}]")
    if rule == "hilbert":
        return PsiFunction(a, b, lambda p: riesz_h(p) * psi(p),
                           kind="transformed", label=f"psi_H[{psi.label}]")
    if rule == "bennett":
        L = params["L"]
        lo = max(L, a)
        return PsiFunction(lo, b, lambda p: p / (p - L) * psi(p),
                           kind="transformed", label=f"psi^(L={L})")
    if rule == "discrete_alpha":
        alpha = params["alpha"]
        lo = max(1.0 / alpha, a)
        return PsiFunction(lo, b, lambda p: alpha * p / (alpha * p - 1.0) * psi(p),
                           kind="transformed", label=f"psi_({alpha})")
    if rule == "sublinear":
        shape = params["shape"]
        return PsiFunction(a, b, lambda p: shape(p) * psi(p), kind="transformed",
                           label=f"Phi*{psi.label}")
    if rule == "riesz_potential":
        m = params["index_map"]
        lo = max(m.p_minus, a)
        hi = min(m.p_plus, b)
        if not lo < hi:
            from .errors import EmptySupport
            raise EmptySupport("weight support misses the potential window")
        return PsiFunction(
            lo, hi,
            lambda p: ((p - m.p_minus) * (m.p_plus - p)) ** (-m.kappa) * psi(p),
            kind="transformed", label="psi_(alpha,beta,lambda)")
    raise ValueError(f"unknown transformation rule {rule!r}")


def phi_shape(name: str, C: float, p: float) -> float:
    """Sublinear maximal-operator bound shapes: C p^4/(p-1)^3 for maximal
    partial sums, C p^2/(p-1) for the maximal Hilbert transform."""
    if not (1.0 < p < _INF):
        raise ConstraintViolation("p in (1, inf)")
    if name == "maximal_partial_sums":
        return C * p**4 / (p - 1.0) ** 3
    if name == "maximal_hilbert":
        return C * p**2 / (p - 1.0)
    raise ValueError(f"unknown shape {name!r}")


# ---------------------------------------------------------------------------
# index bookkeeping for the potential family


@dataclass(frozen=True)
class RieszPotentialIndexMap:
    alpha: float
    beta: float
    lam: float
    d: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ConstraintViolation("alpha, beta >= 0 required")
        if not self.alpha + self.lam < self.d:
            raise ConstraintViolation("alpha + lambda < d required")

    @property
    def p_minus(self) -> float:
        return self.d / (self.d - self.alpha)

    @property
    def p_plus(self) -> float:
        return self.d / (self.d - self.alpha - self.lam)

    @property
    def q_minus(self) -> float:
        return self.d / (self.beta + self.lam)

    @property
    def q_plus(self) -> float:
        return _INF if self.beta == 0 else self.d / self.beta

    @property
    def kappa(self) -> float:
        return (self.alpha + self.beta + self.lam) / self.d

    def q_of_p(self, p: float) -> float:
        if not (self.p_minus < p < self.p_plus):
            raise OutOfRegion(
                f"p = {p} outside ({self.p_minus}, {self.p_plus})")
        inv_q = 1.0 / p + self.kappa - 1.0
        return 1.0 / inv_q


def riesz_index_map(alpha: float, beta: float, lam: float, d: float,
                    p: float | None = None):
    m = RieszPotentialIndexMap(alpha, beta, lam, d)
    if p is None:
        return m
    return m, m.q_of_p(p)
