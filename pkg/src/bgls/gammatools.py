"""Stable incomplete-gamma evaluations used by the norm machinery.

The quantities needed are e^u * Gamma(s, u) (which is O(u^(s-1)) but whose
factors overflow/underflow separately) and log Gamma(s, z) at arguments far
beyond the underflow threshold of the regularized routines.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaincc, logsumexp


def exp_scaled_upper_gamma(s: float, u) -> np.ndarray:
    """e^u * Gamma(s, u), elementwise in u >= 0.

    For integer s this is the exact finite sum (s-1)! * sum_j u^j / j!.
    Otherwise: direct evaluation for small u, asymptotic series for large u
    (error below the first omitted term, ~e^(-u) at the crossover).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if float(s).is_integer() and s >= 1:
        n = int(s) - 1
        logs = np.full((n + 1, u.size), -math.inf)
        with np.errstate(divide="ignore"):
            lu = np.where(u > 0, np.log(u), -math.inf)
        for j in range(n + 1):
            logs[j] = j * lu - math.lgamma(j + 1)
        logs[0] = np.zeros(u.size)  # j = 0 term is 1 even at u = 0
        out = math.lgamma(s) + logsumexp(logs, axis=0)
        return np.exp(out)
    out = np.empty_like(u)
    small = u <= 30.0
    if small.any():
        out[small] = np.exp(u[small]) * gammaincc(s, u[small]) * math.gamma(s)
    big = ~small
    if big.any():
        ub = u[big]
        total = np.ones_like(ub)
        term = np.ones_like(ub)
        prev_mag = np.full_like(ub, math.inf)
        for j in range(1, 60):
            term = term * (s - j) / ub
            mag = np.abs(term)
            grow = mag >= prev_mag
            term = np.where(grow, 0.0, term)
            total = total + term
            if np.all(mag < 1e-17) or np.all(term == 0.0):
                break
            prev_mag = np.where(grow, prev_mag, mag)
        out[big] = ub ** (s - 1.0) * total
    return out


def log_upper_gamma(s: float, z) -> np.ndarray:
    """log Gamma(s, z), elementwise, stable for arbitrarily large z."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    small = z <= 30.0
    if small.any():
        with np.errstate(divide="ignore"):
            out[small] = np.log(gammaincc(s, z[small])) + math.lgamma(s)
    big = ~small
    if big.any():
        zb = z[big]
        total = np.ones_like(zb)
        term = np.ones_like(zb)
        prev_mag = np.full_like(zb, math.inf)
        for j in range(1, 60):
            term = term * (s - j) / zb
            mag = np.abs(term)
            grow = mag >= prev_mag
            term = np.where(grow, 0.0, term)
            total = total + term
            if np.all(mag < 1e-17) or np.all(term == 0.0):
                break
            prev_mag = np.where(grow, prev_mag, mag)
        out[big] = (s - 1.0) * np.log(zb) - zb + np.log(total)
    return out
