"""Richardson extrapolation for geometric approach sequences."""

from __future__ import annotations


def richardson(values, ratio: float = 2.0) -> tuple[float, float]:
    """Extrapolate v_k = L + c1*s_k + c2*s_k^2 + ... with s_k = s0 / ratio^k.

    ``values`` are ordered from the coarsest step to the finest.  Returns the
    table apex together with an uncertainty taken from the last two stages.
    """
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("need at least one value")
    if n == 1:
        return vals[0], float("inf")
    table = [vals]
    for m in range(1, n):
        factor = ratio**m
        prev = table[m - 1]
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1.0)
                      for i in range(n - m)])
    apex = table[-1][0]
    prev_apex = table[-2][0]
    return apex, abs(apex - prev_apex)
