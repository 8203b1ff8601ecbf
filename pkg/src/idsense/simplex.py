"""Euclidean projections onto the probability simplex and distortion-capped faces."""
from __future__ import annotations

import numpy as np


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Project v onto {p >= 0, sum p = 1} (sort-based, non-iterative)."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    cond = u + (1.0 - css) / j > 0
    rho = np.nonzero(cond)[0][-1]
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def project_to_capped_simplex(v: np.ndarray, d: np.ndarray, cap: float,
                              tol: float = 1e-14) -> np.ndarray:
    """Project v onto {p in simplex : d @ p <= cap}.

    Requires min(d) <= cap, otherwise the set is empty.  Uses bisection on the
    multiplier of the linear constraint; d @ project(v - lam*d) is
    nonincreasing in lam.
    """
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if float(d.min()) > cap:
        raise ValueError(f"cap {cap} below the minimum of d ({d.min()}); empty set")
    p = project_to_simplex(v)
    if float(d @ p) <= cap + tol:
        return p
    lo, hi = 0.0, 1.0
    for _ in range(80):
        if float(d @ project_to_simplex(v - hi * d)) <= cap:
            break
        hi *= 2.0
    else:
        # cap equals min(d) up to rounding; fall back to the feasible vertex
        return project_to_simplex(-d * 1e12)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(d @ project_to_simplex(v - mid * d)) <= cap:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return project_to_simplex(v - hi * d)
