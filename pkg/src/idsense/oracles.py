"""Exhaustive grid oracles for the lower bounds.

These evaluate the constrained maximizations by brute force on a lattice over
the auxiliary-kernel rows (and, for the randomized bound, over the input law),
with their own vectorized information formulas.  They are deliberately
independent of the ascent machinery in :mod:`idsense.bounds`: the oracles are
built and trusted first, and the solvers are accepted only when they match.

Binary feedback alphabets only (the per-slice enumeration pairs one lattice
row per feedback symbol); that covers every desk-scale instance the oracles
are used on.
"""
from __future__ import annotations

import numpy as np

from .bounds import SolverConfig
from .channel import StateChannel, averaged_channel
from .info import blahut_arimoto_capacity, entropy_vector
from .sensing import EstimatorTable, feasible_symbols
from .tables import Pmf


def composition_rows(n_letters: int, resolution: int) -> np.ndarray:
    """All pmfs on ``n_letters`` with entries that are multiples of 1/resolution."""
    combos = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            combos.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], resolution, n_letters)
    return np.array(combos, dtype=float) / resolution


def _entropy_rows(rows: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of each row of a 2-D array."""
    logs = np.zeros_like(rows)
    np.log2(rows, out=logs, where=rows > 0)
    return -(rows * logs).sum(axis=1)


class _SliceData:
    """Per-symbol channel slices needed by the oracles."""

    def __init__(self, ch: StateChannel):
        avg = averaged_channel(ch)
        w = avg.table
        self.nx, self.ny, self.nz = w.shape
        self.pyx = w.sum(axis=2)
        self.pzx = w.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            self.pz_given_xy = np.where(
                self.pyx[:, :, None] > 0, w / self.pyx[:, :, None], 0.0
            )
        self.h_y_rows = _entropy_rows(self.pyx)


def slice_grid_cloud(data: _SliceData, x: int, u_size: int, resolution: int,
                     chunk: int = 262_144):
    """Evaluate (A, B) = (I(U;Z|X=x), I(U;Z|X=x,Y)) on the full kernel lattice.

    Returns (A, B, rows) where A and B are flat arrays over row-index pairs
    (i, j) in row-major order and ``rows`` is the shared lattice of kernel
    rows.  Only |Z| = 2 is supported.
    """
    if data.nz != 2:
        raise ValueError("grid oracle supports binary feedback alphabets only")
    rows = composition_rows(u_size, resolution)
    nrows = len(rows)
    # per-row sum_u K log2 K, the kernel-entropy part shared by A and B
    logs = np.zeros_like(rows)
    np.log2(rows, out=logs, where=rows > 0)
    klogk = (rows * logs).sum(axis=1)
    pz = data.pzx[x]
    pzy = data.pz_given_xy[x]   # (ny, nz)
    py = data.pyx[x]

    A = np.empty(nrows * nrows)
    B = np.empty(nrows * nrows)
    for start in range(0, nrows, max(1, chunk // nrows)):
        stop = min(nrows, start + max(1, chunk // nrows))
        Ri = rows[start:stop][:, None, :]           # (ci, 1, u)
        Rj = rows[None, :, :]                       # (1, nrows, u)
        t1 = pz[0] * klogk[start:stop][:, None] + pz[1] * klogk[None, :]
        pu = pz[0] * Ri + pz[1] * Rj                # (ci, nrows, u)
        a_blk = t1 + _entropy_block(pu)
        b_blk = t1.copy()
        for y in range(data.ny):
            if py[y] <= 0:
                continue
            puy = pzy[y, 0] * Ri + pzy[y, 1] * Rj
            b_blk += py[y] * _entropy_block(puy)
        sl = slice(start * nrows, stop * nrows)
        A[sl] = a_blk.ravel()
        B[sl] = b_blk.ravel()
    return A, B, rows


def _entropy_block(p: np.ndarray) -> np.ndarray:
    logs = np.zeros_like(p)
    np.log2(p, out=logs, where=p > 0)
    return -(p * logs).sum(axis=-1)


def _kernel_from_pair(rows: np.ndarray, flat_index: int) -> np.ndarray:
    n = len(rows)
    return np.stack([rows[flat_index // n], rows[flat_index % n]])


def dif_lower_oracle(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                     u_size: int, resolution: int = 64,
                     cfg: SolverConfig | None = None) -> dict:
    """Exhaustive-lattice value of the deterministic lower bound.

    Maximizes A over the kernel lattice subject to B <= rhs - margin, per
    feasible symbol; the RHS follows the same convention as the solver (it is
    part of the problem statement, not of the method).
    """
    cfg = cfg or SolverConfig()
    data = _SliceData(ch)
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return {"value": 0.0, "per_symbol": {}, "feasible": False}
    if cfg.rhs_mode == "slice-zero":
        rhs = 0.0
    elif len(xd) == 1:
        rhs = 0.0
    else:
        rhs = blahut_arimoto_capacity(data.pyx[xd], tol=cfg.ba_tol,
                                      max_iter=cfg.ba_max_iter).value
    cap = rhs - cfg.constraint_margin
    per_symbol = {}
    best_val, best_x, best_K = 0.0, xd[0], None
    if cap >= 0:
        for x in xd:
            A, B, rows = slice_grid_cloud(data, x, u_size, resolution)
            ok = B <= cap + 1e-12
            if not ok.any():
                per_symbol[x] = 0.0
                continue
            idx = np.flatnonzero(ok)[np.argmax(A[ok])]
            per_symbol[x] = float(A[idx])
            if per_symbol[x] > best_val:
                best_val = per_symbol[x]
                best_x = x
                best_K = _kernel_from_pair(rows, int(idx))
    else:
        per_symbol = {x: 0.0 for x in xd}
    return {"value": best_val, "per_symbol": per_symbol, "witness_symbol": best_x,
            "witness_kernel": best_K, "rhs": rhs, "feasible": True,
            "resolution": resolution}


def _pareto_envelope(B: np.ndarray, G: np.ndarray):
    """Upper envelope of G as a function of the budget B (both nondecreasing)."""
    order = np.argsort(B, kind="stable")
    Bs, Gs = B[order], G[order]
    Gmax = np.maximum.accumulate(Gs)
    keep = np.empty(len(Bs), dtype=bool)
    keep[0] = True
    keep[1:] = Gmax[1:] > Gmax[:-1] + 1e-15
    keep[0] = True
    return Bs[keep], Gmax[keep], order[keep]


def rif_lower_oracle(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                     u_size: int, px_resolution: int = 200,
                     kernel_resolution: int = 32,
                     cfg: SolverConfig | None = None) -> dict:
    """Exhaustive value of the randomized lower bound on binary-input channels.

    Exploits the Markov decomposition I(X,U;Y) = I(X;Y) + sum_x P(x)(A_x-B_x)
    with the constraint sum_x P(x) B_x <= I(X;Y) - margin: each slice enters
    only through its (B, A-B) cloud, so the per-slice lattice clouds are
    reduced to Pareto envelopes and recombined along a lattice over P_X(1).
    """
    cfg = cfg or SolverConfig()
    data = _SliceData(ch)
    if data.nx != 2:
        raise ValueError("randomized-bound oracle supports binary inputs only")
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return {"value": 0.0, "feasible": False}
    env = {}
    for x in range(2):
        A, B, _rows = slice_grid_cloud(data, x, u_size, kernel_resolution)
        env[x] = _pareto_envelope(B, A - B)
    dstar = est.dstar
    best = {"value": 0.0, "px1": None}
    for k in range(px_resolution + 1):
        p1 = k / px_resolution
        p = np.array([1.0 - p1, p1])
        if float(dstar @ p) > distortion_cap + 1e-12:
            continue
        py = p @ data.pyx
        ixy = entropy_vector(py) - float(p @ data.h_y_rows)
        budget = ixy - cfg.constraint_margin
        if budget < 0:
            continue
        val = _combine_envelopes(env, p, budget) + ixy
        if val > best["value"]:
            best = {"value": val, "px1": p1, "ixy": ixy}
    best["feasible"] = True
    best["px_resolution"] = px_resolution
    best["kernel_resolution"] = kernel_resolution
    return best


def _combine_envelopes(env, p, budget):
    """max over envelope points of sum_x p_x G_x s.t. sum_x p_x B_x <= budget."""
    (B0, G0, _), (B1, G1, _) = env[0], env[1]
    if p[0] <= 1e-15:
        j = np.searchsorted(B1, budget / p[1] + 1e-15, side="right") - 1
        return float(p[1] * G1[j]) if j >= 0 else 0.0
    if p[1] <= 1e-15:
        i = np.searchsorted(B0, budget / p[0] + 1e-15, side="right") - 1
        return float(p[0] * G0[i]) if i >= 0 else 0.0
    best = 0.0
    # envelopes are nondecreasing, so the best partner is the last affordable one
    for i in range(len(B0)):
        rem = budget - p[0] * B0[i]
        if rem < -1e-15:
            break
        j = np.searchsorted(B1, rem / p[1] + 1e-15, side="right") - 1
        if j >= 0:
            cand = p[0] * G0[i] + p[1] * G1[j]
            if cand > best:
                best = cand
    return float(best)


def rif_upper_oracle(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                     resolution: int = 1000) -> dict:
    """1-D lattice maximization of I((X,Z);Y) over feasible binary input laws."""
    data = _SliceData(ch)
    if data.nx != 2:
        raise ValueError("upper-bound oracle supports binary inputs only")
    avg = averaged_channel(ch)
    w = avg.table
    hy_xz = np.zeros((2, data.nz))
    for x in range(2):
        for z in range(data.nz):
            pz = data.pzx[x, z]
            if pz > 0:
                hy_xz[x, z] = entropy_vector(w[x, :, z] / pz)
    lin = (data.pzx * hy_xz).sum(axis=1)
    dstar = est.dstar
    best = {"value": 0.0, "px1": None, "feasible": False}
    for k in range(resolution + 1):
        p1 = k / resolution
        p = np.array([1.0 - p1, p1])
        if float(dstar @ p) > distortion_cap + 1e-12:
            continue
        val = entropy_vector(p @ data.pyx) - float(p @ lin)
        if not best["feasible"] or val > best["value"]:
            best = {"value": float(val), "px1": p1, "feasible": True}
    return best
