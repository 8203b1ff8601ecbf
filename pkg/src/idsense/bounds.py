"""Numerical evaluation of the capacity-distortion bounds.

Four bound evaluations (deterministic / randomized identification-with-
feedback, lower / upper each), the positive-capacity gate, and a time-sharing
baseline.  Upper bounds are exact enumerations or concave programs; lower
bounds are non-concave in the auxiliary kernel and are attacked with
multi-restart projected gradient ascent (central-difference gradients) plus
coarse-grid seeding on tiny instances.  Exhaustive grid oracles for the lower
bounds live in :mod:`idsense.oracles`.

Convention for the deterministic lower bound: the information constraint
compares I(U;Z|X=x,Y), evaluated in the slice X=x, against a right-hand side.
With X pinned to one symbol the literal I(X;Y) is zero, while the underlying
construction rides on a transmission code over the feasible symbols at rate
I(X;Y).  The default therefore sets the RHS to the capacity of the forward
marginal restricted to the feasible symbols (`rhs_mode="restricted-capacity"`);
`rhs_mode="slice-zero"` keeps the literal reading, which forces the bound to
zero.  The choice is recorded in every result's constraint report.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import StateChannel, averaged_channel
from .errors import AlphabetMismatchError
from .info import blahut_arimoto_capacity, entropy_vector
from .sensing import (
    DistortionFn,
    EstimatorTable,
    FEASIBILITY_SLACK,
    dstar_dist,
    feasible_symbols,
    optimal_estimator,
)
from .simplex import project_to_capped_simplex, project_to_simplex
from .tables import Alphabet, CondKernel, Pmf

SWEEP_COLUMNS = ("D", "rif_lower", "rif_upper", "dif_lower", "dif_upper",
                 "ts_lower", "ts_upper", "feasible")


@dataclass
class SolverConfig:
    """Knobs for the bound solvers; defaults are tuned for desk-scale alphabets."""

    u_alphabet_size: int | None = None   # None -> |Z| + 2
    restarts: int = 32
    warm_restarts: int = 6               # used inside warm-started sweeps
    ascent_steps: int = 60
    step_init: float = 0.25
    seed: int = 0
    constraint_margin: float = 1e-6      # strict "<" implemented as "<= rhs - margin"
    rhs_mode: str = "restricted-capacity"  # or "slice-zero"
    grid_seed_budget: int = 4096         # max coarse-grid combos used for seeding
    ba_tol: float = 1e-9
    ba_max_iter: int = 100_000
    gate_tol: float = 1e-9
    alt_rounds: int = 3
    penalty_init: float = 64.0
    penalty_growth: float = 32.0
    penalty_sweeps: int = 3
    diff_step: float = 1e-6
    fw_tol: float = 1e-11

    def __post_init__(self):
        if self.u_alphabet_size is not None and self.u_alphabet_size < 1:
            raise ValueError("u_alphabet_size must be >= 1")
        if self.constraint_margin <= 0:
            raise ValueError("constraint_margin must be positive")
        if self.rhs_mode not in ("restricted-capacity", "slice-zero"):
            raise ValueError(f"unknown rhs_mode {self.rhs_mode!r}")


@dataclass
class BoundResult:
    """A bound value together with its optimizing witnesses and diagnostics."""

    value: float
    kind: str
    feasible: bool
    witness_px: Pmf | None = None
    witness_aux: CondKernel | None = None
    constraint_report: dict = field(default_factory=dict)
    possibly_suboptimal: bool = False


class ChannelView:
    """Arrays precomputed once per channel for all bound evaluations."""

    def __init__(self, ch: StateChannel):
        self.ch = ch
        self.avg = averaged_channel(ch)
        w = self.avg.table                       # (nx, ny, nz)
        self.wyz = w
        self.nx, self.ny, self.nz = w.shape
        self.pyx = w.sum(axis=2)                 # forward marginal rows
        self.pzx = w.sum(axis=1)                 # feedback marginal rows
        with np.errstate(invalid="ignore", divide="ignore"):
            self.pz_given_xy = np.where(
                self.pyx[:, :, None] > 0, w / self.pyx[:, :, None], 0.0
            )
        self.h_y_rows = np.array([entropy_vector(r) for r in self.pyx])
        # sum_z P(z|x) H(Y | x, z), the linear part of I(X,Z;Y)
        hy_xz = np.zeros((self.nx, self.nz))
        for x in range(self.nx):
            for z in range(self.nz):
                pz = self.pzx[x, z]
                if pz > 0:
                    hy_xz[x, z] = entropy_vector(w[x, :, z] / pz)
        self.hy_given_xz_weighted = (self.pzx * hy_xz).sum(axis=1)


def _batch_mi(joint: np.ndarray, Ks: np.ndarray, pu: np.ndarray) -> np.ndarray:
    """I(U;Z) for a batch of kernels; cells that dip below zero during
    finite-difference probing contribute nothing (one-sided extension at the
    simplex boundary)."""
    mask = (joint > 0) & (pu[:, None, :] > 0)
    ratio = np.divide(Ks, pu[:, None, :], out=np.ones_like(Ks), where=mask)
    logs = np.zeros_like(Ks)
    np.log2(ratio, out=logs, where=mask)
    return (np.where(mask, joint, 0.0) * logs).sum(axis=(1, 2))


def slice_info_pair_batch(view: ChannelView, x: int, Ks: np.ndarray):
    """(A, B) = (I(U;Z|X=x), I(U;Z|X=x,Y)) for kernels of shape (m, nz, nu)."""
    pz = view.pzx[x]
    joint = pz[None, :, None] * Ks
    a = _batch_mi(joint, Ks, joint.sum(axis=1))
    b = np.zeros(len(Ks))
    for y in range(view.ny):
        py = view.pyx[x, y]
        if py > 0:
            j2 = view.pz_given_xy[x, y][None, :, None] * Ks
            b += py * _batch_mi(j2, Ks, j2.sum(axis=1))
    return a, b


def slice_info_pair(view: ChannelView, x: int, K: np.ndarray) -> tuple[float, float]:
    """(I(U;Z|X=x), I(U;Z|X=x,Y)) for an auxiliary kernel slice K = P(U|Z)."""
    a, b = slice_info_pair_batch(view, x, K[None, :, :])
    return float(a[0]), float(b[0])


def _perturbation_batch(K: np.ndarray, h: float) -> np.ndarray:
    """All +/- h coordinate perturbations of K, interleaved (+, -) per coord."""
    m = K.size
    Ks = np.repeat(K.reshape(1, -1), 2 * m, axis=0)
    idx = np.arange(m)
    Ks[2 * idx, idx] += h
    Ks[2 * idx + 1, idx] -= h
    return Ks.reshape((2 * m,) + K.shape)


# ---------------------------------------------------------------------------
# concave maximization over the distortion-feasible input simplex
# ---------------------------------------------------------------------------

def _objective_terms(view: ChannelView, objective: str,
                     extra_linear) -> np.ndarray:
    """Linear coefficient vector c so that f(P) = H(P @ pyx) + c @ P."""
    if objective == "ixy":
        c = -view.h_y_rows
    elif objective == "ixzy":
        c = -view.hy_given_xz_weighted
    elif objective == "hy":
        c = np.zeros(view.nx)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    if extra_linear is not None:
        c = c + np.asarray(extra_linear, dtype=float)
    return c


def _f_concave(view: ChannelView, c: np.ndarray, p: np.ndarray) -> float:
    py = p @ view.pyx
    return entropy_vector(py) + float(c @ p)


def _grad_concave_exact(view: ChannelView, c: np.ndarray, p: np.ndarray) -> np.ndarray:
    py = p @ view.pyx
    logpy = np.zeros_like(py)
    np.log2(py, out=logpy, where=py > 0)
    return -(view.pyx @ (logpy + 1.0 / np.log(2.0))) + c


def _polytope_vertices(dstar: np.ndarray, cap: float) -> np.ndarray:
    """Vertices of {P in simplex : dstar @ P <= cap}."""
    nx = dstar.size
    verts = []
    feas = [x for x in range(nx) if dstar[x] <= cap + FEASIBILITY_SLACK]
    for x in feas:
        e = np.zeros(nx)
        e[x] = 1.0
        verts.append(e)
    for a in feas:
        for b in range(nx):
            if dstar[b] > cap + FEASIBILITY_SLACK:
                theta = (cap - dstar[a]) / (dstar[b] - dstar[a])
                v = np.zeros(nx)
                v[a], v[b] = 1.0 - theta, theta
                verts.append(v)
    return np.array(verts)


def _newton_face_polish(view, c, p, dstar, cap, iters=30):
    """Active-set Newton polish for f(P) = H(P@pyx) + c@P on the polytope.

    Uses exact derivatives; PGA brings us near the optimum, this drives the
    value to machine precision so certificates and reduction checks hold.
    """
    nx = p.size
    p = p.copy()
    for _ in range(iters):
        grad = _grad_concave_exact(view, c, p)
        support = p > 1e-11
        dist_active = dstar @ p >= cap - 1e-11
        idx = np.nonzero(support)[0]
        # KKT system on the active face
        eq_rows = [np.ones(idx.size)]
        if dist_active:
            eq_rows.append(dstar[idx])
        E = np.array(eq_rows)
        py = p @ view.pyx
        inv = np.zeros_like(py)
        np.divide(1.0, py * np.log(2.0), out=inv, where=py > 0)
        H = -(view.pyx[idx] * inv[None, :]) @ view.pyx[idx].T
        k, m = idx.size, E.shape[0]
        kkt = np.zeros((k + m, k + m))
        kkt[:k, :k] = H
        kkt[:k, k:] = E.T
        kkt[k:, :k] = E
        rhs = np.concatenate([-grad[idx], np.zeros(m)])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        step = np.zeros(nx)
        step[idx] = sol[:k]
        # backtrack to stay feasible
        t = 1.0
        f0 = _f_concave(view, c, p)
        improved = False
        for _ in range(40):
            cand = p + t * step
            if cand.min() < -1e-14 or dstar @ cand > cap + FEASIBILITY_SLACK:
                t *= 0.5
                continue
            cand = np.maximum(cand, 0.0)
            cand /= cand.sum()
            if dstar @ cand > cap + FEASIBILITY_SLACK:
                cand = project_to_capped_simplex(cand, dstar, cap)
            if _f_concave(view, c, cand) >= f0 - 1e-15:
                p = cand
                improved = True
                break
            t *= 0.5
        if not improved or float(np.abs(step).max()) * t < 1e-13:
            # try releasing a zero coordinate with positive reduced gradient
            off = np.nonzero(~support)[0]
            if off.size:
                mult = grad[idx].mean()
                gains = grad[off] - mult
                j = off[np.argmax(gains)]
                if gains.max() > 1e-11:
                    p[j] = 1e-6
                    p = project_to_capped_simplex(p, dstar, cap)
                    continue
            break
    return p


def maximize_concave_over_pd(view: ChannelView, dstar: np.ndarray, cap: float,
                             objective: str, cfg: SolverConfig,
                             warm: np.ndarray | None = None,
                             extra_linear=None):
    """Maximize a concave objective of P_X over {P : dstar @ P <= cap}.

    Projected ascent with central-difference gradients, then an exact-Newton
    face polish; the Frank-Wolfe gap over the polytope vertices is returned as
    the optimality certificate.  Returns (value, P, fw_gap).
    """
    if float(dstar.min()) > cap + FEASIBILITY_SLACK:
        raise ValueError("empty feasible set")
    c = _objective_terms(view, objective, extra_linear)
    nx = view.nx
    cap_eff = max(cap, float(dstar.min()))
    starts = []
    if warm is not None:
        starts.append(np.asarray(warm, dtype=float))
    starts.append(project_to_capped_simplex(np.full(nx, 1.0 / nx), dstar, cap_eff))
    verts = _polytope_vertices(dstar, cap_eff)
    if len(verts):
        starts.append(verts.mean(axis=0))
    best_val, best_p = -np.inf, None
    h = cfg.diff_step
    for p0 in starts:
        p = project_to_capped_simplex(p0, dstar, cap_eff)
        step = cfg.step_init
        fval = _f_concave(view, c, p)
        for _ in range(200):
            g = np.empty(nx)
            for i in range(nx):
                e = np.zeros(nx)
                e[i] = h
                g[i] = (_f_concave(view, c, p + e) - _f_concave(view, c, p - e)) / (2 * h)
            moved = False
            while step > 1e-9:
                cand = project_to_capped_simplex(p + step * g, dstar, cap_eff)
                fc = _f_concave(view, c, cand)
                if fc > fval + 1e-15:
                    p, fval = cand, fc
                    step = min(step * 1.6, 1.0)
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        p = _newton_face_polish(view, c, p, dstar, cap_eff)
        fval = _f_concave(view, c, p)
        if fval > best_val:
            best_val, best_p = fval, p
    g = _grad_concave_exact(view, c, best_p)
    fw_gap = float(max((verts @ g).max() - g @ best_p, 0.0)) if len(verts) else 0.0
    return best_val, best_p, fw_gap


# ---------------------------------------------------------------------------
# gate and upper bounds
# ---------------------------------------------------------------------------

def capacity_gate(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                  kind: str = "dif", cfg: SolverConfig | None = None):
    """Transmission capacity of the forward marginal under the distortion cap.

    ``kind="dif"``: Blahut-Arimoto capacity of the forward marginal restricted
    to the feasible symbols.  ``kind="rif"``: max of I(X;Y) over the feasible
    input simplex.  Lower bounds return zero whenever this gate is ~0.
    Returns (value, argmax input law or None).
    """
    cfg = cfg or SolverConfig()
    view = ChannelView(ch)
    return _capacity_gate(view, est, distortion_cap, kind, cfg)


def _capacity_gate(view, est, distortion_cap, kind, cfg):
    xd = sorted(feasible_symbols(est, distortion_cap))
    x_alpha = view.ch.x_alphabet
    if not xd:
        return 0.0, None
    if kind == "dif":
        if len(xd) == 1:
            return 0.0, Pmf.point_mass(x_alpha, xd[0])
        res = blahut_arimoto_capacity(view.pyx[xd], tol=cfg.ba_tol,
                                      max_iter=cfg.ba_max_iter)
        full = np.zeros(view.nx)
        full[xd] = res.argmax.probs
        return res.value, Pmf(x_alpha, full)
    if kind == "rif":
        val, p, _ = maximize_concave_over_pd(view, est.dstar, distortion_cap,
                                             "ixy", cfg)
        return max(val, 0.0), Pmf(x_alpha, project_to_simplex(p))
    raise ValueError(f"unknown gate kind {kind!r}")


def dif_upper_bound(ch: StateChannel, est: EstimatorTable,
                    distortion_cap: float) -> BoundResult:
    """min{ max_x I(Y;Z|X=x), max_x H(Z|X=x) } over the feasible symbols.

    Exact enumeration; no solver involved.
    """
    view = ChannelView(ch)
    return _dif_upper(view, est, distortion_cap)


def _dif_upper(view, est, distortion_cap):
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return BoundResult(0.0, "dif-upper", False,
                           constraint_report={"feasible_symbols": []})
    iyz = {}
    hz = {}
    for x in xd:
        # mutual information of the (Y, Z) block at X=x
        block = view.wyz[x]
        py = block.sum(axis=1)
        pz = block.sum(axis=0)
        mask = block > 0
        ratio = np.divide(block, py[:, None] * pz[None, :],
                          out=np.ones_like(block), where=mask)
        iyz[x] = float((block[mask] * np.log2(ratio[mask])).sum())
        hz[x] = entropy_vector(pz)
    x_i = max(iyz, key=iyz.get)
    x_h = max(hz, key=hz.get)
    value = min(iyz[x_i], hz[x_h])
    wit_x = x_i if iyz[x_i] <= hz[x_h] else x_h
    return BoundResult(
        value, "dif-upper", True,
        witness_px=Pmf.point_mass(view.ch.x_alphabet, wit_x),
        constraint_report={
            "feasible_symbols": xd,
            "max_I_YZ_given_x": iyz[x_i],
            "max_H_Z_given_x": hz[x_h],
            "I_YZ_by_symbol": iyz,
            "H_Z_by_symbol": hz,
        },
    )


def rif_upper_bound(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                    cfg: SolverConfig | None = None,
                    warm: np.ndarray | None = None) -> BoundResult:
    """max I((X,Z);Y) over the distortion-feasible input simplex.

    The objective is concave in P_X (H(Y) concave, H(Y|X,Z) linear), so the
    projected-ascent + Newton-polish solve is globally optimal; the
    Frank-Wolfe gap over the polytope vertices is recorded as certificate.
    """
    cfg = cfg or SolverConfig()
    view = ChannelView(ch)
    return _rif_upper(view, est, distortion_cap, cfg, warm)


def _rif_upper(view, est, distortion_cap, cfg, warm=None):
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return BoundResult(0.0, "rif-upper", False,
                           constraint_report={"feasible_symbols": []})
    full_cap = blahut_arimoto_capacity(view.pyx, tol=cfg.ba_tol,
                                       max_iter=cfg.ba_max_iter)
    if full_cap.value <= cfg.gate_tol:
        # zero-capacity channel: the identification rate is exactly zero
        return BoundResult(0.0, "rif-upper", True,
                           constraint_report={"marginal_capacity": full_cap.value})
    val, p, gap = maximize_concave_over_pd(view, est.dstar, distortion_cap,
                                           "ixzy", cfg, warm=warm)
    return BoundResult(
        max(val, 0.0), "rif-upper", True,
        witness_px=Pmf(view.ch.x_alphabet, project_to_simplex(p)),
        constraint_report={"fw_gap": gap, "marginal_capacity": full_cap.value},
    )


def rif_upper_objective(ch: StateChannel, px: Pmf) -> float:
    """I((X,Z);Y) under P_X * averaged channel; exposed for property checks."""
    view = ChannelView(ch)
    c = _objective_terms(view, "ixzy", None)
    return _f_concave(view, c, px.probs)


# ---------------------------------------------------------------------------
# lower bounds (non-concave in the auxiliary kernel)
# ---------------------------------------------------------------------------

def _u_size(cfg: SolverConfig, nz: int) -> int:
    # enough auxiliary letters to trace the constraint boundary
    return cfg.u_alphabet_size if cfg.u_alphabet_size is not None else nz + 2


def _project_rows(K: np.ndarray) -> np.ndarray:
    return np.stack([project_to_simplex(row) for row in K])


def _copy_kernel(nz: int, nu: int) -> np.ndarray:
    K = np.zeros((nz, nu))
    K[np.arange(nz), np.arange(nz)] = 1.0
    return K


def _const_kernel(nz: int, nu: int) -> np.ndarray:
    K = np.zeros((nz, nu))
    K[:, 0] = 1.0
    return K


def _composition_rows(nu: int, resolution: int) -> np.ndarray:
    """All pmfs on nu letters with entries that are multiples of 1/resolution."""
    combos = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            combos.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], resolution, nu)
    return np.array(combos, dtype=float) / resolution


def _grid_seed_kernels(nz: int, nu: int, budget: int) -> list[np.ndarray]:
    """Coarse exhaustive grid over row-stochastic kernels, within a combo budget."""
    for res in (16, 12, 10, 8, 6, 5, 4, 3, 2):
        rows = _composition_rows(nu, res)
        if len(rows) ** nz <= budget:
            break
    else:
        return []
    out = []
    for idx in np.ndindex(*([len(rows)] * nz)):
        out.append(rows[list(idx)])
    return out


def _ascend_kernel(view, x, K0, cap, cfg, steps):
    """Penalized projected ascent of I(U;Z|X=x) s.t. I(U;Z|X=x,Y) <= cap."""
    best_val, best_K, best_b = -np.inf, None, None
    improved_by_ascent = False

    def consider(K, a, b):
        nonlocal best_val, best_K, best_b
        if b <= cap + 1e-12 and a > best_val:
            best_val, best_K, best_b = a, K.copy(), b
            return True
        return False

    K = K0.copy()
    a, b = slice_info_pair(view, x, K)
    consider(K, a, b)
    h = cfg.diff_step
    rho = cfg.penalty_init
    per_sweep = max(1, cfg.ascent_steps // cfg.penalty_sweeps)
    for _ in range(cfg.penalty_sweeps):
        step = cfg.step_init
        phi = a - rho * max(0.0, b - cap) ** 2
        for _ in range(per_sweep):
            ap, bp = slice_info_pair_batch(view, x, _perturbation_batch(K, h))
            phis = ap - rho * np.maximum(0.0, bp - cap) ** 2
            g = ((phis[0::2] - phis[1::2]) / (2 * h)).reshape(K.shape)
            moved = False
            while step > 1e-7:
                Kn = _project_rows(K + step * g)
                an, bn = slice_info_pair(view, x, Kn)
                phin = an - rho * max(0.0, bn - cap) ** 2
                if phin > phi + 1e-15:
                    K, a, b, phi = Kn, an, bn, phin
                    if consider(K, a, b):
                        improved_by_ascent = True
                    step = min(step * 1.6, 1.0)
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        rho *= cfg.penalty_growth
        phi = a - rho * max(0.0, b - cap) ** 2
    return best_val, best_K, best_b, improved_by_ascent


def _max_slice_mi(view, x, cap, nu, cfg, rng):
    """Best I(U;Z|X=x) subject to the slice information constraint.

    Multi-restart ascent from structured, coarse-grid, and random seeds.
    Returns (value, kernel, lhs, ascent_ever_improved).
    """
    nz = view.nz
    if cap < 0:
        return 0.0, _const_kernel(nz, nu), 0.0, False
    pz = view.pzx[x]
    hz = entropy_vector(pz)
    a_max = min(hz, np.log2(nu) if nu > 1 else 0.0)
    seeds = [_const_kernel(nz, nu)]
    if nu >= nz:
        copy = _copy_kernel(nz, nu)
        a_c, b_c = slice_info_pair(view, x, copy)
        if b_c <= cap + 1e-12:
            # copying the feedback symbol is globally optimal when feasible
            return a_c, copy, b_c, False
        seeds.append(copy)
        seeds.append(_project_rows(0.85 * copy + 0.15 / nu))
    if nz * nu <= 6:
        grid = _grid_seed_kernels(nz, nu, cfg.grid_seed_budget)
        if grid:
            batch = np.stack(grid)
            a, b = slice_info_pair_batch(view, x, batch)
            score = np.where(b <= cap + 1e-12, a, a - 10.0 * (b - cap))
            for idx in np.argsort(-score)[:4]:
                seeds.append(grid[int(idx)])
    while len(seeds) < cfg.restarts:
        seeds.append(rng.dirichlet(np.ones(nu), size=nz))
    best = (0.0, _const_kernel(nz, nu), 0.0, False)
    any_improved = False
    for K0 in seeds[: cfg.restarts]:
        val, K, b, improved = _ascend_kernel(view, x, K0, cap, cfg,
                                             cfg.ascent_steps)
        any_improved = any_improved or improved
        if K is not None and val > best[0]:
            best = (val, K, b, improved)
        if best[0] >= a_max - 1e-12:
            break
    return best[0], best[1], best[2], any_improved


def _dif_rhs(view, est, distortion_cap, cfg):
    if cfg.rhs_mode == "slice-zero":
        return 0.0, None
    return _capacity_gate(view, est, distortion_cap, "dif", cfg)


def dif_lower_bound(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                    cfg: SolverConfig | None = None) -> BoundResult:
    """max over feasible x and auxiliary kernels of I(U;Z|X=x).

    Constraint: I(U;Z|X=x,Y) <= RHS - margin, with the RHS determined by
    ``cfg.rhs_mode`` (see module docstring).  Zero when the gate is ~0.
    """
    cfg = cfg or SolverConfig()
    view = ChannelView(ch)
    return _dif_lower(view, est, distortion_cap, cfg)


def _dif_lower(view, est, distortion_cap, cfg):
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return BoundResult(0.0, "dif-lower", False,
                           constraint_report={"feasible_symbols": []})
    rhs, _ = _dif_rhs(view, est, distortion_cap, cfg)
    report = {"feasible_symbols": xd, "rhs": rhs, "rhs_mode": cfg.rhs_mode,
              "margin": cfg.constraint_margin}
    cap = rhs - cfg.constraint_margin
    if cap < 0:
        report["constraint_infeasible"] = True
        return BoundResult(0.0, "dif-lower", True, constraint_report=report)
    nu = _u_size(cfg, view.nz)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0xD1F]))
    best_val, best_x, best_K, best_b = 0.0, xd[0], _const_kernel(view.nz, nu), 0.0
    any_improved = False
    per_x = {}
    for x in xd:
        val, K, b, improved = _max_slice_mi(view, x, cap, nu, cfg, rng)
        per_x[x] = val
        any_improved = any_improved or improved
        if val > best_val:
            best_val, best_x, best_K, best_b = val, x, K, b
    report.update({"per_symbol_values": per_x, "lhs": best_b,
                   "witness_symbol": best_x})
    aux_table = np.full((view.nx, view.nz, nu), 1.0 / nu)
    aux_table[best_x] = best_K
    u_alpha = Alphabet("U", nu)
    return BoundResult(
        best_val, "dif-lower", True,
        witness_px=Pmf.point_mass(view.ch.x_alphabet, best_x),
        witness_aux=CondKernel((view.ch.x_alphabet, view.ch.z_alphabet),
                               (u_alpha,), aux_table),
        constraint_report=report,
        possibly_suboptimal=(best_val > 0 and not any_improved and view.nz * nu > 6),
    )


# ---------------------------------------------------------------------------
# randomized lower bound: alternating maximization over (P_X, P_{U|XZ})
# ---------------------------------------------------------------------------

def _rif_objective(view, p, ab_pairs):
    """I(X,U;Y) = I(X;Y) + sum_x P(x) (A_x - B_x) by the Markov chain."""
    ixy = _f_concave(view, -view.h_y_rows, p)
    gain = sum(p[x] * (ab_pairs[x][0] - ab_pairs[x][1]) for x in range(view.nx))
    return ixy + gain, ixy


def _rif_constraint_lhs(view, p, ab_pairs):
    return sum(p[x] * ab_pairs[x][1] for x in range(view.nx))


def _eval_all_slices(view, K):
    return [slice_info_pair(view, x, K[x]) for x in range(view.nx)]


def _rif_inner_ascent(view, p, K, cfg, steps):
    """Ascend the kernel rows with P_X held fixed (penalized, per-slice diffs)."""
    ab = _eval_all_slices(view, K)
    ixy = _f_concave(view, -view.h_y_rows, p)
    cap = ixy - cfg.constraint_margin
    h = cfg.diff_step
    rho = cfg.penalty_init

    def phi_of(ab_pairs):
        gain = sum(p[x] * (a - b) for x, (a, b) in enumerate(ab_pairs))
        lhs = sum(p[x] * b for x, (_, b) in enumerate(ab_pairs))
        return gain - rho * max(0.0, lhs - cap) ** 2

    for _ in range(cfg.penalty_sweeps):
        step = cfg.step_init
        phi = phi_of(ab)
        for _ in range(max(1, steps // cfg.penalty_sweeps)):
            g = np.zeros_like(K)
            gain_all = sum(p[x] * (a - b) for x, (a, b) in enumerate(ab))
            lhs_all = sum(p[x] * b for x, (_, b) in enumerate(ab))
            for x in range(view.nx):
                if p[x] <= 1e-12:
                    continue  # slice has no weight; leave its kernel alone
                a_x, b_x = ab[x]
                gain_rest = gain_all - p[x] * (a_x - b_x)
                lhs_rest = lhs_all - p[x] * b_x
                ap, bp = slice_info_pair_batch(view, x,
                                               _perturbation_batch(K[x], h))
                phis = (gain_rest + p[x] * (ap - bp)
                        - rho * np.maximum(0.0, lhs_rest + p[x] * bp - cap) ** 2)
                g[x] = ((phis[0::2] - phis[1::2]) / (2 * h)).reshape(K[x].shape)
            moved = False
            while step > 1e-7:
                Kn = np.stack([_project_rows(K[x] + step * g[x])
                               for x in range(view.nx)])
                abn = _eval_all_slices(view, Kn)
                phin = phi_of(abn)
                if phin > phi + 1e-15:
                    K, ab, phi = Kn, abn, phin
                    step = min(step * 1.6, 1.0)
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        rho *= cfg.penalty_growth
    return K, ab


def _rif_outer_ascent(view, est, distortion_cap, p, ab, cfg, steps):
    """Ascend P_X with the kernels (hence each slice's A, B) held fixed."""
    gvec = np.array([a - b for a, b in ab])
    bvec = np.array([b for _, b in ab])
    h = cfg.diff_step
    rho = cfg.penalty_init

    def phi_of(pv):
        ixy = _f_concave(view, -view.h_y_rows, pv)
        val = ixy + float(gvec @ pv)
        lhs = float(bvec @ pv)
        return val - rho * max(0.0, lhs - (ixy - cfg.constraint_margin)) ** 2

    for _ in range(cfg.penalty_sweeps):
        step = cfg.step_init
        phi = phi_of(p)
        for _ in range(max(1, steps // cfg.penalty_sweeps)):
            g = np.empty(view.nx)
            for i in range(view.nx):
                e = np.zeros(view.nx)
                e[i] = h
                g[i] = (phi_of(p + e) - phi_of(p - e)) / (2 * h)
            moved = False
            while step > 1e-9:
                cand = project_to_capped_simplex(p + step * g, est.dstar,
                                                 max(distortion_cap,
                                                     float(est.dstar.min())))
                phin = phi_of(cand)
                if phin > phi + 1e-15:
                    p, phi = cand, phin
                    step = min(step * 1.6, 1.0)
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        rho *= cfg.penalty_growth
    return p


def rif_lower_bound(ch: StateChannel, est: EstimatorTable, distortion_cap: float,
                    cfg: SolverConfig | None = None,
                    warm: tuple | None = None) -> BoundResult:
    """max I(X,U;Y) over feasible P_X and kernels P_{U|X,Z}.

    Constraint: I(U;Z|X,Y) <= I(X;Y) - margin under the same joint.  Always at
    least the gate value (a constant auxiliary achieves I(X;Y)); zero when the
    gate is ~0.  ``warm`` may carry (P, K) from a neighboring solve.
    """
    cfg = cfg or SolverConfig()
    view = ChannelView(ch)
    return _rif_lower(view, est, distortion_cap, cfg, warm)


def _rif_lower(view, est, distortion_cap, cfg, warm=None, restarts=None):
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return BoundResult(0.0, "rif-lower", False,
                           constraint_report={"feasible_symbols": []})
    gate, gate_px = _capacity_gate(view, est, distortion_cap, "rif", cfg)
    report = {"feasible_symbols": xd, "gate": gate,
              "margin": cfg.constraint_margin}
    if gate <= max(cfg.gate_tol, cfg.constraint_margin):
        return BoundResult(0.0, "rif-lower", True, constraint_report=report)
    nu = _u_size(cfg, view.nz)
    nz = view.nz
    cap_eff = max(distortion_cap, float(est.dstar.min()))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x51F]))
    n_restarts = cfg.restarts if restarts is None else restarts

    best = None  # (value, p, K, lhs, rhs)

    def consider(p, K, ab=None):
        nonlocal best
        ab = ab if ab is not None else _eval_all_slices(view, K)
        val, ixy = _rif_objective(view, p, ab)
        lhs = _rif_constraint_lhs(view, p, ab)
        if lhs <= ixy - cfg.constraint_margin + 1e-12:
            if best is None or val > best[0]:
                best = (val, p.copy(), K.copy(), lhs, ixy - cfg.constraint_margin)

    # floor: constant auxiliary at the gate argmax achieves I(X;Y)
    constK = np.stack([_const_kernel(nz, nu)] * view.nx)
    consider(gate_px.probs, constK)

    # frozen copy kernel: exact concave solve when its constraint is slack
    if nu >= nz:
        copyK = np.stack([_copy_kernel(nz, nu)] * view.nx)
        ab_copy = _eval_all_slices(view, copyK)
        bmax = max(b for _, b in ab_copy)
        if bmax < 1e-13:
            gvec = np.array([a for a, _ in ab_copy])
            val, p, _ = maximize_concave_over_pd(
                view, est.dstar, cap_eff, "ixy", cfg, extra_linear=gvec
            )
            consider(project_to_simplex(p), copyK, None)
        else:
            consider(gate_px.probs, copyK)

    starts = []
    if warm is not None:
        wp, wk = warm
        starts.append((np.asarray(wp, float).copy(), np.asarray(wk, float).copy()))
        consider(starts[-1][0], starts[-1][1])
    starts.append((gate_px.probs.copy(),
                   np.stack([_project_rows(0.85 * _copy_kernel(nz, nu) + 0.15 / nu)
                             if nu >= nz else rng.dirichlet(np.ones(nu), size=nz)
                             for _ in range(view.nx)])))
    while len(starts) < n_restarts:
        p0 = project_to_capped_simplex(rng.dirichlet(np.ones(view.nx)),
                                       est.dstar, cap_eff)
        K0 = np.stack([rng.dirichlet(np.ones(nu), size=nz)
                       for _ in range(view.nx)])
        starts.append((p0, K0))

    for p0, K0 in starts[:n_restarts]:
        p, K = p0.copy(), K0.copy()
        for _ in range(cfg.alt_rounds):
            K, ab = _rif_inner_ascent(view, p, K, cfg, cfg.ascent_steps)
            consider(p, K, ab)
            p = _rif_outer_ascent(view, est, distortion_cap, p, ab, cfg,
                                  cfg.ascent_steps)
            consider(p, K)

    value, p, K, lhs, rhs_eff = best
    report.update({"lhs": lhs, "rhs": rhs_eff + cfg.constraint_margin})
    u_alpha = Alphabet("U", nu)
    return BoundResult(
        max(value, 0.0), "rif-lower", True,
        witness_px=Pmf(view.ch.x_alphabet, project_to_simplex(p)),
        witness_aux=CondKernel((view.ch.x_alphabet, view.ch.z_alphabet),
                               (u_alpha,), K),
        constraint_report=report,
    )


# ---------------------------------------------------------------------------
# time-sharing baseline and grid sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    D: float
    rif_lower: float
    rif_upper: float
    dif_lower: float
    dif_upper: float
    ts_lower: float
    ts_upper: float
    feasible: bool

    def as_tuple(self):
        return (self.D, self.rif_lower, self.rif_upper, self.dif_lower,
                self.dif_upper, self.ts_lower, self.ts_upper, self.feasible)


@dataclass
class SweepTable:
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def time_sharing_baseline(ch: StateChannel, est: EstimatorTable, d: DistortionFn,
                          bound_kind: str, d_grid, cfg: SolverConfig | None = None):
    """Time sharing between pure sensing and unconstrained identification.

    Mixes the point mass on argmin_x d*(x) with the unconstrained optimizer of
    the chosen bound objective; the curve is the straight line between the two
    endpoints, sampled on ``d_grid`` by inverting the linear distortion map.
    Returns a list of (D, rate, feasible) triples.
    """
    cfg = cfg or SolverConfig()
    d_grid = np.asarray(d_grid, dtype=float)
    if np.any(np.diff(d_grid) < 0):
        raise ValueError("d_grid must be sorted ascending")
    x_sense = int(np.argmin(est.dstar))
    d_min = float(est.dstar[x_sense])
    d_inf = float(est.dstar.max())
    solver = {
        "rif-lower": rif_lower_bound,
        "rif-upper": rif_upper_bound,
        "dif-lower": dif_lower_bound,
        "dif-upper": lambda c, e, D, cfg=None: dif_upper_bound(c, e, D),
    }[bound_kind]
    res = solver(ch, est, d_inf, cfg)
    rate_id = res.value
    p_id = res.witness_px if res.witness_px is not None else Pmf.point_mass(
        ch.x_alphabet, x_sense)
    d_id = dstar_dist(est, ch, d, p_id)
    out = []
    for D in d_grid:
        if D < d_min - FEASIBILITY_SLACK:
            out.append((float(D), 0.0, False))
        elif d_id <= d_min + 1e-15:
            out.append((float(D), rate_id, True))
        else:
            alpha = float(np.clip((D - d_min) / (d_id - d_min), 0.0, 1.0))
            out.append((float(D), alpha * rate_id, True))
    return out


def sweep_bounds(ch: StateChannel, d: DistortionFn, d_grid,
                 cfg: SolverConfig | None = None) -> SweepTable:
    """All bounds plus time-sharing baselines on an ascending distortion grid.

    Deterministic identification bounds depend on D only through the feasible
    symbol set, so they are computed once per distinct set.  Randomized bounds
    are warm-started along the grid (the previous witness stays feasible as the
    constraint relaxes, which also makes the curves monotone by construction).
    """
    cfg = cfg or SolverConfig()
    d_grid = np.asarray(d_grid, dtype=float)
    if np.any(np.diff(d_grid) < 0):
        raise ValueError("d_grid must be sorted ascending")
    est = optimal_estimator(ch, d)
    view = ChannelView(ch)
    ts_low = time_sharing_baseline(ch, est, d, "rif-lower", d_grid, cfg)
    ts_up = time_sharing_baseline(ch, est, d, "rif-upper", d_grid, cfg)

    dif_cache: dict = {}
    rows = []
    warm_up = None
    warm_low = None
    first_feasible = True
    for i, D in enumerate(d_grid):
        xd = frozenset(feasible_symbols(est, D))
        if not xd:
            rows.append(SweepRow(float(D), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False))
            continue
        if xd not in dif_cache:
            dif_cache[xd] = (_dif_lower(view, est, D, cfg),
                             _dif_upper(view, est, D))
        dl, du = dif_cache[xd]
        ru = _rif_upper(view, est, float(D), cfg, warm=warm_up)
        n_restarts = None if first_feasible else cfg.warm_restarts
        rl = _rif_lower(view, est, float(D), cfg, warm=warm_low,
                        restarts=n_restarts)
        first_feasible = False
        if ru.witness_px is not None:
            warm_up = ru.witness_px.probs
        if rl.witness_px is not None and rl.witness_aux is not None:
            warm_low = (rl.witness_px.probs, rl.witness_aux.table)
        rows.append(SweepRow(float(D), rl.value, ru.value, dl.value, du.value,
                             ts_low[i][1], ts_up[i][1], True))
    return SweepTable(rows, meta={"columns": SWEEP_COLUMNS})


# ---------------------------------------------------------------------------
# noiseless-feedback reduction reference
# ---------------------------------------------------------------------------

def noiseless_feedback_reference(ch: StateChannel, est: EstimatorTable,
                                 distortion_cap: float,
                                 cfg: SolverConfig | None = None) -> dict:
    """The four bounds with the feedback symbol replaced by the channel output.

    Valid only for channels whose feedback kernel is the identity; evaluates
    the substituted formulas (every Z becomes Y) on the forward-marginal data,
    bypassing the feedback-symbol machinery entirely:

    - dif-upper -> min{max_x I(Y;Y|X=x), max_x H(Y|X=x)} = max_x H(Y|X=x)
    - dif-lower -> max_x H(Y|X=x) when the restricted capacity clears the
      margin (the copy auxiliary is optimal and its constraint is 0)
    - rif-upper -> max over feasible P_X of I((X,Y);Y) = H(Y)
    - rif-lower -> max over feasible P_X of I(X;Y) + H(Y|X) = H(Y)
    """
    cfg = cfg or SolverConfig()
    view = ChannelView(ch)
    offdiag = 0.0
    for x in range(view.nx):
        block = view.wyz[x]
        offdiag = max(offdiag, float(np.abs(block - np.diag(np.diag(block))).sum()))
    if offdiag > 1e-12:
        raise ValueError("noiseless reference requires identity feedback (Z = Y)")
    xd = sorted(feasible_symbols(est, distortion_cap))
    if not xd:
        return {"dif-upper": 0.0, "dif-lower": 0.0,
                "rif-upper": 0.0, "rif-lower": 0.0}
    h_rows = view.h_y_rows
    # I(Y;Y|X=x) and H(Z|X=x) both substitute to H(Y|X=x)
    dif_up = max(h_rows[x] for x in xd)
    rhs, _ = _dif_rhs(view, est, distortion_cap, cfg)
    dif_low = max(h_rows[x] for x in xd) if rhs - cfg.constraint_margin >= 0 else 0.0
    val_up, _, _ = maximize_concave_over_pd(view, est.dstar, distortion_cap,
                                            "hy", cfg)
    gate, _ = _capacity_gate(view, est, distortion_cap, "rif", cfg)
    if gate <= max(cfg.gate_tol, cfg.constraint_margin):
        val_low = 0.0
    else:
        val_low, _, _ = maximize_concave_over_pd(
            view, est.dstar, distortion_cap, "ixy", cfg, extra_linear=h_rows
        )
    return {"dif-upper": float(dif_up), "dif-lower": float(dif_low),
            "rif-upper": float(val_up), "rif-lower": float(val_low)}
