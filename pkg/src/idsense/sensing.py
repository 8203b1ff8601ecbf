"""Optimal state estimation from (input, feedback) pairs and distortion machinery.

The estimator is deterministic: for each reachable (x, z) it picks the symbol
minimizing the posterior expected distortion, ties broken by smallest index so
results are reproducible across platforms.  Unreachable (x, z) pairs get the
prior-optimal estimate; they carry zero probability, so per-symbol distortions
are unaffected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import StateChannel
from .errors import AlphabetMismatchError
from .tables import Alphabet, Pmf, _readonly

FEASIBILITY_SLACK = 1e-12  # one-sided, so boundary distributions are accepted


@dataclass(frozen=True)
class DistortionFn:
    """A nonnegative distortion table d(s, s_hat) on S x S."""

    support: Alphabet
    table: np.ndarray

    def __post_init__(self):
        t = _readonly(self.table)
        object.__setattr__(self, "table", t)
        n = self.support.size
        if t.shape != (n, n):
            raise AlphabetMismatchError(
                f"distortion table shape {t.shape}, expected ({n}, {n})"
            )
        if np.any(t < 0):
            raise ValueError("distortion values must be nonnegative")

    @classmethod
    def hamming(cls, support: Alphabet) -> "DistortionFn":
        return cls(support, 1.0 - np.eye(support.size))


@dataclass(frozen=True)
class EstimatorTable:
    """Deterministic map (x, z) -> s_hat with its per-symbol distortions d*(x)."""

    x_alphabet: Alphabet
    z_alphabet: Alphabet
    s_alphabet: Alphabet
    map_xz: np.ndarray      # int, shape (|X|, |Z|)
    dstar: np.ndarray       # float, shape (|X|,)
    reachable: np.ndarray   # bool, shape (|X|, |Z|)

    def __post_init__(self):
        m = np.array(self.map_xz, dtype=np.int64)
        m.setflags(write=False)
        object.__setattr__(self, "map_xz", m)
        object.__setattr__(self, "dstar", _readonly(self.dstar))
        r = np.array(self.reachable, dtype=bool)
        r.setflags(write=False)
        object.__setattr__(self, "reachable", r)

    def estimate(self, x: int, z: int) -> int:
        return int(self.map_xz[x, z])


def optimal_estimator(ch: StateChannel, d: DistortionFn) -> EstimatorTable:
    """Bayes-optimal deterministic estimator and the d*(x) table."""
    if d.support != ch.s_alphabet:
        raise AlphabetMismatchError("distortion alphabet does not match channel state")
    prior = ch.state_prior.probs
    # P(z | x, s), marginalized over y
    pz_xs = ch.kernel.table.sum(axis=2)           # (|X|, |S|, |Z|)
    nx, ns, nz = pz_xs.shape
    post = prior[None, :, None] * pz_xs           # unnormalized P(s | x, z)
    mass = post.sum(axis=1)                       # (|X|, |Z|)
    reachable = mass > 0.0
    weights = np.where(reachable[:, None, :], post, prior[None, :, None])
    # expected distortion of guessing s' from the (possibly prior) weights
    exp_d = np.einsum("xsz,st->xzt", weights, d.table)
    map_xz = exp_d.argmin(axis=2)                 # ties -> smallest index
    # d*(x) = sum_{s,z} P_S(s) P(z|x,s) d(s, h(x, z))
    dstar = np.empty(nx)
    for x in range(nx):
        dvals = d.table[:, map_xz[x]]             # (|S|, |Z|)
        dstar[x] = float((prior[:, None] * pz_xs[x].reshape(ns, nz) * dvals).sum())
    return EstimatorTable(ch.x_alphabet, ch.z_alphabet, ch.s_alphabet,
                          map_xz, dstar, reachable)


def dstar_symbol(est: EstimatorTable, ch: StateChannel, d: DistortionFn, x: int) -> float:
    """d*(x): expected distortion of the estimator when x is sent."""
    prior = ch.state_prior.probs
    pz_s = ch.kernel.table[x].sum(axis=1)         # (|S|, |Z|)
    dvals = d.table[:, est.map_xz[x]]
    return float((prior[:, None] * pz_s * dvals).sum())


def dstar_dist(est: EstimatorTable, ch: StateChannel, d: DistortionFn, px: Pmf) -> float:
    """d*(P_X) = sum_x P_X(x) d*(x); linear in the input distribution."""
    if px.support != est.x_alphabet:
        raise AlphabetMismatchError("input pmf alphabet does not match estimator")
    return float(px.probs @ est.dstar)


def feasible_symbols(est: EstimatorTable, distortion_cap: float) -> set[int]:
    """The sublevel set {x : d*(x) <= cap}; may be empty."""
    if distortion_cap < 0:
        raise ValueError("distortion cap must be nonnegative")
    return {int(x) for x in np.nonzero(est.dstar <= distortion_cap + FEASIBILITY_SLACK)[0]}


def feasible_check(est: EstimatorTable, ch: StateChannel, d: DistortionFn,
                   px: Pmf, distortion_cap: float) -> bool:
    """True iff d*(px) <= cap (+1e-12 slack for boundary distributions)."""
    return dstar_dist(est, ch, d, px) <= distortion_cap + FEASIBILITY_SLACK
