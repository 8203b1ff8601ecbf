"""Entropy and (conditional) mutual information over joint tables, in bits.

Two independent mutual-information implementations are provided: the
entropy-combination route (`cond_mutual_info`) used throughout the library,
and a direct KL-divergence sum (`mutual_info_kl`) kept as the test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .tables import Alphabet, CondKernel, JointTable, Pmf

NEG_TOL = 1e-10  # anything more negative than this is a bug, not round-off

BITS_PER_NAT = 1.0 / np.log(2.0)


def xlog2x(p: np.ndarray) -> np.ndarray:
    """Elementwise p*log2(p) with 0*log 0 = 0."""
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    np.log2(p, out=out, where=p > 0)
    return p * out


def entropy_vector(p) -> float:
    """Shannon entropy in bits of a probability vector."""
    return float(-xlog2x(np.asarray(p)).sum())


def binary_entropy(p: float) -> float:
    """h_b(p) = -p log2 p - (1-p) log2 (1-p)."""
    return entropy_vector(np.array([1.0 - p, p]))


def binary_convolution(p: float, q: float) -> float:
    """p * q = p(1-q) + (1-p)q."""
    return p * (1.0 - q) + (1.0 - p) * q


def _clamp(value: float) -> float:
    if value < -NEG_TOL:
        raise AssertionError(
            f"information quantity {value} below -{NEG_TOL}: numerical bug"
        )
    return max(value, 0.0)


def entropy(jt: JointTable, variables) -> float:
    """Entropy in bits of the marginal over ``variables``."""
    return entropy_vector(jt.marginal(tuple(variables)).probs)


def cond_entropy(jt: JointTable, target, given=()) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    target, given = tuple(target), tuple(given)
    if not given:
        return entropy(jt, target)
    return _clamp(entropy(jt, target + given) - entropy(jt, given))


def mutual_info(jt: JointTable, a, b) -> float:
    """I(A;B) = H(A) + H(B) - H(A,B)."""
    a, b = tuple(a), tuple(b)
    return _clamp(entropy(jt, a) + entropy(jt, b) - entropy(jt, a + b))


def cond_mutual_info(jt: JointTable, a, b, given=()) -> float:
    """I(A;B|G) from marginal entropies, clamped to zero at -1e-10 round-off."""
    a, b, given = tuple(a), tuple(b), tuple(given)
    if not given:
        return mutual_info(jt, a, b)
    value = (
        entropy(jt, a + given)
        + entropy(jt, b + given)
        - entropy(jt, a + b + given)
        - entropy(jt, given)
    )
    return _clamp(value)


def cond_mutual_info_at(jt: JointTable, a, b, variable: str, symbol: int) -> float:
    """I(A;B | variable = symbol), the mutual information of the conditional slice."""
    _, sliced = jt.slice_given(variable, symbol)
    return mutual_info(sliced, tuple(a), tuple(b))


def mutual_info_kl(jt: JointTable, a, b, given=()) -> float:
    """Reference implementation: I(A;B|G) as a weighted KL-divergence sum.

    Kept independent of the entropy-combination route; used as the oracle in
    the test suite.
    """
    a, b, given = tuple(a), tuple(b), tuple(given)
    joint = jt.marginal(a + b + given).probs
    na, nb = len(a), len(b)
    pab = joint.reshape(
        int(np.prod(joint.shape[:na], initial=1)),
        int(np.prod(joint.shape[na:na + nb], initial=1)),
        -1,
    )  # (A, B, G) with G flattened (size 1 if unconditioned)
    total = 0.0
    for g in range(pab.shape[2]):
        block = pab[:, :, g]
        pg = block.sum()
        if pg <= 0:
            continue
        cond = block / pg
        pa = cond.sum(axis=1, keepdims=True)
        pb = cond.sum(axis=0, keepdims=True)
        mask = cond > 0
        ratio = np.ones_like(cond)
        np.divide(cond, pa * pb, out=ratio, where=mask)
        total += pg * float((cond[mask] * np.log2(ratio[mask])).sum())
    return total


@dataclass(frozen=True)
class InfoQuery:
    """A named entropy/MI query against a joint table (base-2 only)."""

    targets: frozenset
    conditioning: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(self.targets))
        object.__setattr__(self, "conditioning", frozenset(self.conditioning))
        if self.targets & self.conditioning:
            raise ValueError("target and conditioning sets must be disjoint")

    def evaluate(self, jt: JointTable) -> float:
        for v in self.targets | self.conditioning:
            jt.axis(v)  # raises on unknown variable
        return cond_entropy(jt, sorted(self.targets), sorted(self.conditioning))


@dataclass(frozen=True)
class CapacityResult:
    """Blahut-Arimoto output with its bracketing certificate."""

    value: float          # bits; equals the lower iterate
    argmax: Pmf
    lower: float
    upper: float
    iterations: int


def blahut_arimoto_capacity(kernel, tol: float = 1e-9,
                            max_iter: int = 100_000) -> CapacityResult:
    """Capacity of a discrete memoryless channel by alternating maximization.

    ``kernel`` is either a CondKernel with one input and one output alphabet
    or a 2-D row-stochastic array.  Convergence certificate: the reported
    value lies between the lower iterate I(r) and the upper iterate
    max_x D(W_x || rW), and their gap is below ``tol``.
    """
    if isinstance(kernel, CondKernel):
        if len(kernel.inputs) != 1 or len(kernel.outputs) != 1:
            raise ValueError("capacity needs a single-input single-output kernel")
        W = kernel.table
        support = kernel.inputs[0]
    else:
        W = np.asarray(kernel, dtype=np.float64)
        support = Alphabet("X", W.shape[0])
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = W.shape[0]
    logW = np.zeros_like(W)
    np.log2(W, out=logW, where=W > 0)
    r = np.full(m, 1.0 / m)
    gap = np.inf
    for it in range(1, max_iter + 1):
        py = r @ W
        log_py = np.zeros_like(py)
        np.log2(py, out=log_py, where=py > 0)
        # D_x = D(W(.|x) || py); py > 0 wherever any mass reaches y
        dx = (W * (logW - log_py)).sum(axis=1)
        lower = float(r @ dx)
        upper = float(dx.max())
        gap = upper - lower
        if gap < tol:
            return CapacityResult(max(lower, 0.0), Pmf(support, r), lower, upper, it)
        r = r * np.exp2(dx - dx.max())
        r /= r.sum()
    raise ConvergenceError(
        f"Blahut-Arimoto gap {gap} above tol {tol} after {max_iter} iterations",
        gap=gap,
    )
