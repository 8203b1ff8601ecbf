"""Finite alphabets and dense probability tables.

All probabilities are stored as 64-bit floats in dense numpy tensors; alphabet
sizes are desk-scale, so dense storage is simplest and fastest.  Constructors
validate and reject, they never silently renormalize.  Every object is
immutable after construction (arrays are marked read-only), so instances can
be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, NonStochasticRowError

ROW_TOL = 1e-12    # tolerance for single rows / pmfs
JOINT_TOL = 1e-10  # tolerance for full joint tensors (accumulated rounding)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Alphabet:
    """A named finite alphabet; symbols are the dense indices 0..size-1."""

    name: str
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"alphabet {self.name!r} must have size >= 1, got {self.size}")

    def symbols(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class Pmf:
    """A probability mass function over a finite alphabet."""

    support: Alphabet
    probs: np.ndarray

    def __post_init__(self):
        p = _readonly(self.probs)
        object.__setattr__(self, "probs", p)
        if p.shape != (self.support.size,):
            raise AlphabetMismatchError(
                f"pmf over {self.support.name!r} has shape {p.shape}, "
                f"expected ({self.support.size},)"
            )
        if np.any(p < 0):
            raise NonStochasticRowError(
                f"pmf over {self.support.name!r} has negative entries", total=float(p.sum())
            )
        total = float(p.sum())
        if abs(total - 1.0) > ROW_TOL:
            raise NonStochasticRowError(
                f"pmf over {self.support.name!r} sums to {total!r}", total=total
            )

    @classmethod
    def uniform(cls, support: Alphabet) -> "Pmf":
        return cls(support, np.full(support.size, 1.0 / support.size))

    @classmethod
    def point_mass(cls, support: Alphabet, symbol: int) -> "Pmf":
        p = np.zeros(support.size)
        p[symbol] = 1.0
        return cls(support, p)

    @classmethod
    def bernoulli(cls, support: Alphabet, p1: float) -> "Pmf":
        if support.size != 2:
            raise AlphabetMismatchError("bernoulli pmf needs a binary alphabet")
        return cls(support, np.array([1.0 - p1, p1]))


@dataclass(frozen=True)
class CondKernel:
    """A row-stochastic conditional law mapping input tuples to output tuples.

    ``table`` has one axis per input alphabet followed by one axis per output
    alphabet; for each input tuple the output block sums to one.
    """

    inputs: tuple[Alphabet, ...]
    outputs: tuple[Alphabet, ...]
    table: np.ndarray

    def __post_init__(self):
        t = _readonly(self.table)
        object.__setattr__(self, "table", t)
        expected = tuple(a.size for a in self.inputs) + tuple(a.size for a in self.outputs)
        if t.shape != expected:
            raise AlphabetMismatchError(
                f"kernel table shape {t.shape} does not match alphabets {expected}"
            )
        if np.any(t < 0):
            raise NonStochasticRowError("kernel has negative entries")
        n_in = len(self.inputs)
        rows = t.reshape(int(np.prod(expected[:n_in], initial=1)), -1)
        sums = rows.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_TOL)[0]
        if bad.size:
            worst = bad[np.argmax(np.abs(sums[bad] - 1.0))]
            idx = np.unravel_index(worst, expected[:n_in]) if n_in else ()
            label = ", ".join(
                f"{a.name}={i}" for a, i in zip(self.inputs, idx)
            )
            raise NonStochasticRowError(
                f"kernel row ({label}) sums to {sums[worst]!r}",
                row=tuple(int(i) for i in idx),
                total=float(sums[worst]),
            )

    @classmethod
    def identity(cls, alphabet: Alphabet, out_name: str | None = None) -> "CondKernel":
        """Deterministic copy kernel a -> a (optionally renaming the output)."""
        out = alphabet if out_name is None else Alphabet(out_name, alphabet.size)
        return cls((alphabet,), (out,), np.eye(alphabet.size))

    def row(self, *symbols: int) -> np.ndarray:
        return self.table[tuple(symbols)]


class UnreachableSlice(ValueError):
    """Conditioning on a zero-probability slice of a joint table."""


@dataclass(frozen=True)
class JointTable:
    """A dense joint distribution over a named tuple of finite variables.

    The universal currency for entropy and mutual-information computations:
    marginalizing over any subset of variables yields another valid table.
    """

    variables: tuple[str, ...]
    alphabets: tuple[Alphabet, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = _readonly(self.probs)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "alphabets", tuple(self.alphabets))
        if len(self.variables) != len(self.alphabets):
            raise AlphabetMismatchError("one alphabet per variable required")
        if len(set(self.variables)) != len(self.variables):
            raise AlphabetMismatchError(f"duplicate variable names in {self.variables}")
        expected = tuple(a.size for a in self.alphabets)
        if p.shape != expected:
            raise AlphabetMismatchError(
                f"joint table shape {p.shape} does not match alphabets {expected}"
            )
        if np.any(p < 0):
            raise NonStochasticRowError("joint table has negative entries")
        total = float(p.sum())
        if abs(total - 1.0) > JOINT_TOL:
            raise NonStochasticRowError(f"joint table sums to {total!r}", total=total)

    def axis(self, variable: str) -> int:
        try:
            return self.variables.index(variable)
        except ValueError:
            raise AlphabetMismatchError(
                f"variable {variable!r} not in table over {self.variables}"
            ) from None

    def alphabet(self, variable: str) -> Alphabet:
        return self.alphabets[self.axis(variable)]

    def marginal(self, variables) -> "JointTable":
        """Marginal joint over ``variables``, axes ordered as requested."""
        keep = tuple(variables)
        axes_keep = [self.axis(v) for v in keep]
        drop = tuple(i for i in range(len(self.variables)) if i not in axes_keep)
        summed = self.probs.sum(axis=drop) if drop else self.probs
        # remaining axes are in original order; permute to requested order
        remaining = [i for i in range(len(self.variables)) if i not in drop]
        perm = [remaining.index(a) for a in axes_keep]
        return JointTable(keep, tuple(self.alphabets[a] for a in axes_keep),
                          summed.transpose(perm))

    def marginal_vector(self, variable: str) -> np.ndarray:
        return self.marginal((variable,)).probs

    def slice_given(self, variable: str, symbol: int):
        """Condition on ``variable == symbol``.

        Returns ``(mass, table)`` where ``mass`` is the probability of the
        slice and ``table`` the renormalized joint over the other variables.
        Raises on a zero-mass slice.
        """
        ax = self.axis(variable)
        block = np.take(self.probs, symbol, axis=ax)
        mass = float(block.sum())
        if mass <= 0.0:
            raise UnreachableSlice(
                f"slice {variable}={symbol} has zero probability"
            )
        names = tuple(v for v in self.variables if v != variable)
        alphas = tuple(a for v, a in zip(self.variables, self.alphabets) if v != variable)
        return mass, JointTable(names, alphas, block / mass)
