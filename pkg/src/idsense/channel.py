"""State-dependent memoryless channels with noisy feedback.

The transition law factorizes as W(y,z|x,s) = W_fwd(y|x,s) * W_fb(z|y): the
feedback symbol is a noisy observation of the channel output only.  Noiseless
feedback is the special case of an identity feedback kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, UnreachableObservationError
from .tables import Alphabet, CondKernel, JointTable, Pmf


@dataclass(frozen=True)
class StateChannel:
    """W(y,z|x,s) over finite alphabets plus the i.i.d. state prior."""

    kernel: CondKernel  # inputs (X, S), outputs (Y, Z)
    state_prior: Pmf    # over S

    def __post_init__(self):
        if len(self.kernel.inputs) != 2 or len(self.kernel.outputs) != 2:
            raise AlphabetMismatchError(
                "state channel kernel must map (X, S) to (Y, Z)"
            )
        if self.kernel.inputs[1] != self.state_prior.support:
            raise AlphabetMismatchError(
                f"state prior over {self.state_prior.support.name!r} does not match "
                f"kernel state alphabet {self.kernel.inputs[1].name!r}"
            )

    @property
    def x_alphabet(self) -> Alphabet:
        return self.kernel.inputs[0]

    @property
    def s_alphabet(self) -> Alphabet:
        return self.kernel.inputs[1]

    @property
    def y_alphabet(self) -> Alphabet:
        return self.kernel.outputs[0]

    @property
    def z_alphabet(self) -> Alphabet:
        return self.kernel.outputs[1]


def compose_channel(forward: CondKernel, feedback: CondKernel,
                    prior: Pmf) -> StateChannel:
    """Build W(y,z|x,s) = forward(y|x,s) * feedback(z|y) with state prior.

    The returned table is the exact product of the stored factor entries.
    """
    if len(forward.inputs) != 2 or len(forward.outputs) != 1:
        raise AlphabetMismatchError("forward kernel must map (X, S) to Y")
    if len(feedback.inputs) != 1 or len(feedback.outputs) != 1:
        raise AlphabetMismatchError("feedback kernel must map Y to Z")
    if feedback.inputs[0].size != forward.outputs[0].size:
        raise AlphabetMismatchError(
            f"feedback input alphabet {feedback.inputs[0].name!r} (size "
            f"{feedback.inputs[0].size}) does not match forward output "
            f"{forward.outputs[0].name!r} (size {forward.outputs[0].size})"
        )
    if prior.support != forward.inputs[1]:
        raise AlphabetMismatchError("state prior alphabet does not match forward kernel")
    table = forward.table[:, :, :, None] * feedback.table[None, None, :, :]
    kernel = CondKernel(
        inputs=forward.inputs,
        outputs=(forward.outputs[0], feedback.outputs[0]),
        table=table,
    )
    return StateChannel(kernel=kernel, state_prior=prior)


def averaged_channel(ch: StateChannel) -> CondKernel:
    """State-averaged law: sum_s P_S(s) W(y,z|x,s), a kernel x -> (y,z)."""
    table = np.einsum("s,xsyz->xyz", ch.state_prior.probs, ch.kernel.table)
    return CondKernel(inputs=(ch.x_alphabet,), outputs=(ch.y_alphabet, ch.z_alphabet),
                      table=table)


def forward_marginal(avg: CondKernel) -> CondKernel:
    """Marginalize the averaged law over the feedback symbol: x -> y."""
    if len(avg.inputs) != 1 or len(avg.outputs) != 2:
        raise AlphabetMismatchError("expected an averaged kernel x -> (y, z)")
    return CondKernel(inputs=avg.inputs, outputs=(avg.outputs[0],),
                      table=avg.table.sum(axis=2))


def posterior_state(ch: StateChannel, x: int, z: int) -> Pmf:
    """Bayes posterior over the state given (input, feedback) = (x, z).

    Raises on a conditioning event with zero probability; downstream code must
    skip unreachable pairs with zero weight instead of inventing a posterior.
    """
    w = ch.kernel.table[x, :, :, z].sum(axis=1)  # P(z | x, s), summed over y
    unnorm = ch.state_prior.probs * w
    mass = float(unnorm.sum())
    if mass <= 0.0:
        raise UnreachableObservationError(
            f"observation (x={x}, z={z}) has zero probability under the averaged law"
        )
    return Pmf(ch.s_alphabet, unnorm / mass)


def build_joint(px: Pmf, avg: CondKernel, aux: CondKernel | None = None) -> JointTable:
    """Joint over (X, Y, Z[, U]) induced by an input law and the averaged channel.

    With ``aux`` (a kernel (x, z) -> u) present the joint factorizes as
    px * avg * aux, so U -- (X, Z) -- Y is a Markov chain by construction.
    """
    if len(avg.inputs) != 1 or len(avg.outputs) != 2:
        raise AlphabetMismatchError("expected an averaged kernel x -> (y, z)")
    if px.support != avg.inputs[0]:
        raise AlphabetMismatchError(
            f"input pmf over {px.support.name!r} does not match channel input "
            f"{avg.inputs[0].name!r}"
        )
    x_a, (y_a, z_a) = avg.inputs[0], avg.outputs
    joint_xyz = px.probs[:, None, None] * avg.table
    if aux is None:
        return JointTable((x_a.name, y_a.name, z_a.name), (x_a, y_a, z_a), joint_xyz)
    if len(aux.inputs) != 2 or len(aux.outputs) != 1:
        raise AlphabetMismatchError("aux kernel must map (x, z) to u")
    if aux.inputs[0].size != x_a.size or aux.inputs[1].size != z_a.size:
        raise AlphabetMismatchError("aux kernel alphabets do not match the channel")
    u_a = aux.outputs[0]
    probs = np.einsum("xyz,xzu->xyzu", joint_xyz, aux.table)
    return JointTable((x_a.name, y_a.name, z_a.name, u_a.name),
                      (x_a, y_a, z_a, u_a), probs)
