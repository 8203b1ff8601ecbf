"""The binary multiplicative-state channel: Y = X*S with Z = Y xor N feedback.

S ~ Bernoulli(p_s) is the channel state, N ~ Bernoulli(p_n) the feedback
noise, distortion is Hamming.  The interesting parameter regime is
0 <= p_n <= p_s <= 1/2; outside it the model stays well defined but the
semi-closed forms below lose their meaning, so out-of-regime parameters
require an explicit override.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .channel import StateChannel, averaged_channel, compose_channel
from .errors import IdsenseError
from .info import binary_convolution, binary_entropy, cond_mutual_info_at, entropy
from .sensing import DistortionFn, dstar_symbol, optimal_estimator
from .tables import Alphabet, CondKernel, JointTable, Pmf

CLOSED_FORM_TOL = 1e-12


@dataclass(frozen=True)
class BinaryExampleParams:
    p_s: float
    p_n: float
    allow_out_of_regime: bool = False

    def __post_init__(self):
        for name, v in (("p_s", self.p_s), ("p_n", self.p_n)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        in_regime = 0.0 <= self.p_n <= self.p_s <= 0.5
        if not in_regime and not self.allow_out_of_regime:
            raise ValueError(
                f"parameters (p_s={self.p_s}, p_n={self.p_n}) are outside the "
                "regime 0 <= p_n <= p_s <= 1/2; pass allow_out_of_regime=True "
                "to build the channel anyway"
            )


def build_binary_channel(params: BinaryExampleParams):
    """Return (StateChannel, DistortionFn) for the multiplicative binary model."""
    x_a, s_a = Alphabet("X", 2), Alphabet("S", 2)
    y_a, z_a = Alphabet("Y", 2), Alphabet("Z", 2)
    fwd = np.zeros((2, 2, 2))
    for x in range(2):
        for s in range(2):
            fwd[x, s, x * s] = 1.0
    forward = CondKernel((x_a, s_a), (y_a,), fwd)
    pn = params.p_n
    feedback = CondKernel((y_a,), (z_a,),
                          np.array([[1.0 - pn, pn], [pn, 1.0 - pn]]))
    prior = Pmf(s_a, np.array([1.0 - params.p_s, params.p_s]))
    ch = compose_channel(forward, feedback, prior)
    return ch, DistortionFn.hamming(s_a)


def closed_form_quantities(params: BinaryExampleParams) -> dict:
    """Semi-closed forms, each cross-checked against the generic pipeline.

    dstar0 = p_s, dstar1 = p_n, I(Y;Z|X=1) = h(p_s * p_n) - h(p_n) and
    H(Z|X=1) = h(p_s * p_n), where * is binary convolution.  A mismatch beyond
    1e-12 against the channel/sensing/info modules raises.
    """
    ps, pn = params.p_s, params.p_n
    conv = binary_convolution(ps, pn)
    closed = {
        "dstar0": ps,
        "dstar1": pn,
        "I_YZ_given_X1": binary_entropy(conv) - binary_entropy(pn),
        "H_Z_given_X1": binary_entropy(conv),
    }

    ch, d = build_binary_channel(params)
    est = optimal_estimator(ch, d)
    avg = averaged_channel(ch)
    slice1 = JointTable(("Y", "Z"), (ch.y_alphabet, ch.z_alphabet), avg.table[1])
    generic = {
        "dstar0": dstar_symbol(est, ch, d, 0),
        "dstar1": dstar_symbol(est, ch, d, 1),
        "I_YZ_given_X1": cond_mutual_info_at(
            _joint_xyz(avg), ("Y",), ("Z",), "X", 1
        ),
        "H_Z_given_X1": entropy(slice1, ("Z",)),
    }
    for key, want in closed.items():
        got = generic[key]
        if abs(got - want) > CLOSED_FORM_TOL:
            raise IdsenseError(
                f"closed form {key}={want} disagrees with generic pipeline "
                f"value {got} (p_s={ps}, p_n={pn})"
            )
    return closed


def _joint_xyz(avg: CondKernel) -> JointTable:
    """Joint (X, Y, Z) under the uniform input, for slice queries."""
    from .channel import build_joint

    px = Pmf.uniform(avg.inputs[0])
    return build_joint(px, avg)


def default_d_grid() -> np.ndarray:
    """101 uniform points on [0, 0.5]: covers the regime with the plateau visible."""
    return np.linspace(0.0, 0.5, 101)


def sweep_curves(params: BinaryExampleParams, d_grid=None,
                 cfg: "bounds_mod.SolverConfig | None" = None) -> "bounds_mod.SweepTable":
    """Evaluate all bounds plus time-sharing baselines over a distortion grid."""
    if d_grid is None:
        d_grid = default_d_grid()
    ch, d = build_binary_channel(params)
    table = bounds_mod.sweep_bounds(ch, d, np.asarray(d_grid, dtype=float), cfg)
    table.meta.update({"p_s": params.p_s, "p_n": params.p_n})
    return table


def write_sweep_csv(table: "bounds_mod.SweepTable", path) -> None:
    """CSV with 9 significant digits, '.' decimals, LF endings, UTF-8."""
    import csv

    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(bounds_mod.SWEEP_COLUMNS)
        for row in table.rows:
            writer.writerow(
                [f"{v:.9g}" for v in row.as_tuple()[:-1]] + [int(row.feasible)]
            )


def plot_sweep_svg(table: "bounds_mod.SweepTable", path) -> None:
    """Line chart of the sweep (rates in bits) written as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    d = np.array([r.D for r in table.rows])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    styles = {
        "rif_upper": ("C0", "-"), "rif_lower": ("C0", "--"),
        "dif_upper": ("C1", "-"), "dif_lower": ("C1", "--"),
        "ts_upper": ("C2", ":"), "ts_lower": ("C3", ":"),
    }
    for name, (color, ls) in styles.items():
        vals = np.array([getattr(r, name) for r in table.rows])
        ax.plot(d, vals, color=color, linestyle=ls, label=name.replace("_", " "))
    ax.set_xlabel("distortion cap D")
    ax.set_ylabel("rate [bits]")
    title = ", ".join(f"{k}={v}" for k, v in sorted(table.meta.items())
                      if k in ("p_s", "p_n"))
    ax.set_title(title or "capacity-distortion sweep")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
