"""Capacity-distortion bounds and coding-scheme simulation for joint
identification and state sensing over discrete memoryless channels with noisy
strictly causal feedback."""

from .tables import Alphabet, CondKernel, JointTable, Pmf
from .channel import (
    StateChannel,
    averaged_channel,
    build_joint,
    compose_channel,
    forward_marginal,
    posterior_state,
)
from .sensing import (
    DistortionFn,
    EstimatorTable,
    dstar_dist,
    dstar_symbol,
    feasible_check,
    feasible_symbols,
    optimal_estimator,
)
from .info import (
    binary_convolution,
    binary_entropy,
    blahut_arimoto_capacity,
    cond_mutual_info,
    cond_mutual_info_at,
    entropy,
    mutual_info,
    mutual_info_kl,
)

__all__ = [
    "Alphabet", "CondKernel", "JointTable", "Pmf",
    "StateChannel", "averaged_channel", "build_joint", "compose_channel",
    "forward_marginal", "posterior_state",
    "DistortionFn", "EstimatorTable", "dstar_dist", "dstar_symbol",
    "feasible_check", "feasible_symbols", "optimal_estimator",
    "binary_convolution", "binary_entropy", "blahut_arimoto_capacity",
    "cond_mutual_info", "cond_mutual_info_at", "entropy", "mutual_info",
    "mutual_info_kl",
]

__version__ = "0.1.0"
