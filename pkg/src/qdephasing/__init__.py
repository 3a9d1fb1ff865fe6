"""Two-qubit dephasing channels, Wootters concurrence and a Monte Carlo oracle."""

from .channels import (
    ChannelKind,
    ChannelParams,
    KrausChannel,
    NoiseRates,
    apply,
    apply_closed_form,
    build_kraus,
    channel_params,
)
from .metrics import (
    concurrence,
    disentanglement_time,
    fidelity_pure,
    pure_concurrence,
    reduced_coherence,
    timescales,
)
from .oracle import ensemble_average, oracle_report, sample_trajectory
from .qmat import partial_trace, pure_density, tensor, validate

__version__ = "0.1.0"

__all__ = [
    "ChannelKind",
    "ChannelParams",
    "KrausChannel",
    "NoiseRates",
    "apply",
    "apply_closed_form",
    "build_kraus",
    "channel_params",
    "concurrence",
    "disentanglement_time",
    "fidelity_pure",
    "pure_concurrence",
    "reduced_coherence",
    "timescales",
    "ensemble_average",
    "oracle_report",
    "sample_trajectory",
    "partial_trace",
    "pure_density",
    "tensor",
    "validate",
]
