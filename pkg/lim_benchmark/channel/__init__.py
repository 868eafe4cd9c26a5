"""Modelo de canal: apuntamiento, correlación de Jakes, canal Rician y gradientes."""

from .correlation import CorrelationSet, jakes_correlation, psd_sqrt
from .gradients import (
    PositionGradient,
    SylvesterSolve,
    effective_channel_jacobian,
    finite_difference_gradient,
    grad_correlation,
    grad_effective_channel,
    grad_g_kj,
    grad_steering,
    sylvester_kronecker,
    sylvester_sqrt_grad,
)
from .realization import (
    ChannelRealization,
    RicianScaling,
    SmallScaleDraw,
    assemble_channels,
    decompose_effective_channel,
    draw_small_scale,
    effective_channel,
    phase_matrices,
    sinr_and_rate,
)
from .steering import steering_vector

__all__ = [
    "CorrelationSet",
    "jakes_correlation",
    "psd_sqrt",
    "PositionGradient",
    "SylvesterSolve",
    "effective_channel_jacobian",
    "finite_difference_gradient",
    "grad_correlation",
    "grad_effective_channel",
    "grad_g_kj",
    "grad_steering",
    "sylvester_kronecker",
    "sylvester_sqrt_grad",
    "ChannelRealization",
    "RicianScaling",
    "SmallScaleDraw",
    "assemble_channels",
    "decompose_effective_channel",
    "draw_small_scale",
    "effective_channel",
    "phase_matrices",
    "sinr_and_rate",
    "steering_vector",
]
