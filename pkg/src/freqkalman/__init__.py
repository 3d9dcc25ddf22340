"""Adaptive frequency-domain Kalman refinement of 3D motion sequences."""

__version__ = "0.1.0"

from .core import (AngleConstraint, Channel, MotionSequence, RefinementConfig, Skeleton,
                   reassemble, split_channels, validate)
from .kalman import (ChannelReport, KalmanParams, adaptive_params, fixed_suppress, kalman_filter,
                     refine_channel, refine_motion, steady_state_error, steady_state_gain)
from .spectral import ChannelSpectrum, dct, estimate_snr, high_freq_ratio, idct

__all__ = [
    "AngleConstraint", "Channel", "ChannelReport", "ChannelSpectrum", "KalmanParams",
    "MotionSequence", "RefinementConfig", "Skeleton", "adaptive_params", "dct",
    "estimate_snr", "fixed_suppress", "high_freq_ratio", "idct", "kalman_filter",
    "reassemble", "refine_channel", "refine_motion", "split_channels",
    "steady_state_error", "steady_state_gain", "validate",
]
