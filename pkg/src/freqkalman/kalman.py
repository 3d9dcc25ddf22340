"""Scalar Kalman recursion along the DCT frequency axis.

Each channel's high band (indices ``k >= k0``) is treated as a noisy random
walk observed once per frequency index::

    x_k = x_{k-1} + w_k,   w_k ~ N(0, Q)
    z_k = x_k + v_k,       v_k ~ N(0, R)

In adaptive mode ``Q`` and ``R`` are set per channel from the channel's
high-frequency energy ratio; in ``fixed_kalman`` mode they are the base
values ``q0``/``r0``; ``fixed_suppress`` scales the high band by ``gamma``
instead of filtering it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .core import AXES, MotionSequence, RefinementConfig, validate
from .spectral import ChannelSpectrum, band_energies, dct, estimate_snr, high_freq_ratio, idct


class NonPositiveVariance(ValueError):
    pass


class EmptyObservations(ValueError):
    pass


class CutoffOutOfRange(ValueError):
    pass


class GammaOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class KalmanParams:
    Q: float
    R: float

    def __post_init__(self):
        _check_variances(self.Q, self.R)


@dataclass
class KalmanTrace:
    """Per-step filter quantities; index 0 is the initial state (no update)."""

    x_prior: np.ndarray
    P_prior: np.ndarray
    gain: np.ndarray
    x_post: np.ndarray
    P_post: np.ndarray


@dataclass(frozen=True)
class ChannelReport:
    joint_index: int
    axis: str
    rho: float
    snr_est: float
    Q: float
    R: float
    steady_state_P: float
    steady_state_K: float
    energy_total: float
    energy_high: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_variances(Q, R):
    if not (math.isfinite(Q) and math.isfinite(R) and Q > 0 and R > 0):
        raise NonPositiveVariance(f"need finite Q, R > 0, got Q={Q}, R={R}")


def adaptive_params(snr_est: float, config: RefinementConfig) -> KalmanParams:
    """Noise variances scheduled from an SNR estimate.

    Q = q0 * (1 + lambda_q / (snr + eps)), R = r0 / (1 + lambda_r * snr).
    As snr -> 0 with the default config, Q grows to ~20 and far exceeds
    R = 1e-2, so the gain rises again; no clamping is applied.
    """
    eps = config.epsilon
    Q = config.q0 * (1.0 + config.lambda_q / (snr_est + eps))
    R = config.r0 / (1.0 + config.lambda_r * snr_est)
    return KalmanParams(Q, R)


def kalman_filter(observations, params: KalmanParams) -> tuple[np.ndarray, KalmanTrace]:
    """Run the random-walk filter over ``observations``.

    The state starts at the first observation with covariance ``R`` and is
    returned unfiltered as ``estimates[0]``; updates begin at the second entry.
    """
    z = np.asarray(observations, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise EmptyObservations("need at least one observation")
    if not np.all(np.isfinite(z)):
        raise ValueError("observations contain non-finite values")
    Q, R = params.Q, params.R
    _check_variances(Q, R)

    n = z.size
    x_prior = np.empty(n)
    P_prior = np.empty(n)
    gain = np.zeros(n)
    x_post = np.empty(n)
    P_post = np.empty(n)

    x, P = z[0], R
    x_prior[0], P_prior[0], x_post[0], P_post[0] = x, P, x, P
    for k in range(1, n):
        xp = x
        Pp = P + Q
        K = Pp / (Pp + R)
        x = xp + K * (z[k] - xp)
        P = (1.0 - K) * Pp
        x_prior[k], P_prior[k], gain[k], x_post[k], P_post[k] = xp, Pp, K, x, P
    return x_post.copy(), KalmanTrace(x_prior, P_prior, gain, x_post, P_post)


def covariance_recursion(Q, R, steps: int, P0=None) -> np.ndarray:
    """Posterior covariance after ``steps`` predict/update cycles.

    Vectorised over arrays of ``Q``/``R``; ``P0`` defaults to ``R`` (the
    filter's initial covariance).
    """
    Q = np.asarray(Q, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    P = np.array(R if P0 is None else P0, dtype=np.float64) * np.ones(np.broadcast(Q, R).shape)
    for _ in range(steps):
        Pp = P + Q
        P = (1.0 - Pp / (Pp + R)) * Pp
    return P


def steady_state_error(Q, R):
    """Fixed point of the covariance recursion, the positive root of
    ``P**2 + Q*P - Q*R = 0``.

    Evaluated as ``2QR / (Q + sqrt(Q^2 + 4QR))``, algebraically equal to
    ``(-Q + sqrt(Q^2 + 4QR)) / 2`` but free of cancellation when Q << R.
    Accepts scalars or arrays.
    """
    Qa, Ra = np.asarray(Q, dtype=np.float64), np.asarray(R, dtype=np.float64)
    if not (np.all(np.isfinite(Qa)) and np.all(np.isfinite(Ra)) and np.all(Qa > 0) and np.all(Ra > 0)):
        raise NonPositiveVariance(f"need finite Q, R > 0, got Q={Q}, R={R}")
    P = 2.0 * Qa * Ra / (Qa + np.sqrt(Qa * Qa + 4.0 * Qa * Ra))
    return float(P) if P.ndim == 0 else P


def steady_state_gain(Q, R):
    """Steady-state gain ``(P* + Q) / (P* + Q + R)``."""
    P = steady_state_error(Q, R)
    return (P + Q) / (P + Q + R)


def fixed_suppress(spectrum: ChannelSpectrum, k0: int, gamma: float) -> ChannelSpectrum:
    """Scale every coefficient at index ``>= k0`` by ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {gamma}")
    c = np.array(spectrum.coeffs)
    c[k0:] *= gamma
    return ChannelSpectrum(c)


def refine_channel(spectrum: ChannelSpectrum, config: RefinementConfig,
                   joint_index: int = 0, axis: str = "x") -> tuple[ChannelSpectrum, ChannelReport]:
    """Refine one channel's spectrum; low band (``k < k0``) passes through."""
    n = spectrum.source_len
    k0 = int(config.k0)
    if k0 > n:
        raise CutoffOutOfRange(f"k0={k0} exceeds spectrum length {n}")

    total, high = band_energies(spectrum, k0, config.include_dc)
    rho = high_freq_ratio(spectrum, k0, config.include_dc, config.epsilon)
    snr = estimate_snr(rho, config.epsilon)

    if config.mode == "fixed_suppress":
        refined = fixed_suppress(spectrum, k0, config.gamma)
        nan = float("nan")
        report = ChannelReport(joint_index, axis, rho, snr, nan, nan, nan, nan, total, high)
        return refined, report

    if config.mode == "adaptive":
        params = adaptive_params(snr, config)
    else:
        params = KalmanParams(config.q0, config.r0)

    c = np.array(spectrum.coeffs)
    if k0 < n:
        c[k0:], _ = kalman_filter(c[k0:], params)
    P_ss = steady_state_error(params.Q, params.R)
    K_ss = (P_ss + params.Q) / (P_ss + params.Q + params.R)
    report = ChannelReport(joint_index, axis, rho, snr, params.Q, params.R, P_ss, K_ss, total, high)
    return ChannelSpectrum(c), report


def _refine_series(args):
    series, config, j, axis = args
    refined, report = refine_channel(dct(series), config, j, axis)
    return idct(refined), report


def refine_motion(motion: MotionSequence, config: RefinementConfig | None = None,
                  workers: int = 1) -> tuple[MotionSequence, list[ChannelReport]]:
    """DCT each channel, refine its spectrum, and transform back.

    ``workers > 1`` spreads channels over a thread pool. Each channel is
    computed by the same sequence of operations either way, so the output is
    bitwise identical for any worker count; reports come back in canonical
    channel order.
    """
    config = config or RefinementConfig()
    validate(motion)
    jobs = [(np.ascontiguousarray(motion.data[:, j, d]), config, j, AXES[d])
            for j in range(motion.joints) for d in range(3)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_refine_series, jobs))
    else:
        results = [_refine_series(job) for job in jobs]

    out = np.empty_like(motion.data)
    reports = []
    for (_, _, j, axis), (series, report) in zip(jobs, results):
        out[:, j, AXES.index(axis)] = series
        reports.append(report)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("refinement produced non-finite values")
    return motion.with_data(out), reports
