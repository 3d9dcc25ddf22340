"""Ablation helpers: fixed vs adaptive refinement, and the SNR sweep."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .core import MotionSequence, RefinementConfig
from .kalman import adaptive_params, refine_motion, steady_state_error, steady_state_gain
from .metrics import jerk_profile

DEFAULT_GAMMAS = tuple(round(0.1 * i, 1) for i in range(1, 10))


def mse(a: MotionSequence, b: MotionSequence) -> float:
    d = a.data - b.data
    return float(np.mean(d * d))


def compare_methods(noisy: MotionSequence, clean: MotionSequence | None,
                    config: RefinementConfig | None = None,
                    gammas=DEFAULT_GAMMAS) -> list[dict]:
    """Rows for raw input, each fixed suppression factor, fixed-parameter
    Kalman, and adaptive Kalman. Each row carries the MSE against ``clean``
    (``None`` when no clean reference is given) and the mean jerk."""
    config = config or RefinementConfig()
    runs = [("raw", None, noisy)]
    for g in gammas:
        out, _ = refine_motion(noisy, replace(config, mode="fixed_suppress", gamma=float(g)))
        runs.append(("fixed_suppress", float(g), out))
    runs.append(("fixed_kalman", None, refine_motion(noisy, replace(config, mode="fixed_kalman"))[0]))
    runs.append(("adaptive", None, refine_motion(noisy, replace(config, mode="adaptive"))[0]))
    rows = []
    for method, gamma, motion in runs:
        rows.append({
            "method": method,
            "gamma": gamma,
            "mse": mse(motion, clean) if clean is not None else None,
            "mean_jerk": float(jerk_profile(motion).mean()) if motion.frames >= 4 else None,
        })
    return rows


def sweep_snr(config: RefinementConfig, lo: float, hi: float, n: int) -> dict[str, np.ndarray]:
    """Adaptive Q, R, steady-state P* and K* on a log grid of SNR values."""
    if not (0 < lo < hi) or n < 2:
        raise ValueError("need 0 < lo < hi and n >= 2")
    snr = np.logspace(np.log10(lo), np.log10(hi), n)
    Q = np.empty(n)
    R = np.empty(n)
    for i, s in enumerate(snr):
        p = adaptive_params(float(s), config)
        Q[i], R[i] = p.Q, p.R
    return {"snr": snr, "Q": Q, "R": R,
            "P_star": steady_state_error(Q, R), "K_star": steady_state_gain(Q, R)}
