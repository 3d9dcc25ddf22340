"""Accuracy/diversity metrics for sets of predicted motions, and jerk.

Frame distances use the Frobenius norm of the ``J x 3`` pose difference.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import MotionSequence, ShapeMismatch


class NeedTwoSamples(ValueError):
    pass


class EmptySampleSet(ValueError):
    pass


class EmptyGtSet(ValueError):
    pass


class MisalignedPairs(ValueError):
    pass


class TooShort(ValueError):
    pass


class ZeroBaselineJerk(RuntimeWarning):
    pass


@dataclass
class MetricReport:
    apd: float | None = None
    ade: float | None = None
    fde: float | None = None
    mmade: float | None = None
    mmfde: float | None = None
    per_joint_jerk: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("apd", "ade", "fde", "mmade", "mmfde")
               if getattr(self, k) is not None}
        if self.per_joint_jerk is not None:
            out["per_joint_jerk"] = [float(v) for v in self.per_joint_jerk]
        out["metadata"] = dict(self.metadata)
        return out


def _stack(samples: Sequence) -> np.ndarray:
    arrs = [s.data if isinstance(s, MotionSequence) else np.asarray(s, dtype=np.float64)
            for s in samples]
    if len({a.shape for a in arrs}) > 1:
        raise ShapeMismatch(f"samples have differing shapes {sorted({a.shape for a in arrs})}")
    return np.stack(arrs)


def _one(m) -> np.ndarray:
    return m.data if isinstance(m, MotionSequence) else np.asarray(m, dtype=np.float64)


def apd(samples: Sequence) -> float:
    """Mean elementwise-L1 distance over all unordered sample pairs."""
    if len(samples) < 2:
        raise NeedTwoSamples("APD needs at least two samples")
    S = _stack(samples)
    K = S.shape[0]
    total = 0.0
    for j in range(K):
        for k in range(j + 1, K):
            total += float(np.sum(np.abs(S[j] - S[k])))
    return 2.0 * total / (K * (K - 1))


def _frame_dists(samples: Sequence, gt) -> np.ndarray:
    if len(samples) == 0:
        raise EmptySampleSet("need at least one sample")
    S = _stack(samples)
    Y = _one(gt)
    if S.shape[1:] != Y.shape:
        raise ShapeMismatch(f"sample shape {S.shape[1:]} vs ground truth {Y.shape}")
    diff = (S - Y[None]).reshape(S.shape[0], S.shape[1], -1)
    return np.linalg.norm(diff, axis=-1)  # (K, T)


def ade(samples: Sequence, gt) -> float:
    """Best-of-K time-averaged frame distance."""
    return float(np.min(_frame_dists(samples, gt).mean(axis=1)))


def fde(samples: Sequence, gt) -> float:
    """Best-of-K final-frame distance."""
    return float(np.min(_frame_dists(samples, gt)[:, -1]))


def mmade(samples: Sequence, gt_set: Sequence) -> float:
    if len(gt_set) == 0:
        raise EmptyGtSet("multimodal ground-truth set is empty")
    return float(np.mean([ade(samples, g) for g in gt_set]))


def mmfde(samples: Sequence, gt_set: Sequence) -> float:
    if len(gt_set) == 0:
        raise EmptyGtSet("multimodal ground-truth set is empty")
    return float(np.mean([fde(samples, g) for g in gt_set]))


def multimodal_gt(pasts: Sequence, futures: Sequence, query_past, eps_threshold: float) -> list:
    """Futures whose paired past lies within Frobenius distance ``eps_threshold`` of ``query_past``."""
    if len(pasts) != len(futures):
        raise MisalignedPairs(f"{len(pasts)} pasts vs {len(futures)} futures")
    if eps_threshold < 0:
        raise ValueError("eps_threshold must be nonnegative")
    q = _one(query_past)
    out = []
    for past, fut in zip(pasts, futures):
        p = _one(past)
        if p.shape != q.shape:
            raise ShapeMismatch(f"past shape {p.shape} vs query {q.shape}")
        if math.isinf(eps_threshold) or np.linalg.norm((p - q).ravel()) <= eps_threshold:
            out.append(fut)
    return out


def third_difference(x: np.ndarray) -> np.ndarray:
    """``x[t+3] - 3 x[t+2] + 3 x[t+1] - x[t]`` along axis 0."""
    return x[3:] - 3.0 * x[2:-1] + 3.0 * x[1:-2] - x[:-3]


def jerk_profile(motion, fps_scaled: bool = False, fps: float | None = None) -> np.ndarray:
    """Mean jerk magnitude per joint, shape ``(J,)``.

    Units are length/frame^3 by default; ``fps_scaled`` multiplies by fps^3
    (length/s^3), taking fps from the motion unless given.
    """
    Y = _one(motion)
    if Y.shape[0] < 4:
        raise TooShort("jerk needs at least 4 frames")
    j = np.linalg.norm(third_difference(Y), axis=-1).mean(axis=0)
    if fps_scaled:
        rate = fps if fps is not None else getattr(motion, "fps", None)
        if rate is None:
            raise ValueError("fps required for fps-scaled jerk")
        j = j * rate**3
    return j


def jitter_reduction(base, refined, groups: dict[str, Sequence[int]] | None = None
                     ) -> tuple[np.ndarray, float]:
    """Percent jerk reduction ``100 * (1 - refined / base)`` per joint (or group).

    Entries whose baseline jerk is zero are NaN and left out of the mean.
    ``groups`` maps a label to joint indices whose jerks are averaged first;
    the returned vector then follows the mapping's order.
    """
    a, b = _one(base), _one(refined)
    if a.shape != b.shape:
        raise ShapeMismatch(f"base {a.shape} vs refined {b.shape}")
    jb, jr = jerk_profile(a), jerk_profile(b)
    if groups is not None:
        jb = np.array([jb[list(idx)].mean() for idx in groups.values()])
        jr = np.array([jr[list(idx)].mean() for idx in groups.values()])
    zero = jb == 0
    if np.any(zero):
        warnings.warn(f"{int(zero.sum())} entries have zero baseline jerk; reported as NaN",
                      ZeroBaselineJerk, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        red = np.where(zero, np.nan, 100.0 * (1.0 - jr / np.where(zero, 1.0, jb)))
    mean = float(np.nanmean(red)) if np.any(~zero) else float("nan")
    return red, mean
