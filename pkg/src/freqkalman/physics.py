"""Physical-plausibility losses with analytic gradients.

All losses take a :class:`MotionSequence` (or a raw ``(T, J, 3)`` array) and
return a :class:`LossValue` whose ``gradient`` has the motion's shape.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MotionSequence, Skeleton

COS_EPS = 1e-8
DEGENERATE_NORM = 1e-12

# Weights used for the loss terms in the reference training setup (baseline
# loss components only; the temporal and angle weights are caller-provided).
DEFAULT_WEIGHTS = {"recon": 11.0, "h": 16.0, "mm": 0.1, "d": 0.63, "limb": 0.5}


class TooShort(ValueError):
    pass


class NoConstraints(ValueError):
    pass


class LengthCountMismatch(ValueError):
    pass


class EmptySampleSet(ValueError):
    pass


class DegenerateBoneWarning(RuntimeWarning):
    pass


@dataclass
class LossValue:
    value: float
    gradient: np.ndarray | None = None

    def __float__(self):
        return self.value


def _data(motion) -> np.ndarray:
    if isinstance(motion, MotionSequence):
        return motion.data
    return np.asarray(motion, dtype=np.float64)


def temporal_smoothness(motion, with_grad: bool = True) -> LossValue:
    """Mean squared frame-to-frame displacement, Frobenius norm over the pose."""
    Y = _data(motion)
    T = Y.shape[0]
    if T < 2:
        raise TooShort("temporal smoothness needs at least 2 frames")
    diff = np.diff(Y, axis=0)
    value = float(np.sum(diff * diff)) / (T - 1)
    grad = None
    if with_grad:
        grad = np.zeros_like(Y)
        grad[1:] += diff
        grad[:-1] -= diff
        grad *= 2.0 / (T - 1)
    return LossValue(value, grad)


def _constraint_vectors(Y: np.ndarray, skeleton: Skeleton):
    """Stack v1, v2 for every constraint: arrays of shape (T, N, 3)."""
    cons = skeleton.angle_constraints
    v1 = np.stack([Y[:, c.vec1[1]] - Y[:, c.vec1[0]] for c in cons], axis=1)
    v2 = []
    for c in cons:
        if c.plane is None:
            v2.append(Y[:, c.vec2[1]] - Y[:, c.vec2[0]])
        else:
            a, b, cc = c.plane
            v2.append(np.cross(Y[:, b] - Y[:, a], Y[:, cc] - Y[:, a]))
    return v1, np.stack(v2, axis=1)


def joint_cosines(motion, skeleton: Skeleton) -> np.ndarray:
    """Cosine of every constrained angle, shape ``(T, N_angles)``.

    ``cos = v1 . v2 / (|v1| |v2| + 1e-8)``. A bone shorter than 1e-12 yields
    a cosine near 0 and a :class:`DegenerateBoneWarning`.
    """
    Y = _data(motion)
    if not skeleton.angle_constraints:
        return np.zeros((Y.shape[0], 0))
    if Y.shape[1] != skeleton.joint_count:
        raise ValueError(f"skeleton has {skeleton.joint_count} joints, motion has {Y.shape[1]}")
    v1, v2 = _constraint_vectors(Y, skeleton)
    n1 = np.linalg.norm(v1, axis=-1)
    n2 = np.linalg.norm(v2, axis=-1)
    if np.any(n1 < DEGENERATE_NORM) or np.any(n2 < DEGENERATE_NORM):
        warnings.warn("degenerate bone or plane vector; cosine falls back to the epsilon guard",
                      DegenerateBoneWarning, stacklevel=2)
    return np.sum(v1 * v2, axis=-1) / (n1 * n2 + COS_EPS)


def angle_loss(motion, skeleton: Skeleton, with_grad: bool = True) -> LossValue:
    """Quadratic penalty on cosines outside ``[cos_min, cos_max]``, averaged
    over frames and constraints. No inverse cosine is taken anywhere."""
    Y = _data(motion)
    cons = skeleton.angle_constraints
    if not cons:
        raise NoConstraints("skeleton defines no angle constraints")
    T, N = Y.shape[0], len(cons)
    cos = joint_cosines(Y, skeleton)
    lo = np.array([c.cos_min for c in cons])
    hi = np.array([c.cos_max for c in cons])
    over = np.where(cos > hi, cos - hi, 0.0)
    under = np.where(cos < lo, lo - cos, 0.0)
    value = float(np.sum(over * over + under * under)) / (T * N)
    if not with_grad:
        return LossValue(value)

    dcos = 2.0 * (over - under) / (T * N)  # dL/dcos, shape (T, N)
    v1, v2 = _constraint_vectors(Y, skeleton)
    n1 = np.linalg.norm(v1, axis=-1, keepdims=True)
    n2 = np.linalg.norm(v2, axis=-1, keepdims=True)
    dot = np.sum(v1 * v2, axis=-1, keepdims=True)
    denom = n1 * n2 + COS_EPS
    safe1 = np.where(n1 > 0, n1, 1.0)
    safe2 = np.where(n2 > 0, n2, 1.0)
    # d cos / d v1 = v2 / D - dot * n2 * v1 / (n1 * D^2); symmetric for v2
    g1 = v2 / denom - dot * n2 * v1 / (safe1 * denom**2)
    g2 = v1 / denom - dot * n1 * v2 / (safe2 * denom**2)
    g1 *= dcos[..., None]
    g2 *= dcos[..., None]

    grad = np.zeros_like(Y)
    for i, c in enumerate(cons):
        tail, head = c.vec1
        grad[:, head] += g1[:, i]
        grad[:, tail] -= g1[:, i]
        if c.plane is None:
            tail, head = c.vec2
            grad[:, head] += g2[:, i]
            grad[:, tail] -= g2[:, i]
        else:
            a, b, cc = c.plane
            u = Y[:, b] - Y[:, a]
            w = Y[:, cc] - Y[:, a]
            du = np.cross(w, g2[:, i])
            dw = np.cross(g2[:, i], u)
            grad[:, b] += du
            grad[:, cc] += dw
            grad[:, a] -= du + dw
    return LossValue(value, grad)


def limb_lengths(motion, skeleton: Skeleton) -> np.ndarray:
    """Bone lengths per frame, shape ``(T, n_limbs)``."""
    Y = _data(motion)
    pairs = np.array(skeleton.limb_pairs, dtype=int).reshape(-1, 2)
    return np.linalg.norm(Y[:, pairs[:, 1]] - Y[:, pairs[:, 0]], axis=-1)


def limb_length_loss(pred, reference_lengths, skeleton: Skeleton, with_grad: bool = True) -> LossValue:
    """Mean over frames of the summed squared bone-length error."""
    Y = _data(pred)
    ref = np.asarray(reference_lengths, dtype=np.float64)
    if ref.shape != (len(skeleton.limb_pairs),):
        raise LengthCountMismatch(f"{ref.size} reference lengths for {len(skeleton.limb_pairs)} limbs")
    pairs = np.array(skeleton.limb_pairs, dtype=int).reshape(-1, 2)
    bones = Y[:, pairs[:, 1]] - Y[:, pairs[:, 0]]
    lengths = np.linalg.norm(bones, axis=-1)
    err = lengths - ref
    T = Y.shape[0]
    value = float(np.sum(err * err)) / T
    if not with_grad:
        return LossValue(value)
    safe = np.where(lengths > 0, lengths, 1.0)
    gb = (2.0 / T) * (err / safe)[..., None] * bones
    grad = np.zeros_like(Y)
    for i, (p, c) in enumerate(pairs):
        grad[:, c] += gb[:, i]
        grad[:, p] -= gb[:, i]
    return LossValue(value, grad)


def _sq(a, b) -> float:
    d = _data(a) - _data(b)
    return float(np.sum(d * d))


def sample_set_losses(samples: Sequence, gt, mm_gt: Sequence = (), alpha: float = 100.0,
                      history_recon: Sequence = (), history=None) -> dict[str, float]:
    """Set-level losses over ``K`` predicted futures.

    * ``recon``: ``min_k |Y_k - Y|^2``
    * ``mm``: mean over ``mm_gt`` of ``min_k |Y_k - Y_m|^2`` (omitted if empty)
    * ``d``: mean over pairs of ``exp(-|Y_j - Y_k|_1 / alpha)`` (omitted if K < 2)
    * ``h``: mean of ``|X_k - X|^2`` over ``history_recon`` (omitted if empty)

    Norms are squared Frobenius / elementwise L1 over whole sequences.
    """
    if len(samples) == 0:
        raise EmptySampleSet("need at least one sample")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    out = {"recon": min(_sq(s, gt) for s in samples)}
    if len(mm_gt):
        out["mm"] = float(np.mean([min(_sq(s, g) for s in samples) for g in mm_gt]))
    K = len(samples)
    if K >= 2:
        arr = [_data(s) for s in samples]
        terms = [np.exp(-np.sum(np.abs(arr[j] - arr[k])) / alpha)
                 for j in range(K) for k in range(j + 1, K)]
        out["d"] = float(2.0 * np.sum(terms) / (K * (K - 1)))
    if len(history_recon):
        if history is None:
            raise ValueError("history_recon given without the observed history")
        out["h"] = float(np.mean([_sq(x, history) for x in history_recon]))
    return out


def composite_objective(terms: dict[str, float], weights: dict[str, float]) -> float:
    """Weighted sum of named loss terms; every weighted term must be present."""
    missing = set(weights) - set(terms)
    if missing:
        raise KeyError(f"missing loss terms: {sorted(missing)}")
    return float(sum(w * terms[name] for name, w in weights.items()))
