"""Domain types shared across the package, plus channel split/reassembly.

A motion is a dense ``(frames, joints, 3)`` float array. Filtering operates on
*channels*: the scalar time series of one joint along one axis. Channels are
always enumerated joint-major, then x, y, z, so channel ``3 * j + d`` is joint
``j`` along axis ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

AXES = ("x", "y", "z")
MODES = ("adaptive", "fixed_kalman", "fixed_suppress")


class MotionError(ValueError):
    """Base class for invalid motion data."""


class NonFinite(MotionError):
    pass


class ShapeMismatch(MotionError):
    pass


class ChannelCountMismatch(MotionError):
    pass


class LengthMismatch(MotionError):
    pass


class SkeletonError(ValueError):
    pass


@dataclass(frozen=True)
class MotionSequence:
    """Joint positions of shape ``(frames, joints, 3)``.

    ``frames`` and ``joints`` may be given explicitly (as a file header would
    declare them); otherwise they are read off ``data``. Construction does not
    validate; call :func:`validate` or use :meth:`from_array`.
    """

    data: np.ndarray
    fps: float = 30.0
    joint_names: tuple[str, ...] | None = None
    frames: int | None = None
    joints: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.frames is None and data.ndim == 3:
            object.__setattr__(self, "frames", data.shape[0])
        if self.joints is None and data.ndim == 3:
            object.__setattr__(self, "joints", data.shape[1])
        if self.joint_names is not None:
            object.__setattr__(self, "joint_names", tuple(self.joint_names))

    @classmethod
    def from_array(cls, data, fps: float = 30.0, joint_names=None) -> "MotionSequence":
        motion = cls(np.array(data, dtype=np.float64), fps=fps, joint_names=joint_names)
        validate(motion)
        return motion

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def with_data(self, data) -> "MotionSequence":
        """Copy of this sequence carrying new positions (same fps and names)."""
        return MotionSequence.from_array(data, fps=self.fps, joint_names=self.joint_names)


def validate(motion: MotionSequence) -> None:
    """Raise if ``motion`` violates its invariants; return ``None`` otherwise."""
    data = motion.data
    if data.ndim != 3 or data.shape[-1] != 3:
        raise ShapeMismatch(f"expected (frames, joints, 3) data, got shape {data.shape}")
    frames, joints = motion.frames, motion.joints
    if frames < 1 or joints < 1:
        raise ShapeMismatch(f"need frames >= 1 and joints >= 1, got {frames}, {joints}")
    if data.size != frames * joints * 3 or data.shape[:2] != (frames, joints):
        raise ShapeMismatch(
            f"declared {frames} frames x {joints} joints but data has shape {data.shape}"
        )
    if not np.all(np.isfinite(data)):
        raise NonFinite(f"{np.count_nonzero(~np.isfinite(data))} non-finite values")
    if not motion.fps > 0:
        raise MotionError(f"fps must be positive, got {motion.fps}")
    if motion.joint_names is not None and len(motion.joint_names) != joints:
        raise ShapeMismatch(f"{len(motion.joint_names)} joint names for {joints} joints")


@dataclass(frozen=True)
class Channel:
    joint_index: int
    axis: str
    series: np.ndarray

    @property
    def index(self) -> int:
        return 3 * self.joint_index + AXES.index(self.axis)


def split_channels(motion: MotionSequence) -> list[Channel]:
    validate(motion)
    out = []
    for j in range(motion.joints):
        for d, axis in enumerate(AXES):
            out.append(Channel(j, axis, np.array(motion.data[:, j, d])))
    return out


def reassemble(channels: Sequence[Channel], joints: int, frames: int, fps: float = 30.0,
               joint_names=None) -> MotionSequence:
    """Inverse of :func:`split_channels`.

    Channels are placed by their ``(joint_index, axis)`` labels, so the input
    order does not matter as long as every slot is filled exactly once.
    """
    if len(channels) != 3 * joints:
        raise ChannelCountMismatch(f"expected {3 * joints} channels for J={joints}, got {len(channels)}")
    data = np.empty((frames, joints, 3))
    seen = set()
    for ch in channels:
        series = np.asarray(ch.series, dtype=np.float64)
        if series.shape != (frames,):
            raise LengthMismatch(f"channel ({ch.joint_index}, {ch.axis}) has length {series.shape}, expected {frames}")
        if not 0 <= ch.joint_index < joints or ch.axis not in AXES:
            raise ChannelCountMismatch(f"channel label ({ch.joint_index}, {ch.axis}) out of range")
        key = (ch.joint_index, ch.axis)
        if key in seen:
            raise ChannelCountMismatch(f"duplicate channel {key}")
        seen.add(key)
        data[:, ch.joint_index, AXES.index(ch.axis)] = series
    return MotionSequence.from_array(data, fps=fps, joint_names=joint_names)


@dataclass(frozen=True)
class AngleConstraint:
    """Bounds on the cosine between two vectors built from joint positions.

    ``vec1`` is a ``(tail, head)`` joint pair. ``vec2`` is either a
    ``(tail, head)`` pair or, when ``plane`` is given instead, the normal of
    the plane through three joints ``(a, b, c)``: ``(b - a) x (c - a)``.
    """

    name: str
    vec1: tuple[int, int]
    cos_min: float
    cos_max: float
    vec2: tuple[int, int] | None = None
    plane: tuple[int, int, int] | None = None

    def __post_init__(self):
        if (self.vec2 is None) == (self.plane is None):
            raise SkeletonError(f"{self.name}: give exactly one of vec2 or plane")
        if not (-1.0 <= self.cos_min <= self.cos_max <= 1.0):
            raise SkeletonError(f"{self.name}: need -1 <= cos_min <= cos_max <= 1")

    @property
    def kind(self) -> str:
        return "bone_plane" if self.plane is not None else "bone_bone"

    def indices(self) -> tuple[int, ...]:
        return tuple(self.vec1) + tuple(self.vec2 or self.plane)


@dataclass(frozen=True)
class Skeleton:
    joint_count: int
    parents: tuple[int, ...]
    limb_pairs: tuple[tuple[int, int], ...] = ()
    angle_constraints: tuple[AngleConstraint, ...] = ()
    joint_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        object.__setattr__(self, "limb_pairs", tuple((int(a), int(b)) for a, b in self.limb_pairs))
        object.__setattr__(self, "angle_constraints", tuple(self.angle_constraints))
        self._check()

    def _check(self):
        J = self.joint_count
        if J < 1 or len(self.parents) != J:
            raise SkeletonError(f"need {J} parent entries, got {len(self.parents)}")
        roots = [j for j, p in enumerate(self.parents) if p < 0]
        if not roots:
            raise SkeletonError("skeleton has no root (parent index -1)")
        for j in range(J):
            # walk up; a cycle revisits a joint before reaching a root
            seen, cur = set(), j
            while cur >= 0:
                if cur in seen or cur >= J:
                    raise SkeletonError(f"parent chain from joint {j} is cyclic or out of range")
                seen.add(cur)
                cur = self.parents[cur]
        for idx in (i for pair in self.limb_pairs for i in pair):
            if not 0 <= idx < J:
                raise SkeletonError(f"limb index {idx} out of range for {J} joints")
        for c in self.angle_constraints:
            if any(not 0 <= i < J for i in c.indices()):
                raise SkeletonError(f"constraint {c.name} references a joint outside 0..{J - 1}")

    @classmethod
    def from_parents(cls, parents, angle_constraints=(), joint_names=None) -> "Skeleton":
        """Skeleton whose limbs are exactly its parent links."""
        limbs = [(p, j) for j, p in enumerate(parents) if p >= 0]
        return cls(len(parents), tuple(parents), tuple(limbs), tuple(angle_constraints), joint_names)


@dataclass(frozen=True)
class RefinementConfig:
    k0: int = 10
    q0: float = 1e-6
    r0: float = 1e-2
    lambda_q: float = 0.2
    lambda_r: float = 0.5
    epsilon: float = 1e-8
    mode: str = "adaptive"
    gamma: float = 0.5
    include_dc: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.k0) != self.k0 or self.k0 < 0:
            raise ValueError(f"k0 must be a nonnegative integer, got {self.k0}")
        if not (self.q0 > 0 and self.r0 > 0 and self.epsilon > 0):
            raise ValueError("q0, r0 and epsilon must be positive")
        if self.lambda_q < 0 or self.lambda_r < 0:
            raise ValueError("sensitivities must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    def to_dict(self) -> dict:
        return {
            "k0": int(self.k0), "q0": self.q0, "r0": self.r0,
            "lambda_q": self.lambda_q, "lambda_r": self.lambda_r,
            "epsilon": self.epsilon, "mode": self.mode, "gamma": self.gamma,
            "include_dc": self.include_dc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RefinementConfig":
        return cls(**d)
