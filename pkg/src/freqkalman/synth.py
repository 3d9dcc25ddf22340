"""Synthetic motions with a known clean/noise split.

Randomness comes from SplitMix64 so fixtures can be regenerated bit-for-bit
by any implementation:

* ``splitmix64``: ``state += 0x9E3779B97F4A7C15``; output
  ``z = (z ^ z>>30) * 0xBF58476D1CE4E5B9``; ``z = (z ^ z>>27) * 0x94D049BB133111EB``;
  ``z ^ z>>31`` (all mod 2**64).
* uniform in [0, 1): ``(z >> 11) * 2**-53``; in (0, 1]: ``((z >> 11) + 1) * 2**-53``.
* normal: Box-Muller, ``sqrt(-2 ln u1) * cos(2 pi u2)`` with ``u1`` in (0, 1],
  one output per pair of draws.
* per-channel streams: ``derive_seed(seed, tag)`` = first SplitMix64 output of
  a generator seeded with ``seed ^ mix(tag)``, where ``mix`` is the output
  function applied to ``tag + 0x9E3779B97F4A7C15``. Channel ``c`` of a motion
  uses tag ``c``; noise injection uses tag ``0x6E6F697365 + c`` ("noise").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MotionSequence, validate
from .kalman import CutoffOutOfRange
from .spectral import dct, dct_matrix, idct

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_NOISE_TAG = 0x6E6F697365

KINDS = ("sinusoid_mix", "polynomial", "walk_like")


class DegenerateChannel(ValueError):
    pass


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_open0(self) -> float:
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def normal(self) -> float:
        u1 = self.uniform_open0()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)])

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi)`` (modulo method; bias < 2**-50 for small ranges)."""
        return lo + self.next_u64() % (hi - lo)


def derive_seed(seed: int, tag: int) -> int:
    return SplitMix64((seed & _MASK) ^ _mix((tag + _GOLDEN) & _MASK)).next_u64()


@dataclass(frozen=True)
class SynthSpec:
    frames: int = 100
    joints: int = 17
    fps: float = 50.0
    kind: str = "sinusoid_mix"
    seed: int = 0
    noise: str = "none"  # none | high_band | white
    k0: int = 10
    target_ratio: float = 0.5
    sigma: float = 0.0
    max_freq: int = 5
    degree: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.noise not in ("none", "high_band", "white"):
            raise ValueError(f"unknown noise model {self.noise!r}")
        if self.frames < 1 or self.joints < 1 or not self.fps > 0:
            raise ValueError("frames, joints and fps must be positive")
        if self.noise == "high_band" and not 0.0 < self.target_ratio < 1.0:
            raise ValueError("target_ratio must lie in (0, 1)")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 1 <= self.max_freq:
            raise ValueError("max_freq must be >= 1")


def _sinusoid_mix(rng: SplitMix64, T: int, max_freq: int) -> np.ndarray:
    # sums of DCT basis vectors, so the spectrum is exactly zero above max_freq
    basis = dct_matrix(T)
    top = min(max_freq, T - 1)
    x = rng.normal() * basis[0] * math.sqrt(T)  # DC offset with O(1) amplitude
    n_terms = 1 + rng.integer(0, 5)
    for _ in range(n_terms):
        if top < 1:
            break
        k = rng.integer(1, top + 1)
        x = x + 0.5 * rng.normal() * basis[k] * math.sqrt(T / 2)
    return x


def _polynomial(rng: SplitMix64, T: int, degree: int) -> np.ndarray:
    t = np.arange(T) / max(T - 1, 1)
    coeffs = [rng.normal() for _ in range(degree + 1)]
    return np.polynomial.polynomial.polyval(t, coeffs)


def _walk_like(rng: SplitMix64, T: int, fps: float, joint: int, axis: int) -> np.ndarray:
    t = np.arange(T) / fps
    stride_hz = 0.8 + 0.4 * rng.uniform()
    phase = 2 * math.pi * rng.uniform() + (math.pi if joint % 2 else 0.0)
    amp = 0.05 + 0.1 * rng.uniform()
    offset = rng.normal() * 0.3
    w = 2 * math.pi * stride_hz
    if axis == 0:  # forward progression plus limb swing
        return offset + 1.2 * t + amp * np.sin(w * t + phase)
    if axis == 1:  # vertical bob at twice the stride rate
        return offset + 0.5 * amp * np.cos(2 * w * t + phase)
    return offset + 0.5 * amp * np.sin(w * t + phase)


def generate_clean(spec: SynthSpec) -> MotionSequence:
    """Noise-free motion, fully determined by ``spec`` (including its seed)."""
    T, J = spec.frames, spec.joints
    data = np.empty((T, J, 3))
    for j in range(J):
        for d in range(3):
            rng = SplitMix64(derive_seed(spec.seed, 3 * j + d))
            if spec.kind == "sinusoid_mix":
                data[:, j, d] = _sinusoid_mix(rng, T, spec.max_freq)
            elif spec.kind == "polynomial":
                data[:, j, d] = _polynomial(rng, T, spec.degree)
            else:
                data[:, j, d] = _walk_like(rng, T, spec.fps, j, d)
    return MotionSequence.from_array(data, fps=spec.fps)


def inject_high_band_noise(motion: MotionSequence, k0: int, target_ratio: float, seed: int,
                           include_dc: bool = True, epsilon: float = 1e-8
                           ) -> tuple[MotionSequence, np.ndarray]:
    """Add Gaussian DCT coefficients at ``k >= k0`` so each channel's
    high-frequency ratio equals ``target_ratio``.

    The noise direction is random; its scale solves
    ``|c_high + s n|^2 = target * (E_low + eps) / (1 - target)`` exactly,
    since the low band is untouched. Returns the noisy motion and the energy
    of the added noise per channel (canonical channel order).
    """
    validate(motion)
    T = motion.frames
    if not 0 <= k0 < T:
        raise CutoffOutOfRange(f"k0={k0} must satisfy 0 <= k0 < frames={T}")
    if not 0.0 < target_ratio < 1.0:
        raise ValueError("target_ratio must lie in (0, 1)")
    lo = 0 if include_dc else 1
    out = np.empty_like(motion.data)
    energies = np.empty(3 * motion.joints)
    for j in range(motion.joints):
        for d in range(3):
            ch = 3 * j + d
            c = np.array(dct(motion.data[:, j, d]).coeffs)
            start = max(k0, lo)
            low = float(np.dot(c[lo:start], c[lo:start]))
            if low <= 0.0:
                raise DegenerateChannel(f"channel {ch} has no energy below k0")
            target_high = target_ratio * (low + epsilon) / (1.0 - target_ratio)
            rng = SplitMix64(derive_seed(seed, _NOISE_TAG + ch))
            n = rng.normals(T - start)
            h = c[start:]
            a, b, cc = np.dot(n, n), 2.0 * np.dot(h, n), np.dot(h, h) - target_high
            disc = b * b - 4 * a * cc
            if a == 0.0 or disc < 0:
                raise DegenerateChannel(f"channel {ch}: cannot reach target ratio")
            s = (-b + math.sqrt(disc)) / (2 * a)
            if s < 0:
                raise DegenerateChannel(f"channel {ch}: high band already exceeds target ratio")
            c[start:] = h + s * n
            energies[ch] = s * s * a
            out[:, j, d] = idct(c)
    return motion.with_data(out), energies


def inject_white_noise(motion: MotionSequence, sigma: float, seed: int) -> MotionSequence:
    """Add i.i.d. N(0, sigma^2) noise to every coordinate."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    out = np.array(motion.data)
    for j in range(motion.joints):
        for d in range(3):
            rng = SplitMix64(derive_seed(seed, _NOISE_TAG + 3 * j + d))
            out[:, j, d] += sigma * rng.normals(motion.frames)
    return motion.with_data(out)


def generate(spec: SynthSpec) -> tuple[MotionSequence, MotionSequence | None]:
    """Clean motion plus its noisy version per ``spec.noise`` (``None`` if no noise)."""
    clean = generate_clean(spec)
    if spec.noise == "high_band":
        noisy, _ = inject_high_band_noise(clean, spec.k0, spec.target_ratio, spec.seed)
        return clean, noisy
    if spec.noise == "white":
        return clean, inject_white_noise(clean, spec.sigma, spec.seed)
    return clean, None
