import numpy as np
import pytest

from freqkalman.core import MotionSequence
from freqkalman.kalman import CutoffOutOfRange, refine_motion
from freqkalman.metrics import jerk_profile
from freqkalman.spectral import dct, high_freq_ratio
from freqkalman.synth import (DegenerateChannel, SplitMix64, SynthSpec, derive_seed, generate,
                              generate_clean, inject_high_band_noise, inject_white_noise)


def channel_rhos(m, k0=10):
    return np.array([high_freq_ratio(dct(m.data[:, j, d]), k0)
                     for j in range(m.joints) for d in range(3)])


def mse(a, b):
    return float(np.mean((a.data - b.data) ** 2))


def test_splitmix64_reference_values():
    # published SplitMix64 outputs for seed 1234567
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_uniform_and_normal_ranges():
    r = SplitMix64(5)
    u = [r.uniform() for _ in range(2000)]
    assert 0.0 <= min(u) and max(u) < 1.0
    z = r.normals(4000)
    assert abs(z.mean()) < 0.1 and abs(z.std() - 1) < 0.1


def test_derived_seeds_differ():
    assert len({derive_seed(7, c) for c in range(100)}) == 100


@pytest.mark.parametrize("kind", ["sinusoid_mix", "polynomial", "walk_like"])
def test_determinism(kind):
    spec = SynthSpec(frames=30, joints=4, kind=kind, seed=11)
    assert generate_clean(spec).data.tobytes() == generate_clean(spec).data.tobytes()
    other = generate_clean(SynthSpec(frames=30, joints=4, kind=kind, seed=12))
    assert not np.array_equal(other.data, generate_clean(spec).data)


def test_sinusoid_mix_band_limited():
    m = generate_clean(SynthSpec(frames=80, joints=5, max_freq=5, seed=3))
    assert channel_rhos(m).max() < 1e-9


def test_polynomial_degree_two_has_no_jerk():
    m = generate_clean(SynthSpec(frames=40, joints=3, kind="polynomial", degree=2, seed=1))
    assert jerk_profile(m).max() < 1e-12


def test_injected_ratio_exact():
    clean = generate_clean(SynthSpec(frames=100, joints=6, seed=2))
    noisy, energy = inject_high_band_noise(clean, 10, 0.5, seed=9)
    np.testing.assert_allclose(channel_rhos(noisy), 0.5, atol=1e-6)
    assert energy.shape == (18,) and np.all(energy > 0)


def test_low_band_untouched():
    clean = generate_clean(SynthSpec(frames=64, joints=3, seed=4))
    noisy, _ = inject_high_band_noise(clean, 10, 0.3, seed=1)
    for j in range(3):
        for d in range(3):
            a = dct(clean.data[:, j, d]).coeffs[:10]
            b = dct(noisy.data[:, j, d]).coeffs[:10]
            np.testing.assert_allclose(a, b, atol=1e-12)


def test_tiny_ratio_is_nearly_clean():
    clean = generate_clean(SynthSpec(frames=64, joints=3, seed=4))
    noisy, _ = inject_high_band_noise(clean, 10, 1e-10, seed=1)
    assert np.max(np.abs(noisy.data - clean.data)) < 1e-4


def test_seeds_change_direction_not_ratio():
    clean = generate_clean(SynthSpec(frames=64, joints=2, seed=4))
    a, _ = inject_high_band_noise(clean, 10, 0.4, seed=1)
    b, _ = inject_high_band_noise(clean, 10, 0.4, seed=2)
    assert not np.allclose(a.data, b.data)
    np.testing.assert_allclose(channel_rhos(a), channel_rhos(b), atol=1e-6)


def test_injection_errors():
    clean = generate_clean(SynthSpec(frames=20, joints=1, seed=0))
    with pytest.raises(CutoffOutOfRange):
        inject_high_band_noise(clean, 20, 0.5, seed=0)
    with pytest.raises(DegenerateChannel):
        inject_high_band_noise(MotionSequence.from_array(np.zeros((20, 1, 3))), 5, 0.5, seed=0)
    with pytest.raises(ValueError):
        inject_high_band_noise(clean, 5, 1.0, seed=0)


def test_white_noise_and_generate():
    spec = SynthSpec(frames=50, joints=2, noise="white", sigma=0.1, seed=3)
    clean, noisy = generate(spec)
    assert 0.05 < np.std(noisy.data - clean.data) < 0.15
    clean2, none = generate(SynthSpec(frames=50, joints=2, seed=3))
    assert none is None and np.array_equal(clean.data, clean2.data)
    assert inject_white_noise(clean, 0.0, 1).data.tobytes() == clean.data.tobytes()


@pytest.mark.parametrize("ratio", [0.2, 0.5, 0.8])
def test_refinement_beats_raw(ratio):
    for seed in range(50):
        clean = generate_clean(SynthSpec(frames=100, joints=3, seed=seed))
        noisy, _ = inject_high_band_noise(clean, 10, ratio, seed=seed)
        refined, _ = refine_motion(noisy)
        assert mse(refined, clean) < mse(noisy, clean)


def test_near_clean_distortion_small():
    for seed in range(20):
        clean = generate_clean(SynthSpec(frames=100, joints=3, seed=seed))
        noisy, _ = inject_high_band_noise(clean, 10, 1e-4, seed=seed)
        refined, _ = refine_motion(noisy)
        assert mse(refined, clean) <= 1.05 * mse(noisy, clean)
