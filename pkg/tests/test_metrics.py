import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freqkalman.core import ShapeMismatch
from freqkalman.metrics import (EmptyGtSet, MetricReport, MisalignedPairs, NeedTwoSamples, TooShort,
                                ZeroBaselineJerk, ade, apd, fde, jerk_profile, jitter_reduction,
                                mmade, mmfde, multimodal_gt)


def brute_apd(samples):
    pairs = [(a, b) for i, a in enumerate(samples) for b in samples[i + 1:]]
    return sum(np.abs(a - b).sum() for a, b in pairs) / len(pairs)


def test_apd_identical(rng):
    s = rng.normal(size=(5, 4, 3))
    assert apd([s, s, s]) == 0.0


def test_apd_l1_sum():
    a = np.zeros((1, 1, 3))
    b = np.array([[[1.0, 2.0, 3.0]]])
    assert apd([a, b]) == 6.0


def test_apd_pair_average():
    a = np.zeros((1, 1, 3))
    b = a.copy(); b[0, 0, 0] = 2      # d(a,b) = 2
    c = a.copy(); c[0, 0, 0] = -4     # d(a,c) = 4, d(b,c) = 6
    assert apd([a, b, c]) == 4.0


def test_apd_errors(rng):
    with pytest.raises(NeedTwoSamples):
        apd([rng.normal(size=(2, 2, 3))])
    with pytest.raises(ShapeMismatch):
        apd([np.zeros((2, 2, 3)), np.zeros((3, 2, 3))])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.floats(0.1, 10), st.integers(0, 10**6))
def test_apd_properties(K, alpha, seed):
    r = np.random.default_rng(seed)
    S = list(r.normal(size=(K, 4, 2, 3)))
    base = apd(S)
    assert base == pytest.approx(brute_apd(S), rel=1e-12)
    assert apd(S[::-1]) == pytest.approx(base, rel=1e-12)
    assert apd([alpha * s for s in S]) == pytest.approx(alpha * base, rel=1e-12)


def test_ade_fde_exact(rng):
    gt = rng.normal(size=(6, 3, 3))
    assert ade([gt], gt) == 0.0 and fde([gt], gt) == 0.0


def test_ade_fde_345(rng):
    gt = rng.normal(size=(6, 1, 3))
    pred = gt + np.array([3.0, 4.0, 0.0])
    assert ade([pred], gt) == pytest.approx(5.0, rel=1e-14)
    assert fde([pred], gt) == pytest.approx(5.0, rel=1e-14)


def test_min_semantics(rng):
    gt = rng.normal(size=(6, 2, 3))
    assert ade([gt + 1.0, gt], gt) == 0.0
    assert fde([gt + 1.0, gt], gt) == 0.0


def test_ade_min_property(rng):
    gt = rng.normal(size=(6, 2, 3))
    S = [gt + rng.normal(size=gt.shape) for _ in range(5)]
    a = ade(S, gt)
    for s in S:
        assert a <= np.mean(np.linalg.norm((s - gt).reshape(6, -1), axis=1)) + 1e-15


def test_mm_reductions(rng):
    gt = rng.normal(size=(6, 2, 3))
    gt2 = rng.normal(size=(6, 2, 3))
    S = [gt + 0.3, gt2 - 0.1]
    assert mmade(S, [gt]) == ade(S, gt)
    assert mmfde(S, [gt]) == fde(S, gt)
    assert mmade(S, [gt, gt]) == ade(S, gt)
    assert mmade([gt, gt2], [gt, gt2]) == 0.0
    with pytest.raises(EmptyGtSet):
        mmade(S, [])


def test_multimodal_gt(rng):
    pasts = [rng.normal(size=(3, 2, 3)) for _ in range(4)]
    futures = [rng.normal(size=(5, 2, 3)) for _ in range(4)]
    got = multimodal_gt(pasts, futures, pasts[2], 0.0)
    assert len(got) == 1 and got[0] is futures[2]
    assert len(multimodal_gt(pasts, futures, pasts[2], math.inf)) == 4
    dists = [np.linalg.norm(p - pasts[2]) for p in pasts]
    below = min(d for d in dists if d > 0) * 0.99
    assert len(multimodal_gt(pasts, futures, pasts[2], below)) == 1
    with pytest.raises(MisalignedPairs):
        multimodal_gt(pasts, futures[:3], pasts[0], 1.0)


def test_jerk_polynomials():
    t = np.arange(10.0)
    Y = np.zeros((10, 1, 3))
    Y[:, 0, 0] = 3 * t + 1
    Y[:, 0, 1] = t**2
    assert np.all(jerk_profile(Y) == 0.0)
    Y = np.zeros((10, 1, 3))
    Y[:, 0, 0] = t**3
    np.testing.assert_array_equal(jerk_profile(Y), [6.0])


def test_jerk_fps_scaling():
    t = np.arange(10.0)
    Y = np.zeros((10, 1, 3))
    Y[:, 0, 2] = t**3
    assert jerk_profile(Y, fps_scaled=True, fps=10.0)[0] == 6000.0


def test_jerk_invariances(rng):
    Y = rng.normal(size=(12, 3, 3))
    t = np.arange(12.0)[:, None, None]
    quad = rng.normal(size=(1, 3, 3)) * t**2 + rng.normal(size=(1, 3, 3)) * t + rng.normal(size=3)
    np.testing.assert_allclose(jerk_profile(Y + quad), jerk_profile(Y), rtol=1e-9)


def test_jerk_too_short():
    with pytest.raises(TooShort):
        jerk_profile(np.zeros((3, 1, 3)))


def test_jitter_reduction(rng):
    Y = rng.normal(size=(12, 3, 3))
    red, mean = jitter_reduction(Y, Y)
    assert np.all(red == 0.0) and mean == 0.0
    red, mean = jitter_reduction(Y, 0.5 * Y)
    np.testing.assert_allclose(red, 50.0)


def test_jitter_zero_baseline(rng):
    Y = rng.normal(size=(12, 2, 3))
    Y[:, 1] = 1.0
    with pytest.warns(ZeroBaselineJerk):
        red, mean = jitter_reduction(Y, Y * 0.5)
    assert math.isnan(red[1])
    assert mean == pytest.approx(50.0)


def test_jitter_groups(rng):
    Y = rng.normal(size=(12, 4, 3))
    red, mean = jitter_reduction(Y, Y * 0.25, {"arms": [0, 1], "legs": [2, 3]})
    np.testing.assert_allclose(red, [75.0, 75.0])


def test_metric_report_to_dict():
    r = MetricReport(ade=1.0, per_joint_jerk=np.array([1.0, 2.0]), metadata={"K": 2})
    assert r.to_dict() == {"ade": 1.0, "per_joint_jerk": [1.0, 2.0], "metadata": {"K": 2}}
