import warnings

import numpy as np
import pytest

from conftest import central_diff_grad, max_rel_err
from freqkalman.core import AngleConstraint, MotionSequence, Skeleton
from freqkalman.physics import (DegenerateBoneWarning, EmptySampleSet, LengthCountMismatch,
                                NoConstraints, TooShort, angle_loss, composite_objective,
                                joint_cosines, limb_length_loss, limb_lengths, sample_set_losses,
                                temporal_smoothness)
from freqkalman.skeletons import h36m17


def rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


def chain_skeleton(cons=()):
    return Skeleton.from_parents([-1, 0, 1, 2, 1], cons)


def random_constraints(rng, margin_pose=None):
    cons = []
    specs = [((0, 1), (1, 2), None), ((1, 2), (2, 3), None), ((1, 4), None, (0, 1, 2)),
             ((2, 3), (1, 4), None)]
    for i, (v1, v2, plane) in enumerate(specs):
        a, b = np.sort(rng.uniform(-0.8, 0.8, size=2))
        cons.append(AngleConstraint(f"c{i}", v1, float(a), float(b), vec2=v2, plane=plane))
    return tuple(cons)


# temporal smoothness --------------------------------------------------------------

def test_temporal_constant_pose(rng):
    Y = np.broadcast_to(rng.normal(size=(1, 3, 3)), (6, 3, 3))
    assert temporal_smoothness(Y).value == 0.0


def test_temporal_unit_steps():
    Y = np.zeros((3, 1, 3))
    Y[:, 0, 0] = [0, 1, 2]
    assert temporal_smoothness(Y).value == 1.0


def test_temporal_too_short():
    with pytest.raises(TooShort):
        temporal_smoothness(np.zeros((1, 2, 3)))


@pytest.mark.parametrize("seed", range(50))
def test_temporal_gradient_fd(seed):
    Y = np.random.default_rng(seed).normal(size=(6, 3, 3))
    g = temporal_smoothness(Y).gradient
    fd = central_diff_grad(lambda Z: temporal_smoothness(Z, with_grad=False).value, Y)
    assert max_rel_err(g, fd) < 1e-5


# cosines and angle loss --------------------------------------------------------------

def test_cosine_cases():
    Y = np.zeros((1, 5, 3))
    Y[0, 1] = [1, 0, 0]
    Y[0, 2] = [2, 0, 0]  # collinear with 0->1
    Y[0, 3] = [2, 1, 0]  # perpendicular to 1->2
    Y[0, 4] = [0, 0, 0]  # 1->4 opposite to 0->1
    sk = chain_skeleton((
        AngleConstraint("same", (0, 1), -1, 1, vec2=(1, 2)),
        AngleConstraint("perp", (1, 2), -1, 1, vec2=(2, 3)),
        AngleConstraint("opp", (0, 1), -1, 1, vec2=(1, 4)),
    ))
    cos = joint_cosines(Y, sk)[0]
    assert cos[0] == pytest.approx(1.0, abs=1e-7)
    assert cos[1] == 0.0
    assert cos[2] == pytest.approx(-1.0, abs=1e-7)


def test_plane_normal_cosine():
    Y = np.zeros((1, 5, 3))
    Y[0, 1] = [1, 0, 0]
    Y[0, 2] = [0, 1, 0]
    Y[0, 4] = [1, 0, 2]  # 1->4 points along +z, the normal of the xy plane
    sk = chain_skeleton((AngleConstraint("p", (1, 4), -1, 1, plane=(0, 1, 2)),))
    assert joint_cosines(Y, sk)[0, 0] == pytest.approx(1.0, abs=1e-7)


def test_degenerate_bone_warns():
    Y = np.zeros((1, 5, 3))
    Y[0, 2] = [1, 0, 0]
    sk = chain_skeleton((AngleConstraint("d", (0, 1), -1, 1, vec2=(1, 2)),))
    with pytest.warns(DegenerateBoneWarning):
        cos = joint_cosines(Y, sk)
    assert cos[0, 0] == 0.0


def test_angle_loss_in_bounds_is_zero(rng):
    sk = h36m17()
    Y = rng.normal(size=(4, 17, 3))
    cos = joint_cosines(Y, sk)
    loose = Skeleton(sk.joint_count, sk.parents, sk.limb_pairs, tuple(
        AngleConstraint(c.name, c.vec1, float(cos[:, i].min()) - 1e-3 if cos[:, i].min() > -1 + 1e-3 else -1.0,
                        float(cos[:, i].max()) + 1e-3 if cos[:, i].max() < 1 - 1e-3 else 1.0,
                        vec2=c.vec2, plane=c.plane)
        for i, c in enumerate(sk.angle_constraints)))
    lv = angle_loss(Y, loose)
    assert lv.value == 0.0
    assert np.all(lv.gradient == 0.0)


def test_angle_loss_single_violation_fixture():
    # one frame, one constraint, cos = 0.95 against cos_max = 0.9
    theta = np.arccos(0.95)
    Y = np.zeros((1, 3, 3))
    Y[0, 1] = [1, 0, 0]
    Y[0, 2] = Y[0, 1] + [np.cos(theta), np.sin(theta), 0]
    sk = Skeleton.from_parents([-1, 0, 1], (AngleConstraint("a", (0, 1), -1.0, 0.9, vec2=(1, 2)),))
    cos = joint_cosines(Y, sk)[0, 0]
    assert cos == pytest.approx(0.95, abs=1e-7)
    assert angle_loss(Y, sk).value == pytest.approx((cos - 0.9) ** 2, rel=1e-15)
    assert angle_loss(Y, sk).value == pytest.approx(0.0025, abs=1e-7)


def test_angle_loss_requires_constraints():
    with pytest.raises(NoConstraints):
        angle_loss(np.zeros((2, 3, 3)), Skeleton.from_parents([-1, 0, 1]))


def _angle_input(seed):
    rng = np.random.default_rng(seed)
    while True:
        Y = rng.normal(size=(3, 5, 3))
        sk = chain_skeleton(random_constraints(rng))
        cos = joint_cosines(Y, sk)
        lo = np.array([c.cos_min for c in sk.angle_constraints])
        hi = np.array([c.cos_max for c in sk.angle_constraints])
        if np.min(np.abs(cos - lo)) > 1e-4 and np.min(np.abs(cos - hi)) > 1e-4:
            return Y, sk


@pytest.mark.parametrize("seed", range(50))
def test_angle_gradient_fd(seed):
    Y, sk = _angle_input(seed)
    g = angle_loss(Y, sk).gradient
    fd = central_diff_grad(lambda Z: angle_loss(Z, sk, with_grad=False).value, Y)
    assert max_rel_err(g, fd) < 1e-5


def test_angle_loss_continuous_at_bound():
    sk = Skeleton.from_parents([-1, 0, 1], (AngleConstraint("a", (0, 1), -1.0, 0.5, vec2=(1, 2)),))
    vals = []
    for cos in (0.5 - 1e-6, 0.5, 0.5 + 1e-6):
        th = np.arccos(cos)
        Y = np.zeros((1, 3, 3))
        Y[0, 1] = [1, 0, 0]
        Y[0, 2] = Y[0, 1] + [np.cos(th), np.sin(th), 0]
        vals.append(angle_loss(Y, sk).value)
    assert max(vals) < 1e-11


def test_angle_loss_rigid_invariance(rng):
    Y, sk = _angle_input(7)
    R = rotation(rng)
    moved = Y @ R.T + rng.normal(size=3)
    assert angle_loss(moved, sk).value == pytest.approx(angle_loss(Y, sk).value, rel=1e-9, abs=1e-15)


# limb lengths ----------------------------------------------------------------------

def test_limb_length_exact_reference(rng):
    sk = h36m17(with_constraints=False)
    Y = rng.normal(size=(5, 17, 3))
    ref = limb_lengths(Y[:1], sk)[0]
    assert limb_length_loss(Y[:1], ref, sk).value == 0.0


def test_limb_length_single():
    sk = Skeleton.from_parents([-1, 0])
    Y = np.array([[[0, 0, 0], [2, 0, 0]]], dtype=float)
    assert limb_length_loss(Y, [1.0], sk).value == 1.0
    with pytest.raises(LengthCountMismatch):
        limb_length_loss(Y, [1.0, 2.0], sk)


def test_limb_length_translation_invariant(rng):
    sk = h36m17(with_constraints=False)
    Y = rng.normal(size=(5, 17, 3))
    ref = rng.uniform(0.1, 0.5, size=len(sk.limb_pairs))
    a = limb_length_loss(Y, ref, sk).value
    b = limb_length_loss(Y + rng.normal(size=3), ref, sk).value
    assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_limb_gradient_fd(seed):
    rng = np.random.default_rng(seed)
    sk = chain_skeleton()
    Y = rng.normal(size=(3, 5, 3))
    ref = rng.uniform(0.5, 1.5, size=len(sk.limb_pairs))
    g = limb_length_loss(Y, ref, sk).gradient
    fd = central_diff_grad(lambda Z: limb_length_loss(Z, ref, sk, with_grad=False).value, Y)
    assert max_rel_err(g, fd) < 1e-5


def test_temporal_translation_invariant(rng):
    Y = rng.normal(size=(8, 4, 3))
    assert temporal_smoothness(Y + rng.normal(size=3)).value == pytest.approx(temporal_smoothness(Y).value)


# set losses ------------------------------------------------------------------------

def test_sample_set_losses(rng):
    gt = rng.normal(size=(6, 3, 3))
    other = gt + 1.0
    out = sample_set_losses([gt, other], gt, mm_gt=[gt], alpha=10.0)
    assert out["recon"] == 0.0
    assert out["mm"] == out["recon"]
    assert out["d"] == pytest.approx(np.exp(-gt.size / 10.0))
    assert sample_set_losses([gt, gt], gt)["d"] == 1.0
    assert "h" not in out


def test_history_loss(rng):
    X = rng.normal(size=(4, 3, 3))
    out = sample_set_losses([X], X, history_recon=[X, X + 0.5], history=X)
    assert out["h"] == pytest.approx(0.5 * (0.25 * X.size))


def test_empty_samples():
    with pytest.raises(EmptySampleSet):
        sample_set_losses([], np.zeros((2, 2, 3)))


def test_composite_objective():
    assert composite_objective({"a": 2.0, "b": 3.0}, {"a": 0.5, "b": 2.0}) == 7.0
    with pytest.raises(KeyError):
        composite_objective({"a": 2.0}, {"b": 1.0})


def test_all_losses_nonnegative(rng):
    sk = h36m17()
    for _ in range(10):
        Y = MotionSequence.from_array(rng.normal(size=(5, 17, 3)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateBoneWarning)
            assert angle_loss(Y, sk).value >= 0
        assert temporal_smoothness(Y).value >= 0
        assert limb_length_loss(Y, np.ones(len(sk.limb_pairs)), sk).value >= 0
