"""Physics-style losses on a 17-joint skeleton.

Temporal smoothness penalises frame-to-frame motion, the angle loss penalises
joint cosines outside their bounds, and the limb loss compares bone lengths
against a reference. The demo bounds here are illustrative, not calibrated.
"""

import numpy as np

from freqkalman.physics import angle_loss, joint_cosines, limb_length_loss, limb_lengths, temporal_smoothness
from freqkalman.skeletons import h36m17

rng = np.random.default_rng(0)
sk = h36m17()
rest = rng.normal(size=(17, 3))
motion = rest[None] + 0.02 * np.cumsum(rng.normal(size=(30, 17, 3)), axis=0)

print("temporal smoothness:", temporal_smoothness(motion).value)

cos = joint_cosines(motion, sk)
for c, col in zip(sk.angle_constraints, cos.T):
    inside = np.mean((col >= c.cos_min) & (col <= c.cos_max))
    print(f"  {c.name:14s} [{c.cos_min:+.2f}, {c.cos_max:+.2f}] in bounds {100 * inside:5.1f}% of frames")
lv = angle_loss(motion, sk)
print("angle loss:", lv.value, "gradient norm:", np.linalg.norm(lv.gradient))

# one step down the angle gradient lowers the loss
stepped = motion - 0.5 * lv.gradient
print("after one gradient step:", angle_loss(stepped, sk, with_grad=False).value)

ref = limb_lengths(motion[:1], sk)[0]
print("limb loss vs first frame:", limb_length_loss(motion, ref, sk).value)
