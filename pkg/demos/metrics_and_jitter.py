"""Diversity/accuracy metrics for a prediction set, and the jitter table.

Ten noisy "predictions" scatter around a ground-truth future; APD measures
their spread, ADE/FDE the best one's error. Refining each prediction then
shows up as a jerk reduction.
"""

import numpy as np

from freqkalman import refine_motion
from freqkalman.metrics import ade, apd, fde, jitter_reduction, mmade
from freqkalman.skeletons import H36M17_NAMES
from freqkalman.synth import SynthSpec, generate_clean, inject_high_band_noise

gt = generate_clean(SynthSpec(frames=100, joints=17, seed=1))
preds = [inject_high_band_noise(gt, 10, 0.3, seed=s)[0] for s in range(10)]
print(f"APD {apd(preds):.3f}  ADE {ade(preds, gt):.4f}  FDE {fde(preds, gt):.4f}")
print(f"MMADE with a single ground truth equals ADE: {mmade(preds, [gt]) == ade(preds, gt)}")

refined = [refine_motion(p)[0] for p in preds]
print(f"after refinement: ADE {ade(refined, gt):.4f}  FDE {fde(refined, gt):.4f}")

red, mean = jitter_reduction(preds[0], refined[0])
for name, r in list(zip(H36M17_NAMES, red))[:6]:
    print(f"  {name:10s} {r:6.1f}%")
print(f"  {'Average':10s} {mean:6.1f}%")
