"""Built-in skeleton layouts.

The angle bounds below are illustrative hinge limits for demos and tests.
They are NOT calibrated biomechanical ranges; load real bounds from a
constraint file (see :mod:`freqkalman.io`).
"""

from .core import AngleConstraint, Skeleton

H36M17_NAMES = (
    "Hip", "RHip", "RKnee", "RFoot", "LHip", "LKnee", "LFoot", "Spine", "Thorax",
    "Neck", "Head", "LShoulder", "LElbow", "LWrist", "RShoulder", "RElbow", "RWrist",
)
H36M17_PARENTS = (-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 9, 8, 11, 12, 8, 14, 15)

HUMANEVA15_NAMES = (
    "Pelvis", "Thorax", "LShoulder", "LElbow", "LWrist", "RShoulder", "RElbow", "RWrist",
    "LHip", "LKnee", "LAnkle", "RHip", "RKnee", "RAnkle", "Head",
)
HUMANEVA15_PARENTS = (-1, 0, 1, 2, 3, 1, 5, 6, 0, 8, 9, 0, 11, 12, 1)


def demo_constraints_h36m17() -> tuple[AngleConstraint, ...]:
    """Bone-to-bone hinge limits plus one bone-to-plane limit (demo values)."""
    return (
        AngleConstraint("RKnee", (1, 2), -0.87, 1.0, vec2=(2, 3)),
        AngleConstraint("LKnee", (4, 5), -0.87, 1.0, vec2=(5, 6)),
        AngleConstraint("RElbow", (14, 15), -0.94, 1.0, vec2=(15, 16)),
        AngleConstraint("LElbow", (11, 12), -0.94, 1.0, vec2=(12, 13)),
        AngleConstraint("Head2Neck", (8, 9), 0.5, 1.0, vec2=(9, 10)),
        AngleConstraint("RLeg2HipPlane", (1, 2), -0.9, 0.9, plane=(0, 1, 7)),
    )


def h36m17(with_constraints: bool = True) -> Skeleton:
    cons = demo_constraints_h36m17() if with_constraints else ()
    return Skeleton.from_parents(H36M17_PARENTS, cons, H36M17_NAMES)


def humaneva15() -> Skeleton:
    return Skeleton.from_parents(HUMANEVA15_PARENTS, (), HUMANEVA15_NAMES)
