"""22-joint skeleton conventions and geometric primitives.

Coordinate convention: X = subject's left (+), Y = up (+), Z = forward (+).
The ground plane is Y = 0. All lengths are meters, all angles degrees.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, OutOfDomain, ShapeMismatch

MIN_SEGMENT_LENGTH = 1e-9


class JointId(enum.IntEnum):
    PELVIS = 0
    LEFT_HIP = 1
    RIGHT_HIP = 2
    SPINE1 = 3
    LEFT_KNEE = 4
    RIGHT_KNEE = 5
    SPINE2 = 6
    LEFT_ANKLE = 7
    RIGHT_ANKLE = 8
    SPINE3 = 9
    LEFT_FOOT = 10
    RIGHT_FOOT = 11
    NECK = 12
    LEFT_COLLAR = 13
    RIGHT_COLLAR = 14
    HEAD = 15
    LEFT_SHOULDER = 16
    RIGHT_SHOULDER = 17
    LEFT_ELBOW = 18
    RIGHT_ELBOW = 19
    LEFT_WRIST = 20
    RIGHT_WRIST = 21


JOINT_COUNT = 22

#: Canonical joint names in index order, used by the motion file header.
JOINT_NAMES = tuple(j.name.lower() for j in JointId)


class Axis(enum.Enum):
    X = 0
    Y = 1
    Z = 2


@dataclass(frozen=True)
class Pose:
    """One skeleton frame: 22 joint positions, shape (22, 3), meters."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64, copy=True)
        if pos.shape != (JOINT_COUNT, 3):
            raise ShapeMismatch(f"pose needs shape (22, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise OutOfDomain("pose coordinates must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def joint(self, j: JointId) -> np.ndarray:
        return self.positions[int(j)]

    def translated(self, offset) -> "Pose":
        return Pose(self.positions + np.asarray(offset, dtype=np.float64))

    def __eq__(self, other):
        return isinstance(other, Pose) and np.array_equal(self.positions, other.positions)

    def __hash__(self):
        return hash(self.positions.tobytes())


@dataclass(frozen=True)
class MotionSequence:
    """Ordered frames plus capture rate."""

    frames: tuple[Pose, ...]
    fps: float

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) < 1:
            raise ValueError("motion needs at least one frame")
        if not (self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")

    def __len__(self):
        return len(self.frames)

    def as_array(self) -> np.ndarray:
        """Stack to shape (T, 22, 3)."""
        return np.stack([f.positions for f in self.frames])

    @staticmethod
    def from_array(arr, fps: float) -> "MotionSequence":
        arr = np.asarray(arr, dtype=np.float64)
        return MotionSequence(tuple(Pose(frame) for frame in arr), fps)


def _segment(pose: Pose, a: JointId, b: JointId) -> np.ndarray:
    """Vector from b to a, raising on degenerate length."""
    v = pose.joint(a) - pose.joint(b)
    if float(np.linalg.norm(v)) < MIN_SEGMENT_LENGTH:
        raise DegenerateGeometry(f"segment {a.name}->{b.name} shorter than {MIN_SEGMENT_LENGTH} m")
    return v


def joint_angle(pose: Pose, a: JointId, b: JointId, c: JointId) -> float:
    """Interior angle at b between segments b->a and b->c, degrees in [0, 180]."""
    u = _segment(pose, a, b)
    w = _segment(pose, c, b)
    cos = float(np.dot(u, w) / (np.linalg.norm(u) * np.linalg.norm(w)))
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def joint_distance(pose: Pose, a: JointId, b: JointId) -> float:
    """Euclidean distance between two joints, meters."""
    return float(np.linalg.norm(pose.joint(a) - pose.joint(b)))


def axis_offset(pose: Pose, a: JointId, b: JointId, axis: Axis) -> float:
    """Signed coordinate of a minus coordinate of b along the axis."""
    return float(pose.joint(a)[axis.value] - pose.joint(b)[axis.value])


def segment_vertical_angle(pose: Pose, a: JointId, b: JointId) -> float:
    """Acute angle between segment a->b and the vertical axis, degrees in [0, 90].

    0 means perfectly vertical, 90 perfectly horizontal.
    """
    v = _segment(pose, a, b)
    cos = abs(float(v[1]) / float(np.linalg.norm(v)))
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def ground_height(pose: Pose, j: JointId) -> float:
    """Height of a joint above the Y = 0 ground plane."""
    return float(pose.joint(j)[1])
