"""Deterministic parametric motion generation for the five built-in kinds.

Randomness comes only from :class:`XorShift64Star`, a fixed 64-bit
xorshift-multiply generator, so a given spec always produces the same
frames. Seeds only jitter amplitudes and phases; the motion family is
fixed per kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownKind
from .skeleton import JointId as J
from .skeleton import MotionSequence, Pose

_MASK = (1 << 64) - 1

KINDS = ("walk", "wave", "squat", "reach", "idle")


class XorShift64Star:
    """xorshift64* : shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.

    uniform() maps the top 53 bits to [0, 1).
    """

    _MULT = 0x2545F4914F6CDD1D

    def __init__(self, seed: int):
        self.state = (seed & _MASK) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * self._MULT) & _MASK

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    duration_frames: int
    seed: int = 0
    fps: float = 20.0
    params: dict = field(default_factory=dict)


# Segment lengths of the canonical skeleton, meters.
_UPPER_LEG = 0.42
_LOWER_LEG = 0.40
_UPPER_ARM = 0.28
_FOREARM = 0.26
_FOOT_DROP = 0.06
_FOOT_FORWARD = 0.12

_BASE = {
    J.PELVIS: (0.0, 0.95, 0.0),
    J.LEFT_HIP: (0.10, 0.90, 0.0),
    J.RIGHT_HIP: (-0.10, 0.90, 0.0),
    J.SPINE1: (0.0, 1.05, 0.0),
    J.LEFT_KNEE: (0.10, 0.48, 0.0),
    J.RIGHT_KNEE: (-0.10, 0.48, 0.0),
    J.SPINE2: (0.0, 1.20, 0.0),
    J.LEFT_ANKLE: (0.10, 0.08, 0.0),
    J.RIGHT_ANKLE: (-0.10, 0.08, 0.0),
    J.SPINE3: (0.0, 1.32, 0.0),
    J.LEFT_FOOT: (0.10, 0.02, 0.12),
    J.RIGHT_FOOT: (-0.10, 0.02, 0.12),
    J.NECK: (0.0, 1.43, 0.0),
    J.LEFT_COLLAR: (0.06, 1.40, 0.0),
    J.RIGHT_COLLAR: (-0.06, 1.40, 0.0),
    J.HEAD: (0.0, 1.57, 0.0),
    J.LEFT_SHOULDER: (0.18, 1.40, 0.0),
    J.RIGHT_SHOULDER: (-0.18, 1.40, 0.0),
    J.LEFT_ELBOW: (0.22, 1.12, 0.0),
    J.RIGHT_ELBOW: (-0.22, 1.12, 0.0),
    J.LEFT_WRIST: (0.24, 0.86, 0.0),
    J.RIGHT_WRIST: (-0.24, 0.86, 0.0),
}

_DEFAULTS = {
    "walk": {
        "stride_hz": 0.9,
        "hip_swing_deg": 28.0,
        "knee_lift_deg": 42.0,
        "arm_swing_deg": 22.0,
        "forward_speed": 0.25,
        "bob": 0.02,
        "phase_jitter": 1.0,
        "amp_jitter": 0.15,
    },
    "wave": {
        "wave_hz": 1.2,
        "wave_deg": 30.0,
        "raise_deg": 35.0,
        "phase_jitter": 1.0,
        "amp_jitter": 0.15,
    },
    "squat": {
        "depth": 0.32,
        "arm_raise_deg": 70.0,
        "lean_deg": 14.0,
        "amp_jitter": 0.10,
    },
    "reach": {
        "raise_deg": 165.0,
        "side": 1.0,  # >0 reaches with the right arm
        "amp_jitter": 0.10,
    },
    "idle": {},
}


def base_pose() -> Pose:
    pos = np.zeros((22, 3))
    for j, p in _BASE.items():
        pos[int(j)] = p
    return Pose(pos)


def _resolve_params(spec: SyntheticSpec) -> dict:
    """Apply overrides, then seeded jitter to amplitudes and phases."""
    if spec.kind not in _DEFAULTS:
        raise UnknownKind(f"unknown synthetic kind {spec.kind!r}; expected one of {KINDS}")
    p = dict(_DEFAULTS[spec.kind])
    for k, v in spec.params.items():
        if k not in p:
            raise UnknownKind(f"kind {spec.kind!r} has no parameter {k!r}")
        p[k] = float(v)
    rng = XorShift64Star(spec.seed * 1000003 + KINDS.index(spec.kind))
    amp = p.pop("amp_jitter", 0.0)
    phase_scale = p.pop("phase_jitter", 0.0)
    jittered = {}
    for k in sorted(p):
        u = rng.uniform()
        if k.endswith(("_deg", "_hz")) or k in ("depth", "bob"):
            jittered[k] = p[k] * (1.0 + amp * (u - 0.5))
        else:
            jittered[k] = p[k]
    jittered["phase0"] = phase_scale * rng.uniform() * 2.0 * math.pi
    return jittered


def _leg_chain(pos, side: int, hip_swing: float, knee_flex: float):
    """Place knee/ankle/foot for one leg from sagittal hip swing and knee flexion (radians)."""
    hip = pos[int(J.LEFT_HIP if side > 0 else J.RIGHT_HIP)]
    thigh = np.array([0.0, -math.cos(hip_swing), math.sin(hip_swing)])
    knee = hip + _UPPER_LEG * thigh
    shank_angle = hip_swing - knee_flex
    shank = np.array([0.0, -math.cos(shank_angle), math.sin(shank_angle)])
    ankle = knee + _LOWER_LEG * shank
    foot = ankle + np.array([0.0, -_FOOT_DROP, _FOOT_FORWARD])
    kj = J.LEFT_KNEE if side > 0 else J.RIGHT_KNEE
    aj = J.LEFT_ANKLE if side > 0 else J.RIGHT_ANKLE
    fj = J.LEFT_FOOT if side > 0 else J.RIGHT_FOOT
    pos[int(kj)], pos[int(aj)], pos[int(fj)] = knee, ankle, foot


def _arm_chain(pos, side: int, shoulder_swing: float, elbow_flex: float = 0.0):
    """Place elbow/wrist for one arm; swing is sagittal, measured from straight-down."""
    sj = J.LEFT_SHOULDER if side > 0 else J.RIGHT_SHOULDER
    shoulder = pos[int(sj)]
    upper = np.array([0.02 * side, -math.cos(shoulder_swing), math.sin(shoulder_swing)])
    upper /= np.linalg.norm(upper)
    elbow = shoulder + _UPPER_ARM * upper
    fore_angle = shoulder_swing + elbow_flex
    fore = np.array([0.02 * side, -math.cos(fore_angle), math.sin(fore_angle)])
    fore /= np.linalg.norm(fore)
    wrist = elbow + _FOREARM * fore
    ej = J.LEFT_ELBOW if side > 0 else J.RIGHT_ELBOW
    wj = J.LEFT_WRIST if side > 0 else J.RIGHT_WRIST
    pos[int(ej)], pos[int(wj)] = elbow, wrist


def _walk_frame(t: float, p: dict) -> np.ndarray:
    pos = base_pose().positions.copy()
    phase = 2.0 * math.pi * p["stride_hz"] * t + p["phase0"]
    for side, leg_phase in ((1, 0.0), (-1, math.pi)):
        swing = math.radians(p["hip_swing_deg"]) * math.sin(phase + leg_phase)
        lift = math.radians(p["knee_lift_deg"]) * max(0.0, math.sin(phase + leg_phase + 0.4)) ** 2
        _leg_chain(pos, side, swing, lift)
        arm = math.radians(p["arm_swing_deg"]) * math.sin(phase + leg_phase + math.pi)
        _arm_chain(pos, side, arm, math.radians(12.0))
    pos[:, 1] += p["bob"] * math.cos(2.0 * phase)
    pos[:, 2] += p["forward_speed"] * t
    # Snap the lower foot onto the ground so stance contact always holds.
    dy = min(pos[int(J.LEFT_FOOT)][1], pos[int(J.RIGHT_FOOT)][1]) - 0.02
    pos[:, 1] -= dy
    return pos


def _squat_frame(t: float, total: float, p: dict) -> np.ndarray:
    pos = base_pose().positions.copy()
    drop = p["depth"] * 0.5 * (1.0 - math.cos(2.0 * math.pi * t / total))
    for side in (1, -1):
        hj = J.LEFT_HIP if side > 0 else J.RIGHT_HIP
        aj = J.LEFT_ANKLE if side > 0 else J.RIGHT_ANKLE
        kj = J.LEFT_KNEE if side > 0 else J.RIGHT_KNEE
        hip = _BASE[hj] - np.array([0.0, drop, 0.0])
        ankle = np.asarray(_BASE[aj])
        d = hip - ankle
        dist = float(np.linalg.norm(d))
        a = (dist * dist + _UPPER_LEG ** 2 - _LOWER_LEG ** 2) / (2.0 * dist)
        b = math.sqrt(max(0.0, _UPPER_LEG ** 2 - a * a))
        knee = hip + a * (ankle - hip) / dist + b * np.array([0.0, 0.0, 1.0])
        pos[int(hj)], pos[int(kj)] = hip, knee
    frac = drop / p["depth"] if p["depth"] > 0 else 0.0
    lean = math.radians(p["lean_deg"]) * frac
    # Drop and lean the torso chain above the pelvis.
    pelvis_y = _BASE[J.PELVIS][1]
    for j in (J.PELVIS, J.SPINE1, J.SPINE2, J.SPINE3, J.NECK, J.HEAD,
              J.LEFT_COLLAR, J.RIGHT_COLLAR, J.LEFT_SHOULDER, J.RIGHT_SHOULDER):
        q = np.asarray(_BASE[j]) - np.array([0.0, drop, 0.0])
        h = q[1] - (pelvis_y - drop)
        if h > 0:
            q = q + np.array([0.0, -(1.0 - math.cos(lean)) * h, math.sin(lean) * h])
        pos[int(j)] = q
    arm = math.radians(p["arm_raise_deg"]) * frac
    for side in (1, -1):
        _arm_chain(pos, side, arm)
    return pos


def _wave_frame(t: float, p: dict) -> np.ndarray:
    pos = base_pose().positions.copy()
    # Right upper arm held up and outward; forearm oscillates about vertical.
    shoulder = pos[int(J.RIGHT_SHOULDER)]
    raise_rad = math.radians(p["raise_deg"])
    upper = np.array([-math.sin(raise_rad), math.cos(raise_rad), 0.0])
    elbow = shoulder + _UPPER_ARM * upper
    theta = math.radians(p["wave_deg"]) * math.sin(2.0 * math.pi * p["wave_hz"] * t + p["phase0"])
    fore = np.array([math.sin(theta), math.cos(theta), 0.0])
    wrist = elbow + _FOREARM * fore
    pos[int(J.RIGHT_ELBOW)], pos[int(J.RIGHT_WRIST)] = elbow, wrist
    return pos


def _reach_frame(t: float, total: float, p: dict) -> np.ndarray:
    pos = base_pose().positions.copy()
    frac = min(1.0, t / total) if total > 0 else 1.0
    angle = math.radians(p["raise_deg"]) * 0.5 * (1.0 - math.cos(math.pi * frac))
    side = -1 if p["side"] > 0 else 1
    _arm_chain(pos, side, angle)
    return pos


def synthesize(spec: SyntheticSpec) -> MotionSequence:
    """Generate a deterministic parametric motion for the spec."""
    if spec.duration_frames < 1:
        raise ValueError("duration_frames must be >= 1")
    p = _resolve_params(spec)
    n = spec.duration_frames
    total = max(n - 1, 1) / spec.fps
    frames = []
    for i in range(n):
        t = i / spec.fps
        if spec.kind == "idle":
            pos = base_pose().positions.copy()
        elif spec.kind == "walk":
            pos = _walk_frame(t, p)
        elif spec.kind == "squat":
            pos = _squat_frame(t, total, p)
        elif spec.kind == "wave":
            pos = _wave_frame(t, p)
        elif spec.kind == "reach":
            pos = _reach_frame(t, total, p)
        else:  # unreachable: _resolve_params validates
            raise UnknownKind(spec.kind)
        frames.append(Pose(pos))
    return MotionSequence(tuple(frames), spec.fps)
