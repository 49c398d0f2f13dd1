"""Deterministic motion -> pose-code factorization.

A motion is downsampled by a stride l and each sampled frame is parsed
independently: every category measures one geometric quantity and bins
it, giving exactly one active code per category (K-hot). The end flag
rides along as one extra bit, so a step vectorizes to N+1 entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, RELPOS_KINDS, ThresholdKind, classify
from .errors import (
    DegenerateGeometry,
    InvalidCodeForCategory,
    MutualExclusivityViolation,
    ParseError,
    SchemaMismatch,
    ShapeMismatch,
    TooShort,
)
from .skeleton import (
    Axis,
    MotionSequence,
    Pose,
    axis_offset,
    ground_height,
    joint_angle,
    joint_distance,
    segment_vertical_angle,
)

CODES_MAGIC = "POSECODEC-CODES v1"

_AXIS_OF_KIND = {
    ThresholdKind.RELPOS_X: Axis.X,
    ThresholdKind.RELPOS_Y: Axis.Y,
    ThresholdKind.RELPOS_Z: Axis.Z,
}


@dataclass(frozen=True)
class CodeStep:
    assignment: tuple  # one local code index per category
    is_end: bool = False


@dataclass(frozen=True)
class CodeSequence:
    steps: tuple  # CodeStep per downsampled frame
    downsample: int
    source_fps: float

    def __post_init__(self):
        # the end indicator is part of the K-hot layout; activating it
        # anywhere but the final step is an invalid activation pattern
        for i, step in enumerate(self.steps[:-1]):
            if step.is_end:
                raise MutualExclusivityViolation(
                    f"step {i} has is_end set before the final step"
                )

    def __len__(self) -> int:
        return len(self.steps)


def measure_category(pose: Pose, spec) -> float:
    """Raw geometric quantity of one category, before binning."""
    k, j = spec.kind, spec.joints
    if k is ThresholdKind.ANGLE:
        return joint_angle(pose, j[0], j[1], j[2])
    if k is ThresholdKind.DISTANCE:
        return joint_distance(pose, j[0], j[1])
    if k in RELPOS_KINDS:
        return axis_offset(pose, j[0], j[1], _AXIS_OF_KIND[k])
    if k is ThresholdKind.RELORIENT:
        return segment_vertical_angle(pose, j[0], j[1])
    return ground_height(pose, j[0])


def parse_pose(pose: Pose, cb: Codebook) -> CodeStep:
    assignment = []
    for spec in cb.categories:
        try:
            value = measure_category(pose, spec)
        except DegenerateGeometry as exc:
            raise DegenerateGeometry(f"category {spec.name!r}: {exc}") from exc
        assignment.append(classify(spec.kind, value))
    return CodeStep(tuple(assignment), is_end=False)


def pose_measurements(pose: Pose, cb: Codebook) -> tuple:
    """Raw values per category, for debugging threshold choices."""
    return tuple(measure_category(pose, spec) for spec in cb.categories)


def encode_motion(motion: MotionSequence, cb: Codebook, l: int) -> CodeSequence:
    if l < 1:
        raise ValueError("downsample stride must be >= 1")
    t = len(motion)
    if t < l:
        raise TooShort(f"motion has {t} frames, need at least {l}")
    length = t // l
    steps = []
    for i in range(length):
        step = parse_pose(motion.frames[i * l], cb)
        if i == length - 1:
            step = CodeStep(step.assignment, is_end=True)
        steps.append(step)
    return CodeSequence(tuple(steps), downsample=l, source_fps=motion.fps)


def _check_assignment(step: CodeStep, cb: Codebook) -> None:
    if len(step.assignment) != cb.num_categories:
        raise ShapeMismatch(
            f"step has {len(step.assignment)} assignments, codebook has "
            f"{cb.num_categories} categories"
        )
    for spec, local in zip(cb.categories, step.assignment):
        if not 0 <= local < spec.code_count:
            raise InvalidCodeForCategory(
                f"local id {local} outside [0,{spec.code_count}) for {spec.name!r}"
            )


def to_khot(step: CodeStep, cb: Codebook) -> np.ndarray:
    """0/1 vector of length num_codes+1; the last entry is the end flag."""
    _check_assignment(step, cb)
    vec = np.zeros(cb.num_codes + 1)
    for spec, local in zip(cb.categories, step.assignment):
        vec[spec.code_offset + local] = 1.0
    if step.is_end:
        vec[cb.num_codes] = 1.0
    return vec


def from_khot(vec: np.ndarray, cb: Codebook) -> CodeStep:
    vec = np.asarray(vec)
    if vec.shape != (cb.num_codes + 1,):
        raise ShapeMismatch(f"expected shape ({cb.num_codes + 1},), got {vec.shape}")
    if not np.all((vec == 0.0) | (vec == 1.0)):
        raise ShapeMismatch("k-hot vector must contain only 0 and 1")
    assignment = []
    for spec in cb.categories:
        window = vec[spec.code_offset : spec.code_offset + spec.code_count]
        active = np.flatnonzero(window)
        if len(active) != 1:
            raise MutualExclusivityViolation(
                f"category {spec.name!r} has {len(active)} active codes, expected 1"
            )
        assignment.append(int(active[0]))
    return CodeStep(tuple(assignment), is_end=bool(vec[cb.num_codes] == 1.0))


def sequence_to_khot(seq: CodeSequence, cb: Codebook) -> np.ndarray:
    return np.stack([to_khot(s, cb) for s in seq.steps])


def dumps_codes(seq: CodeSequence) -> str:
    lines = [CODES_MAGIC, f"l={seq.downsample}", "fps=%.9g" % seq.source_fps]
    for step in seq.steps:
        flag = "E" if step.is_end else "-"
        lines.append(" ".join(str(i) for i in step.assignment) + " " + flag)
    return "\n".join(lines) + "\n"


def loads_codes(text: str, cb: Codebook) -> CodeSequence:
    lines = text.splitlines()
    if not lines or lines[0] != CODES_MAGIC:
        raise ParseError(f"line 1: expected header {CODES_MAGIC!r}")
    if len(lines) < 3 or not lines[1].startswith("l=") or not lines[2].startswith("fps="):
        raise ParseError("expected l=<int> and fps=<float> header lines")
    try:
        l = int(lines[1][2:])
        fps = float(lines[2][4:])
    except ValueError as exc:
        raise ParseError(f"bad header value ({exc})") from None
    steps = []
    for idx, line in enumerate(lines[3:]):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != cb.num_categories + 1:
            raise SchemaMismatch(
                f"step {idx}: expected {cb.num_categories} indices plus end flag, "
                f"got {len(fields)} fields"
            )
        if fields[-1] not in ("E", "-"):
            raise ParseError(f"step {idx}: end flag must be 'E' or '-', got {fields[-1]!r}")
        try:
            assignment = tuple(int(f) for f in fields[:-1])
        except ValueError as exc:
            raise ParseError(f"step {idx}: malformed index ({exc})") from None
        step = CodeStep(assignment, is_end=fields[-1] == "E")
        _check_assignment(step, cb)
        steps.append(step)
    if not steps:
        raise ParseError("file contains no steps")
    return CodeSequence(tuple(steps), downsample=l, source_fps=fps)


def save_codes(seq: CodeSequence, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_codes(seq))


def load_codes(path, cb: Codebook) -> CodeSequence:
    with open(path, "r", encoding="utf-8") as f:
        return loads_codes(f.read(), cb)
