"""Text codec for motion sequences.

Format (UTF-8):

    POSECODEC-MOTION v1
    fps=<float>
    joints=<22 comma-separated names in canonical order>
    <66 space-separated decimals per frame, x y z per joint>

Decimals carry 9 significant digits. Loading a saved file and saving
again is byte-identical; values already expressible at 9 significant
digits round-trip exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError, SchemaMismatch
from .skeleton import JOINT_COUNT, JOINT_NAMES, MotionSequence

MAGIC = "POSECODEC-MOTION v1"


def _fmt(x: float) -> str:
    return "%.9g" % x


def dumps_motion(motion: MotionSequence) -> str:
    lines = [MAGIC, "fps=" + _fmt(motion.fps), "joints=" + ",".join(JOINT_NAMES)]
    for pose in motion.frames:
        lines.append(" ".join(_fmt(v) for v in pose.positions.reshape(-1)))
    return "\n".join(lines) + "\n"


def loads_motion(text: str) -> MotionSequence:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise ParseError(f"line 1: expected header {MAGIC!r}")
    if len(lines) < 3:
        raise ParseError("missing fps/joints header lines")
    if not lines[1].startswith("fps="):
        raise ParseError("line 2: expected fps=<float>")
    try:
        fps = float(lines[1][4:])
    except ValueError:
        raise ParseError(f"line 2: bad fps value {lines[1][4:]!r}") from None
    if not lines[2].startswith("joints="):
        raise ParseError("line 3: expected joints=<names>")
    names = tuple(lines[2][7:].split(","))
    if len(names) != JOINT_COUNT:
        raise SchemaMismatch(f"expected {JOINT_COUNT} joints, file lists {len(names)}")
    if names != JOINT_NAMES:
        raise SchemaMismatch("joint names or order differ from the canonical skeleton")
    frames = []
    for idx, line in enumerate(lines[3:]):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != JOINT_COUNT * 3:
            raise SchemaMismatch(
                f"frame {idx}: expected {JOINT_COUNT * 3} values, got {len(fields)}"
            )
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"frame {idx}: malformed numeric field ({exc})") from None
        frames.append(np.array(values).reshape(JOINT_COUNT, 3))
    if not frames:
        raise ParseError("file contains no frames")
    return MotionSequence.from_array(np.stack(frames), fps)


def save_motion(motion: MotionSequence, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_motion(motion))


def load_motion(path) -> MotionSequence:
    with open(path, "r", encoding="utf-8") as f:
        return loads_motion(f.read())


def normalize_ground(motion: MotionSequence) -> MotionSequence:
    """Shift a sequence so its lowest foot joint touches Y=0.

    External data may use an arbitrary ground reference; codes assume
    Y=0 ground. Applied on ingestion paths, never inside load_motion,
    which stays faithful to the file.
    """
    from .skeleton import JointId

    arr = motion.as_array()
    feet = arr[:, (int(JointId.LEFT_FOOT), int(JointId.RIGHT_FOOT)), 1]
    return MotionSequence.from_array(arr - np.array([0.0, feet.min(), 0.0]), motion.fps)
