from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posecodec.errors import ParseError, SchemaMismatch
from posecodec.motion_io import (
    dumps_motion,
    load_motion,
    loads_motion,
    normalize_ground,
    save_motion,
)
from posecodec.skeleton import JointId, MotionSequence


def quantize(m: MotionSequence) -> MotionSequence:
    """Collapse coordinates onto the 9-significant-digit grid the file
    format stores, so round-trips below can demand exact equality."""
    arr = np.asarray([[float(f"{v:.9g}") for v in frame.ravel()] for frame in m.as_array()])
    return MotionSequence.from_array(arr.reshape(len(m), 22, 3), m.fps)


class TestRoundTrip:
    def test_quantized_round_trip_is_exact(self, walk40):
        q = quantize(walk40)
        again = loads_motion(dumps_motion(q))
        assert np.array_equal(again.as_array(), q.as_array())
        assert again.fps == q.fps

    def test_serialize_is_idempotent(self, walk40):
        text1 = dumps_motion(walk40)
        text2 = dumps_motion(loads_motion(text1))
        assert text1 == text2

    def test_file_round_trip(self, tmp_path, walk40):
        path = tmp_path / "w.motion"
        save_motion(walk40, path)
        again = load_motion(path)
        assert dumps_motion(again) == dumps_motion(walk40)

    def test_header_shape(self, walk40):
        from posecodec.skeleton import JOINT_NAMES

        lines = dumps_motion(walk40).splitlines()
        assert lines[0] == "POSECODEC-MOTION v1"
        assert lines[1].startswith("fps=")
        assert lines[2] == "joints=" + ",".join(JOINT_NAMES)
        assert len(lines) == 3 + len(walk40)
        assert all(len(line.split()) == 66 for line in lines[3:])


@given(st.lists(st.floats(-100, 100, allow_nan=False, width=32), min_size=66, max_size=66))
@settings(max_examples=40, deadline=None)
def test_arbitrary_frame_round_trips(values):
    arr = np.array(values, dtype=np.float64).reshape(1, 22, 3)
    m = MotionSequence.from_array(arr, fps=20.0)
    # float32-representable inputs fit in 9 significant digits
    again = loads_motion(dumps_motion(m))
    assert np.allclose(again.as_array(), arr, rtol=1e-8, atol=1e-12)


class TestParseErrors:
    def test_bad_magic(self):
        with pytest.raises(ParseError):
            loads_motion("NOPE v1\nfps=20\njoints=22\n")

    def test_wrong_joint_count(self, walk40):
        lines = dumps_motion(walk40).splitlines()
        names = lines[2][len("joints="):].split(",")
        lines[2] = "joints=" + ",".join(names[:-1])
        with pytest.raises(SchemaMismatch):
            loads_motion("\n".join(lines) + "\n")

    def test_renamed_joint(self, walk40):
        lines = dumps_motion(walk40).splitlines()
        lines[2] = lines[2].replace("pelvis", "root")
        with pytest.raises(SchemaMismatch):
            loads_motion("\n".join(lines) + "\n")

    def test_truncated_frame(self, walk40):
        lines = dumps_motion(walk40).splitlines()
        lines[3] = " ".join(lines[3].split()[:-1])
        with pytest.raises(SchemaMismatch) as err:
            loads_motion("\n".join(lines) + "\n")
        assert "frame 0" in str(err.value)

    def test_non_numeric_token(self, walk40):
        lines = dumps_motion(walk40).splitlines()
        parts = lines[4].split()
        parts[3] = "spam"
        lines[4] = " ".join(parts)
        with pytest.raises(ParseError) as err:
            loads_motion("\n".join(lines) + "\n")
        assert "frame 1" in str(err.value)

    def test_missing_fps(self, walk40):
        text = dumps_motion(walk40).replace("fps=20", "rate=20")
        with pytest.raises(ParseError):
            loads_motion(text)

    def test_empty_body(self, walk40):
        header = dumps_motion(walk40).splitlines()[:3]
        with pytest.raises(ParseError):
            loads_motion("\n".join(header) + "\n")


class TestNormalizeGround:
    def test_shifts_min_foot_to_zero(self, walk40):
        lifted = MotionSequence.from_array(walk40.as_array() + [0, 0.3, 0], walk40.fps)
        fixed = normalize_ground(lifted)
        feet = fixed.as_array()[:, [int(JointId.LEFT_FOOT), int(JointId.RIGHT_FOOT)], 1]
        assert feet.min() == pytest.approx(0.0, abs=1e-12)

    def test_loader_does_not_normalize(self, walk40):
        lifted = MotionSequence.from_array(walk40.as_array() + [0, 0.3, 0], walk40.fps)
        again = loads_motion(dumps_motion(lifted))
        assert again.as_array()[:, :, 1].min() > 0.2
