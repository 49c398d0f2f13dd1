"""The fixed 70-category / 392-code pose codebook.

Categories come in five families, each with one threshold kind:

* 4 joint-angle categories, 18 codes each (10 degree bins, then "straight");
* 18 joint-distance categories, 10 codes each (0.1 m bins, then "very wide");
* 31 relative-position categories (6 X, 16 Y, 9 Z), 3 codes each
  (negative side / ignored / positive side at +-0.15 m);
* 13 relative-orientation categories, 3 codes each
  (vertical <= 10 deg / ignored / horizontal > 80 deg);
* 4 ground-contact categories, 2 codes each (on the ground <= 0.1 m).

4*18 + 18*10 + 31*3 + 13*3 + 4*2 = 392 codes. All bins are half-open
(lower < x <= upper); a boundary value lands in the lower bin.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

import math

from .errors import IndexOutOfRange, OutOfDomain
from .skeleton import JointId as J


class ThresholdKind(enum.Enum):
    ANGLE = "angle"
    DISTANCE = "distance"
    RELPOS_X = "relpos_x"
    RELPOS_Y = "relpos_y"
    RELPOS_Z = "relpos_z"
    RELORIENT = "relorient"
    GROUND = "ground"


RELPOS_KINDS = (ThresholdKind.RELPOS_X, ThresholdKind.RELPOS_Y, ThresholdKind.RELPOS_Z)

# Bin cutoffs and labels per kind. classify() maps a value to the first
# bin whose upper cutoff is >= value; the final label has no upper cutoff.
_ANGLE_CUTOFFS = tuple(float(d) for d in range(10, 180, 10))
_ANGLE_LABELS = tuple(f"bent to almost {d} degrees" for d in range(10, 180, 10)) + ("straight",)

_DISTANCE_CUTOFFS = tuple(round(0.1 * i, 10) for i in range(1, 10))
_DISTANCE_LABELS = (
    "very close",
    "slightly close",
    "close",
    "almost shoulder width apart",
    "shoulder width apart",
    "almost spread",
    "spread",
    "slightly wide",
    "wide",
    "very wide",
)

_RELPOS_CUTOFFS = (-0.15, 0.15)
_RELPOS_LABELS = {
    ThresholdKind.RELPOS_X: ("at the right of", "ignored", "at the left of"),
    ThresholdKind.RELPOS_Y: ("below", "ignored", "above"),
    ThresholdKind.RELPOS_Z: ("behind", "ignored", "in front of"),
}

_RELORIENT_CUTOFFS = (10.0, 80.0)
_RELORIENT_LABELS = ("vertical", "ignored", "horizontal")

_GROUND_CUTOFFS = (0.1,)
_GROUND_LABELS = ("on the ground", "ground-ignored")


def _cutoffs(kind: ThresholdKind) -> tuple:
    if kind is ThresholdKind.ANGLE:
        return _ANGLE_CUTOFFS
    if kind is ThresholdKind.DISTANCE:
        return _DISTANCE_CUTOFFS
    if kind in RELPOS_KINDS:
        return _RELPOS_CUTOFFS
    if kind is ThresholdKind.RELORIENT:
        return _RELORIENT_CUTOFFS
    return _GROUND_CUTOFFS


def bin_labels(kind: ThresholdKind) -> tuple:
    if kind is ThresholdKind.ANGLE:
        return _ANGLE_LABELS
    if kind is ThresholdKind.DISTANCE:
        return _DISTANCE_LABELS
    if kind in RELPOS_KINDS:
        return _RELPOS_LABELS[kind]
    if kind is ThresholdKind.RELORIENT:
        return _RELORIENT_LABELS
    return _GROUND_LABELS


def classify(kind: ThresholdKind, value: float) -> int:
    """Local code index of the bin containing value. Bins are (lower, upper]."""
    if not math.isfinite(value):
        raise OutOfDomain(f"cannot classify non-finite value {value!r}")
    return bisect_left(_cutoffs(kind), value)


def threshold_rule(kind: ThresholdKind, local_id: int) -> str:
    """Human-readable bin condition, e.g. '10 < x <= 20'."""
    cuts = _cutoffs(kind)
    n = len(cuts) + 1
    if not 0 <= local_id < n:
        raise IndexOutOfRange(f"local id {local_id} outside [0,{n})")
    unit = "degrees" if kind in (ThresholdKind.ANGLE, ThresholdKind.RELORIENT) else "meters"
    if local_id == 0:
        return f"x <= {cuts[0]:g} ({unit})"
    if local_id == len(cuts):
        return f"x > {cuts[-1]:g} ({unit})"
    return f"{cuts[local_id - 1]:g} < x <= {cuts[local_id]:g} ({unit})"


# Word -> joint bindings for the category tables. Hands measure at the
# wrist, the torso at the mid spine.
WORD_TO_JOINT = {
    "pelvis": J.PELVIS,
    "neck": J.NECK,
    "torso": J.SPINE2,
    "L-hip": J.LEFT_HIP,
    "R-hip": J.RIGHT_HIP,
    "L-knee": J.LEFT_KNEE,
    "R-knee": J.RIGHT_KNEE,
    "L-ankle": J.LEFT_ANKLE,
    "R-ankle": J.RIGHT_ANKLE,
    "L-foot": J.LEFT_FOOT,
    "R-foot": J.RIGHT_FOOT,
    "L-shoulder": J.LEFT_SHOULDER,
    "R-shoulder": J.RIGHT_SHOULDER,
    "L-elbow": J.LEFT_ELBOW,
    "R-elbow": J.RIGHT_ELBOW,
    "L-wrist": J.LEFT_WRIST,
    "R-wrist": J.RIGHT_WRIST,
    "L-hand": J.LEFT_WRIST,
    "R-hand": J.RIGHT_WRIST,
}

# Angle categories: interior angle at the middle joint.
_ANGLE_ROWS = (
    ("L-knee", (J.LEFT_HIP, J.LEFT_KNEE, J.LEFT_ANKLE)),
    ("R-knee", (J.RIGHT_HIP, J.RIGHT_KNEE, J.RIGHT_ANKLE)),
    ("L-elbow", (J.LEFT_SHOULDER, J.LEFT_ELBOW, J.LEFT_WRIST)),
    ("R-elbow", (J.RIGHT_SHOULDER, J.RIGHT_ELBOW, J.RIGHT_WRIST)),
)

_DISTANCE_ROWS = (
    ("L-elbow", "R-elbow"),
    ("L-hand", "R-hand"),
    ("L-knee", "R-knee"),
    ("L-foot", "R-foot"),
    ("L-hand", "L-shoulder"),
    ("L-hand", "R-shoulder"),
    ("R-hand", "L-shoulder"),
    ("R-hand", "R-shoulder"),
    ("L-hand", "R-elbow"),
    ("R-hand", "L-elbow"),
    ("L-hand", "L-knee"),
    ("L-hand", "R-knee"),
    ("R-hand", "L-knee"),
    ("R-hand", "R-knee"),
    ("L-hand", "L-foot"),
    ("L-hand", "R-foot"),
    ("R-hand", "L-foot"),
    ("R-hand", "R-foot"),
)

# Relative position rows expand to one category per listed axis.
_RELPOS_ROWS = (
    ("L-shoulder", "R-shoulder", "YZ"),
    ("L-elbow", "R-elbow", "YZ"),
    ("L-hand", "R-hand", "XYZ"),
    ("neck", "pelvis", "XZ"),
    ("L-ankle", "neck", "Y"),
    ("R-ankle", "neck", "Y"),
    ("L-hip", "L-knee", "Y"),
    ("R-hip", "R-knee", "Y"),
    ("L-hand", "L-shoulder", "XY"),
    ("R-hand", "R-shoulder", "XY"),
    ("L-foot", "L-hip", "XY"),
    ("R-foot", "R-hip", "XY"),
    ("L-wrist", "neck", "Y"),
    ("R-wrist", "neck", "Y"),
    ("L-hand", "L-hip", "Y"),
    ("R-hand", "R-hip", "Y"),
    ("L-hand", "torso", "Z"),
    ("R-hand", "torso", "Z"),
    ("L-foot", "torso", "Z"),
    ("R-foot", "torso", "Z"),
    ("L-knee", "R-knee", "YZ"),
)

_RELORIENT_ROWS = (
    ("L-hip", "L-knee"),
    ("R-hip", "R-knee"),
    ("L-knee", "L-ankle"),
    ("R-knee", "R-ankle"),
    ("L-shoulder", "L-elbow"),
    ("R-shoulder", "R-elbow"),
    ("L-elbow", "L-wrist"),
    ("R-elbow", "R-wrist"),
    ("pelvis", "L-shoulder"),
    ("pelvis", "R-shoulder"),
    ("pelvis", "neck"),
    ("L-hand", "R-hand"),
    ("L-foot", "R-foot"),
)

_GROUND_ROWS = ("L-knee", "R-knee", "L-foot", "R-foot")

_AXIS_KIND = {
    "X": ThresholdKind.RELPOS_X,
    "Y": ThresholdKind.RELPOS_Y,
    "Z": ThresholdKind.RELPOS_Z,
}

EMBED_DIM = 512


@dataclass(frozen=True)
class CategorySpec:
    category_id: int
    name: str
    kind: ThresholdKind
    words: tuple  # body-part words from the category table, 1..3 entries
    joints: tuple  # resolved JointIds, same arity
    code_offset: int
    code_count: int


@dataclass(frozen=True)
class PoseCode:
    global_id: int
    category_id: int
    local_id: int
    semantics: str


def _code_semantics(kind: ThresholdKind, words: tuple, local_id: int) -> str:
    label = bin_labels(kind)[local_id]
    if kind is ThresholdKind.ANGLE:
        return f"{words[0]} {label}"
    if kind is ThresholdKind.DISTANCE:
        return f"{words[0]} and {words[1]} {label}"
    if kind in RELPOS_KINDS:
        if label == "ignored":
            axis = kind.value[-1]
            return f"{words[0]} vs {words[1]} {axis}-ignored"
        return f"{words[0]} {label} {words[1]}"
    if kind is ThresholdKind.RELORIENT:
        if label == "ignored":
            return f"{words[0]} to {words[1]} orientation-ignored"
        return f"{words[0]} to {words[1]} {label}"
    return f"{words[0]} {label}"


@dataclass(frozen=True)
class Codebook:
    categories: tuple  # 70 CategorySpec
    codes: tuple  # 392 PoseCode
    embed_dim: int = EMBED_DIM

    @property
    def num_categories(self) -> int:
        return len(self.categories)

    @property
    def num_codes(self) -> int:
        return len(self.codes)

    def code(self, global_id: int) -> PoseCode:
        if not 0 <= global_id < len(self.codes):
            raise IndexOutOfRange(f"code id {global_id} outside [0,{len(self.codes)})")
        return self.codes[global_id]

    def semantics(self, global_id: int) -> str:
        return self.code(global_id).semantics

    def category_codes(self, category_id: int) -> tuple:
        if not 0 <= category_id < len(self.categories):
            raise IndexOutOfRange(
                f"category id {category_id} outside [0,{len(self.categories)})"
            )
        spec = self.categories[category_id]
        return self.codes[spec.code_offset : spec.code_offset + spec.code_count]

    def global_id(self, category_id: int, local_id: int) -> int:
        spec = self.categories[category_id]
        if not 0 <= local_id < spec.code_count:
            raise IndexOutOfRange(
                f"local id {local_id} outside [0,{spec.code_count}) for {spec.name!r}"
            )
        return spec.code_offset + local_id


def _build_categories():
    cats = []
    offset = 0

    def add(name, kind, words, count):
        nonlocal offset
        joints = tuple(WORD_TO_JOINT[w] for w in words)
        cats.append(
            CategorySpec(len(cats), name, kind, tuple(words), joints, offset, count)
        )
        offset += count

    for subject, triple in _ANGLE_ROWS:
        joints = triple
        cats.append(
            CategorySpec(
                len(cats), f"{subject} angle", ThresholdKind.ANGLE, (subject,), joints,
                offset, len(_ANGLE_LABELS),
            )
        )
        offset += len(_ANGLE_LABELS)
    for a, b in _DISTANCE_ROWS:
        add(f"{a} vs {b} distance", ThresholdKind.DISTANCE, (a, b), len(_DISTANCE_LABELS))
    for a, b, axes in _RELPOS_ROWS:
        for axis in axes:
            add(f"{a} vs {b} ({axis})", _AXIS_KIND[axis], (a, b), 3)
    for a, b in _RELORIENT_ROWS:
        add(f"{a} vs {b} orientation", ThresholdKind.RELORIENT, (a, b), 3)
    for subject in _GROUND_ROWS:
        add(f"{subject} ground contact", ThresholdKind.GROUND, (subject,), 2)
    return tuple(cats)


@lru_cache(maxsize=1)
def build_default_codebook() -> Codebook:
    categories = _build_categories()
    codes = []
    for spec in categories:
        for local in range(spec.code_count):
            codes.append(
                PoseCode(
                    global_id=spec.code_offset + local,
                    category_id=spec.category_id,
                    local_id=local,
                    semantics=_code_semantics(spec.kind, spec.words, local),
                )
            )
    return Codebook(categories=categories, codes=tuple(codes))


def dump_table(codebook: Codebook) -> str:
    """Tab-separated code table: global_id, category, semantics, threshold rule.

    This is both the `codebook dump` CLI output and the table injected
    into editing prompts.
    """
    lines = ["global_id\tcategory\tsemantics\tthreshold_rule"]
    for code in codebook.codes:
        spec = codebook.categories[code.category_id]
        rule = threshold_rule(spec.kind, code.local_id)
        lines.append(f"{code.global_id}\t{spec.name}\t{code.semantics}\t{rule}")
    return "\n".join(lines) + "\n"
