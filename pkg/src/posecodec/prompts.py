"""Prompt templates for code editing and keyword generation.

Template wording is load-bearing: downstream parsers rely on the
stated response formats, so the text must not drift. Phrasing quirks
are intentional and kept verbatim. Placeholders use {name} slots and
rendering is strict in both directions.
"""

from __future__ import annotations

import re

from .errors import MissingSlot

FRAME_EXAMINE = """\
Motion is represented by a set of joint states, defined as follows:
Table 1 Joint State Meanings (Key: Joint State Index, Value: Joint State Meaning): {table1}
Given the edit instruction: {edit}
Return a semi-colon separated sequence of the ids of the joint states you will need to examine in order to determine the starting and ending frame of a motion sequence that will be affected by the edit instruction.
Format example: 0;1;5;9. Do not reply anything else."""

FRAME_RANGE = """\
You will be provided with a text description of the motion, a motion code sequence and a motion edit instruction. You are be required to determine the starting and ending frame of the sequence that will be affected by the edit. Here is what you need to know about the encoding of the motion sequences:
The motion is represented a number of time frames, each time frame contains a set of joint states, each joint state contains a code value. The definitions are:
Table 1 Joint State Meanings (Key: Joint State Index, Value: Joint State Meaning): {table1}
Table 2 Code Meaning (Key: Code ID, Value: Code Meaning): {table2}
Rules: smaller angles indicates more bending.
The motion code sequence is: {codes}
The total number of time frames is {length}
The text description is: {details}
The edit instruction is: {edit}
Return the starting index and ending index of the segment that is affected by the edit, separated by semi-colon, if the edit affects the overall movement, select the entire sequence. Format example: 0;19. Do not reply anything else."""

CATEGORY_SELECT = """\
Motion is represented by a set of joint states, defined as follows:
Table 1 Joint State Meanings (Key: Joint State Index, Value: Joint State Meaning): {table1}
Given the edit instruction: {edit}
Return a semi-colon separated sequence of the ids of the joint states you may be affected by the edit instruction. Format example: 0;1;5;9. Do not reply anything else."""

CODE_EDIT = """\
You will be provided with a text description of the motion, a motion code sequence for a given joint state and a motion edit instruction. You will be required to determine how to modify the codes within the provided sequence accordingly.
Here is what you need to know about the encoding of the motion sequences:
The motion is represented as a list of joint states of length T, T is the number time frames. Each joint state contains a code value. The usable codes are defined as follows:
Table 1 Usable Code Meaning (Key: Code ID, Value: Code Meaning): {table2}
Rules: smaller angles indicates more bending.
You are given this motion code sequence for the joint state {joint}, it has already been sliced to keep only the segment you will need to edit: {codes}.
The text description of the overall motion sequence is: {details}.
The edit instruction is: {edit}
Return the edited motion only as a sequence of integer code ids of length {length} separated by semi-colons, only use code ids in the provided table. If no edit needs to be made, return the original sequence. Format example: 1;2;3;4. Do not reply anything else. No explanation needed."""

KEYWORDS_BODY_PARTS = """\
Given a text description of a motion: {details}. Enrich the description of the full motion by summarizing in detail the shape and speed for each of the body parts in {body_parts} that is required to achieve the given motion in natural language. The output should be in json format with {body_parts} as keys, and one short motion attribute as values. Key-value format example: "head":"head is upright". Do not output anything else."""

KEYWORDS_MOOD = """\
Given a text description of a motion:
Please help me to describe the mood that is required to achieve the human motion described as: '{details}' using one short motion attribute. Do not output anything else."""

TEMPLATES = {
    "frame_examine": FRAME_EXAMINE,
    "frame_range": FRAME_RANGE,
    "category_select": CATEGORY_SELECT,
    "code_edit": CODE_EDIT,
    "keywords_body_parts": KEYWORDS_BODY_PARTS,
    "keywords_mood": KEYWORDS_MOOD,
}

_SLOT = re.compile(r"\{(\w+)\}")


def template_slots(name: str) -> tuple:
    return tuple(dict.fromkeys(_SLOT.findall(TEMPLATES[name])))


def render_prompt(name: str, **slots) -> str:
    if name not in TEMPLATES:
        raise KeyError(f"unknown template {name!r}; have {sorted(TEMPLATES)}")
    template = TEMPLATES[name]
    needed = set(template_slots(name))
    for slot in needed:
        if slot not in slots:
            raise MissingSlot(slot)
    unused = set(slots) - needed
    if unused:
        raise ValueError(f"template {name!r} has no slots {sorted(unused)}")
    return _SLOT.sub(lambda m: str(slots[m.group(1)]), template)
