"""Three-stage code editing driven by a completion backend.

Stage 1 picks the frame range (skipped when the caller supplies one),
stage 2 picks the categories to touch, stage 3 rewrites one category
at a time over the sliced range. Everything outside the range and the
selection is copied bit-identically. Each backend exchange lands in an
EditTrace, which is replayable through a ScriptedBackend.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field, replace

import numpy as np

from .codebook import Codebook
from .encoding import CodeSequence, CodeStep
from .errors import (
    BackendError,
    InvalidCodeForCategory,
    MalformedResponse,
    NonMonotonicRange,
    RangeOutOfBounds,
    WrongLength,
)
from .generator import BODY_PARTS, KeywordSet
from .prompts import render_prompt


# -- response parsing ------------------------------------------------


def _split_ints(raw: str):
    pieces = [p.strip() for p in raw.strip().split(";")]
    if pieces == [""]:
        return []
    try:
        return [int(p) for p in pieces]
    except ValueError:
        raise MalformedResponse(
            f"expected semicolon-separated integers, got {raw.strip()!r}", raw=raw
        ) from None


def parse_range(raw: str) -> tuple:
    values = _split_ints(raw)
    if len(values) != 2:
        raise WrongLength(f"range needs exactly 2 values, got {len(values)}", raw=raw)
    start, end = values
    if start > end:
        raise NonMonotonicRange(f"range start {start} > end {end}", raw=raw)
    return start, end


def parse_index_list(raw: str) -> list:
    # Duplicates are dropped, first occurrence wins; an empty response
    # is a valid empty selection.
    return list(dict.fromkeys(_split_ints(raw)))


def parse_code_list(raw: str, expected_len: int) -> list:
    values = _split_ints(raw)
    if len(values) != expected_len:
        raise WrongLength(
            f"expected {expected_len} codes, got {len(values)}", raw=raw
        )
    return values


# -- prompt table rendering ------------------------------------------


def category_table(cb: Codebook) -> str:
    """{table1}: joint state index -> meaning, dump-style TSV rows."""
    return "\n" + "\n".join(f"{c.category_id}\t{c.name}" for c in cb.categories)


def code_table(cb: Codebook, category_id: int | None = None) -> str:
    """{table2}: code id -> meaning; optionally one category's slice."""
    codes = cb.codes if category_id is None else cb.category_codes(category_id)
    return "\n" + "\n".join(f"{c.global_id}\t{c.semantics}" for c in codes)


def render_codes(seq: CodeSequence, cb: Codebook) -> str:
    """Per-frame global ids, one 'frame: ids' line per step."""
    lines = []
    for t, step in enumerate(seq.steps):
        ids = ",".join(
            str(cb.global_id(cid, local)) for cid, local in enumerate(step.assignment)
        )
        lines.append(f"{t}: {ids}")
    return "\n" + "\n".join(lines)


# -- the edit pipeline -----------------------------------------------


@dataclass(frozen=True)
class EditRequest:
    description: str
    instruction: str
    codes: CodeSequence
    explicit_range: tuple | None = None


@dataclass
class StageRecord:
    stage: str
    prompt: str
    raw_response: str
    parsed: str = ""
    error: str = ""


@dataclass
class EditTrace:
    records: list = field(default_factory=list)
    selected_range: tuple | None = None
    selected_categories: tuple = ()
    failures: list = field(default_factory=list)  # (stage, error text)
    remaps: list = field(default_factory=list)  # (category_id, global ids, local ids)

    def to_json(self) -> str:
        return json.dumps(
            {
                "records": [vars(r) for r in self.records],
                "selected_range": self.selected_range,
                "selected_categories": list(self.selected_categories),
                "failures": list(self.failures),
                "remaps": [
                    {"category_id": c, "global_ids": g, "local_ids": l}
                    for c, g, l in self.remaps
                ],
            },
            indent=2,
        )

    def replay_fixtures(self) -> list:
        """(prompt, response) pairs usable as ScriptedBackend fixtures."""
        return [(r.prompt, r.raw_response) for r in self.records]


def _stage_tag(stage: str, exc: MalformedResponse) -> MalformedResponse:
    return type(exc)(f"stage {stage}: {exc.args[0]}", raw=getattr(exc, "raw", ""))


def _complete(backend, prompt: str, stage: str) -> str:
    try:
        return backend.complete(prompt)
    except BackendError as exc:
        raise BackendError(f"stage {stage}: {exc}") from None


def run_edit(req: EditRequest, backend, cb: Codebook, strict: bool = False):
    """Returns (edited CodeSequence, EditTrace)."""
    seq = req.codes
    length = len(seq)
    trace = EditTrace()
    table1 = category_table(cb)

    if req.explicit_range is not None:
        start, end = req.explicit_range
        if not (0 <= start <= end < length):
            raise RangeOutOfBounds(
                f"explicit range ({start},{end}) outside [0,{length})"
            )
    else:
        prompt = render_prompt(
            "frame_range",
            table1=table1,
            table2=code_table(cb),
            codes=render_codes(seq, cb),
            length=length,
            details=req.description,
            edit=req.instruction,
        )
        raw = _complete(backend, prompt, "frame_range")
        record = StageRecord("frame_range", prompt, raw)
        trace.records.append(record)
        try:
            start, end = parse_range(raw)
        except MalformedResponse as exc:
            record.error = str(exc)
            raise _stage_tag("frame_range", exc) from None
        record.parsed = f"({start},{end})"
        if not (0 <= start <= end < length):
            record.error = f"range outside [0,{length})"
            raise RangeOutOfBounds(
                f"stage frame_range: ({start},{end}) outside [0,{length})"
            )
    trace.selected_range = (start, end)

    prompt = render_prompt("category_select", table1=table1, edit=req.instruction)
    raw = _complete(backend, prompt, "category_select")
    record = StageRecord("category_select", prompt, raw)
    trace.records.append(record)
    try:
        categories = parse_index_list(raw)
    except MalformedResponse as exc:
        record.error = str(exc)
        raise _stage_tag("category_select", exc) from None
    for cid in categories:
        if not 0 <= cid < cb.num_categories:
            record.error = f"category id {cid} outside [0,{cb.num_categories})"
            raise MalformedResponse(
                f"stage category_select: category id {cid} outside "
                f"[0,{cb.num_categories})",
                raw=raw,
            )
    record.parsed = ";".join(str(c) for c in categories)
    trace.selected_categories = tuple(categories)

    new_assignments = [list(step.assignment) for step in seq.steps]
    span = end - start + 1
    for cid in categories:
        spec = cb.categories[cid]
        current = [
            cb.global_id(cid, seq.steps[t].assignment[cid])
            for t in range(start, end + 1)
        ]
        prompt = render_prompt(
            "code_edit",
            table2=code_table(cb, cid),
            joint=spec.name,
            codes=";".join(str(g) for g in current),
            details=req.description,
            edit=req.instruction,
            length=span,
        )
        raw = _complete(backend, prompt, f"code_edit:{cid}")
        record = StageRecord(f"code_edit:{cid}", prompt, raw)
        trace.records.append(record)
        try:
            new_globals = parse_code_list(raw, span)
            locals_ = []
            for g in new_globals:
                if not spec.code_offset <= g < spec.code_offset + spec.code_count:
                    raise InvalidCodeForCategory(
                        f"code id {g} not in category {spec.name!r} range "
                        f"[{spec.code_offset},{spec.code_offset + spec.code_count})"
                    )
                locals_.append(g - spec.code_offset)
        except (MalformedResponse, InvalidCodeForCategory) as exc:
            record.error = str(exc)
            if strict:
                if isinstance(exc, MalformedResponse):
                    raise _stage_tag(f"code_edit:{cid}", exc) from None
                raise InvalidCodeForCategory(f"stage code_edit:{cid}: {exc}") from None
            trace.failures.append((f"code_edit:{cid}", str(exc)))
            continue
        record.parsed = ";".join(str(v) for v in locals_)
        trace.remaps.append((cid, list(new_globals), list(locals_)))
        for offset, local in enumerate(locals_):
            new_assignments[start + offset][cid] = local

    steps = tuple(
        CodeStep(tuple(assign), is_end=step.is_end)
        for assign, step in zip(new_assignments, seq.steps)
    )
    edited = CodeSequence(steps, downsample=seq.downsample, source_fps=seq.source_fps)
    return edited, trace


# -- keyword generation ----------------------------------------------


def generate_keywords(description: str, backend) -> KeywordSet:
    """Two backend calls: body-part JSON, then a one-line mood."""
    if not description.strip():
        raise ValueError("description must be non-empty")
    parts_list = json.dumps(list(BODY_PARTS))
    raw = backend.complete(
        render_prompt("keywords_body_parts", details=description, body_parts=parts_list)
    )
    try:
        payload = json.loads(raw)
    except ValueError:
        raise MalformedResponse(
            f"body-part response is not JSON: {raw[:120]!r}", raw=raw
        ) from None
    if not isinstance(payload, dict):
        raise MalformedResponse("body-part response must be a JSON object", raw=raw)
    values = []
    for part in BODY_PARTS:
        if part not in payload:
            raise MalformedResponse(part, raw=raw)
        values.append(str(payload[part]))
    mood = backend.complete(render_prompt("keywords_mood", details=description)).strip()
    if not mood:
        raise MalformedResponse("mood", raw=mood)
    return KeywordSet(body_parts=tuple(values), mood=mood)


def draw_keyword_set(sets, seed: int) -> KeywordSet:
    """Uniform seeded pick among alternative keyword sets."""
    if not sets:
        raise ValueError("need at least one keyword set")
    rng = np.random.default_rng(seed)
    return sets[int(rng.integers(len(sets)))]


def keywords_to_json(kw: KeywordSet) -> str:
    record = {part: text for part, text in zip(BODY_PARTS, kw.body_parts)}
    record["mood"] = kw.mood
    return json.dumps(record, indent=2)


def keywords_from_json(text: str) -> KeywordSet:
    payload = json.loads(text)
    missing = [p for p in BODY_PARTS if p not in payload] + (
        [] if "mood" in payload else ["mood"]
    )
    if missing:
        raise MalformedResponse(missing[0], raw=text)
    return KeywordSet(
        body_parts=tuple(str(payload[p]) for p in BODY_PARTS), mood=str(payload["mood"])
    )


# -- sessions ---------------------------------------------------------


@dataclass(frozen=True)
class HistoryEntry:
    instruction: str  # "source" for the initial entry
    codes: CodeSequence


@dataclass(frozen=True)
class EditSession:
    session_id: str
    description: str
    history: tuple  # HistoryEntry, append-only

    @property
    def current(self) -> CodeSequence:
        return self.history[-1].codes


def new_session(description: str, codes: CodeSequence,
                session_id: str | None = None) -> EditSession:
    return EditSession(
        session_id=session_id or uuid.uuid4().hex[:12],
        description=description,
        history=(HistoryEntry("source", codes),),
    )


def session_apply(session: EditSession, instruction: str, backend, cb: Codebook,
                  explicit_range: tuple | None = None, strict: bool = False):
    """Runs an edit on the current sequence; returns (new session, trace).

    The input session object is never mutated, so a raised edit leaves
    it untouched.
    """
    req = EditRequest(
        description=session.description,
        instruction=instruction,
        codes=session.current,
        explicit_range=explicit_range,
    )
    edited, trace = run_edit(req, backend, cb, strict=strict)
    updated = replace(
        session, history=session.history + (HistoryEntry(instruction, edited),)
    )
    return updated, trace
