"""HTTP API over the library: encode, decode, generate, edit sessions.

Bodies are thin JSON envelopes embedding the text file formats
verbatim, so wire payloads stay auditable and every endpoint is a
direct pass-through to the library call it names. Sessions persist as
one directory each; the manifest is written last (tmp + rename) so a
crash leaves either the previous state or the new one, never a torn
session.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .codebook import Codebook, build_default_codebook, dump_table
from .decoder import TrainedDecoder, decode_to_motion, load_decoder
from .editor import (
    EditSession,
    HistoryEntry,
    keywords_from_json,
    new_session,
    session_apply,
)
from .encoding import dumps_codes, encode_motion, loads_codes
from .errors import (
    BackendError,
    MalformedResponse,
    ParseError,
    PosecodecError,
    RangeOutOfBounds,
)
from .generator import (
    GeneratorNet,
    KeywordSet,
    SamplingPolicy,
    generate,
    load_generator,
    make_condition,
)
from .motion_io import dumps_motion, loads_motion
from .textembed import HashingEmbedder

DEFAULT_DOWNSAMPLE = 4


class SessionStore:
    """One directory per session under root/sessions.

    Code sequences land in numbered entry files first; manifest.json is
    committed last via atomic rename. Directories without a manifest
    are ignored on load.
    """

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        (self.root / "locks").mkdir(parents=True, exist_ok=True)

    def _dir(self, session_id: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9_-]{1,64}", session_id):
            raise ParseError(f"invalid session id {session_id!r}")
        return self.root / "sessions" / session_id

    def save(self, session: EditSession, motion_text: str | None = None) -> None:
        d = self._dir(session.session_id)
        d.mkdir(exist_ok=True)
        if motion_text is not None:
            (d / "source.motion").write_text(motion_text, encoding="utf-8")
        entries = []
        for i, entry in enumerate(session.history):
            name = f"entry_{i:04d}.codes"
            path = d / name
            if not path.exists():
                path.write_text(dumps_codes(entry.codes), encoding="utf-8")
            entries.append({"instruction": entry.instruction, "file": name})
        manifest = {
            "session_id": session.session_id,
            "description": session.description,
            "entries": entries,
        }
        tmp = d / "manifest.json.tmp"
        tmp.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        os.replace(tmp, d / "manifest.json")

    def load(self, session_id: str, cb: Codebook) -> EditSession | None:
        d = self._dir(session_id)
        manifest_path = d / "manifest.json"
        if not manifest_path.exists():
            return None
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        history = []
        for entry in manifest["entries"]:
            text = (d / entry["file"]).read_text(encoding="utf-8")
            history.append(HistoryEntry(entry["instruction"], loads_codes(text, cb)))
        return EditSession(
            session_id=manifest["session_id"],
            description=manifest["description"],
            history=tuple(history),
        )

    def list_ids(self) -> list:
        out = []
        for d in sorted((self.root / "sessions").iterdir()):
            if (d / "manifest.json").exists():
                out.append(d.name)
        return out


class SessionLocks:
    """Per-session mutual exclusion: an in-process lock plus a pid-stamped
    lock file so a second process (or a survivor of a crash) behaves."""

    def __init__(self, root):
        self.dir = Path(root) / "locks"
        self.dir.mkdir(parents=True, exist_ok=True)
        self._local = {}
        self._guard = threading.Lock()

    def _lockfile(self, session_id: str) -> Path:
        return self.dir / f"{session_id}.lock"

    def acquire(self, session_id: str) -> bool:
        with self._guard:
            lock = self._local.setdefault(session_id, threading.Lock())
        if not lock.acquire(blocking=False):
            return False
        path = self._lockfile(session_id)
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            try:
                pid = int(path.read_text())
                os.kill(pid, 0)
            except (ValueError, ProcessLookupError, PermissionError):
                # stale lock from a dead process; steal it
                try:
                    path.unlink()
                except FileNotFoundError:
                    pass
                try:
                    fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                except FileExistsError:
                    lock.release()
                    return False
            else:
                lock.release()
                return False
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        return True

    def release(self, session_id: str) -> None:
        try:
            self._lockfile(session_id).unlink()
        except FileNotFoundError:
            pass
        with self._guard:
            lock = self._local.get(session_id)
        if lock is not None and lock.locked():
            lock.release()


@dataclass
class AppState:
    cb: Codebook
    store: SessionStore
    locks: SessionLocks
    embedder: HashingEmbedder
    decoder: TrainedDecoder | None = None
    generator: GeneratorNet | None = None
    editor_backend: object = None
    downsample: int = DEFAULT_DOWNSAMPLE


def build_state(data_dir, decoder_ckpt=None, generator_ckpt=None,
                editor_backend=None) -> AppState:
    return AppState(
        cb=build_default_codebook(),
        store=SessionStore(data_dir),
        locks=SessionLocks(data_dir),
        embedder=HashingEmbedder(),
        decoder=load_decoder(decoder_ckpt) if decoder_ckpt else None,
        generator=load_generator(generator_ckpt) if generator_ckpt else None,
        editor_backend=editor_backend,
    )


def _stage_of(message: str) -> str:
    m = re.match(r"stage ([\w:]+):", message)
    return m.group(1) if m else ""


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="posecodec", version="1")

    def bad_request(msg: str):
        return JSONResponse({"error": msg}, status_code=400)

    def not_found(msg: str):
        return JSONResponse({"error": msg}, status_code=404)

    @app.exception_handler(PosecodecError)
    async def _domain_error(request: Request, exc: PosecodecError):
        return bad_request(str(exc))

    # bad payload values (unknown mode, non-numeric numbers) surface as
    # ValueError from the conversion layer; they are client errors
    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return bad_request(str(exc))

    async def _json_body(request: Request) -> dict:
        try:
            payload = json.loads((await request.body()).decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise ParseError(f"request body is not valid JSON: {exc}") from None
        if not isinstance(payload, dict):
            raise ParseError("request body must be a JSON object")
        return payload

    def _decode_motion_text(seq_text: str):
        seq = loads_codes(seq_text, state.cb)
        return dumps_motion(decode_to_motion(state.decoder.net, state.decoder.emb,
                                             seq, state.cb))

    @app.post("/v1/encode")
    async def encode(request: Request):
        payload = await _json_body(request)
        if "motion" not in payload:
            return bad_request("missing 'motion' field")
        motion = loads_motion(payload["motion"])
        l = int(payload.get("downsample", state.downsample))
        seq = encode_motion(motion, state.cb, l)
        return {"codes": dumps_codes(seq)}

    @app.post("/v1/decode")
    async def decode(request: Request):
        payload = await _json_body(request)
        if "codes" not in payload:
            return bad_request("missing 'codes' field")
        ckpt = payload.get("checkpoint", "default")
        if state.decoder is None or ckpt != "default":
            return not_found(f"unknown decoder checkpoint {ckpt!r}")
        return {"motion": _decode_motion_text(payload["codes"])}

    @app.post("/v1/generate")
    async def generate_endpoint(request: Request):
        payload = await _json_body(request)
        if "text" not in payload:
            return bad_request("missing 'text' field")
        if state.generator is None:
            return not_found("no generator checkpoint loaded")
        keywords = None
        if payload.get("keywords") is not None:
            keywords = keywords_from_json(json.dumps(payload["keywords"]))
        policy = SamplingPolicy(
            mode=payload.get("mode", "argmax"),
            temperature=float(payload.get("temperature", 1.0)),
            seed=int(payload.get("seed", 0)),
        )
        cond = make_condition(state.embedder, payload["text"], keywords)
        seq = generate(state.generator, cond, policy, downsample=state.downsample)
        out = {"codes": dumps_codes(seq)}
        if state.decoder is not None:
            out["motion"] = _decode_motion_text(out["codes"])
        return out

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        payload = await _json_body(request)
        description = payload.get("text", "")
        motion_text = None
        if "motion" in payload:
            motion = loads_motion(payload["motion"])
            motion_text = payload["motion"]
            seq = encode_motion(motion, state.cb,
                                int(payload.get("downsample", state.downsample)))
        elif "codes" in payload:
            seq = loads_codes(payload["codes"], state.cb)
        elif description and state.generator is not None:
            cond = make_condition(state.embedder, description, None)
            seq = generate(state.generator, cond,
                           SamplingPolicy(seed=int(payload.get("seed", 0))),
                           downsample=state.downsample)
        else:
            return bad_request("provide 'motion', 'codes', or 'text' with a generator loaded")
        session = new_session(description, seq)
        state.store.save(session, motion_text)
        return {"session_id": session.session_id, "codes": dumps_codes(seq)}

    @app.post("/v1/sessions/{session_id}/edit")
    async def edit_session(session_id: str, request: Request):
        payload = await _json_body(request)
        if "instruction" not in payload:
            return bad_request("missing 'instruction' field")
        explicit = None
        if payload.get("range") is not None:
            r = payload["range"]
            if not (isinstance(r, (list, tuple)) and len(r) == 2):
                return bad_request("'range' must be [start, end]")
            explicit = (int(r[0]), int(r[1]))
        if state.editor_backend is None:
            return JSONResponse(
                {"error": "no editor backend configured", "stage": ""}, status_code=502
            )
        session = state.store.load(session_id, state.cb)
        if session is None:
            return not_found(f"unknown session {session_id!r}")
        if not state.locks.acquire(session_id):
            return JSONResponse(
                {"error": f"edit already in progress on session {session_id}"},
                status_code=409,
            )
        try:
            updated, trace = session_apply(
                session, payload["instruction"], state.editor_backend, state.cb,
                explicit_range=explicit,
            )
            state.store.save(updated)
        except (BackendError, MalformedResponse) as exc:
            return JSONResponse(
                {"error": str(exc), "stage": _stage_of(str(exc))}, status_code=502
            )
        except RangeOutOfBounds as exc:
            if str(exc).startswith("stage "):
                return JSONResponse(
                    {"error": str(exc), "stage": _stage_of(str(exc))}, status_code=502
                )
            return bad_request(str(exc))
        finally:
            state.locks.release(session_id)
        out = {"codes": dumps_codes(updated.current), "trace": trace.to_json()}
        if state.decoder is not None:
            out["motion"] = _decode_motion_text(out["codes"])
        return out

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        session = state.store.load(session_id, state.cb)
        if session is None:
            return not_found(f"unknown session {session_id!r}")
        return {
            "session_id": session.session_id,
            "description": session.description,
            "history": [
                {"instruction": e.instruction, "codes": dumps_codes(e.codes)}
                for e in session.history
            ],
        }

    @app.get("/v1/codebook")
    async def get_codebook():
        return {
            "categories": state.cb.num_categories,
            "codes": state.cb.num_codes,
            "table": dump_table(state.cb),
        }

    return app
