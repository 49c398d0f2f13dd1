"""Command-line entry point: one binary, one subcommand per workflow."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .backends import HttpModelBackend, ScriptedBackend, load_fixtures
from .codebook import build_default_codebook, dump_table
from .decoder import (
    DecoderConfig,
    decode_to_motion,
    load_decoder,
    save_decoder,
    train_decoder,
)
from .editor import (
    EditRequest,
    draw_keyword_set,
    generate_keywords,
    keywords_from_json,
    run_edit,
)
from .encoding import encode_motion, load_codes, save_codes
from .errors import ParseError, PosecodecError
from .generator import (
    GeneratorConfig,
    SamplingPolicy,
    default_category_sizes,
    generate,
    load_generator,
    make_condition,
    save_generator,
    train_generator,
)
from .metrics import (
    GEOMETRIC_EXTRACTOR_VERSION,
    GeometricExtractor,
    aits,
    diversity,
    diversity_exhaustive,
    frechet_distance,
    mm_dist,
    moments,
    r_precision,
)
from .motion_io import load_motion, save_motion
from .synth import KINDS, SyntheticSpec, synthesize
from .textembed import HashingEmbedder


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ParseError(f"--param expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            out[key] = float(value)
        except ValueError:
            raise ParseError(f"--param {key}: {value!r} is not a number") from None
    return out


def _parse_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise ParseError(f"--range expects start:end, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"--range expects integers, got {text!r}") from None


def _make_backend(args):
    if args.backend == "scripted":
        if not getattr(args, "fixtures", None):
            raise ParseError("--backend scripted requires --fixtures")
        return ScriptedBackend(load_fixtures(args.fixtures))
    if not getattr(args, "llm_url", None):
        raise ParseError("--backend http requires --llm-url")
    return HttpModelBackend(args.llm_url, model=args.llm_model)


def _load_motion_dir(path) -> list:
    files = sorted(Path(path).glob("*.motion"))
    return files


def _caption_for(motion_path: Path) -> str:
    txt = motion_path.with_suffix(".txt")
    if txt.exists():
        return txt.read_text(encoding="utf-8").strip()
    return motion_path.stem.replace("_", " ").replace("-", " ")


# -- subcommands -------------------------------------------------------


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        kind=args.kind,
        duration_frames=args.frames,
        seed=args.seed,
        fps=args.fps,
        params=_parse_params(args.param),
    )
    save_motion(synthesize(spec), args.out)
    print(f"wrote {args.out} ({args.frames} frames, kind={args.kind})")
    return 0


def cmd_encode(args) -> int:
    motion = load_motion(getattr(args, "in"))
    seq = encode_motion(motion, build_default_codebook(), args.downsample)
    save_codes(seq, args.out)
    print(f"wrote {args.out} ({len(seq)} steps, l={args.downsample})")
    return 0


def cmd_decode(args) -> int:
    trained = load_decoder(args.checkpoint)
    seq = load_codes(getattr(args, "in"), build_default_codebook())
    motion = decode_to_motion(trained.net, trained.emb, seq, build_default_codebook())
    save_motion(motion, args.out)
    print(f"wrote {args.out} ({len(motion)} frames)")
    return 0


def cmd_codebook(args) -> int:
    if args.action != "dump":
        raise ParseError(f"unknown codebook action {args.action!r}")
    text = dump_table(build_default_codebook())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_train_decoder(args) -> int:
    files = _load_motion_dir(args.data_dir)
    dataset = [load_motion(f) for f in files]
    cfg = DecoderConfig(
        steps=args.steps,
        lr=args.lr,
        batch=args.batch,
        lam=args.lam,
        seed=args.seed,
        embed_dim=args.embed_dim,
        hidden=args.hidden,
        downsample=args.downsample,
    )
    trained = train_decoder(dataset, build_default_codebook(), cfg)
    save_decoder(trained, args.out)
    first = trained.loss_curve[0] if trained.loss_curve else float("nan")
    last = trained.loss_curve[-1] if trained.loss_curve else float("nan")
    print(f"wrote {args.out} (loss {first:.6f} -> {last:.6f}, {len(dataset)} motions)")
    return 0


def cmd_train_generator(args) -> int:
    cb = build_default_codebook()
    embedder = HashingEmbedder()
    pairs = []
    for f in _load_motion_dir(args.data_dir):
        motion = load_motion(f)
        seq = encode_motion(motion, cb, args.downsample)
        keywords = None
        kw_path = f.with_suffix(".keywords.json")
        if kw_path.exists():
            keywords = keywords_from_json(kw_path.read_text(encoding="utf-8"))
        cond = make_condition(embedder, _caption_for(f), keywords)
        pairs.append((cond, seq))
    cfg = GeneratorConfig(
        steps=args.steps,
        lr=args.lr,
        batch=args.batch,
        seed=args.seed,
        dim=args.dim,
        heads=args.heads,
        blocks=args.blocks,
        p_corrupt=args.p_corrupt,
        p_mask_keyword=args.p_mask_keyword,
    )
    trained = train_generator(pairs, default_category_sizes(cb), cfg)
    save_generator(trained.net, args.out)
    first = trained.loss_curve[0] if trained.loss_curve else float("nan")
    last = trained.loss_curve[-1] if trained.loss_curve else float("nan")
    print(f"wrote {args.out} (loss {first:.6f} -> {last:.6f}, {len(pairs)} pairs)")
    return 0


def cmd_generate(args) -> int:
    net = load_generator(args.checkpoint)
    keywords = None
    if args.keywords_file:
        keywords = keywords_from_json(Path(args.keywords_file).read_text(encoding="utf-8"))
    elif args.fixtures or args.llm_url:
        backend = _make_backend(args)
        kw_sets = [generate_keywords(args.text, backend)]
        keywords = draw_keyword_set(kw_sets, args.seed)
    cond = make_condition(HashingEmbedder(), args.text, keywords)
    policy = SamplingPolicy(
        mode=args.mode, temperature=args.temperature, seed=args.seed
    )
    seq = generate(net, cond, policy, downsample=args.downsample)
    save_codes(seq, args.out_codes)
    print(f"wrote {args.out_codes} ({len(seq)} steps)")
    if args.out_motion:
        if not args.decoder:
            raise ParseError("--out-motion requires --decoder")
        trained = load_decoder(args.decoder)
        motion = decode_to_motion(
            trained.net, trained.emb, seq, build_default_codebook()
        )
        save_motion(motion, args.out_motion)
        print(f"wrote {args.out_motion} ({len(motion)} frames)")
    return 0


def cmd_edit(args) -> int:
    cb = build_default_codebook()
    seq = load_codes(args.codes, cb)
    backend = _make_backend(args)
    req = EditRequest(
        description=args.description,
        instruction=args.instruction,
        codes=seq,
        explicit_range=_parse_range(args.range) if args.range else None,
    )
    edited, trace = run_edit(req, backend, cb, strict=args.strict)
    save_codes(edited, args.out)
    print(f"wrote {args.out} ({len(edited)} steps)")
    if args.trace:
        Path(args.trace).write_text(trace.to_json(), encoding="utf-8")
        print(f"wrote {args.trace}")
    if trace.failures:
        for stage, message in trace.failures:
            print(f"partial: stage {stage}: {message}")
    return 0


def cmd_eval(args) -> int:
    extractor = GeometricExtractor()
    real_files = _load_motion_dir(args.real_dir)
    if not real_files:
        raise ParseError(f"no .motion files under {args.real_dir}")
    real_feats = np.stack(
        [extractor.extract_motion(load_motion(f)) for f in real_files]
    )
    rows = []
    gen_feats = None
    text_feats = None

    if args.gen_dir:
        gen_files = _load_motion_dir(args.gen_dir)
        if not gen_files:
            raise ParseError(f"no .motion files under {args.gen_dir}")
        gen_feats = np.stack(
            [extractor.extract_motion(load_motion(f)) for f in gen_files]
        )
        text_feats = np.stack(
            [extractor.extract_text(_caption_for(f)) for f in gen_files]
        )
    elif args.generator:
        if not args.decoder:
            raise ParseError("--generator evaluation requires --decoder")
        net = load_generator(args.generator)
        trained = load_decoder(args.decoder)
        cb = build_default_codebook()
        embedder = HashingEmbedder()
        captions = [_caption_for(f) for f in real_files]
        gen_list, text_list = [], []

        def run_one(text: str, seed: int):
            cond = make_condition(embedder, text, None)
            seq = generate(net, cond, SamplingPolicy(seed=seed))
            return decode_to_motion(trained.net, trained.emb, seq, cb)

        t0 = time.perf_counter()
        for i, text in enumerate(captions):
            motion = run_one(text, args.seed + i)
            gen_list.append(extractor.extract_motion(motion))
            text_list.append(extractor.extract_text(text))
        elapsed = time.perf_counter() - t0
        gen_feats = np.stack(gen_list)
        text_feats = np.stack(text_list)
        rows.append(("aits_seconds", elapsed / len(captions)))

    if gen_feats is not None:
        mu_r, cov_r = moments(real_feats)
        mu_g, cov_g = moments(gen_feats)
        rows.append(("fid", frechet_distance(mu_r, cov_r, mu_g, cov_g)))
        pool = min(args.pool_size, len(gen_feats))
        for k in (1, 2, 3):
            if k <= pool:
                rows.append(
                    (
                        f"r_precision_top{k}",
                        r_precision(gen_feats, text_feats, pool_size=pool,
                                    k=k, seed=args.seed),
                    )
                )
        rows.append(("mm_dist", mm_dist(gen_feats, text_feats)))
        div_set = gen_feats
    else:
        div_set = real_feats

    if len(div_set) >= 2:
        if args.num_pairs:
            rows.append(
                ("diversity", diversity(div_set, args.num_pairs, seed=args.seed))
            )
        else:
            rows.append(("diversity_exhaustive", diversity_exhaustive(div_set)))

    lines = [
        f"# extractor\t{GEOMETRIC_EXTRACTOR_VERSION}",
        f"# feature_dim\t{extractor.dim}",
        f"# seed\t{args.seed}",
        f"# pool_size\t{args.pool_size}",
        f"# real_count\t{len(real_feats)}",
        f"# gen_count\t{0 if gen_feats is None else len(gen_feats)}",
        "metric\tvalue",
    ]
    lines += [f"{name}\t{value:.10g}" for name, value in rows]
    report = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(report)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_state, create_app

    backend = None
    if args.editor_backend == "scripted":
        if not args.fixtures:
            raise ParseError("--editor-backend scripted requires --fixtures")
        backend = ScriptedBackend(load_fixtures(args.fixtures))
    elif args.editor_backend == "http":
        if not args.llm_url:
            raise ParseError("--editor-backend http requires --llm-url")
        backend = HttpModelBackend(args.llm_url, model=args.llm_model)
    state = build_state(
        args.data_dir,
        decoder_ckpt=args.decoder_ckpt,
        generator_ckpt=args.generator_ckpt,
        editor_backend=backend,
    )
    app = create_app(state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser ------------------------------------------------------------


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("scripted", "http"), default="scripted")
    p.add_argument("--fixtures", help="fixture JSON for the scripted backend")
    p.add_argument("--llm-url", help="HTTP completion endpoint for --backend http")
    p.add_argument("--llm-model", default="default")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posecodec",
        description="semantic pose codes: encode, decode, generate, edit, serve",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic motion file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=20.0)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("encode", help="motion file -> code sequence file")
    p.add_argument("--in", required=True, help="input .motion file")
    p.add_argument("--downsample", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="code sequence file -> motion file")
    p.add_argument("--in", required=True, help="input .codes file")
    p.add_argument("--checkpoint", required=True, help="decoder checkpoint")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("codebook", help="codebook table utilities")
    p.add_argument("action", choices=("dump",))
    p.add_argument("--out", help="write TSV here instead of stdout")
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("train-decoder", help="fit the code-to-motion decoder")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embed-dim", type=int, default=512)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--downsample", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_decoder)

    p = sub.add_parser("train-generator", help="fit the text-to-codes generator")
    p.add_argument("--data-dir", required=True,
                   help="*.motion plus optional matching .txt captions")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--blocks", type=int, default=2)
    p.add_argument("--p-corrupt", type=float, default=0.05)
    p.add_argument("--p-mask-keyword", type=float, default=0.15)
    p.add_argument("--downsample", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_generator)

    p = sub.add_parser("generate", help="text -> code sequence (and motion)")
    p.add_argument("--checkpoint", required=True, help="generator checkpoint")
    p.add_argument("--text", required=True)
    p.add_argument("--keywords-file",
                   help="keyword JSON; otherwise keywords come from the backend "
                        "when one is configured, else generation is text-only")
    p.add_argument("--mode", choices=("argmax", "sample"), default="argmax")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--downsample", type=int, default=4)
    p.add_argument("--out-codes", required=True)
    p.add_argument("--out-motion")
    p.add_argument("--decoder", help="decoder checkpoint for --out-motion")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("edit", help="apply a natural-language edit to codes")
    p.add_argument("--codes", required=True)
    p.add_argument("--description", required=True)
    p.add_argument("--instruction", required=True)
    p.add_argument("--range", help="explicit frame-step range start:end")
    p.add_argument("--strict", action="store_true",
                   help="fail the whole edit on any per-category error")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="write the stage-by-stage trace JSON here")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("eval", help="metric report over motion sets")
    p.add_argument("--real-dir", required=True)
    p.add_argument("--gen-dir", help="precomputed generated motions")
    p.add_argument("--generator", help="generate from captions instead")
    p.add_argument("--decoder", help="decoder checkpoint for --generator")
    p.add_argument("--pool-size", type=int, default=32)
    p.add_argument("--num-pairs", type=int, default=0,
                   help="sampled diversity pairs; 0 = exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write TSV here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", required=True)
    p.add_argument("--decoder-ckpt")
    p.add_argument("--generator-ckpt")
    p.add_argument("--editor-backend", choices=("scripted", "http"))
    p.add_argument("--fixtures")
    p.add_argument("--llm-url")
    p.add_argument("--llm-model", default="default")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PosecodecError, OSError, ValueError, json.JSONDecodeError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
