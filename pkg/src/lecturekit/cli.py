"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 validation failure, 3 adapter failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import matio
from .adapters import AdapterError
from .attention import penalty_matrix
from .audio_io import read_wav
from .deck import parse_deck
from .frameplan import AugmentParams, plan, write_plan
from .frontend import encode_infer, encode_train, format_token_dump, load_lexicon
from .mel import DEFAULT_CONFIG, mel_spectrogram, write_mel
from .metrics import (
    Pairing,
    format_mos,
    load_embedding_dir,
    mean_speaker_similarity,
    mos_with_ci,
    read_mos_csv,
)
from .pipeline import load_config, run_pipeline

USAGE_EXIT = 1
VALIDATION_EXIT = 2
ADAPTER_EXIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lecturekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    generate = sub.add_parser("generate", help="run the full pipeline over a deck")
    generate.add_argument("--deck", required=True)
    generate.add_argument("--config", required=True)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out", required=True)

    plan_video = sub.add_parser("plan-video", help="build a gap-free frame plan")
    plan_video.add_argument("--t", type=int, required=True, help="reference length in frames")
    plan_video.add_argument("--t-prime", type=int, required=True, help="target length in frames")
    plan_video.add_argument("--r", type=float, default=0.2, help="constrain ratio")
    plan_video.add_argument("--seed", type=int, default=0)
    plan_video.add_argument("--out", help="plan JSON path (stdout when omitted)")

    penalty = sub.add_parser("penalty", help="write an attention penalty matrix")
    penalty.add_argument("--n", type=int, required=True, help="encoder length")
    penalty.add_argument("--t", type=int, required=True, help="decoder length")
    penalty.add_argument("--k", type=float, default=3.5, help="sharpness")
    penalty.add_argument("--out", required=True)
    penalty.add_argument("--text", action="store_true", help="write the text debug format")

    encode = sub.add_parser("encode", help="encode text to mixed tokens")
    encode.add_argument("--text", required=True)
    encode.add_argument("--lexicon", required=True)
    encode.add_argument("--train-p", type=float, help="training mode replacement probability")
    encode.add_argument("--seed", type=int, default=0)

    mel_cmd = sub.add_parser("mel", help="compute a log-mel spectrogram from a wav")
    mel_cmd.add_argument("--wav", required=True)
    mel_cmd.add_argument("--out", required=True)

    eval_cmd = sub.add_parser("eval", help="evaluation metrics")
    eval_sub = eval_cmd.add_subparsers(dest="metric", required=True, parser_class=_Parser)
    mos_cmd = eval_sub.add_parser("mos", help="MOS with confidence interval")
    mos_cmd.add_argument("--csv", required=True)
    mos_cmd.add_argument("--confidence", type=float, default=0.95)
    sim = eval_sub.add_parser("speaker-sim", help="mean speaker similarity")
    sim.add_argument("--truth", required=True)
    sim.add_argument("--synth", required=True)
    sim.add_argument("--pairing", choices=["paired", "centroid"], default="paired")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return _dispatch(args)
    except AdapterError as exc:
        print(f"adapter failure: {exc}", file=sys.stderr)
        return ADAPTER_EXIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


def _dispatch(args) -> int:
    if args.command == "generate":
        deck = parse_deck(args.deck)
        config = load_config(args.config)
        manifest = run_pipeline(deck, config, args.seed, args.out)
        print(f"wrote {Path(args.out) / 'manifest.json'}")
        print(
            f"{len(manifest.entries)} slides, "
            f"{manifest.total_duration:.2f} s at {manifest.fps:g} fps"
        )
        return 0

    if args.command == "plan-video":
        params = AugmentParams(
            ref_len=args.t, target_len=args.t_prime, ratio=args.r, seed=args.seed
        )
        frame_plan = plan(params)
        if args.out:
            write_plan(args.out, frame_plan)
            print(f"wrote {args.out}")
        else:
            print(json.dumps({
                "t": frame_plan.ref_len,
                "t_prime": frame_plan.target_len,
                "r": frame_plan.ratio,
                "seed": frame_plan.seed,
                "indices": list(frame_plan.indices),
            }))
        return 0

    if args.command == "penalty":
        values = penalty_matrix(args.n, args.t, args.k)
        if args.text:
            matio.write_matrix_text(args.out, values)
        else:
            matio.write_matrix(args.out, values)
        print(f"wrote {args.out} ({args.n}x{args.t}, k={args.k:g})")
        return 0

    if args.command == "encode":
        lexicon = load_lexicon(args.lexicon)
        if args.train_p is not None:
            seq = encode_train(args.text, lexicon, p=args.train_p, seed=args.seed)
        else:
            seq = encode_infer(args.text, lexicon)
        sys.stdout.write(format_token_dump(seq))
        return 0

    if args.command == "mel":
        waveform = read_wav(args.wav)
        mel = mel_spectrogram(waveform, DEFAULT_CONFIG)
        write_mel(args.out, mel)
        frames, bands = mel.values.shape
        print(f"wrote {args.out} ({frames} frames x {bands} bands)")
        return 0

    if args.command == "eval":
        if args.metric == "mos":
            samples = read_mos_csv(args.csv)
            mean, half = mos_with_ci(samples, args.confidence)
            print(format_mos(mean, half))
            return 0
        if args.metric == "speaker-sim":
            truth = load_embedding_dir(args.truth)
            synth = load_embedding_dir(args.synth)
            pairing = Pairing.PAIRED if args.pairing == "paired" else Pairing.MEAN_CENTROID
            if pairing is Pairing.PAIRED:
                missing = sorted(set(truth) ^ set(synth))
                if missing:
                    raise ValueError(
                        f"paired mode needs matching embedding names, mismatched: {missing}"
                    )
                names = sorted(truth)
                value = mean_speaker_similarity(
                    [truth[n] for n in names], [synth[n] for n in names], pairing
                )
            else:
                value = mean_speaker_similarity(
                    list(truth.values()), list(synth.values()), pairing
                )
            print(f"{value:.3f}")
            return 0
    raise AssertionError(f"unhandled command {args.command!r}")


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
