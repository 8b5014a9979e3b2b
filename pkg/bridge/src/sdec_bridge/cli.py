"""Bridge command line: export embeddings, inject them back, or do both at once.

Exit codes mirror the toolkit: 0 success, 2 rejected input, 1 internal or
environment failure (including an unavailable real backend).
"""

from __future__ import annotations

import argparse
import sys

from .encoder import ReferenceEncoder, load_real_encoder
from .errors import BridgeError, BridgeValidationError
from .export import export_embeddings
from .inject import generate_from_prompt, inject_embeddings
from .pipeline import ReferencePipeline, load_real_pipeline


def _encoder_for(args) -> ReferenceEncoder:
    if args.backend == "real":
        load_real_encoder()  # raises EncoderUnavailable with the reason
        raise BridgeError("real backend probing succeeded but wiring is not implemented here")
    return ReferenceEncoder(dim=args.dim)


def cmd_export(args) -> int:
    manifest = export_embeddings(
        prompt=args.prompt,
        id_span=args.id_span,
        out_dir=args.out_dir,
        scene_span=args.scene_span,
        encoder=_encoder_for(args),
        encoder_states=args.encoder_states,
    )
    print(f"exported {manifest.shape[0]}x{manifest.shape[1]} embeddings to {args.out_dir}")
    return 0


def cmd_inject(args) -> int:
    pipeline = ReferencePipeline()
    if args.backend == "real":
        load_real_pipeline()  # raises EncoderUnavailable with the reason
        raise BridgeError("real backend probing succeeded but wiring is not implemented here")
    path = inject_embeddings(args.embeddings, args.manifest, args.out,
                             seed=args.seed, pipeline=pipeline)
    print(f"wrote {path}")
    return 0


def cmd_generate(args) -> int:
    if args.backend == "real":
        load_real_encoder()
        load_real_pipeline()
        raise BridgeError("real backend probing succeeded but wiring is not implemented here")
    path = generate_from_prompt(args.prompt, args.out, seed=args.seed,
                                encoder=ReferenceEncoder(dim=args.dim))
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdec-bridge",
        description="Export prompt embeddings for refinement and inject them back.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("export", help="encode a prompt and write the interchange files")
    p.add_argument("--prompt", required=True, help="full prompt text")
    p.add_argument("--id-span", required=True, help="identity fragment inside the prompt")
    p.add_argument("--scene-span", default=None,
                   help="scene fragment (default: everything after the identity tokens)")
    p.add_argument("--dim", type=int, default=64, help="reference encoder width")
    p.add_argument("--backend", choices=("reference", "real"), default="reference")
    p.add_argument("--encoder-states", choices=("concat", "primary", "secondary"),
                   default="concat",
                   help="which hidden states a dual-encoder backend would export")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("inject", help="generate an image from an embedding file")
    p.add_argument("--embeddings", required=True, help="NPY matrix (refined or original)")
    p.add_argument("--manifest", required=True, help="manifest JSON written by export")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("reference", "real"), default="reference")
    p.add_argument("--out", required=True, help="output image path (.ppm)")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("generate", help="text-prompt generation (no interchange files)")
    p.add_argument("--prompt", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--backend", choices=("reference", "real"), default="reference")
    p.add_argument("--out", required=True, help="output image path (.ppm)")
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except BridgeValidationError as exc:
        print(f"sdec-bridge {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    except BridgeError as exc:
        print(f"sdec-bridge {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"sdec-bridge {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"sdec-bridge {args.subcommand}: unexpected failure: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
