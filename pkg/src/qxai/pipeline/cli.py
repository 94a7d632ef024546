"""Command-line entry point: ``qxai <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import MODEL_KINDS, ConfigError, load_config
from .data import IngestionError
from . import experiment as ex


def _models(text: str) -> list[str]:
    lookup = {k.lower(): k for k in MODEL_KINDS}
    out = []
    for part in filter(None, (p.strip().lower() for p in text.split(","))):
        if part not in lookup:
            raise argparse.ArgumentTypeError(f"unknown model {part!r}; choose from {','.join(lookup)}")
        out.append(lookup[part])
    return out


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", type=Path, default=None, help="CSV file (default: bundled Iris)")
    common.add_argument("--config", type=Path, default=None, help="JSON config overrides")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--seed", type=_u64, default=None, help="global seed (default 42)")
    common.add_argument("--models", type=_models, default=list(MODEL_KINDS),
                        help="comma-separated subset of svc,qsvc,rf,vqc")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--split", choices=("stratified", "shuffle"), default=None)

    parser = argparse.ArgumentParser(prog="qxai", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("train", "split the data and train the selected models"),
        ("evaluate", "score saved models on the test split"),
        ("explain", "run LOO, permutation, ALE and SHAP on saved models"),
        ("kernel", "build the quantum Gram matrix on the training split"),
        ("gridsearch", "VQC ansatz/reps grid"),
        ("run-all", "train, evaluate and explain in one go"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
        if args.split:
            cfg["split"]["method"] = args.split
        return _dispatch(args, cfg)
    except (ConfigError, IngestionError, FileNotFoundError) as exc:
        print(f"qxai: error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, cfg: dict) -> int:
    if args.command == "run-all":
        out = ex.run_experiment(cfg, args.data, args.out, args.models, args.workers)
        return _finish(out)

    rec = ex.Recorder(args.out, cfg)
    prep = ex.prepare(cfg, args.data)
    if args.command == "train":
        ex.train_stage(rec, prep, args.models, args.workers)
    elif args.command in ("evaluate", "explain"):
        models = ex.load_models(args.out, args.models)
        missing = [k for k in args.models if k not in models]
        if missing:
            print(f"qxai: error: no saved model for {','.join(missing)}; run 'train' first",
                  file=sys.stderr)
            return 2
        if args.command == "evaluate":
            ex.evaluate_stage(rec, prep, models)
        else:
            ex.explain_stage(rec, prep, models, args.workers)
    elif args.command == "kernel":
        rec.run("kernel", ex.kernel_stage, rec, prep, args.workers)
    elif args.command == "gridsearch":
        rec.run("gridsearch", ex.gridsearch_stage, rec, prep)
    rec.write_manifest(prep)
    return _finish(rec.out)


def _finish(out: Path) -> int:
    manifest = json.loads((Path(out) / "manifest.json").read_text())
    failed = {k: v for k, v in manifest["stages"].items() if v["status"] == "failed"}
    for key, v in manifest["stages"].items():
        print(f"{key:24s} {v['status']}")
    print(f"wrote {out}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
