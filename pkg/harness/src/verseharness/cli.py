"""Command line entry: fine-tune one model on one task's exported files."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import EvalConfig
from .train import train_eval


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="verseproj-harness")
    parser.add_argument("--model-id", required=True,
                        help="pretrained checkpoint (hub id or local path)")
    parser.add_argument("--task", required=True,
                        choices=["nmc", "pns", "sm", "ss", "sac"])
    parser.add_argument("--data-dir", required=True,
                        help="directory holding {task}.train.jsonl / {task}.test.jsonl")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--learning-rate", type=float, default=2e-5)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--weight-decay", type=float, default=0.01)
    parser.add_argument("--nmc-cap", type=int, default=3)
    parser.add_argument("--out", help="also write the result record to this file")
    args = parser.parse_args(argv)

    config = EvalConfig(model_id=args.model_id, task=args.task, seed=args.seed,
                        learning_rate=args.learning_rate, batch_size=args.batch_size,
                        epochs=args.epochs, weight_decay=args.weight_decay,
                        nmc_cap=args.nmc_cap)
    data_dir = Path(args.data_dir)
    try:
        result = train_eval(config,
                            data_dir / f"{args.task}.train.jsonl",
                            data_dir / f"{args.task}.test.jsonl")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", "utf-8")
    print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
