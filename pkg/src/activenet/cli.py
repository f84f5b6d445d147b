"""Command-line entry point.

Subcommands: ``train``, ``encode``, ``synth``, ``evaluate``, ``run``.
Exit codes: 0 success, 1 usage error, 2 unreadable data, 3 bad model file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import pipeline, synth
from .alert import AlertConfig
from .forest import Hyperparams
from .pipeline import EXIT_USAGE, PipelineConfig


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the wire contract reserves 2 for
    # data errors, so route usage failures to exit code 1 instead.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="activenet",
                     description="Streaming activeness classification over skeleton frames.")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate labeled synthetic frames")
    p.add_argument("--out", required=True, help="output NDJSON path")
    p.add_argument("--per-class", type=int, default=100, help="rows per class (default 100)")
    p.add_argument("--noise", type=float, default=synth.DEFAULT_NOISE_SIGMA,
                   help="keypoint jitter sigma in pixels")
    p.add_argument("--occlusion", type=float, default=synth.DEFAULT_OCCLUSION_PROB,
                   help="per-keypoint dropout probability")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("encode", help="batch-encode frames to angle encodings")
    p.add_argument("--input", required=True, help="NDJSON frame file")
    p.add_argument("--out", required=True, help="output path")
    p.add_argument("--format", choices=["csv", "ndjson"], default="csv")

    p = sub.add_parser("train", help="cross-validate, fit and persist a model")
    p.add_argument("--data", required=True, help="labeled CSV or NDJSON dataset")
    p.add_argument("--model-out", required=True, help="where to write the model JSON")
    p.add_argument("--kind", choices=["forest", "tree", "logistic"], default="forest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--no-grid", action="store_true",
                   help="skip hyperparameter search, use defaults")
    p.add_argument("--n-trees", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)

    p = sub.add_parser("evaluate", help="score a persisted model on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--metrics-out", default=None, help="optional JSON metrics path")

    p = sub.add_parser("run", help="classify a live frame stream")
    p.add_argument("--model", default=None, help="model JSON (overrides config)")
    p.add_argument("--source", default=None,
                   help="stdin | tcp:<port> | file path (overrides config)")
    p.add_argument("--config", default=None, help="TOML config file")
    p.add_argument("--webhook-url", default=None,
                   help="alert webhook (prefer the config file or "
                        f"{pipeline.WEBHOOK_ENV_VAR} to keep it out of shell history)")
    p.add_argument("--k", type=int, default=None, help="consecutive-frame alert threshold")
    p.add_argument("--cooldown-ms", type=int, default=None)
    p.add_argument("--dry-run", action="store_true",
                   help="print alerts to stderr instead of posting")
    p.add_argument("--summary-out", default=None, help="optional JSON summary path")
    return parser


def _run_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        cfg = pipeline.load_config(args.config)
    else:
        cfg = pipeline.apply_env_overrides(PipelineConfig())
    alert = cfg.alert
    if args.webhook_url is not None:
        alert = replace(alert, webhook_url=args.webhook_url)
    if args.k is not None:
        alert = replace(alert, k=args.k)
    if args.cooldown_ms is not None:
        alert = replace(alert, cooldown_ms=args.cooldown_ms)
    cfg = replace(cfg, alert=alert)
    if args.model is not None:
        cfg = replace(cfg, model_path=args.model)
    if args.source is not None:
        cfg = replace(cfg, source=args.source)
    if args.dry_run:
        cfg = replace(cfg, dry_run=True)
    if args.summary_out is not None:
        cfg = replace(cfg, summary_path=args.summary_out)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "synth":
        if args.per_class < 1:
            print("activenet synth: --per-class must be >= 1", file=sys.stderr)
            return EXIT_USAGE
        return pipeline.cmd_synth(args.out, args.per_class, args.noise,
                                  args.occlusion, args.seed)
    if args.command == "encode":
        return pipeline.cmd_encode(args.input, args.out, args.format)
    if args.command == "train":
        params = None
        if args.n_trees is not None or args.max_depth is not None:
            params = Hyperparams(n_trees=args.n_trees or 100,
                                 max_depth=args.max_depth, seed=args.seed)
        return pipeline.cmd_train(args.data, args.model_out, seed=args.seed,
                                  kind=args.kind, params=params,
                                  use_grid=not args.no_grid and params is None,
                                  k_folds=args.folds)
    if args.command == "evaluate":
        return pipeline.cmd_evaluate(args.model, args.data, args.metrics_out)
    if args.command == "run":
        try:
            cfg = _run_config(args)
        except (OSError, ValueError, TypeError) as exc:
            print(f"activenet run: bad config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return pipeline.run_stream(cfg)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
