"""Command-line driver.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .calibration import ausuc, tradeoff_curve
from .exceptions import GzslError
from .metrics import mse_vs_lambda_curves
from .models import ModelSpec, SgdConfig
from .pipeline import (
    ExperimentConfig,
    _fit,
    _refit_idx,
    default_lambda_grid,
    run_gzsl_evaluation,
    run_zsl_evaluation,
    select_lambda_gamma_gzsl,
)
from .splits import SplitConfig, make_validation_folds
from .synthetic import SyntheticConfig, generate

log = logging.getLogger("gzslkit")

MODELS = {
    "linear-vs": ("linear_vs", None),
    "linear-sv": ("linear_sv", None),
    "ale": ("bilinear", "ale"),
    "devise": ("bilinear", "devise"),
    "sje": ("bilinear", "sje"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _grid(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lambda-grid expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("--lambda-grid is empty")
    return tuple(values)


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=5, help="runs for seeded scorers")
    p.add_argument("--acc", choices=["per-class", "per-sample"], default="per-class")
    p.add_argument("--lambda-grid", type=_grid, default=default_lambda_grid(), metavar="A,B,C")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _data_flags(p, needs_split=True):
    p.add_argument("--data", required=True, type=Path, help="dataset directory")
    if needs_split:
        p.add_argument("--split", required=True, type=Path, help="split file written by `split`")
    p.add_argument("--normalize-prototypes", action=argparse.BooleanOptionalAction, default=True)


def _model_flags(p):
    p.add_argument("--model", choices=sorted(MODELS), default="linear-vs")
    d = SgdConfig()
    p.add_argument("--learning-rate", type=float, default=d.learning_rate)
    p.add_argument("--epochs", type=int, default=d.epochs)
    p.add_argument("--margin-fraction", type=float, default=d.margin_fraction)
    p.add_argument("--init-scale", type=float, default=d.init_scale)


def build_parser():
    common = _global_flags()
    parser = _Parser(prog="gzsl", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic dataset directory")
    p.add_argument("--out", required=True, type=Path)
    d = SyntheticConfig()
    for name in ("n_classes", "samples_per_class", "feature_dim", "attribute_dim"):
        p.add_argument("--" + name.replace("_", "-"), type=int, default=getattr(d, name))
    for name in ("intra_var", "inter_var", "noise_var"):
        p.add_argument("--" + name.replace("_", "-"), type=float, default=getattr(d, name))

    p = sub.add_parser("split", parents=[common], help="write GZSL validation folds")
    _data_flags(p, needs_split=False)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--n-val-classes", type=int, required=True)
    p.add_argument("--n-test-classes", type=int, required=True)
    p.add_argument("--seen-test-fraction", type=float, default=0.2)
    p.add_argument("--seen-val-fraction", type=float, default=0.2)
    p.add_argument("--folds", type=int, default=3)

    for name, text in (("zsl", "classical ZSL evaluation"), ("gzsl", "GZSL evaluation")):
        p = sub.add_parser(name, parents=[common], help=text)
        _data_flags(p)
        _model_flags(p)
        p.add_argument("--out", type=Path, help="report path (default: stdout)")
        if name == "gzsl":
            p.add_argument("--no-calibration", action="store_true")
            p.add_argument("--lambda-mode", choices=["zsl", "gzsl"], default="gzsl")

    p = sub.add_parser("curve", parents=[common], help="seen-unseen trade-off curve and AUSUC")
    _data_flags(p)
    _model_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, help="fixed weight (default: GZSL selection)")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("mse-curve", parents=[common], help="attribute MSE versus lambda")
    _data_flags(p)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _experiment(args, **extra):
    family, variant = MODELS[args.model]
    sgd = SgdConfig(args.learning_rate, args.epochs, args.margin_fraction, args.init_scale, args.seed)
    spec = ModelSpec(family=family, lam=args.lambda_grid[0], variant=variant, sgd=sgd)
    return ExperimentConfig(
        model=spec, lambda_grid=args.lambda_grid, acc_kind=args.acc,
        n_runs=args.runs, seed=args.seed, **extra,
    )


def _load(args):
    d = io.load_dataset(args.data, normalize=args.normalize_prototypes)
    folds = io.load_splits(args.split)
    for f in folds:
        f.check(d)
    return d, folds


def _inputs(args):
    return {
        "data": str(args.data),
        "split": str(args.split),
        "normalize_prototypes": args.normalize_prototypes,
        "model": args.model,
    }


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_synth(args):
    cfg = SyntheticConfig(
        args.n_classes, args.samples_per_class, args.feature_dim, args.attribute_dim,
        args.intra_var, args.inter_var, args.noise_var, args.seed,
    )
    io.write_dataset(generate(cfg), args.out)


def cmd_split(args):
    d = io.load_dataset(args.data, normalize=args.normalize_prototypes)
    cfg = SplitConfig(
        args.n_val_classes, args.n_test_classes, args.seen_test_fraction,
        args.seen_val_fraction, args.folds, args.seed,
    )
    io.write_splits(make_validation_folds(d, cfg), args.out)


def cmd_zsl(args):
    d, folds = _load(args)
    report = run_zsl_evaluation(d, folds[0], _experiment(args), folds)
    _emit(io.dumps_report(report, _inputs(args)), args.out)


def cmd_gzsl(args):
    d, folds = _load(args)
    cfg = _experiment(args, calibrate=not args.no_calibration, lambda_mode=args.lambda_mode)
    report = run_gzsl_evaluation(d, folds[0], cfg, folds)
    _emit(io.dumps_report(report, _inputs(args)), args.out)


def cmd_curve(args):
    d, folds = _load(args)
    cfg = _experiment(args)
    lam = args.lam if args.lam is not None else select_lambda_gamma_gzsl(d, folds, cfg)[0]
    split = folds[0]
    model = _fit(d, _refit_idx(split), cfg, lam, cfg.seed)
    idx = np.concatenate([split.seen_test_idx, split.unseen_test_idx])
    X, y = d.subset(idx)
    sm = model.score_matrix(X, d.prototypes, split.all_classes, split.seen_classes)
    io.write_curve(tradeoff_curve(sm, y, cfg.acc_kind), args.out)
    print(json.dumps({"ausuc": ausuc(sm, y, cfg.acc_kind), "lambda": lam}, sort_keys=True))


def cmd_mse_curve(args):
    d, folds = _load(args)
    seen, unseen = mse_vs_lambda_curves(d, folds[0], args.lambda_grid)
    with args.out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mse_seen", "mse_unseen"])
        for row in zip(args.lambda_grid, seen, unseen):
            writer.writerow([repr(float(v)) for v in row])


COMMANDS = {
    "synth": cmd_synth,
    "split": cmd_split,
    "zsl": cmd_zsl,
    "gzsl": cmd_gzsl,
    "curve": cmd_curve,
    "mse-curve": cmd_mse_curve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (GzslError, OSError) as exc:
        print(f"gzsl {args.command}: data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"gzsl {args.command}: invalid option: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
