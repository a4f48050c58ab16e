"""Command line entry point: ``cellmend <command> ...``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import __version__
from .dataio import DataError, apply_scaler, fit_scaler, load_csv, save_csv, stratified_split
from .experiments import EXPERIMENTS, ExperimentSpec, run
from .metrics import confusion, format_summary, pr_curve, roc, summary, write_pr_csv, write_roc_csv
from .resample import METHODS, SMOTE_MODES, ResampleConfig, resample
from .simulate import ConfigError, default_scenario, generate_dataset, load_config
from .svm import ConvergenceError, CostMatrix, SvmHyperparams, SvmModel, predict, train_svm

log = logging.getLogger("cellmend")


def parse_seeds(text: str) -> tuple:
    """``"1..10"`` (inclusive) or a comma list such as ``"1,4,9"``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        seeds = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}; use A..B or a comma list") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def parse_ratios(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratio list {text!r}") from None


def _scenario(path):
    return load_config(path) if path else default_scenario()


def cmd_simulate(args):
    cfg = _scenario(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    data = generate_dataset(cfg)
    save_csv(data, args.out)
    log.info("wrote %d samples (%d faults) to %s", len(data), data.count(0), args.out)


def cmd_split(args):
    train, test = stratified_split(load_csv(args.input), args.test_fraction, args.seed)
    save_csv(train, args.train_out)
    save_csv(test, args.test_out)


def cmd_resample(args):
    cfg = ResampleConfig(target_ratio=args.ratio, k=args.k, mode=args.mode, seed=args.seed)
    out = resample(load_csv(args.input), args.method, cfg)
    save_csv(out, args.out)
    log.info("wrote %d samples to %s", len(out), args.out)


def cmd_train(args):
    train = load_csv(args.input)
    scaler = None
    if not args.no_scale:
        scaler = fit_scaler(train)
        train = apply_scaler(scaler, train)
    hp = SvmHyperparams(C=args.c, tol=args.tol, cost=CostMatrix(c01=args.c01, c10=args.c10))
    model = train_svm(train, hp, scaler)
    model.save(args.model_out)
    log.info("trained in %d iterations, kkt violation %.3g",
             model.meta["iterations"], model.meta["kkt_violation"])


def cmd_evaluate(args):
    model = SvmModel.load(args.model)
    test = load_csv(args.input)
    if model.scaler is not None:
        test = apply_scaler(model.scaler, test)
    scores = model.scores(test.X)
    cm = confusion(test.y, predict(model, test.X, args.threshold))
    curve = roc(test.y, scores)
    cost = CostMatrix(c01=args.c01, c10=args.c10)
    text = format_summary(summary(cm, cost, curve.auc))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "metrics.txt"), "w", newline="") as fh:
            fh.write(text)
        write_roc_csv(os.path.join(args.out, "roc.csv"), curve)
        write_pr_csv(os.path.join(args.out, "pr.csv"), pr_curve(test.y, scores))
    sys.stdout.write(text)


def cmd_experiment(args):
    spec = ExperimentSpec(
        args.name,
        seeds=args.seeds,
        cost_ratios=args.ratios,
        resample=ResampleConfig(k=args.k, mode=args.mode),
        sim=_scenario(args.config),
        C=args.c,
        out_dir=args.out,
    )
    run(spec)
    log.info("%s written to %s", args.name, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cellmend", description="KPI fault detection under class imbalance")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a labelled KPI dataset")
    s.add_argument("--config", help="scenario file (section.key = value lines)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("split", help="stratified train/test split")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--test-fraction", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--train-out", required=True)
    s.add_argument("--test-out", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("resample", help="rebalance a dataset")
    s.add_argument("--method", choices=sorted(METHODS), required=True)
    s.add_argument("--ratio", type=float, default=1.0, help="target minority/majority ratio")
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--mode", choices=SMOTE_MODES, default="paper")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_resample)

    s = sub.add_parser("train", help="fit a cost-sensitive linear SVM")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--c01", type=float, default=1.0, help="cost of a missed fault")
    s.add_argument("--c10", type=float, default=1.0, help="cost of a false alarm")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--no-scale", action="store_true", help="train on the features as given")
    s.add_argument("--model-out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="score a labelled dataset with a saved model")
    s.add_argument("--model", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--threshold", type=float, default=0.0)
    s.add_argument("--c01", type=float, default=1.0)
    s.add_argument("--c10", type=float, default=1.0)
    s.add_argument("--out", help="directory for metrics.txt, roc.csv and pr.csv")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("experiment", help="run a full experiment")
    s.add_argument("name", choices=EXPERIMENTS)
    s.add_argument("--seeds", type=parse_seeds, default=tuple(range(1, 11)))
    s.add_argument("--ratios", type=parse_ratios, help="comma list of cost ratios")
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--mode", choices=SMOTE_MODES, default="paper")
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--config", help="scenario file")
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (DataError, ConfigError, ConvergenceError, ValueError, OSError) as exc:
        print(f"cellmend {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0
