"""End-to-end fault detection experiments.

Every run follows the same per-seed pipeline::

    simulate -> stratified split -> fit scaler on train -> scale both
             -> resample the scaled train -> train SVM -> score the test set

so the test partition is identical across all methods for a given seed.
Outputs are plain CSV, SVG and a ``manifest.txt``; nothing in them depends
on wall-clock time, so identical specs give byte-identical trees.
"""
from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .dataio import FAULT, apply_scaler, fit_scaler, stratified_split
from .metrics import confusion, mean_roc, roc, total_cost, write_roc_csv
from .resample import ResampleConfig, random_oversample, smote
from .simulate import SimConfig, default_scenario, format_config, generate_dataset
from .svg import emit_svg
from .svm import CostMatrix, SvmHyperparams, predict, train_svm

log = logging.getLogger(__name__)

EXPERIMENTS = ("fig3", "fig4", "fig5")
DEFAULT_SEEDS = tuple(range(1, 11))
DEFAULT_RATIOS = {
    "fig3": (),
    "fig4": tuple(float(r) for r in range(1, 31)),
    "fig5": (1.0, 5.0, 10.0, 20.0, 30.0),
}
FPR_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    seeds: tuple = DEFAULT_SEEDS
    cost_ratios: tuple | None = None
    resample: ResampleConfig = field(default_factory=ResampleConfig)
    sim: SimConfig = field(default_factory=default_scenario)
    test_fraction: float = 0.2
    C: float = 1.0
    tol: float = 1e-6
    out_dir: str = "out"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if len(self.seeds) < 1:
            raise ValueError("need at least one seed")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        ratios = DEFAULT_RATIOS[self.experiment] if self.cost_ratios is None else self.cost_ratios
        ratios = tuple(float(r) for r in ratios)
        if any(not r > 0 for r in ratios):
            raise ValueError("cost ratios must be positive")
        object.__setattr__(self, "cost_ratios", ratios)

    def hyperparams(self, ratio: float = 1.0) -> SvmHyperparams:
        return SvmHyperparams(C=self.C, tol=self.tol, cost=CostMatrix.from_ratio(ratio))


@dataclass
class SeedData:
    train: object
    test: object


def prepare(spec: ExperimentSpec, seed: int) -> SeedData:
    data = generate_dataset(replace(spec.sim, seed=seed))
    train, test = stratified_split(data, spec.test_fraction, seed)
    scaler = fit_scaler(train)
    return SeedData(apply_scaler(scaler, train), apply_scaler(scaler, test))


def _resample_cfg(spec, seed):
    return replace(spec.resample, seed=seed)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(v) for v in r) + "\n")


def _write_manifest(spec: ExperimentSpec, files):
    out = spec.out_dir
    lines = [
        f"cellmend_version={__version__}",
        f"experiment={spec.experiment}",
        f"seeds={','.join(str(s) for s in spec.seeds)}",
        f"cost_ratios={','.join(_fmt(r) for r in spec.cost_ratios)}",
        f"test_fraction={_fmt(spec.test_fraction)}",
        f"svm.C={_fmt(spec.C)}",
        f"svm.tol={_fmt(spec.tol)}",
        f"resample.target_ratio={_fmt(spec.resample.target_ratio)}",
        f"resample.k={spec.resample.k}",
        f"resample.mode={spec.resample.mode}",
        "pipeline=simulate>split>fit_scaler(train)>scale>resample(train)>train>score(test)",
    ]
    # seed is set per run, so the base config's own seed is not an input
    lines += ["sim." + ln if not ln.startswith("sim.") else ln
              for ln in format_config(spec.sim).splitlines() if not ln.startswith("sim.seed")]
    for rel in sorted(files):
        with open(os.path.join(out, rel), "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        lines.append(f"file.{rel}={digest}")
    with open(os.path.join(out, "manifest.txt"), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _roc_name(seed, tag):
    return os.path.join("roc", f"seed{seed:03d}_{tag}.csv")


# ---------------------------------------------------------------- fig3

FIG3_METHODS = ("plain", "oversample", "smote")


def run_fig3(spec: ExperimentSpec) -> dict:
    """Plain SVM vs SVM after random oversampling vs SVM after SMOTE.

    Returns ``{"auc": {method: array over seeds}, "roc": {method: [RocCurve]}}``.
    """
    os.makedirs(os.path.join(spec.out_dir, "roc"), exist_ok=True)
    files = []
    aucs = {m: [] for m in FIG3_METHODS}
    curves = {m: [] for m in FIG3_METHODS}
    for seed in spec.seeds:
        d = prepare(spec, seed)
        cfg = _resample_cfg(spec, seed)
        trains = {
            "plain": d.train,
            "oversample": random_oversample(d.train, cfg),
            "smote": smote(d.train, cfg),
        }
        for method, train in trains.items():
            model = train_svm(train, spec.hyperparams())
            curve = roc(d.test.y, model.scores(d.test.X))
            aucs[method].append(curve.auc)
            curves[method].append(curve)
            name = _roc_name(seed, method)
            write_roc_csv(os.path.join(spec.out_dir, name), curve)
            files.append(name)
        log.info("fig3 seed %d: %s", seed, ", ".join(f"{m}={aucs[m][-1]:.4f}" for m in FIG3_METHODS))

    _write_table(os.path.join(spec.out_dir, "auc.csv"), ("seed",) + FIG3_METHODS,
                 [(s,) + tuple(aucs[m][k] for m in FIG3_METHODS) for k, s in enumerate(spec.seeds)])
    means = {m: mean_roc(curves[m], FPR_GRID) for m in FIG3_METHODS}
    _write_table(os.path.join(spec.out_dir, "mean_roc.csv"), ("fpr",) + FIG3_METHODS,
                 [(x,) + tuple(means[m][k] for m in FIG3_METHODS) for k, x in enumerate(FPR_GRID)])
    emit_svg({f"{m} (AUC {np.mean(aucs[m]):.3f})": (FPR_GRID, means[m]) for m in FIG3_METHODS},
             os.path.join(spec.out_dir, "fig3.svg"),
             "false positive rate", "true positive rate", "Mean ROC by imbalance handling")
    files += ["auc.csv", "mean_roc.csv", "fig3.svg"]
    _write_manifest(spec, files)
    return {"auc": {m: np.array(v) for m, v in aucs.items()}, "roc": curves}


# ---------------------------------------------------------------- fig4

FIG4_METHODS = ("svm", "cs_svm", "cs_svm_smote")


def run_fig4(spec: ExperimentSpec) -> dict:
    """Total test-set misclassification cost as the missed-fault cost grows.

    The plain SVM ignores costs, so it is trained once per seed and its
    fixed predictions are re-priced at every ratio. Returns
    ``{"cost": {method: array (seeds x ratios)}, "fn": ..., "fp": ...}``.
    """
    os.makedirs(spec.out_dir, exist_ok=True)
    ratios = spec.cost_ratios
    shape = (len(spec.seeds), len(ratios))
    cost = {m: np.zeros(shape) for m in FIG4_METHODS}
    fn = {m: np.zeros(shape, dtype=np.int64) for m in FIG4_METHODS}
    fp = {m: np.zeros(shape, dtype=np.int64) for m in FIG4_METHODS}
    rows = []
    for a, seed in enumerate(spec.seeds):
        d = prepare(spec, seed)
        balanced = smote(d.train, _resample_cfg(spec, seed))
        plain_cm = confusion(d.test.y, predict(train_svm(d.train, spec.hyperparams()), d.test.X))
        for b, r in enumerate(ratios):
            cm_by_method = {
                "svm": plain_cm,
                "cs_svm": confusion(d.test.y, predict(train_svm(d.train, spec.hyperparams(r)), d.test.X)),
                "cs_svm_smote": confusion(d.test.y, predict(train_svm(balanced, spec.hyperparams(r)), d.test.X)),
            }
            for m, cm in cm_by_method.items():
                c = total_cost(cm, CostMatrix.from_ratio(r))
                cost[m][a, b], fn[m][a, b], fp[m][a, b] = c, cm.fn, cm.fp
                rows.append((seed, r, m, c, cm.fn, cm.fp))
        log.info("fig4 seed %d done", seed)

    _write_table(os.path.join(spec.out_dir, "cost.csv"),
                 ("seed", "ratio", "method", "total_cost", "fn", "fp"), rows)
    means = {m: cost[m].mean(axis=0) for m in FIG4_METHODS}
    _write_table(os.path.join(spec.out_dir, "mean_cost.csv"), ("ratio",) + FIG4_METHODS,
                 [(r,) + tuple(means[m][b] for m in FIG4_METHODS) for b, r in enumerate(ratios)])
    files = ["cost.csv", "mean_cost.csv"]
    if len(ratios) >= 2:
        emit_svg({m: (ratios, means[m]) for m in FIG4_METHODS}, os.path.join(spec.out_dir, "fig4.svg"),
                 "cost ratio C01/C10", "mean total cost", "Total cost vs cost ratio")
        files.append("fig4.svg")
    _write_manifest(spec, files)
    return {"cost": cost, "fn": fn, "fp": fp, "ratios": np.array(ratios)}


# ---------------------------------------------------------------- fig5


def run_fig5(spec: ExperimentSpec) -> dict:
    """CS-SVM ROC curves and fault recall at threshold 0 for each cost ratio.

    Returns ``{"recall": array (seeds x ratios), "auc": ..., "roc": {ratio: [RocCurve]}}``.
    """
    os.makedirs(os.path.join(spec.out_dir, "roc"), exist_ok=True)
    ratios = spec.cost_ratios
    recall = np.zeros((len(spec.seeds), len(ratios)))
    aucs = np.zeros_like(recall)
    curves = {r: [] for r in ratios}
    files = []
    for a, seed in enumerate(spec.seeds):
        d = prepare(spec, seed)
        for b, r in enumerate(ratios):
            model = train_svm(d.train, spec.hyperparams(r))
            scores = model.scores(d.test.X)
            curve = roc(d.test.y, scores)
            cm = confusion(d.test.y, np.where(scores >= 0.0, FAULT, 1 - FAULT))
            recall[a, b], aucs[a, b] = cm.recall, curve.auc
            curves[r].append(curve)
            name = _roc_name(seed, f"ratio{_fmt(r)}")
            write_roc_csv(os.path.join(spec.out_dir, name), curve)
            files.append(name)
        log.info("fig5 seed %d: recall %s", seed, np.round(recall[a], 3).tolist())

    _write_table(os.path.join(spec.out_dir, "recall.csv"), ("seed", "ratio", "fault_recall", "auc"),
                 [(s, r, recall[a, b], aucs[a, b]) for a, s in enumerate(spec.seeds) for b, r in enumerate(ratios)])
    means = {r: mean_roc(curves[r], FPR_GRID) for r in ratios}
    emit_svg({f"ratio {_fmt(r)}": (FPR_GRID, means[r]) for r in ratios}, os.path.join(spec.out_dir, "fig5.svg"),
             "false positive rate", "true positive rate", "Mean CS-SVM ROC by cost ratio")
    files += ["recall.csv", "fig5.svg"]
    _write_manifest(spec, files)
    return {"recall": recall, "auc": aucs, "roc": curves, "ratios": np.array(ratios)}


RUNNERS = {"fig3": run_fig3, "fig4": run_fig4, "fig5": run_fig5}


def run(spec: ExperimentSpec) -> dict:
    return RUNNERS[spec.experiment](spec)
