import os

import numpy as np
import pytest

from cellmend.experiments import ExperimentSpec, prepare, run_fig3, run_fig4, run_fig5
from cellmend.metrics import total_cost
from cellmend.simulate import SimConfig
from cellmend.svm import CostMatrix

SMALL = SimConfig(n_fault=40, n_ok=400)


def tree(root):
    out = {}
    for d, _, files in os.walk(root):
        for f in files:
            p = os.path.join(d, f)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("fig9")
    with pytest.raises(ValueError):
        ExperimentSpec("fig3", seeds=())
    with pytest.raises(ValueError):
        ExperimentSpec("fig4", cost_ratios=(1, -2))
    assert ExperimentSpec("fig4").cost_ratios == tuple(float(r) for r in range(1, 31))
    assert ExperimentSpec("fig5").cost_ratios == (1.0, 5.0, 10.0, 20.0, 30.0)


def test_prepare_keeps_test_fixed_and_scaled_on_train():
    spec = ExperimentSpec("fig3", sim=SMALL)
    a, b = prepare(spec, 3), prepare(spec, 3)
    assert a.test == b.test
    assert np.allclose(a.train.X.mean(axis=0), 0, atol=1e-9)
    assert not np.allclose(a.test.X.mean(axis=0), 0, atol=1e-9)


def test_fig3_outputs(tmp_path):
    spec = ExperimentSpec("fig3", seeds=(1, 2), sim=SMALL, out_dir=str(tmp_path / "a"))
    res = run_fig3(spec)
    files = tree(tmp_path / "a")
    rocs = [f for f in files if f.startswith("roc")]
    assert len(rocs) == 6
    assert {"auc.csv", "mean_roc.csv", "fig3.svg", "manifest.txt"} <= set(files)
    auc_lines = files["auc.csv"].decode().splitlines()
    assert auc_lines[0] == "seed,plain,oversample,smote" and len(auc_lines) == 3
    assert res["auc"]["smote"].shape == (2,)
    manifest = files["manifest.txt"].decode()
    assert "seeds=1,2" in manifest and "file.auc.csv=" in manifest
    run_fig3(ExperimentSpec("fig3", seeds=(1, 2), sim=SMALL, out_dir=str(tmp_path / "b")))
    assert tree(tmp_path / "b") == files


def test_fig4_plain_cost_affine(tmp_path):
    spec = ExperimentSpec("fig4", seeds=(1,), cost_ratios=(1, 2, 7), sim=SMALL, out_dir=str(tmp_path))
    res = run_fig4(spec)
    fn, fp, cost = res["fn"]["svm"][0], res["fp"]["svm"][0], res["cost"]["svm"][0]
    assert len(set(fn)) == 1 and len(set(fp)) == 1
    assert cost.tolist() == [r * fn[0] + fp[0] for r in (1, 2, 7)]
    lines = (tmp_path / "cost.csv").read_text().splitlines()
    assert lines[0] == "seed,ratio,method,total_cost,fn,fp" and len(lines) == 1 + 3 * 3
    assert (tmp_path / "fig4.svg").exists() and (tmp_path / "mean_cost.csv").exists()


def test_fig5_outputs(tmp_path):
    spec = ExperimentSpec("fig5", seeds=(1, 2), cost_ratios=(1, 10), sim=SMALL, out_dir=str(tmp_path))
    res = run_fig5(spec)
    assert len(os.listdir(tmp_path / "roc")) == 4
    assert res["recall"].shape == (2, 2)
    assert np.all((res["recall"] >= 0) & (res["recall"] <= 1))
    lines = (tmp_path / "recall.csv").read_text().splitlines()
    assert lines[0] == "seed,ratio,fault_recall,auc" and len(lines) == 5


def test_cost_from_confusion_equals_per_sample():
    # guard against the experiments' accounting drifting from the metric
    from cellmend.metrics import confusion
    t = np.array([0, 0, 1, 1, 1])
    p = np.array([1, 0, 0, 1, 1])
    assert total_cost(confusion(t, p), CostMatrix.from_ratio(9)) == 9 + 1
