import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellmend.dataio import DataError
from cellmend.metrics import (
    ConfusionMatrix, confusion, f_measure, format_summary, g_mean, mean_roc, pr_curve, roc,
    summary, total_cost, write_pr_csv, write_roc_csv,
)
from cellmend.svm import CostMatrix


def mann_whitney(truth, scores):
    pos = [s for t, s in zip(truth, scores) if t == 0]
    neg = [s for t, s in zip(truth, scores) if t == 1]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def random_case(rng, n):
    truth = rng.integers(0, 2, n)
    truth[:2] = [0, 1]
    scores = rng.integers(0, max(2, n // 4), n) / 7.0  # plenty of ties
    return truth, scores


def test_confusion_examples():
    assert confusion([0] * 4, [0] * 4) == ConfusionMatrix(4, 0, 0, 0)
    assert confusion([0, 0, 1, 1], [0, 1, 0, 1]) == ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)


def test_confusion_tally_oracle():
    rng = np.random.default_rng(0)
    t, p = rng.integers(0, 2, 1000), rng.integers(0, 2, 1000)
    cm = confusion(t, p)
    tally = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for a, b in zip(t.tolist(), p.tolist()):
        key = ("t" if a == b else "f") + ("p" if b == 0 else "n")
        tally[key] += 1
    assert cm == ConfusionMatrix(**tally)
    assert cm.positives == int(np.sum(t == 0))


def test_confusion_errors():
    with pytest.raises(DataError):
        confusion([0, 1], [0])
    with pytest.raises(DataError):
        confusion([0, 2], [0, 1])
    with pytest.raises(DataError):
        confusion([], [])


def test_total_cost():
    assert total_cost(ConfusionMatrix(tp=5, fp=2, tn=9, fn=3), CostMatrix(c01=10, c10=1)) == 32
    assert total_cost(ConfusionMatrix(7, 0, 8, 0), CostMatrix(c01=30)) == 0


def test_total_cost_per_sample_oracle():
    rng = np.random.default_rng(1)
    cost = CostMatrix(c00=0.5, c01=7.25, c10=1.5, c11=0.25)
    t, p = rng.integers(0, 2, 300), rng.integers(0, 2, 300)
    table = {(0, 0): cost.c00, (0, 1): cost.c01, (1, 0): cost.c10, (1, 1): cost.c11}
    assert total_cost(confusion(t, p), cost) == sum(table[a, b] for a, b in zip(t.tolist(), p.tolist()))


def test_f_and_g():
    assert f_measure(ConfusionMatrix(tp=1, fp=1, tn=0, fn=1)) == 0.5
    assert f_measure(ConfusionMatrix(3, 0, 4, 0)) == 1.0
    assert f_measure(ConfusionMatrix(0, 3, 4, 2)) == 0.0
    assert g_mean(ConfusionMatrix(3, 0, 4, 0)) == 1.0
    assert g_mean(ConfusionMatrix(0, 1, 4, 3)) == 0.0
    with pytest.raises(DataError):
        g_mean(ConfusionMatrix(3, 0, 0, 0))


def test_f_g_formula_oracle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        tp, fp, tn, fn = (int(v) for v in rng.integers(1, 50, 4))
        cm = ConfusionMatrix(tp, fp, tn, fn)
        P, R = tp / (tp + fp), tp / (tp + fn)
        assert f_measure(cm, 2.0) == pytest.approx(5 * P * R / (4 * P + R), rel=1e-12)
        assert g_mean(cm) == pytest.approx((tp / (tp + fn) * tn / (tn + fp)) ** 0.5, rel=1e-12)


def test_roc_examples():
    c = roc([0, 0, 1, 1], [3.0, 2.0, 1.0, 0.0])
    assert c.auc == 1.0
    c = roc([0, 1, 0, 1], [1.0] * 4)
    assert c.points[:, :2].tolist() == [[0, 0], [1, 1]] and c.auc == 0.5
    with pytest.raises(DataError):
        roc([1, 1], [0.1, 0.2])


@pytest.mark.parametrize("seed", range(20))
def test_auc_equals_mann_whitney(seed):
    rng = np.random.default_rng(seed)
    truth, scores = random_case(rng, int(rng.integers(2, 400)))
    assert abs(roc(truth, scores).auc - mann_whitney(truth, scores)) <= 1e-9


def test_roc_shape():
    rng = np.random.default_rng(3)
    truth, scores = random_case(rng, 500)
    c = roc(truth, scores)
    assert c.points[0, :2].tolist() == [0, 0] and c.points[-1, :2].tolist() == [1, 1]
    assert np.all(np.diff(c.fpr) >= 0) and np.all(np.diff(c.tpr) >= 0)
    assert len(c.points) == len(np.unique(scores)) + 1


def test_roc_point_matches_predict_threshold():
    rng = np.random.default_rng(4)
    truth, scores = random_case(rng, 300)
    scores = scores - 0.5
    c = roc(truth, scores)
    cm = confusion(truth, np.where(scores >= 0, 0, 1))
    k = np.flatnonzero(c.thresholds >= 0)[-1]
    assert (c.fpr[k], c.tpr[k]) == (cm.fpr, cm.tpr)


def test_pr_curve_brute_force():
    rng = np.random.default_rng(5)
    truth, scores = random_case(rng, 200)
    pts = pr_curve(truth, scores)
    thr = sorted(set(scores.tolist()), reverse=True)
    assert pts[:, 2].tolist() == thr
    for (r, p, t) in pts:
        pred = np.where(scores >= t, 0, 1)
        cm = confusion(truth, pred)
        assert r == cm.recall and p == cm.precision
    assert np.all(np.diff(pts[:, 0]) >= 0)


def test_pr_degenerate():
    assert pr_curve([0, 1, 1, 1], [1.0] * 4).tolist() == [[1.0, 0.25, 1.0]]
    assert np.all(pr_curve([0, 0, 1], [3.0, 2.0, 1.0])[:2, 1] == 1.0)
    with pytest.raises(DataError):
        pr_curve([1, 1], [0.0, 1.0])


def test_mean_roc():
    a = roc([0, 1], [1.0, 0.0])
    b = roc([0, 1], [0.0, 1.0])
    grid = np.linspace(0, 1, 5)
    assert mean_roc([a], grid).tolist() == [1.0] * 5
    assert mean_roc([b], grid).tolist() == [0.0, 0.0, 0.0, 0.0, 1.0]
    assert mean_roc([a, b], grid)[2] == 0.5


def test_curve_files(tmp_path):
    c = roc([0, 1, 0], [0.3, 0.1, 0.2])
    write_roc_csv(tmp_path / "r.csv", c)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "fpr,tpr,threshold" and lines[1] == "0,0,inf" and len(lines) == 5
    write_pr_csv(tmp_path / "p.csv", pr_curve([0, 1, 0], [0.3, 0.1, 0.2]))
    assert (tmp_path / "p.csv").read_text().startswith("recall,precision,threshold\n")


def test_summary_flags_degenerate():
    s = summary(ConfusionMatrix(0, 0, 5, 2), CostMatrix(c01=3), auc=0.5)
    assert s["precision"] == 0.0 and s["f1"] == 0.0
    assert s["degenerate"] == "precision;f1"
    assert s["total_cost"] == 6
    text = format_summary(s)
    assert "auc=0.5\n" in text and "degenerate=precision;f1\n" in text
    assert summary(ConfusionMatrix(2, 0, 5, 0))["degenerate"] == ""


cases = st.integers(2, 60).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n).filter(lambda t: 0 < sum(t) < len(t)),
    st.lists(st.integers(-5, 5), min_size=n, max_size=n),
))


@settings(max_examples=200, deadline=None)
@given(cases)
def test_auc_properties(case):
    truth, scores = np.array(case[0]), np.array(case[1], dtype=float)
    auc = roc(truth, scores).auc
    assert abs(auc - mann_whitney(truth, scores)) <= 1e-9
    assert abs(roc(truth, np.exp(scores) * 3 + 1).auc - auc) <= 1e-12
    assert abs(roc(truth, -scores).auc - (1 - auc)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.integers(0, 40)] * 4))
def test_metric_ranges(c):
    cm = ConfusionMatrix(*c)
    assert 0 <= f_measure(cm) <= 1
    if cm.positives and cm.negatives:
        g = g_mean(cm)
        assert 0 <= g <= 1
        assert (g == 0) == (cm.tpr == 0 or cm.tnr == 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=50),
       st.integers(1, 40))
def test_cost_affine_in_c01(pairs, r):
    t, p = zip(*pairs)
    cm = confusion(t, p)
    c1 = total_cost(cm, CostMatrix.from_ratio(r))
    c2 = total_cost(cm, CostMatrix.from_ratio(r + 1))
    assert c2 - c1 == cm.fn
