import json

import numpy as np
import pytest

from docbin.errors import ContractError, MetricUndefinedError
from docbin.metrics import (
    REPORT_FIELDS,
    confusion,
    drd,
    drd_weights,
    evaluate,
    f_measure,
    nubn,
    pseudo_f,
    pseudo_recall,
    psnr,
    skeletonize,
)
from docbin.synth import glyph_bar_chart

from .oracles import confusion_naive, drd_naive, fm_naive, psnr_naive


def random_pair(seed, shape=(24, 24)):
    r = np.random.default_rng(seed)
    g = (r.random(shape) > 0.3).astype(np.uint8)
    b = g.copy()
    flip = r.random(shape) < 0.15
    b[flip] = 1 - b[flip]
    return b, g


def bar_fixture():
    gt = np.ones((7, 14), dtype=np.uint8)
    gt[2:5, 2:12] = 0
    return gt


def test_drd_weights():
    w = drd_weights()
    assert w.shape == (5, 5)
    assert abs(w.sum() - 1) < 1e-12
    assert w[2, 2] == 0
    assert np.allclose(w, np.rot90(w))
    assert w[2, 3] / w[3, 3] == pytest.approx(np.sqrt(2))


def test_confusion_examples():
    b, g = random_pair(0, (8, 8))
    tp, fp, fn, tn = confusion(g, g)
    assert fp == fn == 0
    tp, fp, fn, tn = confusion(1 - g, g)
    assert tp == tn == 0
    assert confusion(b, g) == confusion_naive(b, g)
    assert sum(confusion(b, g)) == 64
    with pytest.raises(ContractError):
        confusion(np.ones((3, 3)), np.ones((3, 4)))


def test_f_measure_examples():
    b, g = random_pair(1)
    assert f_measure(g, g) == 100.0
    assert f_measure(np.ones_like(g), g) == 0.0
    # tp = 36, fn = 9, fp = 4: recall 0.8, precision 0.9
    g = np.ones((10, 10), dtype=np.uint8)
    b = np.ones((10, 10), dtype=np.uint8)
    g.ravel()[:45] = 0
    b.ravel()[:36] = 0
    b.ravel()[50:54] = 0
    assert f_measure(b, g) == pytest.approx(100 * 2 * 0.72 / 1.7, abs=1e-12)
    assert f_measure(b, g) == pytest.approx(84.70588, abs=1e-5)
    with pytest.raises(MetricUndefinedError):
        f_measure(b, np.ones_like(g))


def test_fm_is_100_only_for_exact_match():
    b, g = random_pair(2)
    assert f_measure(g, g) == 100
    g2 = g.copy()
    g2[0, 0] = 1 - g2[0, 0]
    assert f_measure(g2, g) < 100


def test_psnr_examples():
    g = np.ones((10, 10), dtype=np.uint8)
    g[0, :5] = 0
    assert psnr(g, g) == 99.0
    b = g.copy()
    b[5, 5] = 0
    assert psnr(b, g) == pytest.approx(20.0, abs=1e-12)
    g = np.ones((100, 100), dtype=np.uint8)
    b = g.copy()
    b[0, 0] = 0
    assert psnr(b, g) == pytest.approx(40.0, abs=1e-12)


def test_skeleton_of_bar_fixture():
    skel = skeletonize(bar_fixture() == 0)
    expected = np.zeros((7, 14), dtype=bool)
    expected[3, 3:10] = True
    assert np.array_equal(skel, expected)


@pytest.mark.parametrize("seed", range(4))
def test_skeleton_properties(seed):
    from scipy.ndimage import binary_opening, label

    mask = binary_opening(np.random.default_rng(seed).random((30, 30)) < 0.55)
    skel = skeletonize(mask)
    assert np.all(mask[skel])
    # one pixel thin: no full 2x2 block survives
    blocks = skel[:-1, :-1] & skel[1:, :-1] & skel[:-1, 1:] & skel[1:, 1:]
    assert not blocks.any()
    eight = np.ones((3, 3))
    assert label(skel, eight)[1] == label(mask, eight)[1]


def test_pseudo_f_offset_bar():
    gt = bar_fixture()
    b = np.ones_like(gt)
    b[2:5, 6:14] = 0
    # skeleton columns 3..9, of which 6..9 are covered; tp 18, fp 6
    assert pseudo_recall(b, gt) == pytest.approx(4 / 7)
    assert pseudo_f(b, gt) == pytest.approx(100 * 2400 / 3700, abs=1e-10)
    assert pseudo_f(gt, gt) == 100.0


def test_pseudo_f_skeleton_only_output():
    gt = bar_fixture()
    b = np.ones_like(gt)
    b[3, 3:10] = 0
    p = 7 / 7
    precision = 7 / 7
    assert pseudo_recall(b, gt) == p
    assert pseudo_f(b, gt) == pytest.approx(100 * 2 * precision / (1 + precision))
    # superset of the text still has pseudo-recall 1
    b2 = gt.copy()
    b2[0, 0] = 0
    assert pseudo_recall(b2, gt) == 1.0


def test_drd_examples():
    gt = glyph_bar_chart(32, 32, 2, 4).data
    assert drd(gt, gt) == 0.0
    blank = np.ones((32, 32), dtype=np.uint8)
    with pytest.raises(MetricUndefinedError):
        drd(blank, blank)
    # add a uniform region far from every stroke and flip its centre pixel
    gt = np.ones((48, 48), dtype=np.uint8)
    gt[2:4, 2:10] = 0
    b = gt.copy()
    b[36, 36] = 0
    assert drd(b, gt) == pytest.approx(1.0 / nubn(gt), abs=1e-12)
    with pytest.raises(ContractError):
        drd(np.ones((4, 4)), np.ones((4, 4)))


@pytest.mark.parametrize("seed", range(3))
def test_drd_matches_naive(seed):
    b, g = random_pair(100 + seed)
    assert drd(b, g) == pytest.approx(drd_naive(b, g), abs=1e-10)


def test_monotonicity_of_one_more_error():
    b, g = random_pair(7)
    ok = np.argwhere(b == g)
    i, j = ok[0]
    worse = b.copy()
    worse[i, j] = 1 - worse[i, j]
    assert f_measure(worse, g) <= f_measure(b, g)
    assert psnr(worse, g) <= psnr(b, g)
    assert drd(worse, g) >= drd(b, g)


def test_transpose_symmetry():
    b, g = random_pair(9)
    assert f_measure(b.T, g.T) == f_measure(b, g)
    assert psnr(b.T, g.T) == psnr(b, g)
    assert drd(b.T, g.T) == pytest.approx(drd(b, g), abs=1e-12)


def test_report_serialization():
    b, g = random_pair(11)
    rep = evaluate(b, g)
    assert rep.tp + rep.fp + rep.fn + rep.tn == g.size
    assert 0 <= rep.fm <= 100 and 0 <= rep.fps <= 100
    assert rep.psnr >= 0 and rep.drd >= 0
    assert list(json.loads(rep.to_json())) == list(REPORT_FIELDS)
    assert len(rep.csv_row()) == 8
    assert rep.fm == pytest.approx(fm_naive(b, g))
    assert rep.psnr == pytest.approx(psnr_naive(b, g))
