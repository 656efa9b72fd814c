import math

import numpy as np
import pytest

from docbin.errors import ParameterError
from docbin.fuzzy import (
    cluster_centers,
    contrast_map,
    local_mean,
    memberships,
    precompute,
    threshold_map,
    weight_map,
)
from docbin.mollifier import build_kernel

from .oracles import cluster_naive, naive_convolve


def test_local_mean_constant_and_step(rng):
    k = build_kernel(3)
    assert np.allclose(local_mean(np.full((9, 9), 0.6), k), 0.6)
    step = np.zeros((12, 12))
    step[:, 6:] = 1.0
    out = local_mean(step, k)
    assert out.min() >= 0 and out.max() <= 1
    assert np.all(np.diff(out[5]) >= -1e-15)
    f = rng.random((14, 11))
    assert np.allclose(local_mean(f, k), naive_convolve(f, k.weights), atol=1e-12)


def test_memberships():
    s = np.array([[0.5, 0.0, 0.3]])
    s_bar = np.array([[0.5, 0.5, 0.3]])
    m_F, m_B = memberships(s, s_bar, 0.05)
    assert m_F[0, 0] == m_B[0, 0] == 0.5
    assert m_F[0, 1] == pytest.approx(1.0, abs=1e-8)
    assert m_B[0, 1] == pytest.approx(0.0, abs=1e-8)
    assert np.all(m_F + m_B == 1.0)
    with pytest.raises(ParameterError):
        memberships(s, s_bar, 0.0)


def test_cluster_centers_constant():
    s = np.full((10, 10), 0.4)
    k = build_kernel(2)
    m_F, m_B = memberships(s, local_mean(s, k), 0.05)
    sF, sB = cluster_centers(s, m_F, m_B, k)
    assert np.allclose(sF, 0.4) and np.allclose(sB, 0.4)


def test_cluster_centers_two_level_patch():
    s = np.full((15, 15), 0.9)
    s[:, 6:9] = 0.1
    k = build_kernel(3)
    m_F, m_B = memberships(s, local_mean(s, k), 1e-4)
    sF, sB = cluster_centers(s, m_F, m_B, k)
    # at the stroke centre both classes are inside the window
    i, j = 7, 7
    r = k.half
    win = s[i - r : i + r + 1, j - r : j + r + 1]
    w = k.weights
    text = win < 0.5
    ref_F = (w * text * win).sum() / (w * text).sum()
    ref_B = (w * ~text * win).sum() / (w * ~text).sum()
    assert sF[i, j] == pytest.approx(ref_F, abs=1e-9) == pytest.approx(0.1, abs=1e-9)
    assert sB[i, j] == pytest.approx(ref_B, abs=1e-9) == pytest.approx(0.9, abs=1e-9)


def test_cluster_centers_match_naive_ratio(rng):
    s = rng.random((12, 13))
    fields = precompute(s, 2.5, 0.1)
    ref = cluster_naive(s, 2.5, 0.1)
    assert np.max(np.abs(fields.sF_bar - ref["sF_bar"])) < 1e-10
    assert np.max(np.abs(fields.sB_bar - ref["sB_bar"])) < 1e-10


def test_cluster_centers_fallback_to_local_mean():
    s = np.full((6, 6), 0.3)
    k = build_kernel(1.5)
    zero = np.zeros_like(s)
    sF, sB = cluster_centers(s, zero, np.ones_like(s), k)
    assert np.allclose(sF, local_mean(s, k))
    assert np.allclose(sB, 0.3)


def test_contrast_map():
    assert contrast_map(np.array([0.3]), np.array([0.3]))[0] == 0.0
    assert contrast_map(np.array([0.0]), np.array([1.0]))[0] == pytest.approx(math.log(2))
    assert contrast_map(np.array([0.75]), np.array([0.25]))[0] == pytest.approx(math.log(1.5))


def test_weight_map():
    d = np.array([[0.1, 0.3, 0.5]])
    w = weight_map(d)
    assert w[0, 1] == pytest.approx(0.5)
    assert w[0, 2] == 1.0 and w[0, 0] == 0.0
    assert np.all(weight_map(np.full((3, 3), 0.2)) == 0.0)


def test_threshold_map(rng):
    half = np.full((2, 2), 0.5)
    sF, sB = np.full((2, 2), 0.2), np.full((2, 2), 0.8)
    assert np.allclose(threshold_map(half, half, sF, sB), 0.5)
    assert np.allclose(threshold_map(np.ones((2, 2)), np.zeros((2, 2)), sF, sB), 0.8)
    m_F = rng.random((5, 5))
    a, b = rng.random((5, 5)), rng.random((5, 5))
    c = threshold_map(m_F, 1 - m_F, a, b)
    for i in range(5):
        for j in range(5):
            assert c[i, j] == pytest.approx((1 - m_F[i, j]) * a[i, j] + m_F[i, j] * b[i, j], abs=1e-15)


def test_precompute_constant_image():
    f = precompute(np.full((12, 12), 0.55), 3, 0.05)
    assert np.allclose(f.c, 0.55)
    assert np.all(f.omega == 0)
    assert np.allclose(f.d, 0, atol=1e-15)


def test_precompute_text_patch_matches_manual():
    s = np.full((9, 9), 0.85)
    s[2:7, 4] = 0.15
    s[4, 2:7] = 0.15
    f = precompute(s, 2, 0.05)
    ref = cluster_naive(s, 2, 0.05)
    for name, arr in ref.items():
        assert np.allclose(getattr(f, name), arr, atol=1e-12), name
    text = s < 0.5
    assert np.all(f.c[text] > 0.15) and np.all(f.c[text] < 0.85)


@pytest.mark.parametrize("seed", range(5))
def test_invariants_random(seed):
    s = np.random.default_rng(seed).random((20, 24))
    f = precompute(s, 3, 0.05)
    assert np.allclose(f.m_F + f.m_B, 1.0, atol=1e-12)
    assert np.all((f.m_F >= 0) & (f.m_F <= 1))
    assert np.all((f.d >= 0) & (f.d <= math.log(2)))
    assert f.omega.min() == 0 and f.omega.max() == 1
    assert f.sF_bar.min() >= s.min() - 1e-12 and f.sF_bar.max() <= s.max() + 1e-12
    assert f.sB_bar.min() >= s.min() - 1e-12 and f.sB_bar.max() <= s.max() + 1e-12


def test_constant_background_region_has_low_contrast():
    s = np.full((40, 40), 0.8)
    s[5:8, 5:15] = 0.2
    f = precompute(s, 4, 0.05)
    assert np.all(f.d[25:35, 25:35] < 0.01)
