#!/usr/bin/env python3
"""
Tests for the no-reference and full-reference quality metrics.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core.config import MetricWeights
from core.exceptions import DimensionMismatchError
from core.imaging import ImageRGB
from core.metrics import eme, entropy, measure, psnr, uciqe, uiconm, uiqm

WEIGHTS = MetricWeights()


def _gray_image(gray):
    return ImageRGB(np.repeat(np.asarray(gray, dtype=np.float64)[:, :, None], 3, axis=2))


def test_entropy():
    """Entropy of simple histograms."""
    print("\n=== Testing Entropy ===")

    assert entropy(ImageRGB(np.full((8, 8, 3), 0.4))) == 0.0

    half = np.zeros((8, 8))
    half[:, 4:] = 1.0
    assert entropy(_gray_image(half)) == pytest.approx(1.0)

    ramp = (np.arange(256) / 255.0).reshape(16, 16)
    assert entropy(_gray_image(ramp)) == pytest.approx(8.0)
    print("✓ 0, 1 and 8 bits")


def test_uciqe():
    """Gray images have no chroma spread and no saturation."""
    print("\n=== Testing UCIQE ===")

    gray = _gray_image(np.random.default_rng(0).uniform(0.1, 0.9, size=(16, 16)))
    score, parts = uciqe(gray, WEIGHTS)
    assert parts.sigma_c == 0.0
    assert parts.mu_s == 0.0
    assert parts.con_l > 0.0
    assert score == pytest.approx(WEIGHTS.uciqe[1] * parts.con_l)
    print(f"✓ gray image: con_l {parts.con_l:.4f}, sigma_c = mu_s = 0")

    colorful = ImageRGB(np.random.default_rng(1).uniform(size=(16, 16, 3)))
    assert uciqe(colorful, WEIGHTS)[0] > 0.0
    assert uciqe(colorful, WEIGHTS.scaled(2.0))[0] == pytest.approx(2.0 * uciqe(colorful, WEIGHTS)[0])


def test_uiqm_components():
    """Hand-computed EME and UIConM values; a constant image scores zero."""
    print("\n=== Testing UIQM Components ===")

    block = np.ones((8, 8))
    block[0, 0] = 4.0
    assert eme(block) == pytest.approx(2.0 * math.log(4.0))
    block[7, 7] = 0.0
    assert eme(block) == 0.0
    print("✓ EME of a single block")

    contrast = np.ones((8, 8))
    contrast[3, 3] = 3.0
    assert uiconm(contrast) == pytest.approx(-0.5 * math.log(0.5), abs=1e-4)
    assert uiconm(contrast) == pytest.approx(0.3466, abs=1e-4)
    print("✓ UIConM with c = 0.5")

    score, parts = uiqm(ImageRGB(np.full((20, 20, 3), 0.6)), WEIGHTS)
    assert (parts.uicm, parts.uism, parts.uiconm) == (0.0, 0.0, 0.0)
    assert score == 0.0
    flat = measure(ImageRGB(np.full((20, 20, 3), 0.6)), WEIGHTS).to_dict()
    assert all(math.copysign(1.0, flat[key]) == 1.0 for key in ('uiqm', 'uicm', 'uism', 'uiconm'))
    print("✓ Constant image has UIQM 0")

    # partial blocks are padded, not dropped
    tall = np.ones((9, 8))
    tall[8, 0] = 2.0
    assert eme(tall) == pytest.approx(math.log(2.0))


def test_psnr():
    """PSNR of identical and offset images."""
    print("\n=== Testing PSNR ===")

    a = ImageRGB(np.zeros((4, 4, 3)))
    assert psnr(a, a) == math.inf
    assert psnr(a, ImageRGB(np.full((4, 4, 3), 0.1))) == pytest.approx(20.0)
    with pytest.raises(DimensionMismatchError):
        psnr(a, ImageRGB(np.zeros((5, 4, 3))))
    print("✓ inf for identical images, 20 dB for a 0.1 offset")


def test_measure_row():
    """measure() fills every metric and leaves the reserved ones empty."""
    print("\n=== Testing Metric Row ===")

    img = ImageRGB(np.random.default_rng(2).uniform(size=(24, 24, 3)))
    row = measure(img, WEIGHTS)
    values = row.to_dict()
    assert values['brisque'] is None and values['niqe'] is None
    for key in ('entropy', 'uciqe', 'uiqm', 'sigma_c', 'con_l', 'mu_s', 'uicm', 'uism', 'uiconm'):
        assert isinstance(values[key], float) and math.isfinite(values[key]), key
    assert row.uciqe == pytest.approx(uciqe(img, WEIGHTS)[0])
    assert row.uiqm == pytest.approx(uiqm(img, WEIGHTS)[0])
    print("✓ Metric row complete")


def main():
    """Run all tests."""
    print("Underwater Image Quality Bench - Metric Tests")
    print("=" * 50)

    test_entropy()
    test_uciqe()
    test_uiqm_components()
    test_psnr()
    test_measure_row()

    print("\n🎉 ALL METRIC TESTS PASSED!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
