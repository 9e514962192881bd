#!/usr/bin/env python3
"""
Tests for prior maps and prior constants.
"""

import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core.config import PriorConstants
from core.exceptions import ConfigError
from core.imaging import ImageRGB, WindowSpec
from core.priors import (DepthMap, blurriness_map, dark_channel, mip_map, normalize_map, red_inverted_dark,
                         ulap_depth, ulap_raw, underwater_dark_channel)

ORACLE_CASES = 120


def _windows(array, radius):
    size = 2 * radius + 1
    return sliding_window_view(np.pad(array, radius, mode='edge'), (size, size))


def _naive_min(array, radius):
    padded = np.pad(array, radius, mode='edge')
    size = 2 * radius + 1
    return np.array([[padded[y:y + size, x:x + size].min() for x in range(array.shape[1])]
                     for y in range(array.shape[0])])


def test_dark_channels():
    """Dark channel variants against brute force."""
    print("\n=== Testing Dark Channels ===")

    rng = np.random.default_rng(0)
    img = ImageRGB(rng.uniform(size=(10, 12, 3)))
    win = WindowSpec(2)

    dcp = dark_channel(img, win).data
    assert np.array_equal(dcp, _naive_min(img.data.min(axis=2), 2))
    udcp = underwater_dark_channel(img, win).data
    assert np.array_equal(udcp, _naive_min(img.data[:, :, 1:].min(axis=2), 2))
    assert np.all(udcp >= dcp)
    print("✓ DCP and UDCP match brute force, UDCP >= DCP")

    rid = red_inverted_dark(img, win).data
    per_pixel = np.minimum(1.0 - img.data[:, :, 0], img.data[:, :, 1:].min(axis=2))
    assert np.array_equal(rid, _naive_min(per_pixel, 2))
    print("✓ Red-inverted dark channel matches brute force")

    mip = mip_map(img, win).data
    assert mip.min() >= -1.0 and mip.max() <= 1.0
    # pure red beats pure cyan
    two = np.zeros((1, 2, 3))
    two[0, 0] = [1.0, 0.0, 0.0]
    two[0, 1] = [0.0, 1.0, 1.0]
    assert mip_map(ImageRGB(two), WindowSpec(0)).data.tolist() == [[1.0, -1.0]]
    print("✓ MIP map range and sign")


def test_normalize_and_depth():
    """Normalization, ULAP depth and depth validation."""
    print("\n=== Testing Depth Priors ===")

    assert normalize_map(np.array([2.0, 4.0, 3.0]), 0.5).tolist() == [0.0, 1.0, 0.5]
    assert normalize_map(np.full(4, 7.0), 0.5).tolist() == [0.5] * 4
    print("✓ Degenerate normalization returns the constant")

    consts = PriorConstants()
    constant = ImageRGB(np.full((5, 5, 3), 0.4))
    assert np.all(ulap_depth(constant, consts).data == 0.5)

    data = np.zeros((1, 3, 3))
    data[0, 0] = [0.8, 0.3, 0.3]   # red-rich, near
    data[0, 1] = [0.4, 0.5, 0.5]
    data[0, 2] = [0.1, 0.7, 0.8]   # blue, red-poor, far
    depth = ulap_depth(ImageRGB(data), consts).data
    assert depth[0, 0] == 0.0 and depth[0, 2] == 1.0
    assert depth[0, 0] < depth[0, 1] < depth[0, 2]
    mu0, mu1, mu2 = consts.ulap_coeffs
    assert np.isclose(ulap_raw(ImageRGB(data), consts)[0, 1], mu0 + mu1 * 0.5 + mu2 * 0.4)
    print("✓ ULAP depth grows with max(G, B) - R")

    with pytest.raises(ValueError):
        DepthMap(np.full((2, 2), 1.5))


def test_blurriness():
    """Blurred content scores higher; refined maps stay in [0, 1]."""
    print("\n=== Testing Blurriness ===")

    consts = PriorConstants()
    step = np.zeros((16, 64))
    step[:, 32:] = 1.0
    blurred = ndimage.gaussian_filter(step, sigma=8.0, mode='nearest')

    def as_image(gray):
        return ImageRGB(np.repeat(gray[:, :, None], 3, axis=2))

    sharp_map = blurriness_map(as_image(step), consts, refine=False).data
    blurred_map = blurriness_map(as_image(blurred), consts, refine=False).data
    assert blurred_map.mean() > sharp_map.mean()
    print(f"✓ mean blurriness sharp {sharp_map.mean():.3f} < blurred {blurred_map.mean():.3f}")

    refined = blurriness_map(as_image(blurred), consts, WindowSpec(3)).data
    assert refined.shape == (16, 64)
    assert refined.min() >= 0.0 and refined.max() <= 1.0
    assert np.all(blurriness_map(ImageRGB(np.full((8, 8, 3), 0.3)), consts).data == 0.0)
    print("✓ Refined map bounded; flat image has zero blurriness")


def test_prior_constants():
    """Constant validation and dictionary loading."""
    print("\n=== Testing Prior Constants ===")

    consts = PriorConstants()
    assert consts.blur_scales == (2, 4, 8, 16)
    with pytest.raises(ConfigError):
        PriorConstants(nrer=(0.0, 0.9, 0.9))
    with pytest.raises(ConfigError):
        PriorConstants(blur_scales=(4, 2))
    with pytest.raises(ConfigError):
        PriorConstants(blur_scales=())
    with pytest.raises(ConfigError):
        replace(consts, mip_shift="median")

    loaded = PriorConstants.from_dict({'nrer': [0.8, 0.9, 0.95], 'rcp_lambda': 0.3, 'unknown': 1})
    assert loaded.nrer == (0.8, 0.9, 0.95)
    assert loaded.rcp_lambda == 0.3
    assert PriorConstants.from_dict({'blur_scales': "2, 4"}).blur_scales == (2, 4)
    print("✓ Prior constants validated and loaded")


def test_prior_maps_on_random_images():
    """Dark, underwater-dark, red-inverted and MIP maps on many random sizes and radii."""
    print("\n=== Testing Prior Maps on Random Images ===")

    rng = np.random.default_rng(7)
    start = time.perf_counter()
    for case in range(ORACLE_CASES):
        height, width = (int(n) for n in rng.integers(1, 33, size=2))
        win = WindowSpec(int(rng.integers(1, 4)))
        data = rng.uniform(size=(height, width, 3))
        img = ImageRGB(data)

        def window_min(array):
            return _windows(array, win.radius).min(axis=(2, 3))

        def window_max(array):
            return _windows(array, win.radius).max(axis=(2, 3))

        assert np.array_equal(dark_channel(img, win).data, window_min(data.min(axis=2))), case
        assert np.array_equal(underwater_dark_channel(img, win).data, window_min(data[:, :, 1:].min(axis=2))), case
        inverted = np.minimum(1.0 - data[:, :, 0], data[:, :, 1:].min(axis=2))
        assert np.array_equal(red_inverted_dark(img, win).data, window_min(inverted)), case
        expected_mip = window_max(data[:, :, 0]) - window_max(data[:, :, 1:].max(axis=2))
        assert np.array_equal(mip_map(img, win).data, expected_mip), case
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(f"✓ {ORACLE_CASES} random images match the window oracles in {elapsed:.1f}s")


def main():
    """Run all tests."""
    print("Underwater Image Quality Bench - Prior Tests")
    print("=" * 50)

    test_dark_channels()
    test_normalize_and_depth()
    test_blurriness()
    test_prior_constants()
    test_prior_maps_on_random_images()

    print("\n🎉 ALL PRIOR TESTS PASSED!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
