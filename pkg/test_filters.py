#!/usr/bin/env python3
"""
Tests for window kernels, guided filtering and pyramids against naive oracles.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core.exceptions import DimensionMismatchError, EstimationError
from core.filters import (box_filter, build_pyramid, collapse_pyramid, gaussian_pyramid, guided, guided_filter,
                          laplacian_pyramid, max_filter, max_pyramid_levels, mean_filter, median_filter,
                          min_filter, upsample, window_median, window_sum)
from core.imaging import ImageGray, WindowSpec

ORACLE_CASES = 120


def _windows(array, radius):
    """Every (2r+1)^2 window of the replicate-padded array, shape (H, W, 2r+1, 2r+1)."""
    size = 2 * radius + 1
    return sliding_window_view(np.pad(array, radius, mode='edge'), (size, size))


def _naive(array, radius, reduce):
    padded = np.pad(array, radius, mode='edge')
    size = 2 * radius + 1
    out = np.empty(array.shape, dtype=np.float64)
    for y in range(array.shape[0]):
        for x in range(array.shape[1]):
            out[y, x] = reduce(padded[y:y + size, x:x + size])
    return out


def _naive_median(levels, radius):
    # odd window: the middle order statistic
    return _naive(levels, radius, lambda w: np.sort(w.ravel())[w.size // 2])


def _naive_guided(p, guide, radius, eps):
    """Per-window linear regression of p on guide, then averaged coefficients."""
    size = 2 * radius + 1
    pp, pg = np.pad(p, radius, mode='edge'), np.pad(guide, radius, mode='edge')
    a = np.empty(p.shape)
    b = np.empty(p.shape)
    for y in range(p.shape[0]):
        for x in range(p.shape[1]):
            wg = pg[y:y + size, x:x + size]
            wp = pp[y:y + size, x:x + size]
            var = wg.var()
            cov = (wg * wp).mean() - wg.mean() * wp.mean()
            a[y, x] = cov / (var + eps)
            b[y, x] = wp.mean() - a[y, x] * wg.mean()
    return _naive(a, radius, np.mean) * guide + _naive(b, radius, np.mean)


def test_min_max_filters():
    """Block min/max filters match brute force for several radii."""
    print("\n=== Testing Min/Max Filters ===")

    rng = np.random.default_rng(0)
    array = rng.uniform(size=(13, 17))
    for radius in range(4):
        assert np.array_equal(min_filter(array, radius), _naive(array, radius, np.min))
        assert np.array_equal(max_filter(array, radius), _naive(array, radius, np.max))
        print(f"✓ radius {radius} matches brute force")

    # radius larger than the image still replicates the border
    tiny = rng.uniform(size=(3, 2))
    assert np.array_equal(min_filter(tiny, 5), _naive(tiny, 5, np.min))


def test_box_and_median():
    """Integral-image sums and histogram medians match brute force."""
    print("\n=== Testing Box and Median Filters ===")

    rng = np.random.default_rng(1)
    array = rng.uniform(size=(11, 14))
    for radius in (1, 2, 3):
        assert np.allclose(window_sum(array, radius), _naive(array, radius, np.sum), atol=1e-10)
        assert np.allclose(mean_filter(array, radius), _naive(array, radius, np.mean), atol=1e-12)
    print("✓ Box sums and means match")

    levels = rng.integers(0, 256, size=(16, 16))
    for radius in (1, 2, 3):
        assert np.array_equal(median_filter(levels, radius), _naive_median(levels, radius))
    print("✓ Median filter matches the middle order statistic")

    gray = ImageGray(levels / 255.0)
    win = WindowSpec(1)
    assert np.allclose(window_median(gray, win).data, _naive_median(levels, 1) / 255.0)
    assert np.allclose(box_filter(gray, win).data, _naive(levels / 255.0, 1, np.mean))


def test_guided_filter():
    """Guided filter identities and the per-window regression oracle."""
    print("\n=== Testing Guided Filter ===")

    rng = np.random.default_rng(2)
    guide = rng.uniform(size=(12, 15))
    p = rng.uniform(size=(12, 15))

    result = guided_filter(ImageGray(p), ImageGray(guide), 2, 1e-3)
    assert np.max(np.abs(result.data - _naive_guided(p, guide, 2, 1e-3))) <= 1e-6
    print("✓ Matches per-window regression")

    constant = np.full((6, 6), 0.4)
    assert np.allclose(guided(constant, np.full((6, 6), 0.7), 2, 1e-3), 0.4)
    assert np.allclose(guided(guide, guide, 2, 0.0), guide, atol=1e-6)
    print("✓ Constants and self-guidance are fixed points")

    with pytest.raises(ValueError):
        guided_filter(ImageGray(p), ImageGray(guide), 2, -1.0)
    with pytest.raises(DimensionMismatchError):
        guided_filter(ImageGray(p), ImageGray(guide[:, :10]), 2, 1e-3)


def test_pyramids():
    """Laplacian pyramids reconstruct exactly; depth is bounded by the size."""
    print("\n=== Testing Pyramids ===")

    rng = np.random.default_rng(3)
    img = ImageGray(rng.uniform(size=(21, 34)))

    gaussian = build_pyramid(img, 4)
    assert [level.shape for level in gaussian] == [(21, 34), (11, 17), (6, 9), (3, 5)]

    laplacian = laplacian_pyramid(img, 4)
    assert np.allclose(collapse_pyramid(laplacian).data, img.data, atol=1e-12)
    print("✓ Collapse inverts the Laplacian pyramid")

    assert np.allclose(upsample(np.full((3, 5), 0.2), (6, 9)), 0.2)
    assert max_pyramid_levels((1, 1)) == 1
    assert max_pyramid_levels((21, 34)) == 6
    with pytest.raises(EstimationError):
        gaussian_pyramid(img.data, 7)
    with pytest.raises(ValueError):
        gaussian_pyramid(img.data, 0)
    print("✓ Pyramid depth limits enforced")


def test_kernels_on_random_images():
    """Min, max, median and box kernels on many random sizes and radii."""
    print("\n=== Testing Kernels on Random Images ===")

    rng = np.random.default_rng(5)
    start = time.perf_counter()
    for case in range(ORACLE_CASES):
        height, width = (int(n) for n in rng.integers(1, 33, size=2))
        radius = int(rng.integers(1, 4))
        array = rng.uniform(size=(height, width))
        levels = rng.integers(0, 256, size=(height, width))

        windows = _windows(array, radius)
        assert np.array_equal(min_filter(array, radius), windows.min(axis=(2, 3))), case
        assert np.array_equal(max_filter(array, radius), windows.max(axis=(2, 3))), case
        assert np.allclose(mean_filter(array, radius), windows.mean(axis=(2, 3)), atol=1e-10), case
        assert np.array_equal(median_filter(levels, radius), np.median(_windows(levels, radius), axis=(2, 3))), case
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(f"✓ {ORACLE_CASES} random images match the window oracles in {elapsed:.1f}s")


def test_guided_identities_at_size():
    """Self-guidance with eps 0 is the identity; a constant guide reduces to two box passes."""
    print("\n=== Testing Guided Filter Identities ===")

    rng = np.random.default_rng(6)
    for radius in (1, 2, 4):
        p = rng.uniform(size=(64, 64))
        guide = rng.uniform(size=(64, 64))
        assert np.max(np.abs(guided(guide, guide, radius, 0.0) - guide)) <= 1e-6
        flat = np.full((64, 64), float(rng.uniform()))
        double_box = mean_filter(mean_filter(p, radius), radius)
        assert np.max(np.abs(guided(p, flat, radius, 1e-3) - double_box)) <= 1e-6
    print("✓ 64x64 identities hold for radii 1, 2 and 4")


def main():
    """Run all tests."""
    print("Underwater Image Quality Bench - Filter Tests")
    print("=" * 50)

    test_min_max_filters()
    test_box_and_median()
    test_guided_filter()
    test_pyramids()
    test_kernels_on_random_images()
    test_guided_identities_at_size()

    print("\n🎉 ALL FILTER TESTS PASSED!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
