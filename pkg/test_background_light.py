#!/usr/bin/env python3
"""
Tests for background-light estimation.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core.config import PriorConstants
from core.exceptions import EstimationError
from core.imaging import ImageRGB, WindowSpec
from core.priors import DepthMap
from core.restorers import BackgroundLight, BlMethod, estimate_background_light, rank_bl_candidates
from core.restorers.background_light import ibla_candidates, ibla_light, quadtree_region, top_count, top_indices

CONSTS = PriorConstants()

WHITE = (1.0, 1.0, 1.0)
CYAN = (0.1, 0.8, 0.9)

AVERAGING = {BlMethod.MIP_AVG, BlMethod.BLUR_TOP01_AVG, BlMethod.ULAP, BlMethod.FUSION, BlMethod.IBLA}
# quadtree regions depend on where pixels sit
SPATIAL = {BlMethod.IBLA}


def two_region_image(with_cyan=False):
    """20x20: dim upper half, (0.2, 0.3, 0.3) lower half, white 4x4 block top-left."""
    data = np.empty((20, 20, 3))
    data[:10] = (0.3, 0.4, 0.5)
    data[10:] = (0.2, 0.3, 0.3)
    data[:4, :4] = WHITE
    if with_cyan:
        data[12:16, 12:16] = CYAN
    return ImageRGB(data)


def test_two_region_examples():
    """Brightest dark channel finds the white block; MIP finds the cyan block."""
    print("\n=== Testing Two-Region Examples ===")

    win = WindowSpec(1)
    light = estimate_background_light(two_region_image(), BlMethod.DCP_BRIGHTEST, win, CONSTS)
    assert light.rgb.tolist() == list(WHITE)
    assert light.pixel == (0, 0)
    print("✓ DcpBrightest selects the white block")

    img = two_region_image(with_cyan=True)
    assert estimate_background_light(img, BlMethod.DCP_BRIGHTEST, win, CONSTS).rgb.tolist() == list(WHITE)
    mip = estimate_background_light(img, BlMethod.MIP, win, CONSTS)
    assert np.allclose(mip.rgb, CYAN)
    assert 12 <= mip.pixel[0] <= 15 and 12 <= mip.pixel[1] <= 15
    print("✓ Mip selects inside the cyan block")

    ranked = dict(rank_bl_candidates(img, CONSTS, win))
    assert not np.allclose(ranked[BlMethod.DCP_BRIGHTEST].rgb, ranked[BlMethod.MIP].rgb)


def test_constant_image():
    """Every method returns the constant color."""
    print("\n=== Testing Constant Image ===")

    img = ImageRGB(np.full((20, 20, 3), 0.45))
    ranked = rank_bl_candidates(img, CONSTS, WindowSpec(3))
    assert len(ranked) == len(BlMethod) == 12
    assert [method for method, _ in ranked] == list(BlMethod)
    for method, light in ranked:
        assert np.allclose(light.rgb, 0.45), method
    print(f"✓ All {len(ranked)} methods return (v, v, v)")


def test_selected_colors_come_from_image():
    """Pixel selectors return image colors; averages stay inside the color hull."""
    print("\n=== Testing Selection Properties ===")

    img = ImageRGB(np.random.default_rng(0).uniform(0.05, 0.95, size=(24, 30, 3)))
    pixels = img.data.reshape(-1, 3)
    for method in BlMethod:
        light = estimate_background_light(img, method, WindowSpec(2), CONSTS)
        if method in AVERAGING:
            assert np.all(light.rgb >= pixels.min(axis=0) - 1e-12), method
            assert np.all(light.rgb <= pixels.max(axis=0) + 1e-12), method
        else:
            assert np.any(np.all(pixels == light.rgb, axis=1)), method
            x, y = light.pixel
            assert np.array_equal(img.data[y, x], light.rgb)
    print("✓ Selected colors are image pixels")


def test_permutation_invariance():
    """With a zero-radius window, shuffling pixels does not change any estimate."""
    print("\n=== Testing Permutation Invariance ===")

    rng = np.random.default_rng(1)
    data = rng.uniform(0.05, 0.95, size=(20, 20, 3))
    shuffled = data.reshape(-1, 3)[rng.permutation(400)].reshape(20, 20, 3)
    win = WindowSpec(0)
    for method in set(BlMethod) - SPATIAL:
        a = estimate_background_light(ImageRGB(data), method, win, CONSTS)
        b = estimate_background_light(ImageRGB(shuffled), method, win, CONSTS)
        assert np.allclose(a.rgb, b.rgb, atol=1e-12), method
    print("✓ Pixel-set methods are permutation invariant at radius 0")


def test_top_selection():
    """Top-k counting and tie-breaking."""
    print("\n=== Testing Top-k Selection ===")

    assert top_count(400, 0.001) == 1
    assert top_count(2000, 0.001) == 2
    assert top_count(1500, 0.001) == 2
    assert top_count(240000, 0.001) == 240
    assert top_indices(np.array([0.5, 0.9, 0.9, 0.1]), 0.5).tolist() == [1, 2]
    assert top_indices(np.array([0.2, 0.7, 0.7]), 0.001).tolist() == [1]
    assert sorted(top_indices(np.arange(10.0), 1.0).tolist()) == list(range(10))
    print("✓ Top-k sizes and ties by smallest index")


def test_injected_depth_and_errors():
    """ULAP uses an injected depth; oversized windows are rejected."""
    print("\n=== Testing Depth Injection and Errors ===")

    data = np.full((20, 20, 3), 0.3)
    data[19, 19] = (0.1, 0.6, 0.7)
    depth = np.zeros((20, 20))
    depth[19, 19] = 1.0
    light = estimate_background_light(ImageRGB(data), BlMethod.ULAP, WindowSpec(1), CONSTS, DepthMap(depth))
    assert np.allclose(light.rgb, (0.1, 0.6, 0.7))
    print("✓ ULAP follows the injected depth")

    with pytest.raises(EstimationError):
        estimate_background_light(ImageRGB(np.full((10, 10, 3), 0.5)), BlMethod.DCP_BRIGHTEST,
                                  WindowSpec(7), CONSTS)
    with pytest.raises(ValueError):
        estimate_background_light(two_region_image(), "unknown", WindowSpec(1), CONSTS)
    with pytest.raises(ValueError):
        BackgroundLight(1.2, 0.5, 0.5)
    assert BackgroundLight(0.2, 0.6, 0.8).to_8bit() == (51, 153, 204)
    print("✓ Errors and 8-bit conversion working")


def test_ibla_blend():
    """Quadtree regions and the brightness-driven blend of candidate lights."""
    print("\n=== Testing IBLA Blend ===")

    score = np.zeros((64, 64))
    score[32:48, 48:64] = 1.0
    assert quadtree_region(score, "max") == (slice(32, 48), slice(48, 64))
    assert quadtree_region(score, "min") == (slice(0, 16), slice(0, 16))
    assert quadtree_region(np.zeros((20, 40)), "min") == (slice(0, 20), slice(0, 40))
    print("✓ Quadtree keeps the extreme quadrant, first on ties")

    rng = np.random.default_rng(4)
    win = WindowSpec(2)
    bright = ImageRGB(rng.uniform(0.55, 0.95, size=(64, 64, 3)))
    dim = ImageRGB(rng.uniform(0.05, 0.45, size=(64, 64, 3)))

    candidates = ibla_candidates(bright, win, CONSTS)
    assert candidates.shape == (3, 3)
    assert np.allclose(ibla_light(bright, win, CONSTS), candidates.max(axis=0), atol=1e-9)
    candidates = ibla_candidates(dim, win, CONSTS)
    assert np.allclose(ibla_light(dim, win, CONSTS), candidates.min(axis=0), atol=2e-3)
    print("✓ Bright scenes take the brightest candidate, dim scenes the darkest")

    mixed = ImageRGB(rng.uniform(0.05, 0.95, size=(64, 64, 3)))
    candidates = ibla_candidates(mixed, win, CONSTS)
    light = estimate_background_light(mixed, BlMethod.IBLA, win, CONSTS)
    assert np.all(light.rgb >= candidates.min(axis=0) - 1e-12)
    assert np.all(light.rgb <= candidates.max(axis=0) + 1e-12)
    assert np.allclose(light.rgb, ibla_light(mixed, win, CONSTS))
    assert light.source == "ibla" and light.pixel is None
    print("✓ Blend stays between the candidates")


def main():
    """Run all tests."""
    print("Underwater Image Quality Bench - Background Light Tests")
    print("=" * 55)

    test_two_region_examples()
    test_constant_image()
    test_selected_colors_come_from_image()
    test_permutation_invariance()
    test_top_selection()
    test_injected_depth_and_errors()
    test_ibla_blend()

    print("\n🎉 ALL BACKGROUND LIGHT TESTS PASSED!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
