"""
Window kernels, box and guided filters, and image pyramids.

Min/max windows use the van Herk / Gil-Werman block decomposition: each
separable pass costs a constant number of comparisons per pixel whatever the
radius. Box means use integral images. All borders replicate the edge pixel.
"""

import logging
from typing import List

import numpy as np
from scipy import ndimage

from .exceptions import EstimationError
from .imaging import ImageGray, WindowSpec, require_same_shape


logger = logging.getLogger(__name__)

PYRAMID_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _extremum_1d(array: np.ndarray, radius: int, axis: int, reduce: np.ufunc) -> np.ndarray:
    """Running min/max along one axis in O(1) amortized comparisons per sample."""
    if radius == 0:
        return array.copy()
    moved = np.moveaxis(array, axis, -1)
    n = moved.shape[-1]
    width = 2 * radius + 1

    padded = np.pad(moved, [(0, 0)] * (moved.ndim - 1) + [(radius, radius)], mode='edge')
    blocks = -(-padded.shape[-1] // width)
    tail = blocks * width - padded.shape[-1]
    padded = np.pad(padded, [(0, 0)] * (moved.ndim - 1) + [(0, tail)], mode='edge')

    shaped = padded.reshape(moved.shape[:-1] + (blocks, width))
    prefix = reduce.accumulate(shaped, axis=-1).reshape(padded.shape)
    suffix = np.flip(reduce.accumulate(np.flip(shaped, axis=-1), axis=-1), axis=-1).reshape(padded.shape)

    # window [i, i + width) = suffix of its first block + prefix of the next
    result = reduce(suffix[..., :n], prefix[..., width - 1:width - 1 + n])
    return np.moveaxis(result, -1, axis)


def min_filter(array: np.ndarray, radius: int) -> np.ndarray:
    """Windowed minimum over the (2r+1)^2 square of a 2-D array."""
    return _extremum_1d(_extremum_1d(array, radius, 0, np.minimum), radius, 1, np.minimum)


def max_filter(array: np.ndarray, radius: int) -> np.ndarray:
    return _extremum_1d(_extremum_1d(array, radius, 0, np.maximum), radius, 1, np.maximum)


def window_sum(array: np.ndarray, radius: int) -> np.ndarray:
    """Windowed sum via an integral image over the replicate-padded array."""
    padded = np.pad(array, radius, mode='edge')
    integral = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.result_type(array, np.float64))
    integral[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)

    h, w = array.shape
    size = 2 * radius + 1
    return (integral[size:size + h, size:size + w] - integral[:h, size:size + w]
            - integral[size:size + h, :w] + integral[:h, :w])


def mean_filter(array: np.ndarray, radius: int) -> np.ndarray:
    return window_sum(array, radius) / float((2 * radius + 1) ** 2)


def median_filter(levels: np.ndarray, radius: int) -> np.ndarray:
    """
    Windowed median of an 8-bit level map.

    Threshold counting: for each level k from the map's minimum upward, one
    integral-image pass counts the window pixels with value <= k. A pixel's
    median is the first k whose count reaches the window midpoint. Each pass
    is O(1) per pixel whatever the radius, so the cost is O(N * L) where L is
    the number of levels between the minimum and the highest median, at most
    256. The loop stops once every pixel has its median.
    """
    levels = np.asarray(levels)
    half = ((2 * radius + 1) ** 2) // 2 + 1
    result = np.full(levels.shape, -1, dtype=np.int32)

    for level in range(int(levels.min()), int(levels.max()) + 1):
        counts = window_sum((levels <= level).astype(np.int64), radius)
        reached = (counts >= half) & (result < 0)
        result[reached] = level
        if not np.any(result < 0):
            break
    return result


def guided(p: np.ndarray, guide: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Guided filter on arrays: per-window regression of p on guide."""
    mean_guide = mean_filter(guide, radius)
    mean_p = mean_filter(p, radius)
    variance = mean_filter(guide * guide, radius) - mean_guide * mean_guide
    covariance = mean_filter(guide * p, radius) - mean_guide * mean_p

    denominator = variance + eps
    a = np.divide(covariance, denominator, out=np.zeros_like(covariance), where=denominator > 0)
    b = mean_p - a * mean_guide
    return mean_filter(a, radius) * guide + mean_filter(b, radius)


def window_min(img: ImageGray, win: WindowSpec) -> ImageGray:
    return ImageGray(min_filter(img.data, win.radius))


def window_max(img: ImageGray, win: WindowSpec) -> ImageGray:
    return ImageGray(max_filter(img.data, win.radius))


def window_median(img: ImageGray, win: WindowSpec) -> ImageGray:
    """Median over the window of the 8-bit-quantized map, returned as level/255."""
    levels = np.clip(np.floor(img.data * 255.0 + 0.5), 0, 255).astype(np.int32)
    return ImageGray(median_filter(levels, win.radius) / 255.0)


def box_filter(img: ImageGray, win: WindowSpec) -> ImageGray:
    return ImageGray(mean_filter(img.data, win.radius))


def guided_filter(p: ImageGray, guide: ImageGray, radius: int, eps: float) -> ImageGray:
    """
    Edge-preserving smoothing of p steered by guide.

    Args:
        p: Map to filter
        guide: Guide map with the same dimensions
        radius: Window radius
        eps: Regularizer added to the guide variance (>= 0)

    Returns:
        q = mean(a) * guide + mean(b) with a = cov/(var + eps), b = mean(p) - a * mean(guide)
    """
    require_same_shape(p.shape, guide.shape)
    if eps < 0:
        raise ValueError(f"Guided filter eps must be >= 0, got {eps}")
    return ImageGray(guided(p.data, guide.data, int(radius), float(eps)))


# --- pyramids -------------------------------------------------------------

def _downsample(array: np.ndarray) -> np.ndarray:
    blurred = ndimage.convolve1d(array, PYRAMID_KERNEL, axis=0, mode='nearest')
    blurred = ndimage.convolve1d(blurred, PYRAMID_KERNEL, axis=1, mode='nearest')
    return blurred[::2, ::2]


def _upsample_axis(array: np.ndarray, size: int, axis: int) -> np.ndarray:
    moved = np.moveaxis(array, axis, 0)
    n = moved.shape[0]
    nxt = moved[np.minimum(np.arange(n) + 1, n - 1)]
    out = np.empty((2 * n,) + moved.shape[1:], dtype=moved.dtype)
    out[0::2] = moved
    out[1::2] = 0.5 * (moved + nxt)
    return np.moveaxis(out[:size], 0, axis)


def upsample(array: np.ndarray, shape) -> np.ndarray:
    """Double a pyramid level back to the given shape; constants are preserved."""
    return _upsample_axis(_upsample_axis(array, shape[0], 0), shape[1], 1)


def max_pyramid_levels(shape) -> int:
    levels, h, w = 1, shape[0], shape[1]
    while h > 1 and w > 1:
        h, w = -(-h // 2), -(-w // 2)
        levels += 1
    return levels


def gaussian_pyramid(array: np.ndarray, levels: int) -> List[np.ndarray]:
    if levels < 1:
        raise ValueError(f"Pyramid needs at least one level, got {levels}")
    if levels > max_pyramid_levels(array.shape):
        raise EstimationError(f"{levels} pyramid levels too deep for a {array.shape[1]}x{array.shape[0]} image")
    pyramid = [array]
    for _ in range(levels - 1):
        pyramid.append(_downsample(pyramid[-1]))
    return pyramid


def laplacian_from_gaussian(gaussian: List[np.ndarray]) -> List[np.ndarray]:
    laplacian = [fine - upsample(coarse, fine.shape) for fine, coarse in zip(gaussian[:-1], gaussian[1:])]
    laplacian.append(gaussian[-1])
    return laplacian


def collapse(laplacian: List[np.ndarray]) -> np.ndarray:
    result = laplacian[-1]
    for level in reversed(laplacian[:-1]):
        result = level + upsample(result, level.shape)
    return result


def build_pyramid(img: ImageGray, levels: int) -> List[ImageGray]:
    """Gaussian pyramid, finest level first."""
    return [ImageGray(level) for level in gaussian_pyramid(img.data, levels)]


def laplacian_pyramid(img: ImageGray, levels: int) -> List[ImageGray]:
    """Band-pass levels plus the coarsest Gaussian level last."""
    return [ImageGray(level) for level in laplacian_from_gaussian(gaussian_pyramid(img.data, levels))]


def collapse_pyramid(pyramid: List[ImageGray]) -> ImageGray:
    return ImageGray(collapse([level.data for level in pyramid]))
