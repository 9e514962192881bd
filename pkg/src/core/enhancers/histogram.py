"""
Histogram-based enhancers: global equalization, CLAHE and Rayleigh stretching.

Every mapping is computed on 256 quantized levels and applied per channel
(or on the HSV value channel for CLAHE's default mode).
"""

import functools
import logging
from typing import Callable, Tuple

import numpy as np

from ..exceptions import EstimationError
from ..imaging import ImageRGB, hsv_to_rgb, quantize, rgb_to_hsv


logger = logging.getLogger(__name__)

LEVELS = 256


def is_constant(img: ImageRGB) -> bool:
    """True when every channel holds a single value."""
    data = img.data
    return bool(np.all(data.max(axis=(0, 1)) == data.min(axis=(0, 1))))


def keeps_constant(func: Callable[..., ImageRGB]) -> Callable[..., ImageRGB]:
    """Enhancers leave a constant image untouched."""
    @functools.wraps(func)
    def wrapper(img: ImageRGB, *args, **kwargs) -> ImageRGB:
        if is_constant(img):
            logger.debug(f"{func.__name__}: constant image, returned unchanged")
            return img
        return func(img, *args, **kwargs)
    return wrapper


def to_levels(channel: np.ndarray) -> np.ndarray:
    return quantize(channel).astype(np.intp)


def equalization_lut(levels: np.ndarray) -> np.ndarray:
    """256-entry HE lookup in [0, 1], rounded to 8 bits. levels must hold at least two values."""
    cdf = np.cumsum(np.bincount(levels.ravel(), minlength=LEVELS)) / levels.size
    cdf_min = cdf[levels.min()]
    return np.floor(255.0 * (cdf - cdf_min) / (1.0 - cdf_min) + 0.5).clip(0, 255) / 255.0


def _equalize_channel(channel: np.ndarray) -> np.ndarray:
    levels = to_levels(channel)
    if levels.min() == levels.max():
        return channel
    return equalization_lut(levels)[levels]


@keeps_constant
def he(img: ImageRGB) -> ImageRGB:
    """Per-channel global histogram equalization."""
    return ImageRGB(np.stack([_equalize_channel(img.channel(c)) for c in range(3)], axis=-1))


# --- CLAHE ----------------------------------------------------------------

def _tile_lut(levels: np.ndarray, clip_limit: float) -> np.ndarray:
    hist = np.bincount(levels.ravel(), minlength=LEVELS).astype(np.float64)
    if np.isfinite(clip_limit):
        limit = clip_limit * levels.size / LEVELS
        excess = np.maximum(hist - limit, 0.0).sum()
        hist = np.minimum(hist, limit) + excess / LEVELS

    cdf = np.cumsum(hist) / hist.sum()
    cdf_min = cdf[cdf > 0].min()
    if cdf_min >= 1.0:
        return np.arange(LEVELS) / 255.0
    return np.clip((cdf - cdf_min) / (1.0 - cdf_min), 0.0, 1.0)


def _tile_coordinates(size: int, tiles: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Tile bounds plus, for every pixel, its two neighbouring tile centers and weight."""
    bounds = np.array([chunk[0] for chunk in np.array_split(np.arange(size), tiles)] + [size])
    centers = (bounds[:-1] + bounds[1:] - 1) / 2.0
    position = np.interp(np.arange(size), centers, np.arange(tiles, dtype=np.float64))
    low = np.floor(position).astype(np.intp)
    high = np.minimum(low + 1, tiles - 1)
    return bounds, low, high, position - low


def clahe_levels(levels: np.ndarray, clip: float, tiles: Tuple[int, int]) -> np.ndarray:
    """
    Contrast-limited adaptive equalization of a 2-D level map.

    Args:
        levels: Integer levels 0..255
        clip: Clip limit relative to the mean bin height (inf disables clipping)
        tiles: Tile grid (nx, ny)

    Returns:
        Equalized map in [0, 1], bilinearly blended between tile centers
    """
    nx, ny = tiles
    height, width = levels.shape
    if nx > width or ny > height:
        raise EstimationError(f"CLAHE grid {nx}x{ny} larger than a {width}x{height} image")

    rows, row_low, row_high, row_w = _tile_coordinates(height, ny)
    cols, col_low, col_high, col_w = _tile_coordinates(width, nx)

    luts = np.empty((ny, nx, LEVELS))
    for i in range(ny):
        for j in range(nx):
            luts[i, j] = _tile_lut(levels[rows[i]:rows[i + 1], cols[j]:cols[j + 1]], clip)

    r0, r1 = row_low[:, None], row_high[:, None]
    c0, c1 = col_low[None, :], col_high[None, :]
    wy, wx = row_w[:, None], col_w[None, :]
    return ((1 - wy) * ((1 - wx) * luts[r0, c0, levels] + wx * luts[r0, c1, levels])
            + wy * ((1 - wx) * luts[r1, c0, levels] + wx * luts[r1, c1, levels]))


@keeps_constant
def clahe(img: ImageRGB, clip: float = 2.0, tiles: Tuple[int, int] = (8, 8), mode: str = "hsv") -> ImageRGB:
    """CLAHE on the HSV value channel, or on each RGB channel in "rgb" mode."""
    if clip <= 0:
        raise ValueError(f"CLAHE clip limit must be > 0, got {clip}")
    if min(tiles) < 1:
        raise ValueError(f"CLAHE tile grid must be at least 1x1, got {tiles}")

    if mode == "rgb":
        return ImageRGB.clipped(np.stack(
            [clahe_levels(to_levels(img.channel(c)), clip, tiles) for c in range(3)], axis=-1))

    hsv = rgb_to_hsv(img.data)
    hsv[:, :, 2] = clahe_levels(to_levels(hsv[:, :, 2]), clip, tiles)
    return ImageRGB.clipped(hsv_to_rgb(hsv))


# --- Rayleigh -------------------------------------------------------------

def rayleigh_inverse_cdf(u: np.ndarray, sigma: float) -> np.ndarray:
    """Inverse of the Rayleigh CDF truncated to [0, 1] and renormalized."""
    mass = 1.0 - np.exp(-1.0 / (2.0 * sigma * sigma))
    return np.sqrt(-2.0 * sigma * sigma * np.log1p(-np.clip(u, 0.0, 1.0) * mass))


def rayleigh_cdf(x: np.ndarray, sigma: float) -> np.ndarray:
    mass = 1.0 - np.exp(-1.0 / (2.0 * sigma * sigma))
    return (1.0 - np.exp(-np.asarray(x) ** 2 / (2.0 * sigma * sigma))) / mass


def _rayleigh_channel(channel: np.ndarray, sigma: float) -> np.ndarray:
    levels = to_levels(channel)
    if levels.min() == levels.max():
        return channel
    cdf = np.cumsum(np.bincount(levels.ravel(), minlength=LEVELS)) / levels.size
    return rayleigh_inverse_cdf(cdf, sigma)[levels]


@keeps_constant
def rayleigh_stretch(img: ImageRGB, sigma: float = 0.4) -> ImageRGB:
    """Per-channel histogram specification to a Rayleigh distribution."""
    if sigma <= 0:
        raise ValueError(f"Rayleigh sigma must be > 0, got {sigma}")
    return ImageRGB.clipped(np.stack([_rayleigh_channel(img.channel(c), sigma) for c in range(3)], axis=-1))
