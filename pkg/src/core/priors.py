"""
Prior maps used by background-light and transmission estimation.

Dark channel (all channels and green/blue only), maximum intensity prior,
red-inverted dark channel, blurriness and the ULAP relative depth.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .config import PriorConstants
from .filters import guided, max_filter, min_filter
from .imaging import ImageGray, ImageRGB, WindowSpec, LUMA_WEIGHTS


logger = logging.getLogger(__name__)

# spreads below this are rounding noise of a flat map
FLAT_SPREAD = 1e-12


@dataclass(frozen=True, eq=False)
class DepthMap:
    """Relative scene depth in [0, 1], 1 = farthest."""
    data: np.ndarray

    def __post_init__(self):
        array = ImageGray(self.data).data
        if array.min() < 0.0 or array.max() > 1.0:
            raise ValueError(f"Depth values outside [0, 1]: [{array.min()}, {array.max()}]")
        object.__setattr__(self, 'data', array)

    @property
    def shape(self):
        return self.data.shape


def normalize_map(array: np.ndarray, degenerate: float) -> np.ndarray:
    """Min-max normalize to [0, 1]; a flat map becomes the degenerate constant."""
    low, high = float(array.min()), float(array.max())
    if high - low <= FLAT_SPREAD:
        logger.debug(f"Degenerate normalization, returning constant {degenerate}")
        return np.full(array.shape, degenerate, dtype=np.float64)
    return (array - low) / (high - low)


def dark_channel(img: ImageRGB, win: WindowSpec) -> ImageGray:
    return ImageGray(min_filter(img.data.min(axis=2), win.radius))


def underwater_dark_channel(img: ImageRGB, win: WindowSpec) -> ImageGray:
    """Dark channel over green and blue only."""
    return ImageGray(min_filter(img.data[:, :, 1:].min(axis=2), win.radius))


def mip_map(img: ImageRGB, win: WindowSpec) -> ImageGray:
    """Windowed max of red minus windowed max of green/blue, in [-1, 1]."""
    red = max_filter(img.data[:, :, 0], win.radius)
    blue_green = max_filter(img.data[:, :, 1:].max(axis=2), win.radius)
    return ImageGray(red - blue_green)


def red_inverted_dark(img: ImageRGB, win: WindowSpec) -> ImageGray:
    """Dark channel of (1 - R, G, B)."""
    data = img.data
    per_pixel = np.minimum(1.0 - data[:, :, 0], data[:, :, 1:].min(axis=2))
    return ImageGray(min_filter(per_pixel, win.radius))


def blurriness_map(img: ImageRGB,
                   consts: PriorConstants,
                   win: Optional[WindowSpec] = None,
                   refine: bool = True,
                   guided_radius: int = 20,
                   guided_eps: float = 1e-3) -> ImageGray:
    """
    Multi-scale blurriness of the gray image.

    Args:
        img: Input image
        consts: Prior constants (blur_scales)
        win: Closing window; defaults to radius 7
        refine: Apply grey closing and guided filtering after normalization
        guided_radius: Guided filter radius for the smoothing step
        guided_eps: Guided filter regularizer

    Returns:
        Map in [0, 1]; larger means blurrier (farther)
    """
    win = win or WindowSpec(7)
    gray = img.data @ LUMA_WEIGHTS

    difference = np.zeros_like(gray)
    for radius in consts.blur_scales:
        blurred = ndimage.gaussian_filter(gray, sigma=radius / 2.0, truncate=2.0, mode='nearest')
        difference += np.abs(gray - blurred)
    blur = normalize_map(difference / len(consts.blur_scales), degenerate=0.0)

    if not refine:
        return ImageGray(blur)

    closed = ndimage.grey_closing(blur, size=(win.size, win.size), mode='nearest')
    smoothed = guided(closed, gray, guided_radius, guided_eps)
    return ImageGray(np.clip(smoothed, 0.0, 1.0))


def ulap_raw(img: ImageRGB, consts: PriorConstants) -> np.ndarray:
    mu0, mu1, mu2 = consts.ulap_coeffs
    data = img.data
    return mu0 + mu1 * data[:, :, 1:].max(axis=2) + mu2 * data[:, :, 0]


def ulap_depth(img: ImageRGB, consts: PriorConstants) -> DepthMap:
    """Linear ULAP depth on max(G, B) and R, min-max normalized (flat -> 0.5)."""
    return DepthMap(normalize_map(ulap_raw(img, consts), degenerate=0.5))
