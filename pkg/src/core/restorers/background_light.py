"""
Background-light estimation.

Each BlMethod picks a pixel, averages a pixel set or blends candidate lights chosen by the
priors. Ties always resolve to the smallest row-major pixel index.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit

from ..config import PriorConstants
from ..exceptions import EstimationError
from ..filters import min_filter
from ..imaging import LUMA_WEIGHTS, ImageRGB, WindowSpec
from ..priors import (DepthMap, blurriness_map, dark_channel, mip_map, red_inverted_dark, ulap_depth,
                      underwater_dark_channel)


logger = logging.getLogger(__name__)

TOP_FRACTION = 0.001
RCP_FRACTION = 0.1
FUSION_CANDIDATES_EPS = 1e-6
QUADTREE_MIN_SIDE = 16


class BlMethod(Enum):
    """Background-light strategies; values are the CLI names."""
    DCP_BRIGHTEST = "dcp-bright"
    DCP_TOP01 = "dcp-top01"
    DCP_MIP_DIFF = "dcp-mip"
    MIP = "mip"
    MIP_AVG = "mip-avg"
    UDCP = "udcp"
    RCP_TOP10 = "rcp-top10"
    BLUR_TOP01_AVG = "blur-top01"
    FUSION = "fusion"
    ULAP = "ulap"
    DARK_DIFF = "dark-diff"
    IBLA = "ibla"


@dataclass(frozen=True)
class BackgroundLight:
    """Global veiling light B = (r, g, b) in [0, 1]."""
    r: float
    g: float
    b: float
    source: str = ""
    pixel: Optional[Tuple[int, int]] = None   # (x, y) of the chosen pixel

    def __post_init__(self):
        for name in ('r', 'g', 'b'):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < -1e-9 or value > 1.0 + 1e-9:
                raise ValueError(f"Background light component {name}={value} outside [0, 1]")
            object.__setattr__(self, name, min(max(value, 0.0), 1.0))

    @property
    def rgb(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b])

    @classmethod
    def from_array(cls, values, source: str = "", pixel: Optional[Tuple[int, int]] = None) -> "BackgroundLight":
        return cls(float(values[0]), float(values[1]), float(values[2]), source, pixel)

    def to_8bit(self) -> Tuple[int, int, int]:
        return tuple(int(np.floor(v * 255.0 + 0.5)) for v in (self.r, self.g, self.b))


def top_count(n_pixels: int, fraction: float) -> int:
    """k = max(1, round(fraction * N)), rounding half up."""
    return max(1, int(np.floor(fraction * n_pixels + 0.5)))


def top_indices(values: np.ndarray, fraction: float) -> np.ndarray:
    """Flat indices of the k largest values, ties by smallest index."""
    flat = values.ravel()
    order = np.argsort(-flat, kind='stable')
    return order[:top_count(flat.size, fraction)]


def _argmax_among(indices: np.ndarray, score: np.ndarray) -> int:
    indices = np.sort(indices)
    return int(indices[np.argmax(score.ravel()[indices])])


def _pixel_light(img: ImageRGB, flat_index: int, method: BlMethod) -> BackgroundLight:
    y, x = divmod(flat_index, img.width)
    logger.debug(f"{method.value}: selected pixel ({x}, {y})")
    return BackgroundLight.from_array(img.data[y, x], method.value, (x, y))


def _mean_light(img: ImageRGB, indices: np.ndarray, method: BlMethod) -> BackgroundLight:
    pixels = img.data.reshape(-1, 3)[indices]
    logger.debug(f"{method.value}: averaged {len(indices)} pixels")
    return BackgroundLight.from_array(pixels.mean(axis=0), method.value)


def _dark_diff_map(img: ImageRGB, win: WindowSpec) -> np.ndarray:
    data = img.data
    red = min_filter(data[:, :, 0], win.radius)
    green_blue = np.maximum(min_filter(data[:, :, 1], win.radius), min_filter(data[:, :, 2], win.radius))
    return red - green_blue


def _fuse(candidates: List[BackgroundLight]) -> np.ndarray:
    """Weight each candidate by its inverse mean distance to the others."""
    colors = np.array([c.rgb for c in candidates])
    distances = np.array([
        np.mean([np.abs(colors[i] - colors[j]).mean() for j in range(len(colors)) if j != i])
        for i in range(len(colors))
    ])
    weights = 1.0 / (distances + FUSION_CANDIDATES_EPS)
    weights /= weights.sum()
    logger.debug(f"fusion weights: {np.round(weights, 4).tolist()}")
    return weights @ colors


def quadtree_region(score: np.ndarray, pick: str, min_side: int = QUADTREE_MIN_SIDE) -> Tuple[slice, slice]:
    """
    Repeatedly keep the quadrant with the lowest ("min") or highest ("max") mean score.

    Quadrants are compared in the order top-left, top-right, bottom-left,
    bottom-right and the first wins a tie. Splitting stops once a quadrant
    would be shorter than min_side on either axis.
    """
    reduce = np.argmin if pick == "min" else np.argmax
    y0, y1, x0, x1 = 0, score.shape[0], 0, score.shape[1]
    while (y1 - y0) // 2 >= min_side and (x1 - x0) // 2 >= min_side:
        ym, xm = (y0 + y1) // 2, (x0 + x1) // 2
        quadrants = [(y0, ym, x0, xm), (y0, ym, xm, x1), (ym, y1, x0, xm), (ym, y1, xm, x1)]
        y0, y1, x0, x1 = quadrants[int(reduce([score[a:b, c:d].mean() for a, b, c, d in quadrants]))]
    return slice(y0, y1), slice(x0, x1)


def ibla_candidates(img: ImageRGB, win: WindowSpec, consts: PriorConstants) -> np.ndarray:
    """
    Three candidate lights, one per row: the blurriest 0.1% of pixels, the
    flattest quadtree region of the gray image and the blurriest quadtree region.
    """
    pixels = img.data.reshape(-1, 3)
    blur = blurriness_map(img, consts, win).data
    gray = img.data @ LUMA_WEIGHTS
    variance = (gray - gray.mean()) ** 2

    blurriest = pixels[top_indices(blur, TOP_FRACTION)].mean(axis=0)
    rows, cols = quadtree_region(variance, "min")
    flattest = img.data[rows, cols].reshape(-1, 3).mean(axis=0)
    rows, cols = quadtree_region(blur, "max")
    blurry_region = img.data[rows, cols].reshape(-1, 3).mean(axis=0)
    return np.array([blurriest, flattest, blurry_region])


def ibla_light(img: ImageRGB, win: WindowSpec, consts: PriorConstants) -> np.ndarray:
    """
    Per channel, alpha * max + (1 - alpha) * min of the candidates.

    alpha rises steeply once the share of pixels brighter than
    ibla_brightness_center passes ibla_bright_fraction, so bright scenes
    take the brightest candidate and dim scenes the darkest.
    """
    candidates = ibla_candidates(img, win, consts)
    bright_share = (img.data > consts.ibla_brightness_center).reshape(-1, 3).mean(axis=0)
    alpha = expit(consts.ibla_gain * (bright_share - consts.ibla_bright_fraction))
    logger.debug(f"ibla alpha per channel: {np.round(alpha, 4).tolist()}")
    return alpha * candidates.max(axis=0) + (1.0 - alpha) * candidates.min(axis=0)


def estimate_background_light(img: ImageRGB,
                              method: BlMethod,
                              win: WindowSpec,
                              consts: PriorConstants,
                              depth: Optional[DepthMap] = None) -> BackgroundLight:
    """
    Estimate the background light with one prior strategy.

    Args:
        img: Degraded image
        method: Selection strategy
        win: Prior window
        consts: Prior constants
        depth: Optional depth map replacing the ULAP estimate

    Returns:
        BackgroundLight with the selected pixel when the method picks one
    """
    method = BlMethod(method)
    if not win.fits(img.shape):
        raise EstimationError(f"Image {img.width}x{img.height} smaller than a {win.size}x{win.size} window")

    brightness = img.data.sum(axis=2)

    if method == BlMethod.DCP_BRIGHTEST:
        return _pixel_light(img, int(np.argmax(dark_channel(img, win).data)), method)

    if method == BlMethod.DCP_TOP01:
        candidates = top_indices(dark_channel(img, win).data, TOP_FRACTION)
        return _pixel_light(img, _argmax_among(candidates, brightness), method)

    if method == BlMethod.DCP_MIP_DIFF:
        data = img.data
        difference = np.maximum(data[:, :, 2] - data[:, :, 1], data[:, :, 1] - data[:, :, 0])
        candidates = top_indices(dark_channel(img, win).data, TOP_FRACTION)
        return _pixel_light(img, _argmax_among(candidates, difference), method)

    if method == BlMethod.MIP:
        return _pixel_light(img, int(np.argmin(mip_map(img, win).data)), method)

    if method == BlMethod.MIP_AVG:
        mip = mip_map(img, win).data.ravel()
        return _mean_light(img, np.flatnonzero(mip == mip.min()), method)

    if method == BlMethod.UDCP:
        return _pixel_light(img, int(np.argmax(underwater_dark_channel(img, win).data)), method)

    if method == BlMethod.RCP_TOP10:
        candidates = top_indices(red_inverted_dark(img, win).data, RCP_FRACTION)
        return _pixel_light(img, _argmax_among(candidates, brightness), method)

    if method == BlMethod.BLUR_TOP01_AVG:
        return _mean_light(img, top_indices(dark_channel(img, win).data, TOP_FRACTION), method)

    if method == BlMethod.ULAP:
        depth_map = depth if depth is not None else ulap_depth(img, consts)
        return _mean_light(img, top_indices(depth_map.data, TOP_FRACTION), method)

    if method == BlMethod.DARK_DIFF:
        return _pixel_light(img, int(np.argmin(_dark_diff_map(img, win))), method)

    if method == BlMethod.IBLA:
        return BackgroundLight.from_array(ibla_light(img, win, consts), method.value)

    # FUSION
    candidates = [estimate_background_light(img, m, win, consts, depth)
                  for m in (BlMethod.DCP_TOP01, BlMethod.MIP, BlMethod.ULAP)]
    return BackgroundLight.from_array(_fuse(candidates), method.value)


def rank_bl_candidates(img: ImageRGB,
                       consts: PriorConstants,
                       win: Optional[WindowSpec] = None) -> List[Tuple[BlMethod, BackgroundLight]]:
    """Run every BlMethod, in enum order."""
    win = win or WindowSpec()
    return [(method, estimate_background_light(img, method, win, consts)) for method in BlMethod]
