"""
Image quality metrics.

No-reference: entropy, UCIQE and UIQM (with their components).
Full-reference: PSNR, used by round-trip checks.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import ndimage

from .config import MetricWeights
from .imaging import ImageRGB, quantize, require_same_shape, rgb_to_hsv, rgb_to_lab, to_gray


logger = logging.getLogger(__name__)

BLOCK_SIZE = 8
UICM_TRIM = 0.1
UICM_MEAN_WEIGHT = -0.0268
UICM_SPREAD_WEIGHT = 0.1586
UISM_CHANNEL_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class UciqeComponents:
    sigma_c: float
    con_l: float
    mu_s: float


@dataclass(frozen=True)
class UiqmComponents:
    uicm: float
    uism: float
    uiconm: float


@dataclass(frozen=True)
class MetricRow:
    """Every metric of one image; brisque and niqe are reserved and stay None."""
    entropy: float
    uciqe: float
    uiqm: float
    sigma_c: float
    con_l: float
    mu_s: float
    uicm: float
    uism: float
    uiconm: float
    brisque: Optional[float] = None
    niqe: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)


def entropy(img: ImageRGB) -> float:
    """Shannon entropy (bits) of the 256-bin gray-level histogram."""
    levels = quantize(to_gray(img).data)
    p = np.bincount(levels.ravel(), minlength=256) / levels.size
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def uciqe(img: ImageRGB, w: MetricWeights) -> Tuple[float, UciqeComponents]:
    """
    Underwater color image quality evaluation.

    Args:
        img: Image to score
        w: Weights (c1, c2, c3)

    Returns:
        (score, components) with sigma_c the chroma standard deviation and
        con_l the 1st-99th percentile lightness spread, both scaled by 1/100,
        and mu_s the mean HSV saturation
    """
    lab = rgb_to_lab(img.data)
    chroma = np.hypot(lab[:, :, 1], lab[:, :, 2])
    sigma_c = float(np.std(chroma)) / 100.0
    low, high = np.percentile(lab[:, :, 0], [1.0, 99.0])
    con_l = float(high - low) / 100.0
    mu_s = float(rgb_to_hsv(img.data)[:, :, 1].mean())

    c1, c2, c3 = w.uciqe
    return c1 * sigma_c + c2 * con_l + c3 * mu_s, UciqeComponents(sigma_c, con_l, mu_s)


def _trimmed_stats(values: np.ndarray, alpha: float) -> Tuple[float, float]:
    """Alpha-trimmed mean and the variance around it."""
    ordered = np.sort(values.ravel())
    n = ordered.size
    low = int(math.ceil(alpha * n))
    high = n - int(math.floor(alpha * n))
    mean = float(ordered[low:high].mean()) if high > low else float(ordered.mean())
    return mean, float(np.mean((ordered - mean) ** 2))


def uicm(rgb255: np.ndarray) -> float:
    rg = rgb255[:, :, 0] - rgb255[:, :, 1]
    yb = 0.5 * (rgb255[:, :, 0] + rgb255[:, :, 1]) - rgb255[:, :, 2]
    mean_rg, var_rg = _trimmed_stats(rg, UICM_TRIM)
    mean_yb, var_yb = _trimmed_stats(yb, UICM_TRIM)
    return (UICM_MEAN_WEIGHT * math.sqrt(mean_rg ** 2 + mean_yb ** 2)
            + UICM_SPREAD_WEIGHT * math.sqrt(var_rg + var_yb))


def _blocks(array: np.ndarray, size: int = BLOCK_SIZE) -> Tuple[np.ndarray, np.ndarray]:
    """Per-block max and min; partial edge blocks are padded by replication."""
    height, width = array.shape
    pad_h, pad_w = -height % size, -width % size
    padded = np.pad(array, ((0, pad_h), (0, pad_w)), mode='edge')
    shaped = padded.reshape(padded.shape[0] // size, size, padded.shape[1] // size, size)
    return shaped.max(axis=(1, 3)), shaped.min(axis=(1, 3))


def eme(array: np.ndarray) -> float:
    """Measure of enhancement: 2/k sum log(max/min); blocks with a zero minimum count as 0."""
    high, low = _blocks(array)
    valid = low > 0
    ratios = np.ones_like(high)
    ratios[valid] = high[valid] / low[valid]
    return float(2.0 / high.size * np.sum(np.log(ratios)))


def uism(rgb255: np.ndarray) -> float:
    total = 0.0
    for c, weight in enumerate(UISM_CHANNEL_WEIGHTS):
        channel = rgb255[:, :, c]
        magnitude = np.hypot(ndimage.sobel(channel, axis=0, mode='nearest'),
                             ndimage.sobel(channel, axis=1, mode='nearest'))
        total += weight * eme(channel * magnitude / 255.0)
    return total


def uiconm(gray255: np.ndarray) -> float:
    """Block log-AMEE contrast: -1/k sum c log c with c = (max - min) / (max + min)."""
    high, low = _blocks(gray255)
    spread, total = high - low, high + low
    contrast = np.divide(spread, total, out=np.zeros_like(spread), where=total > 0)
    terms = np.zeros_like(contrast)
    positive = contrast > 0
    terms[positive] = contrast[positive] * np.log(contrast[positive])
    return float(-terms.sum() / contrast.size) + 0.0     # flat images give +0.0, not -0.0


def uiqm(img: ImageRGB, w: MetricWeights) -> Tuple[float, UiqmComponents]:
    """Underwater image quality measure on the 0-255 scale: colorfulness, sharpness and contrast."""
    rgb255 = img.data * 255.0
    components = UiqmComponents(uicm(rgb255), uism(rgb255), uiconm(to_gray(img).data * 255.0))
    w1, w2, w3 = w.uiqm
    return w1 * components.uicm + w2 * components.uism + w3 * components.uiconm, components


def psnr(a: ImageRGB, b: ImageRGB) -> float:
    """Peak signal-to-noise ratio in dB for unit peak; identical images give math.inf."""
    require_same_shape(a.shape, b.shape)
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def measure(img: ImageRGB, w: MetricWeights) -> MetricRow:
    """All no-reference metrics of one image."""
    uciqe_score, uc = uciqe(img, w)
    uiqm_score, uq = uiqm(img, w)
    return MetricRow(
        entropy=entropy(img),
        uciqe=uciqe_score,
        uiqm=uiqm_score,
        sigma_c=uc.sigma_c,
        con_l=uc.con_l,
        mu_s=uc.mu_s,
        uicm=uq.uicm,
        uism=uq.uism,
        uiconm=uq.uiconm,
    )
