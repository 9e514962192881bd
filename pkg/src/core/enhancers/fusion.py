"""
Two-input multi-scale fusion enhancer.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..config import EnhanceSettings
from ..filters import collapse, gaussian_pyramid, laplacian_from_gaussian
from ..imaging import LUMA_WEIGHTS, ImageRGB, rgb_to_lab
from .histogram import clahe, keeps_constant


logger = logging.getLogger(__name__)

EXPOSEDNESS_MEAN = 0.5
EXPOSEDNESS_SIGMA = 0.25
SALIENCY_BLUR_SIGMA = 1.0
KNOWN_CUES = ("contrast", "saliency", "exposedness")


def gray_world(img: ImageRGB) -> ImageRGB:
    """Scale each channel so its mean equals the mean of the three channel means."""
    means = img.data.reshape(-1, 3).mean(axis=0)
    gains = np.divide(means.mean(), means, out=np.ones(3), where=means > 0)
    return ImageRGB.clipped(img.data * gains)


def contrast_cue(img: ImageRGB) -> np.ndarray:
    return np.abs(ndimage.laplace(img.data @ LUMA_WEIGHTS, mode='nearest'))


def saliency_cue(img: ImageRGB) -> np.ndarray:
    """Lab distance of the blurred image from its mean color, in units of 100."""
    lab = rgb_to_lab(img.data)
    blurred = np.stack([ndimage.gaussian_filter(lab[:, :, k], SALIENCY_BLUR_SIGMA, truncate=2.0, mode='nearest')
                        for k in range(3)], axis=-1)
    mean = lab.reshape(-1, 3).mean(axis=0)
    return np.linalg.norm(blurred - mean, axis=-1) / 100.0


def exposedness_cue(img: ImageRGB) -> np.ndarray:
    luminance = img.data @ LUMA_WEIGHTS
    return np.exp(-(luminance - EXPOSEDNESS_MEAN) ** 2 / (2.0 * EXPOSEDNESS_SIGMA ** 2))


_CUES = {"contrast": contrast_cue, "saliency": saliency_cue, "exposedness": exposedness_cue}


def fusion_weights(first: ImageRGB, second: ImageRGB,
                   cues: Sequence[str] = KNOWN_CUES) -> Tuple[np.ndarray, np.ndarray]:
    """Per-pixel weights of the two inputs, summing to 1 (0.5 each where both cues vanish)."""
    unknown = [cue for cue in cues if cue not in _CUES]
    if unknown or not cues:
        raise ValueError(f"Fusion cues must be a non-empty subset of {KNOWN_CUES}, got {list(cues)}")

    raw = [sum(_CUES[cue](img) for cue in cues) for img in (first, second)]
    total = raw[0] + raw[1]
    w_first = np.divide(raw[0], total, out=np.full(total.shape, 0.5), where=total > 0)
    return w_first, 1.0 - w_first


@keeps_constant
def fusion_enhance(img: ImageRGB, levels: int = 5, settings: Optional[EnhanceSettings] = None) -> ImageRGB:
    """
    Fuse a white-balanced and a contrast-enhanced version of the input.

    Args:
        img: Input image
        levels: Pyramid depth, at least 1
        settings: Cue set, CLAHE parameters and the contrast-input bypass

    Returns:
        Fused image clamped to [0, 1]
    """
    if levels < 1:
        raise ValueError(f"Fusion needs at least one pyramid level, got {levels}")
    settings = settings or EnhanceSettings()

    first = gray_world(img)
    if settings.fusion_bypass_contrast_input:
        second = first
    else:
        second = clahe(first, settings.clahe_clip, settings.clahe_tiles, settings.clahe_mode)

    weights = fusion_weights(first, second, settings.fusion_cues)
    weight_pyramids = [gaussian_pyramid(w, levels) for w in weights]

    fused = np.empty_like(img.data)
    for c in range(3):
        blended = None
        for source, weight_pyramid in zip((first, second), weight_pyramids):
            bands = laplacian_from_gaussian(gaussian_pyramid(source.channel(c), levels))
            weighted = [w * band for w, band in zip(weight_pyramid, bands)]
            blended = weighted if blended is None else [a + b for a, b in zip(blended, weighted)]
        fused[:, :, c] = collapse(blended)
    return ImageRGB.clipped(fused)
