"""
Color-model stretching enhancers: ICM, UCM and RGHS.
"""

import logging
from typing import Optional

import numpy as np

from ..config import EnhanceSettings
from ..imaging import ImageRGB, hsi_to_rgb, lab_to_rgb, rgb_to_hsi, rgb_to_lab
from .histogram import keeps_constant


logger = logging.getLogger(__name__)


def percentile_stretch(values: np.ndarray, percent: float) -> np.ndarray:
    """Affine map of the percent / (100 - percent) percentiles onto [0, 1], clamped."""
    if not 0.0 <= percent < 50.0:
        raise ValueError(f"Stretch percentile must lie in [0, 50), got {percent}")
    low, high = np.percentile(values, [percent, 100.0 - percent])
    if high - low <= 0.0:
        return values
    return np.clip((values - low) / (high - low), 0.0, 1.0)


def _stretch_hsi(rgb: np.ndarray, percent: float) -> ImageRGB:
    hsi = rgb_to_hsi(rgb)
    hsi[:, :, 1] = percentile_stretch(hsi[:, :, 1], percent)
    hsi[:, :, 2] = percentile_stretch(hsi[:, :, 2], percent)
    return ImageRGB.clipped(hsi_to_rgb(hsi))


@keeps_constant
def icm(img: ImageRGB, p: float = 0.2) -> ImageRGB:
    """Integrated color model: per-channel RGB stretch, then HSI saturation and intensity stretch."""
    stretched = np.stack([percentile_stretch(img.channel(c), p) for c in range(3)], axis=-1)
    return _stretch_hsi(stretched, p)


def von_kries_gains(rgb: np.ndarray) -> np.ndarray:
    """Gains that lift each channel mean to the largest channel mean."""
    means = rgb.reshape(-1, 3).mean(axis=0)
    return np.divide(means.max(), means, out=np.ones(3), where=means > 0)


@keeps_constant
def ucm(img: ImageRGB, p: float = 0.2, range_threshold: float = 0.9) -> ImageRGB:
    """
    Unsupervised color correction.

    Von Kries gain equalization, then a stretch of only the channels whose
    dynamic range stays below range_threshold, then the HSI stretch of icm.
    """
    gains = von_kries_gains(img.data)
    logger.debug(f"ucm gains: {np.round(gains, 4).tolist()}")
    balanced = np.clip(img.data * gains, 0.0, 1.0)

    channels = []
    for c in range(3):
        channel = balanced[:, :, c]
        if channel.max() - channel.min() < range_threshold:
            channel = percentile_stretch(channel, p)
        channels.append(channel)
    return _stretch_hsi(np.stack(channels, axis=-1), p)


# --- RGHS -----------------------------------------------------------------

def _relative_stretch(channel: np.ndarray, tail: float, strength: float) -> np.ndarray:
    """Map the tail percentiles to bounds pushed toward 0 and 1 by strength."""
    low, high = np.percentile(channel, [tail, 100.0 - tail])
    if high - low <= 0.0:
        return channel
    out_low = low * (1.0 - strength)
    out_high = high + (1.0 - high) * strength
    return np.clip(out_low + (channel - low) * (out_high - out_low) / (high - low), 0.0, 1.0)


def _lab_stage(rgb: np.ndarray, tail: float, curve: float) -> np.ndarray:
    lab = rgb_to_lab(rgb)
    lightness = lab[:, :, 0]
    low, high = np.percentile(lightness, [tail, 100.0 - tail])
    if high > low:
        lab[:, :, 0] = np.clip((lightness - low) * 100.0 / (high - low), 0.0, 100.0)

    # mild chroma expansion: gain 1 + curve at neutral, tapering toward |v| = 128
    for k in (1, 2):
        v = lab[:, :, k]
        lab[:, :, k] = v * (1.0 + curve - curve * np.minimum(np.abs(v) / 128.0, 1.0))
    return lab_to_rgb(lab)


@keeps_constant
def rghs(img: ImageRGB, settings: Optional[EnhanceSettings] = None) -> ImageRGB:
    """
    Relative global histogram stretching.

    Args:
        img: Input image
        settings: Tail percentile, per-channel strengths and the Lab stage switch

    Returns:
        Enhanced image in [0, 1]
    """
    settings = settings or EnhanceSettings()
    data = img.data.copy()

    means = data.reshape(-1, 3).mean(axis=0)
    target = 0.5 * (means[1] + means[2])
    for c in (1, 2):
        if means[c] > 0:
            data[:, :, c] = np.clip(data[:, :, c] * target / means[c], 0.0, 1.0)

    strengths = (settings.rghs_red_strength, settings.rghs_gb_strength, settings.rghs_gb_strength)
    data = np.stack([_relative_stretch(data[:, :, c], settings.rghs_tail, strengths[c]) for c in range(3)], axis=-1)

    if settings.rghs_lab_stage:
        data = _lab_stage(data, settings.rghs_tail, settings.rghs_curve)
    return ImageRGB.clipped(data)
