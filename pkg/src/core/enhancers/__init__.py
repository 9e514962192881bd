"""
IFM-free enhancers and a name-based dispatcher.
"""

import logging
from enum import Enum
from typing import Optional

from ..config import EnhanceSettings
from ..imaging import ImageRGB
from .color_models import icm, rghs, ucm
from .fusion import fusion_enhance
from .histogram import clahe, he, rayleigh_stretch


logger = logging.getLogger(__name__)


class EnhanceMethod(Enum):
    """Enhancement methods; values are the CLI names."""
    HE = "he"
    CLAHE = "clahe"
    ICM = "icm"
    UCM = "ucm"
    RAYLEIGH = "rayleigh"
    RGHS = "rghs"
    FUSION = "fusion"


def enhance(img: ImageRGB, method, settings: Optional[EnhanceSettings] = None) -> ImageRGB:
    """Run one enhancer with its parameters taken from settings."""
    method = EnhanceMethod(method)
    settings = settings or EnhanceSettings()
    logger.debug(f"enhance: {method.value}")

    if method == EnhanceMethod.HE:
        return he(img)
    if method == EnhanceMethod.CLAHE:
        return clahe(img, settings.clahe_clip, settings.clahe_tiles, settings.clahe_mode)
    if method == EnhanceMethod.ICM:
        return icm(img, settings.stretch_percentile)
    if method == EnhanceMethod.UCM:
        return ucm(img, settings.stretch_percentile, settings.ucm_range_threshold)
    if method == EnhanceMethod.RAYLEIGH:
        return rayleigh_stretch(img, settings.rayleigh_sigma)
    if method == EnhanceMethod.RGHS:
        return rghs(img, settings)
    return fusion_enhance(img, settings.fusion_levels, settings)


__all__ = ['EnhanceMethod', 'enhance', 'he', 'clahe', 'icm', 'ucm', 'rayleigh_stretch', 'rghs', 'fusion_enhance']
