"""
IFM-based restoration: background light, transmission and radiance recovery.
"""

from .background_light import BackgroundLight, BlMethod, estimate_background_light, rank_bl_candidates
from .transmission import (TmMethod, TransmissionMaps, attenuation_ratios, estimate_transmission,
                           refine_tm, wavelength_extend)
from .pipelines import PIPELINES, COMPARED_PIPELINES, RestorationPipeline, get_pipeline, recover_radiance, restore

__all__ = [
    'BackgroundLight', 'BlMethod', 'estimate_background_light', 'rank_bl_candidates',
    'TmMethod', 'TransmissionMaps', 'attenuation_ratios', 'estimate_transmission', 'refine_tm', 'wavelength_extend',
    'PIPELINES', 'COMPARED_PIPELINES', 'RestorationPipeline', 'get_pipeline', 'recover_radiance', 'restore',
]
