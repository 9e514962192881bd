"""
Radiance recovery and the named restoration pipelines.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..config import PriorConstants
from ..imaging import ImageRGB, WindowSpec, require_same_shape
from ..priors import DepthMap
from .background_light import BackgroundLight, BlMethod, estimate_background_light
from .transmission import TmMethod, TransmissionMaps, estimate_transmission, refine_tm


logger = logging.getLogger(__name__)

PostEnhance = Callable[[ImageRGB], ImageRGB]


@dataclass(frozen=True)
class RestorationPipeline:
    """A background-light strategy paired with a transmission strategy."""
    name: str
    bl_method: BlMethod
    tm_method: TmMethod
    refine: bool = False
    t_floor: float = 0.1
    guided_radius: int = 20
    guided_eps: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.t_floor < 1.0:
            raise ValueError(f"t_floor must lie in (0, 1), got {self.t_floor}")
        object.__setattr__(self, 'bl_method', BlMethod(self.bl_method))
        object.__setattr__(self, 'tm_method', TmMethod(self.tm_method))


PIPELINES: Dict[str, RestorationPipeline] = {
    pipeline.name: pipeline for pipeline in (
        RestorationPipeline("sir", BlMethod.DCP_BRIGHTEST, TmMethod.DCP),
        RestorationPipeline("rir", BlMethod.DCP_TOP01, TmMethod.DCP_MEDIAN),
        RestorationPipeline("iuid", BlMethod.MIP, TmMethod.MIP),
        RestorationPipeline("teoui", BlMethod.UDCP, TmMethod.UDCP),
        RestorationPipeline("nom", BlMethod.DCP_MIP_DIFF, TmMethod.NOM_RED),
        RestorationPipeline("rcp", BlMethod.RCP_TOP10, TmMethod.RCP),
        RestorationPipeline("ibla", BlMethod.IBLA, TmMethod.IBLA),
        RestorationPipeline("ulap", BlMethod.ULAP, TmMethod.ULAP),
        RestorationPipeline("wcid", BlMethod.DCP_BRIGHTEST, TmMethod.WAVELENGTH_RATIO),
        RestorationPipeline("iop", BlMethod.DCP_MIP_DIFF, TmMethod.WAVELENGTH_RATIO),
        RestorationPipeline("mip-udcp", BlMethod.MIP_AVG, TmMethod.UDCP),
    )
}

# The eight methods of the comparison set; the rest are extras.
COMPARED_PIPELINES = ("sir", "rir", "iuid", "teoui", "nom", "rcp", "ibla", "ulap")


def get_pipeline(name: str) -> RestorationPipeline:
    try:
        return PIPELINES[name.lower()]
    except KeyError:
        raise ValueError(f"Unknown restoration pipeline '{name}'; expected one of {sorted(PIPELINES)}") from None


def recover_radiance(img: ImageRGB, B: BackgroundLight, tm: TransmissionMaps, t_floor: float) -> ImageRGB:
    """J = (I - B) / max(t, t_floor) + B, clamped to [0, 1]."""
    if not 0.0 < t_floor < 1.0:
        raise ValueError(f"t_floor must lie in (0, 1), got {t_floor}")
    require_same_shape(img.shape[:2], tm.shape)

    light = B.rgb
    t = np.maximum(tm.stack(), t_floor)
    return ImageRGB.clipped((img.data - light) / t + light)


def restore(img: ImageRGB,
            pipeline: RestorationPipeline,
            win: WindowSpec,
            consts: PriorConstants,
            depth: Optional[DepthMap] = None,
            bl: Optional[BackgroundLight] = None,
            tm: Optional[TransmissionMaps] = None,
            post_enhance: Optional[PostEnhance] = None) -> Tuple[ImageRGB, BackgroundLight, TransmissionMaps]:
    """
    Run one restoration pipeline end to end.

    Args:
        img: Degraded image
        pipeline: Strategy pair plus refinement and floor settings
        win: Prior window
        consts: Prior constants
        depth: Optional depth injected into ULAP/IBLA estimation
        bl: Optional known background light replacing the estimate
        tm: Optional known transmission replacing the estimate
        post_enhance: Optional enhancer run on the recovered image

    Returns:
        (restored image, background light, transmission maps)
    """
    light = bl if bl is not None else estimate_background_light(img, pipeline.bl_method, win, consts, depth)
    logger.debug(f"{pipeline.name}: B = {np.round(light.rgb, 4).tolist()} ({light.source or 'given'})")

    maps = tm if tm is not None else estimate_transmission(img, light, pipeline.tm_method, win, consts, depth)
    if pipeline.refine and tm is None:
        maps = refine_tm(maps, img, pipeline.guided_radius, pipeline.guided_eps)

    restored = recover_radiance(img, light, maps, pipeline.t_floor)
    if post_enhance is not None:
        restored = post_enhance(restored)
    return restored, light, maps
