"""
Transmission-map estimation, wavelength extension and guided refinement.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from ..config import PriorConstants
from ..exceptions import EstimationError
from ..filters import guided, max_filter, median_filter, min_filter
from ..imaging import ImageGray, ImageRGB, WindowSpec, rgb_to_hsv, require_same_shape, to_gray
from ..priors import DepthMap, blurriness_map, mip_map, normalize_map, ulap_depth
from .background_light import TOP_FRACTION, BackgroundLight, top_indices


logger = logging.getLogger(__name__)

MIN_LIGHT = 1e-6


class TmMethod(Enum):
    """Transmission strategies; values are the CLI names."""
    DCP = "dcp"
    DCP_MEDIAN = "dcp-median"
    UDCP = "udcp"
    MIP = "mip"
    RCP = "rcp"
    NOM_RED = "nom-red"
    BLURRINESS = "blurriness"
    ULAP = "ulap"
    IBLA = "ibla"
    WAVELENGTH_RATIO = "wavelength-ratio"


@dataclass(frozen=True, eq=False)
class TransmissionMaps:
    """Per-channel transmission t^r, t^g, t^b in [0, 1]."""
    t_r: ImageGray
    t_g: ImageGray
    t_b: ImageGray
    method: str = ""
    refined: bool = False

    def __post_init__(self):
        require_same_shape(self.t_r.shape, self.t_g.shape, self.t_b.shape)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.t_r.shape

    def stack(self) -> np.ndarray:
        """(H, W, 3) array in RGB order."""
        return np.stack([self.t_r.data, self.t_g.data, self.t_b.data], axis=-1)

    @classmethod
    def from_channels(cls, t_r: np.ndarray, t_g: np.ndarray, t_b: np.ndarray,
                      method: str = "", refined: bool = False) -> "TransmissionMaps":
        return cls(*(ImageGray(np.clip(t, 0.0, 1.0)) for t in (t_r, t_g, t_b)), method, refined)

    @classmethod
    def uniform(cls, t: np.ndarray, method: str = "") -> "TransmissionMaps":
        """One map copied to all three channels."""
        return cls.from_channels(t, t, t, method)


def _require_light(B: BackgroundLight, channels: Tuple[int, ...], method: TmMethod) -> np.ndarray:
    light = B.rgb
    if np.any(light[list(channels)] <= MIN_LIGHT):
        raise EstimationError(f"{method.value} divides by background light {light.tolist()}, which has a zero channel")
    return light


def attenuation_ratios(B: BackgroundLight, consts: PriorConstants) -> Tuple[float, float]:
    """
    Attenuation ratios beta_g/beta_r and beta_b/beta_r from the background light.

    beta_c / beta_r = B_r (m * lambda_c + i) / (B_c (m * lambda_r + i))
    """
    m, i = consts.atten_ratio_params
    lam_r, lam_g, lam_b = consts.wavelengths
    light = B.rgb
    if np.any(light <= MIN_LIGHT):
        raise EstimationError(f"Attenuation ratios need a non-zero background light, got {light.tolist()}")
    ratio_g = light[0] * (m * lam_g + i) / (light[1] * (m * lam_r + i))
    ratio_b = light[0] * (m * lam_b + i) / (light[2] * (m * lam_r + i))
    return float(ratio_g), float(ratio_b)


def wavelength_extend(t_r: ImageGray, ratios: Tuple[float, float]) -> Tuple[ImageGray, ImageGray]:
    """Green/blue transmission as t_r raised to the attenuation ratios."""
    if min(ratios) <= 0:
        raise ValueError(f"Attenuation ratios must be positive, got {ratios}")
    base = np.clip(t_r.data, 0.0, 1.0)
    return ImageGray(base ** ratios[0]), ImageGray(base ** ratios[1])


def _dcp_map(img: ImageRGB, light: np.ndarray, win: WindowSpec, channels: slice) -> np.ndarray:
    ratio = (img.data[:, :, channels] / light[channels]).min(axis=2)
    return 1.0 - min_filter(ratio, win.radius)


def _ibla_depth(img: ImageRGB, win: WindowSpec, consts: PriorConstants) -> np.ndarray:
    d_mip = normalize_map(-mip_map(img, win).data, degenerate=0.5)
    d_red = 1.0 - max_filter(img.data[:, :, 0], win.radius)
    d_blur = blurriness_map(img, consts, win).data

    brightness = img.data.mean(axis=2).ravel()
    top = top_indices(brightness, TOP_FRACTION)
    theta_a = float(expit(consts.ibla_gain * (float(brightness[top].mean()) - consts.ibla_brightness_center)))
    theta_b = float(expit(consts.ibla_gain * (float(img.data[:, :, 0].mean()) - consts.ibla_red_center)))
    logger.debug(f"ibla selectors theta_a={theta_a:.4f} theta_b={theta_b:.4f}")
    depth = theta_b * (theta_a * d_mip + (1.0 - theta_a) * d_red) + (1.0 - theta_b) * d_blur
    return np.clip(depth, 0.0, 1.0)


def _power_maps(depth: np.ndarray, consts: PriorConstants, method: TmMethod) -> TransmissionMaps:
    n_r, n_g, n_b = consts.nrer
    return TransmissionMaps.from_channels(n_r ** depth, n_g ** depth, n_b ** depth, method.value)


def estimate_transmission(img: ImageRGB,
                          B: BackgroundLight,
                          method: TmMethod,
                          win: WindowSpec,
                          consts: PriorConstants,
                          depth: Optional[DepthMap] = None) -> TransmissionMaps:
    """
    Estimate per-channel transmission maps.

    Args:
        img: Degraded image
        B: Background light
        method: Transmission strategy
        win: Prior window
        consts: Prior constants
        depth: Optional depth injected in place of the ULAP/IBLA estimate

    Returns:
        Maps clamped to [0, 1] with the image dimensions
    """
    method = TmMethod(method)
    if depth is not None:
        require_same_shape(img.shape, depth.shape)
    data = img.data

    if method in (TmMethod.DCP, TmMethod.WAVELENGTH_RATIO):
        light = _require_light(B, (0, 1, 2), method)
        t = _dcp_map(img, light, win, slice(0, 3))
        if method == TmMethod.DCP:
            return TransmissionMaps.uniform(t, method.value)
        t_r = ImageGray(np.clip(t, 0.0, 1.0))
        t_g, t_b = wavelength_extend(t_r, attenuation_ratios(B, consts))
        return TransmissionMaps.from_channels(t_r.data, t_g.data, t_b.data, method.value)

    if method == TmMethod.DCP_MEDIAN:
        light = _require_light(B, (0, 1, 2), method)
        ratio = np.clip((data / light).min(axis=2), 0.0, 1.0)
        levels = np.floor(ratio * 255.0 + 0.5).astype(np.int32)
        return TransmissionMaps.uniform(1.0 - median_filter(levels, win.radius) / 255.0, method.value)

    if method == TmMethod.UDCP:
        light = _require_light(B, (1, 2), method)
        return TransmissionMaps.uniform(_dcp_map(img, light, win, slice(1, 3)), method.value)

    if method == TmMethod.MIP:
        mip = mip_map(img, win).data
        shift = 1.0 - (mip.max() if consts.mip_shift == "max" else mip.min())
        logger.debug(f"mip shift ({consts.mip_shift}) = {shift:.4f}")
        return TransmissionMaps.uniform(mip + shift, method.value)

    if method == TmMethod.RCP:
        light = _require_light(B, (1, 2), method)
        if 1.0 - light[0] <= MIN_LIGHT:
            raise EstimationError("rcp divides by 1 - B_r, but the red background light is 1")
        blue_green = min_filter((data[:, :, 1:] / light[1:]).min(axis=2), win.radius)
        saturation = consts.rcp_lambda * min_filter(rgb_to_hsv(data)[:, :, 1], win.radius)
        inverted_red = min_filter((1.0 - data[:, :, 0]) / (1.0 - light[0]), win.radius)
        t_r = ImageGray(np.clip(1.0 - np.minimum(np.minimum(blue_green, saturation), inverted_red), 0.0, 1.0))
        t_g, t_b = wavelength_extend(t_r, attenuation_ratios(B, consts))
        return TransmissionMaps.from_channels(t_r.data, t_g.data, t_b.data, method.value)

    if method == TmMethod.NOM_RED:
        light = _require_light(B, (1, 2), method)
        t_gb = np.clip(_dcp_map(img, light, win, slice(1, 3)), 0.0, 1.0)
        red_max = max_filter(data[:, :, 0], win.radius)
        if red_max.mean() <= 0.0:
            logger.warning("nom-red: red channel is empty, reusing the green/blue map for red")
            t_r = t_gb
        else:
            tau = t_gb.mean() / red_max.mean()
            t_r = tau * red_max
        return TransmissionMaps.from_channels(t_r, t_gb, t_gb, method.value)

    if method == TmMethod.BLURRINESS:
        return TransmissionMaps.uniform(1.0 - blurriness_map(img, consts, win).data, method.value)

    if method == TmMethod.ULAP:
        d = depth.data if depth is not None else ulap_depth(img, consts).data
        return _power_maps(d, consts, method)

    # IBLA
    d = depth.data if depth is not None else _ibla_depth(img, win, consts)
    return _power_maps(d, consts, method)


def refine_tm(tm: TransmissionMaps, guide: ImageRGB, radius: int, eps: float) -> TransmissionMaps:
    """Guided-filter each channel against the gray guide; clamp to [0, 1]."""
    require_same_shape(tm.shape, guide.shape)
    gray = to_gray(guide).data
    refined = [guided(t.data, gray, int(radius), float(eps)) for t in (tm.t_r, tm.t_g, tm.t_b)]
    return TransmissionMaps.from_channels(*refined, method=tm.method, refined=True)
