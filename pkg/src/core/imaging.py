"""
Image containers, file I/O, resampling and color-space conversions.

Pixels are stored as float64 in [0, 1]; quantization to 8 bits happens only
when an image is written to disk.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import DimensionMismatchError, ImageFormatError


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SUPPORTED_FORMATS = {'PNG', 'JPEG'}
SUFFIX_FORMATS = {'.png': 'PNG', '.jpg': 'JPEG', '.jpeg': 'JPEG'}

# ITU-R BT.601 luma, the same weights Pillow uses for mode "L"
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

RANGE_TOLERANCE = 1e-9


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ImageRGB:
    """H x W x 3 linear-intensity image with every component in [0, 1]."""
    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float64)
        if array.ndim != 3 or array.shape[2] != 3:
            raise DimensionMismatchError(f"ImageRGB needs shape (H, W, 3), got {array.shape}")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise DimensionMismatchError("ImageRGB must be at least 1x1")
        if not np.all(np.isfinite(array)):
            raise ValueError("ImageRGB contains non-finite values")
        if array.min() < -RANGE_TOLERANCE or array.max() > 1.0 + RANGE_TOLERANCE:
            raise ValueError(f"ImageRGB values outside [0, 1]: [{array.min()}, {array.max()}]")
        np.clip(array, 0.0, 1.0, out=array)
        object.__setattr__(self, 'data', _readonly(array))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def channel(self, index: int) -> np.ndarray:
        return self.data[:, :, index]

    @classmethod
    def clipped(cls, array: np.ndarray) -> "ImageRGB":
        """Build an image from an unbounded array by clamping to [0, 1]."""
        return cls(np.clip(array, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class ImageGray:
    """
    H x W scalar map.

    Intensity maps live in [0, 1]; signed prior maps (MIP) are allowed to go
    negative, so only finiteness is enforced here.
    """
    data: np.ndarray

    def __post_init__(self):
        array = np.array(self.data, dtype=np.float64)
        if array.ndim != 2:
            raise DimensionMismatchError(f"ImageGray needs shape (H, W), got {array.shape}")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise DimensionMismatchError("ImageGray must be at least 1x1")
        if not np.all(np.isfinite(array)):
            raise ValueError("ImageGray contains non-finite values")
        object.__setattr__(self, 'data', _readonly(array))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]


@dataclass(frozen=True)
class WindowSpec:
    """Square (2r+1) x (2r+1) window centered on each pixel, replicate borders."""
    radius: int = 7

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 0:
            raise ValueError(f"Window radius must be a non-negative integer, got {self.radius}")
        object.__setattr__(self, 'radius', int(self.radius))

    @property
    def size(self) -> int:
        return 2 * self.radius + 1

    def fits(self, shape: Tuple[int, int]) -> bool:
        return shape[0] >= self.size and shape[1] >= self.size


class ColorSpace(Enum):
    """Target spaces for convert_color."""
    HSV = "hsv"
    HSI = "hsi"
    LAB = "lab"


def require_same_shape(*shapes: Tuple[int, ...]) -> None:
    first = tuple(shapes[0])[:2]
    for shape in shapes[1:]:
        if tuple(shape)[:2] != first:
            raise DimensionMismatchError(f"Dimension mismatch: {first} vs {tuple(shape)[:2]}")


# --- file I/O -------------------------------------------------------------

def quantize(array: np.ndarray) -> np.ndarray:
    """Round-half-up to 8-bit levels, clamped to [0, 255]."""
    return np.clip(np.floor(np.asarray(array) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def load_image(path: PathLike) -> ImageRGB:
    """
    Load a PNG or JPEG file as an ImageRGB.

    Args:
        path: Image file path

    Returns:
        Image with 8-bit values mapped to [0, 1] by v/255
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format not in SUPPORTED_FORMATS:
                raise ImageFormatError(f"Unsupported image format {img.format} for {path}")
            if img.width == 0 or img.height == 0:
                raise ImageFormatError(f"Zero-size image: {path}")
            rgb = img.convert('RGB')
            array = np.asarray(rgb, dtype=np.float64) / 255.0
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        raise ImageFormatError(f"Cannot read {path}: {e}") from e
    except (UnidentifiedImageError, OSError) as e:
        raise ImageFormatError(f"Failed to decode {path}: {e}") from e

    logger.debug(f"Loaded {path} ({array.shape[1]}x{array.shape[0]})")
    return ImageRGB(array)


def _format_for(path: Path) -> str:
    image_format = SUFFIX_FORMATS.get(path.suffix.lower())
    if image_format is None:
        raise ImageFormatError(f"Unsupported output suffix: {path.suffix}")
    return image_format


def _write(pil_image: Image.Image, path: Path) -> None:
    image_format = _format_for(path)
    options = {'quality': 95} if image_format == 'JPEG' else {}
    try:
        pil_image.save(path, image_format, **options)
    except OSError as e:
        raise ImageFormatError(f"Failed to write {path}: {e}") from e


def save_image(img: ImageRGB, path: PathLike) -> None:
    """Write an image as 8-bit PNG/JPEG; values quantized by round(v*255)."""
    path = Path(path)
    _write(Image.fromarray(quantize(img.data), mode='RGB'), path)
    logger.debug(f"Saved {path}")


def save_gray(img: ImageGray, path: PathLike) -> None:
    """Write a [0, 1] map as an 8-bit grayscale PNG (TM and depth inspection)."""
    path = Path(path)
    _write(Image.fromarray(quantize(np.clip(img.data, 0.0, 1.0)), mode='L'), path)


def save_raw(img: ImageRGB, path: PathLike) -> None:
    """Write unquantized pixels as little-endian float32, row-major RGB."""
    np.asarray(img.data, dtype='<f4').tofile(str(path))


def load_raw(path: PathLike, width: int, height: int) -> np.ndarray:
    """Read a float32 raw file written by save_raw."""
    array = np.fromfile(str(path), dtype='<f4')
    if array.size != width * height * 3:
        raise ImageFormatError(f"Raw file {path} has {array.size} values, expected {width * height * 3}")
    return array.reshape(height, width, 3)


# --- resampling -----------------------------------------------------------

def _axis_weights(n_in: int, n_out: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Half-pixel-centered sample positions with edge clamping."""
    if n_in == n_out:
        index = np.arange(n_in)
        return index, index, np.zeros(n_in)
    position = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    position = np.clip(position, 0.0, n_in - 1)
    lower = np.floor(position).astype(int)
    upper = np.minimum(lower + 1, n_in - 1)
    return lower, upper, position - lower


def resize_array(array: np.ndarray, width: int, height: int) -> np.ndarray:
    """Separable bilinear resize of a 2-D or 3-D array."""
    if width < 1 or height < 1:
        raise ValueError(f"Target size must be at least 1x1, got {width}x{height}")
    y0, y1, wy = _axis_weights(array.shape[0], height)
    x0, x1, wx = _axis_weights(array.shape[1], width)
    extra = (slice(None),) * (array.ndim - 2)

    wy = wy.reshape((-1, 1) + (1,) * (array.ndim - 2))
    rows = array[y0] * (1.0 - wy) + array[y1] * wy
    wx = wx.reshape((1, -1) + (1,) * (array.ndim - 2))
    return rows[(slice(None), x0) + extra] * (1.0 - wx) + rows[(slice(None), x1) + extra] * wx


def resize_bilinear(img: ImageRGB, width: int, height: int) -> ImageRGB:
    """Resize with bilinear interpolation; output is exactly width x height."""
    return ImageRGB.clipped(resize_array(img.data, width, height))


# --- color spaces ---------------------------------------------------------

def to_gray(img: ImageRGB) -> ImageGray:
    return ImageGray(np.clip(img.data @ LUMA_WEIGHTS, 0.0, 1.0))


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """HSV with hue scaled to [0, 1); achromatic pixels get hue 0."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    delta = v - rgb.min(axis=-1)
    s = np.divide(delta, v, out=np.zeros_like(v), where=v > 0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.where(v == r, (g - b) / safe,
                 np.where(v == g, 2.0 + (b - r) / safe, 4.0 + (r - g) / safe))
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h6 = (h % 1.0) * 6.0
    sector = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))

    choices_r = [v, q, p, p, t, v]
    choices_g = [t, v, v, q, p, p]
    choices_b = [p, p, t, v, v, q]
    conditions = [sector == k for k in range(6)]
    return np.stack([np.select(conditions, choices_r),
                     np.select(conditions, choices_g),
                     np.select(conditions, choices_b)], axis=-1)


def rgb_to_hsi(rgb: np.ndarray) -> np.ndarray:
    """HSI with hue scaled to [0, 1); gray pixels get hue 0 and saturation 0."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    intensity = rgb.mean(axis=-1)
    # the mean of three equal values can differ from them by one ulp
    gray = rgb.max(axis=-1) == rgb.min(axis=-1)
    saturation = np.where((intensity > 0) & ~gray,
                          1.0 - np.divide(rgb.min(axis=-1), intensity,
                                          out=np.ones_like(intensity), where=intensity > 0),
                          0.0)

    numerator = 0.5 * ((r - g) + (r - b))
    denominator = np.sqrt((r - g) ** 2 + (r - b) * (g - b))
    cosine = np.divide(numerator, denominator, out=np.ones_like(numerator), where=denominator > 0)
    theta = np.arccos(np.clip(cosine, -1.0, 1.0))
    hue = np.where(b > g, 2.0 * np.pi - theta, theta) / (2.0 * np.pi)
    hue = np.where(denominator > 0, hue % 1.0, 0.0)
    return np.stack([hue, np.maximum(saturation, 0.0), intensity], axis=-1)


def hsi_to_rgb(hsi: np.ndarray) -> np.ndarray:
    hue = (hsi[..., 0] % 1.0) * 2.0 * np.pi
    s, i = hsi[..., 1], hsi[..., 2]
    third = 2.0 * np.pi / 3.0

    sector = np.minimum((hue // third).astype(int), 2)
    local = hue - sector * third
    low = i * (1.0 - s)
    high = i * (1.0 + s * np.cos(local) / np.cos(np.pi / 3.0 - local))
    rest = 3.0 * i - (low + high)

    r = np.select([sector == 0, sector == 1], [high, low], rest)
    g = np.select([sector == 0, sector == 1], [rest, high], low)
    b = np.select([sector == 0, sector == 1], [low, rest], high)
    return np.stack([r, g, b], axis=-1)


# sRGB primaries, D65 white; the white point is derived from the same matrix so
# RGB white maps to L=100, a=b=0.
_RGB_TO_XYZ = np.array([[0.4124564, 0.3575761, 0.1804375],
                        [0.2126729, 0.7151522, 0.0721750],
                        [0.0193339, 0.1191920, 0.9503041]])
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = np.ones(3) @ _RGB_TO_XYZ.T
_DELTA = 6.0 / 29.0


def _srgb_to_linear(v: np.ndarray) -> np.ndarray:
    return np.where(v > 0.04045, ((np.maximum(v, 0.04045) + 0.055) / 1.055) ** 2.4, v / 12.92)


def _linear_to_srgb(v: np.ndarray) -> np.ndarray:
    return np.where(v > 0.0031308, 1.055 * np.maximum(v, 0.0031308) ** (1.0 / 2.4) - 0.055, 12.92 * v)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA ** 3, np.cbrt(t), t / (3.0 * _DELTA ** 2) + 4.0 / 29.0)


def _lab_f_inverse(f: np.ndarray) -> np.ndarray:
    return np.where(f > _DELTA, f ** 3, 3.0 * _DELTA ** 2 * (f - 4.0 / 29.0))


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """CIE-Lab (D65) from sRGB-companded values: L in [0, 100]."""
    xyz = _srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / _WHITE)
    fx, fy, fz = f[..., 0], f[..., 1], f[..., 2]
    # achromatic pixels get exactly zero chroma
    gray = rgb.max(axis=-1) == rgb.min(axis=-1)
    a = np.where(gray, 0.0, 500.0 * (fx - fy))
    b = np.where(gray, 0.0, 200.0 * (fy - fz))
    return np.stack([116.0 * fy - 16.0, a, b], axis=-1)


def lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    fy = (lab[..., 0] + 16.0) / 116.0
    f = np.stack([fy + lab[..., 1] / 500.0, fy, fy - lab[..., 2] / 200.0], axis=-1)
    xyz = _lab_f_inverse(f) * _WHITE
    return _linear_to_srgb(xyz @ _XYZ_TO_RGB.T)


_FORWARD = {ColorSpace.HSV: rgb_to_hsv, ColorSpace.HSI: rgb_to_hsi, ColorSpace.LAB: rgb_to_lab}
_INVERSE = {ColorSpace.HSV: hsv_to_rgb, ColorSpace.HSI: hsi_to_rgb, ColorSpace.LAB: lab_to_rgb}


def convert_color(img: ImageRGB, target: ColorSpace) -> np.ndarray:
    """Per-pixel triples of img in the target space, shape (H, W, 3)."""
    return _FORWARD[ColorSpace(target)](img.data)


def convert_to_rgb(triples: np.ndarray, source: ColorSpace) -> ImageRGB:
    """Inverse of convert_color; out-of-gamut results are clamped to [0, 1]."""
    return ImageRGB.clipped(_INVERSE[ColorSpace(source)](np.asarray(triples, dtype=np.float64)))
