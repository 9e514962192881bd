"""
Forward underwater degradation for synthetic ground-truth cases.

A case directory holds:
    clear.png, degraded.png, degraded.f32 (float32 RGB, row-major),
    depth.png, tm_r.png, tm_g.png, tm_b.png, manifest.txt
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .config import PriorConstants, parse_key_value_file, write_key_value_file
from .exceptions import DatasetError
from .imaging import ImageGray, ImageRGB, load_image, require_same_shape, save_gray, save_image, save_raw
from .priors import DepthMap
from .restorers.background_light import BackgroundLight
from .restorers.transmission import TransmissionMaps


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MANIFEST_NAME = "manifest.txt"
DEPTH_KINDS = ("ramp-vertical", "ramp-horizontal", "radial", "constant:<v>")


@dataclass(frozen=True, eq=False)
class SyntheticCase:
    """A clear image, its degradation parameters and the degraded result."""
    clear: ImageRGB
    depth: DepthMap
    bl: BackgroundLight
    tm: TransmissionMaps
    degraded: ImageRGB
    manifest: Dict[str, Dict[str, Any]] = field(default_factory=dict)


def degrade(clear: ImageRGB, bl: BackgroundLight, tm: TransmissionMaps) -> ImageRGB:
    """I = J * t + B * (1 - t) per channel."""
    require_same_shape(clear.shape, tm.shape)
    t = tm.stack()
    return ImageRGB.clipped(clear.data * t + bl.rgb * (1.0 - t))


def tm_from_depth(depth: DepthMap, consts: PriorConstants) -> TransmissionMaps:
    """t^c = nrer_c ** d."""
    n_r, n_g, n_b = consts.nrer
    d = depth.data
    return TransmissionMaps.from_channels(n_r ** d, n_g ** d, n_b ** d, method="depth")


def _constant_value(kind: str) -> Optional[float]:
    for prefix in ("constant:", "constant(", "constant="):
        if kind.startswith(prefix):
            try:
                return float(kind[len(prefix):].rstrip(')'))
            except ValueError:
                break
    return None


def make_depth(kind: str, width: int, height: int) -> DepthMap:
    """
    Deterministic synthetic depth field in [0, 1].

    Args:
        kind: ramp-vertical (0 at the top row), ramp-horizontal (0 at the left
              column), radial (0 at the center, 1 at the corners) or constant:<v>
        width: Field width
        height: Field height

    Returns:
        DepthMap of shape (height, width)
    """
    if width < 1 or height < 1:
        raise ValueError(f"Depth field must be at least 1x1, got {width}x{height}")
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]

    if kind == "ramp-vertical":
        data = np.broadcast_to(rows / max(height - 1, 1), (height, width))
    elif kind == "ramp-horizontal":
        data = np.broadcast_to(cols / max(width - 1, 1), (height, width))
    elif kind == "radial":
        cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
        distance = np.hypot(rows - cy, cols - cx)
        corner = np.hypot(cy, cx)
        data = distance / corner if corner > 0 else np.zeros((height, width))
    else:
        value = _constant_value(kind)
        if value is None:
            raise ValueError(f"Unknown depth kind '{kind}'; expected one of {DEPTH_KINDS}")
        data = np.full((height, width), value)
    return DepthMap(np.clip(data, 0.0, 1.0))


def _manifest(depth_kind: str, bl: BackgroundLight, consts: PriorConstants,
              width: int, height: int) -> Dict[str, Dict[str, Any]]:
    return {
        "case": {
            "clear": "clear.png",
            "width": width,
            "height": height,
            "depth": depth_kind,
            "bl": (bl.r, bl.g, bl.b),
        },
        "priors": asdict(consts),
    }


def build_case(clear: ImageRGB, depth_kind: str, bl: BackgroundLight, consts: PriorConstants) -> SyntheticCase:
    depth = make_depth(depth_kind, clear.width, clear.height)
    tm = tm_from_depth(depth, consts)
    degraded = degrade(clear, bl, tm)
    return SyntheticCase(clear, depth, bl, tm, degraded,
                         _manifest(depth_kind, bl, consts, clear.width, clear.height))


def generate_case(clear_path: PathLike,
                  depth_kind: str,
                  bl: BackgroundLight,
                  consts: PriorConstants,
                  out_dir: PathLike) -> SyntheticCase:
    """
    Degrade a clear image and write the case directory.

    Args:
        clear_path: Clear PNG/JPEG image
        depth_kind: Depth field kind (see make_depth)
        bl: Background light of the water body
        consts: Prior constants; nrer sets the per-channel attenuation
        out_dir: Output directory, created if missing

    Returns:
        The generated SyntheticCase
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    case = build_case(load_image(clear_path), depth_kind, bl, consts)
    save_image(case.clear, out_dir / "clear.png")
    save_image(case.degraded, out_dir / "degraded.png")
    save_raw(case.degraded, out_dir / "degraded.f32")
    save_gray(ImageGray(case.depth.data), out_dir / "depth.png")
    for name, channel in zip(("r", "g", "b"), (case.tm.t_r, case.tm.t_g, case.tm.t_b)):
        save_gray(channel, out_dir / f"tm_{name}.png")
    write_key_value_file(out_dir / MANIFEST_NAME, case.manifest)

    logger.info(f"Generated case {out_dir} ({depth_kind}, B={np.round(bl.rgb, 4).tolist()})")
    return case


def reproduce_case(case_dir: PathLike) -> SyntheticCase:
    """Rebuild a case from its manifest and clear.png."""
    case_dir = Path(case_dir)
    manifest_path = case_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise DatasetError(f"No {MANIFEST_NAME} in {case_dir}")

    manifest = parse_key_value_file(manifest_path)
    case = manifest.get("case", {})
    try:
        bl = BackgroundLight.from_array(case["bl"], source="manifest")
        depth_kind = str(case["depth"])
        clear = load_image(case_dir / str(case.get("clear", "clear.png")))
    except KeyError as e:
        raise DatasetError(f"{manifest_path}: missing case.{e.args[0]}") from e

    consts = PriorConstants.from_dict(manifest.get("priors", {}))
    return build_case(clear, depth_kind, bl, consts)
