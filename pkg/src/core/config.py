"""
Configuration management for the underwater image quality toolkit.

Handles kernel defaults, prior constants, metric weights, enhancer
parameters and benchmark settings. Files are JSON or plain-text
key/value ("section.key = value", comma-separated tuples).
"""

import logging
import json
import math
from typing import Dict, Any, Optional, Tuple
from pathlib import Path
from dataclasses import dataclass, asdict, field, fields, replace

from .exceptions import ConfigError


logger = logging.getLogger(__name__)


def _as_float_tuple(value, length: Optional[int] = None) -> Tuple[float, ...]:
    if isinstance(value, str):
        value = [item for item in value.replace('(', '').replace(')', '').split(',') if item.strip()]
    try:
        result = tuple(float(item) for item in value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Expected numbers, got {value!r}") from e
    if length is not None and len(result) != length:
        raise ConfigError(f"Expected {length} values, got {len(result)}: {value}")
    return result


def _as_int_tuple(value, length: Optional[int] = None) -> Tuple[int, ...]:
    values = _as_float_tuple(value, length)
    _require_finite(values, "Integer values")
    return tuple(int(item) for item in values)


def _as_finite(value, name: str) -> float:
    try:
        result = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a number, got {value!r}") from e
    if not math.isfinite(result):
        raise ConfigError(f"{name} must be finite, got {result}")
    return result


def _require_finite(values: Tuple[float, ...], name: str) -> None:
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{name} must be finite, got {values}")


@dataclass
class KernelConfig:
    """Window and filter defaults shared by all estimators."""
    window_radius: int = 7          # 15x15 window at 400x600
    guided_radius: int = 20
    guided_eps: float = 1e-3
    t_floor: float = 0.1


@dataclass(frozen=True)
class PriorConstants:
    """
    Constants of the depth and attenuation priors.

    ulap_coeffs are the ULAP linear regression (mu0, mu1, mu2); nrer are
    ocean-type-I residual energy ratios; (m, i) and the channel wavelengths
    (nm) feed the background-light attenuation ratio. rcp_lambda has no
    established value and is a working default.
    """
    ulap_coeffs: Tuple[float, float, float] = (0.53214829, 0.51309827, -0.91066194)
    nrer: Tuple[float, float, float] = (0.83, 0.95, 0.97)
    atten_ratio_params: Tuple[float, float] = (-0.00113, 1.62517)
    wavelengths: Tuple[float, float, float] = (620.0, 540.0, 450.0)
    rcp_lambda: float = 0.5
    blur_scales: Tuple[int, ...] = (2, 4, 8, 16)
    mip_shift: str = "max"          # "max" shifts the largest MIP to t=1; "min" shifts the smallest
    ibla_gain: float = 32.0
    ibla_brightness_center: float = 0.5
    ibla_red_center: float = 0.1
    ibla_bright_fraction: float = 0.2     # share of bright pixels where the BL blend turns over

    def __post_init__(self):
        object.__setattr__(self, 'ulap_coeffs', _as_float_tuple(self.ulap_coeffs, 3))
        object.__setattr__(self, 'nrer', _as_float_tuple(self.nrer, 3))
        object.__setattr__(self, 'atten_ratio_params', _as_float_tuple(self.atten_ratio_params, 2))
        object.__setattr__(self, 'wavelengths', _as_float_tuple(self.wavelengths, 3))
        object.__setattr__(self, 'blur_scales', _as_int_tuple(self.blur_scales))
        for name in ('rcp_lambda', 'ibla_gain', 'ibla_brightness_center', 'ibla_red_center',
                     'ibla_bright_fraction'):
            object.__setattr__(self, name, _as_finite(getattr(self, name), name))
        for name in ('ulap_coeffs', 'nrer', 'atten_ratio_params', 'wavelengths'):
            _require_finite(getattr(self, name), name)

        if not all(0.0 < n <= 1.0 for n in self.nrer):
            raise ConfigError(f"nrer components must lie in (0, 1]: {self.nrer}")
        if not self.blur_scales:
            raise ConfigError("blur_scales must not be empty")
        if any(b <= a for a, b in zip(self.blur_scales, self.blur_scales[1:])) or self.blur_scales[0] < 1:
            raise ConfigError(f"blur_scales must be positive and strictly increasing: {self.blur_scales}")
        if self.mip_shift not in ("max", "min"):
            raise ConfigError(f"mip_shift must be 'max' or 'min', got {self.mip_shift}")
        if not 0.0 < self.ibla_bright_fraction < 1.0:
            raise ConfigError(f"ibla_bright_fraction must lie in (0, 1), got {self.ibla_bright_fraction}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PriorConstants":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                logger.warning(f"Ignoring unknown prior constant: {key}")
        try:
            return replace(cls(), **{k: v for k, v in data.items() if k in known})
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid priors section: {e}") from e

    @classmethod
    def load(cls, path: Path) -> "PriorConstants":
        """Load from a key/value file; keys may carry a 'priors.' prefix."""
        data = parse_key_value_file(Path(path))
        flat = dict(data.get('priors', {}))
        flat.update({k: v for k, v in data.items() if not isinstance(v, dict)})
        return cls.from_dict(flat)


@dataclass(frozen=True)
class MetricWeights:
    """Linear weights of UCIQE (c1, c2, c3) and UIQM (UICM, UISM, UIConM)."""
    uciqe: Tuple[float, float, float] = (0.4680, 0.2745, 0.2576)
    uiqm: Tuple[float, float, float] = (0.0282, 0.2953, 3.5753)

    def __post_init__(self):
        object.__setattr__(self, 'uciqe', _as_float_tuple(self.uciqe, 3))
        object.__setattr__(self, 'uiqm', _as_float_tuple(self.uiqm, 3))
        _require_finite(self.uciqe, "UCIQE weights")
        _require_finite(self.uiqm, "UIQM weights")

    def scaled(self, factor: float) -> "MetricWeights":
        return MetricWeights(tuple(w * factor for w in self.uciqe), tuple(w * factor for w in self.uiqm))


@dataclass
class EnhanceSettings:
    """Parameters of the IFM-free enhancers."""
    clahe_clip: float = 2.0                 # relative to the mean bin height
    clahe_tiles: Tuple[int, int] = (8, 8)   # (nx, ny)
    clahe_mode: str = "hsv"                 # "hsv" works on V, "rgb" per channel
    stretch_percentile: float = 0.2         # ICM/UCM tails in percent
    ucm_range_threshold: float = 0.9
    rayleigh_sigma: float = 0.4
    rghs_tail: float = 0.1                  # percent
    rghs_red_strength: float = 1.0
    rghs_gb_strength: float = 0.7
    rghs_lab_stage: bool = True
    rghs_curve: float = 0.3
    fusion_levels: int = 5
    fusion_cues: Tuple[str, ...] = ("contrast", "saliency", "exposedness")
    fusion_bypass_contrast_input: bool = False

    def __post_init__(self):
        self.clahe_tiles = _as_int_tuple(self.clahe_tiles, 2)
        self.fusion_cues = tuple(self.fusion_cues) if not isinstance(self.fusion_cues, str) \
            else tuple(c.strip() for c in self.fusion_cues.split(',') if c.strip())
        if self.clahe_clip <= 0:
            raise ConfigError(f"CLAHE clip limit must be > 0, got {self.clahe_clip}")
        if min(self.clahe_tiles) < 1:
            raise ConfigError(f"CLAHE tile grid must be at least 1x1, got {self.clahe_tiles}")
        if not 0.0 <= self.stretch_percentile < 50.0 or not 0.0 <= self.rghs_tail < 50.0:
            raise ConfigError("Stretch percentiles must lie in [0, 50)")
        if self.clahe_mode not in ("hsv", "rgb"):
            raise ConfigError(f"CLAHE mode must be 'hsv' or 'rgb', got {self.clahe_mode}")


@dataclass
class BenchConfig:
    """Dataset and benchmark settings."""
    resize: Tuple[int, int] = (600, 400)    # width, height
    swap_orientation: bool = False
    tol_r: float = 30.0
    tol_gb: float = 40.0
    jobs: int = 4

    def __post_init__(self):
        self.resize = _as_int_tuple(self.resize, 2)

    @property
    def target_size(self) -> Tuple[int, int]:
        width, height = self.resize
        return (height, width) if self.swap_orientation else (width, height)


def _parse_value(raw: str):
    text = raw.strip()
    lowered = text.lower()
    if lowered in ('true', 'false'):
        return lowered == 'true'
    if ',' in text:
        return [_parse_value(part) for part in text.split(',') if part.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip('"\'')


def parse_key_value_file(path: Path) -> Dict[str, Any]:
    """Parse "section.key = value" lines into nested dictionaries."""
    data: Dict[str, Any] = {}
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e

    for number, line in enumerate(lines, start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{path}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split('=', 1))
        if '.' in key:
            section, name = key.split('.', 1)
            data.setdefault(section, {})[name] = _parse_value(value)
        else:
            data[key] = _parse_value(value)
    return data


def _format_value(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        text = ', '.join(_format_value(item) for item in value)
        return text + ',' if len(value) == 1 else text
    return str(value)


def write_key_value_file(path: Path, sections: Dict[str, Dict[str, Any]]) -> None:
    """Write nested dictionaries as "section.key = value" lines readable by parse_key_value_file."""
    lines = [f"{section}.{key} = {_format_value(value)}"
             for section, values in sections.items() for key, value in values.items()]
    try:
        Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e


class Config:
    """Main configuration manager for the toolkit."""

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: JSON or key/value file. Defaults apply when None
                        or when the file does not exist.
        """
        self.config_path = Path(config_path) if config_path else None
        self.config_data = self.load_config()

        # Initialize sub-configurations
        self.kernels = self._load_section(KernelConfig, "kernels")
        self.priors = PriorConstants.from_dict(self.config_data.get("priors", {}))
        self.metrics = self._load_metric_weights()
        self.enhance = self._load_section(EnhanceSettings, "enhance")
        self.bench = self._load_section(BenchConfig, "bench")

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file."""
        if self.config_path is None or not self.config_path.exists():
            if self.config_path is not None:
                logger.warning(f"Config file {self.config_path} not found, using defaults")
            return self._get_default_config()

        if self.config_path.suffix.lower() == '.json':
            try:
                with open(self.config_path, 'r') as f:
                    return json.load(f)
            except (json.JSONDecodeError, IOError) as e:
                raise ConfigError(f"Failed to load config from {self.config_path}: {e}") from e
        return parse_key_value_file(self.config_path)

    def save_config(self, path: Optional[Path] = None) -> None:
        """Save configuration to a JSON file."""
        target = Path(path) if path else self.config_path
        if target is None:
            raise ConfigError("No config path to save to")
        config_data = {
            "version": "1.0",
            "kernels": asdict(self.kernels),
            "priors": asdict(self.priors),
            "metrics": asdict(self.metrics),
            "enhance": asdict(self.enhance),
            "bench": asdict(self.bench),
        }
        try:
            with open(target, 'w') as f:
                json.dump(config_data, f, indent=2)
            logger.debug(f"Saved configuration to {target}")
        except IOError as e:
            raise ConfigError(f"Failed to save config to {target}: {e}") from e

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default configuration values."""
        return {
            "version": "1.0",
            "kernels": {},
            "priors": {},
            "metrics": {},
            "enhance": {},
            "bench": {},
        }

    def _load_section(self, section_type, name: str):
        """Build a mutable section, overriding defaults with saved values."""
        section_data = self.config_data.get(name, {})
        known = {f.name for f in fields(section_type)}
        for key in section_data:
            if key not in known:
                logger.warning(f"Ignoring unknown {name} setting: {key}")
        try:
            return section_type(**{k: v for k, v in section_data.items() if k in known})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid {name} section: {e}") from e

    def _load_metric_weights(self) -> MetricWeights:
        metrics_data = self.config_data.get("metrics", {})
        return MetricWeights(
            uciqe=metrics_data.get("uciqe", MetricWeights.uciqe),
            uiqm=metrics_data.get("uiqm", MetricWeights.uiqm),
        )

    def reset_to_defaults(self) -> None:
        """Reset configuration to default values."""
        self.config_data = self._get_default_config()
        self.kernels = KernelConfig()
        self.priors = PriorConstants()
        self.metrics = MetricWeights()
        self.enhance = EnhanceSettings()
        self.bench = BenchConfig()


# Global configuration instance
_config_instance = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def set_config(config: Config) -> None:
    """Replace the global configuration (used by the CLI --config option)."""
    global _config_instance
    _config_instance = config
