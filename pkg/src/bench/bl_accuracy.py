"""
Background-light accuracy against annotated ground truth.

An estimate is correct on a channel when its 8-bit value lies within the
channel tolerance of the annotation (inclusive): 30 for red, 40 for green
and blue by default.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.config import PriorConstants
from core.exceptions import DatasetError
from core.imaging import WindowSpec
from core.restorers.background_light import BackgroundLight, BlMethod, estimate_background_light

from .dataset import DatasetManifest


logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = (30, 40)

Triple = Tuple[int, int, int]


@dataclass
class BlAccuracyResult:
    """Per-channel and joint accuracy of one method over the annotated images."""
    method: str
    acc_r: float
    acc_g: float
    acc_b: float
    joint: float
    count: int
    deltas: Dict[str, Triple] = field(default_factory=dict)    # image -> signed estimate - truth

    def to_dict(self) -> Dict[str, object]:
        return {
            'method': self.method,
            'count': self.count,
            'acc_r': self.acc_r,
            'acc_g': self.acc_g,
            'acc_b': self.acc_b,
            'joint': self.joint,
            'deltas': {name: list(delta) for name, delta in sorted(self.deltas.items())},
        }


def _as_8bit(estimate: Union[BackgroundLight, Sequence[int]]) -> Triple:
    if isinstance(estimate, BackgroundLight):
        return estimate.to_8bit()
    return tuple(int(v) for v in estimate)  # type: ignore[return-value]


def score_bl_estimates(method: str,
                       estimates: Dict[str, Union[BackgroundLight, Sequence[int]]],
                       gt_bl: Dict[str, Triple],
                       tol: Tuple[float, float] = DEFAULT_TOLERANCE) -> BlAccuracyResult:
    """
    Classify estimates against ground truth with inclusive tolerances.

    Args:
        method: Method name recorded in the result
        estimates: Image name -> estimate (BackgroundLight or 0-255 triple)
        gt_bl: Image name -> annotated 0-255 triple
        tol: (red tolerance, green/blue tolerance)

    Returns:
        BlAccuracyResult over the images present in both mappings
    """
    names = sorted(set(estimates) & set(gt_bl))
    if not names:
        raise DatasetError(f"No annotated images to score for {method}")

    tol_r, tol_gb = tol
    limits = (tol_r, tol_gb, tol_gb)
    correct = [0, 0, 0]
    joint = 0
    deltas: Dict[str, Triple] = {}
    for name in names:
        estimate = _as_8bit(estimates[name])
        delta = tuple(e - t for e, t in zip(estimate, gt_bl[name]))
        deltas[name] = delta  # type: ignore[assignment]
        hits = [abs(d) <= limit for d, limit in zip(delta, limits)]
        for c, hit in enumerate(hits):
            correct[c] += hit
        joint += all(hits)

    n = len(names)
    return BlAccuracyResult(method, correct[0] / n, correct[1] / n, correct[2] / n, joint / n, n, deltas)


def evaluate_bl_accuracy(manifest: DatasetManifest,
                         methods: Sequence[BlMethod],
                         tol: Tuple[float, float] = DEFAULT_TOLERANCE,
                         win: Optional[WindowSpec] = None,
                         consts: Optional[PriorConstants] = None,
                         jobs: int = 1) -> Dict[str, BlAccuracyResult]:
    """Estimate background light on every annotated image and score each method."""
    images = manifest.annotated
    if not images:
        raise DatasetError(f"No annotated images in {manifest.root}")
    win = win or WindowSpec()
    consts = consts or PriorConstants()
    methods = [BlMethod(m) for m in methods]

    def estimate_all(path) -> Tuple[str, List[BackgroundLight]]:
        img = manifest.load(path)
        return path.name, [estimate_background_light(img, m, win, consts) for m in methods]

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        per_image = dict(executor.map(estimate_all, images))

    results = {}
    for index, method in enumerate(methods):
        estimates = {name: lights[index] for name, lights in per_image.items()}
        result = score_bl_estimates(method.value, estimates, manifest.gt_bl, tol)
        logger.info(f"{method.value}: R {result.acc_r:.3f} G {result.acc_g:.3f} "
                    f"B {result.acc_b:.3f} joint {result.joint:.3f} over {result.count} images")
        results[method.value] = result
    return results
