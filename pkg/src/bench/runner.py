"""
Batch comparison of enhancers and restoration pipelines over a dataset.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

from core.config import Config, get_config
from core.enhancers import EnhanceMethod, enhance
from core.imaging import ImageRGB, WindowSpec, save_image
from core.metrics import measure
from core.restorers import get_pipeline, restore

from .dataset import DatasetManifest
from .report import QualityReport, ReportRow


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IDENTITY = "identity"


@dataclass(frozen=True)
class BenchMethod:
    """A named image-to-image method of the benchmark."""
    name: str
    run: Callable[[ImageRGB], ImageRGB]


def resolve_methods(enhancers: Sequence[str], restorers: Sequence[str],
                    config: Optional[Config] = None) -> List[BenchMethod]:
    """Build runnable methods; "identity" passes the input through."""
    config = config or get_config()
    win = WindowSpec(config.kernels.window_radius)
    methods: List[BenchMethod] = []

    for name in enhancers:
        if name == IDENTITY:
            methods.append(BenchMethod(IDENTITY, lambda img: img))
            continue
        method = EnhanceMethod(name)
        methods.append(BenchMethod(method.value, lambda img, m=method: enhance(img, m, config.enhance)))

    for name in restorers:
        if name == IDENTITY:
            methods.append(BenchMethod(IDENTITY, lambda img: img))
            continue
        pipeline = replace(get_pipeline(name), t_floor=config.kernels.t_floor,
                           guided_radius=config.kernels.guided_radius, guided_eps=config.kernels.guided_eps)

        def run(img: ImageRGB, p=pipeline) -> ImageRGB:
            return restore(img, p, win, config.priors)[0]
        methods.append(BenchMethod(pipeline.name, run))

    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise ValueError(f"Duplicate benchmark methods: {names}")
    return methods


def _process_image(path: Path, manifest: DatasetManifest, methods: Sequence[BenchMethod],
                   out_dir: Path, config: Config) -> List[ReportRow]:
    try:
        img = manifest.load(path)
    except Exception as e:
        logger.warning(f"Cannot load {path.name}: {e}")
        return [ReportRow(path.name, m.name, status=f"error: {e}") for m in methods]

    rows = []
    for method in methods:
        relative = Path(method.name) / f"{manifest.output_stem(path)}.png"
        try:
            output = method.run(img)
            (out_dir / method.name).mkdir(parents=True, exist_ok=True)
            save_image(output, out_dir / relative)
            rows.append(ReportRow(path.name, method.name, measure(output, config.metrics), output=relative.as_posix()))
        except Exception as e:
            logger.warning(f"{method.name} failed on {path.name}: {e}")
            rows.append(ReportRow(path.name, method.name, status=f"error: {e}"))
    logger.info(f"Processed {path.name} with {len(methods)} methods")
    return rows


def run_benchmark(manifest: DatasetManifest,
                  enhancers: Sequence[str],
                  restorers: Sequence[str],
                  out: PathLike,
                  config: Optional[Config] = None,
                  jobs: Optional[int] = None) -> QualityReport:
    """
    Run every method on every image, save outputs and collect metrics.

    Args:
        manifest: Dataset to process
        enhancers: Enhancer names (and optionally "identity")
        restorers: Restoration pipeline names
        out: Output directory; images go to out/<method>/<stem>.png, or
             <name>.png when two images share a stem
        config: Configuration (defaults to the global one)
        jobs: Worker threads; defaults to the bench configuration

    Returns:
        QualityReport sorted by image then method order
    """
    config = config or get_config()
    if not manifest.images:
        raise ValueError(f"Dataset {manifest.root} has no images")
    methods = resolve_methods(enhancers, restorers, config)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    workers = max(1, jobs if jobs is not None else config.bench.jobs)
    logger.info(f"Benchmarking {len(manifest.images)} images x {len(methods)} methods with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_process_image, path, manifest, methods, out_dir, config)
                   for path in manifest.images]
        rows = [row for future in futures for row in future.result()]

    report = QualityReport(rows=rows, methods=[m.name for m in methods])
    report.sort()
    failed = sum(not row.ok for row in rows)
    if failed:
        logger.warning(f"{failed} of {len(rows)} benchmark rows failed")
    return report
