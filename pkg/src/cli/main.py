#!/usr/bin/env python3
"""
Command-line interface for the underwater image quality bench.

    uwbench enhance --method clahe --in images/ --out out/
    uwbench restore --method ulap --in images/ --out out/ --dump-tm
    uwbench simulate --clear clear.png --depth ramp-vertical --bl 0.1,0.6,0.7 --out case/
    uwbench bl-accuracy --in images/ --annotations gt.csv
    uwbench benchmark --in images/ --out results/
    uwbench report --in results/report.json --format csv --out table.csv
"""

import functools
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

import click

from bench.bl_accuracy import evaluate_bl_accuracy
from bench.dataset import DatasetManifest, ingest_dataset
from bench.report import emit_report, load_report
from bench.runner import IDENTITY, run_benchmark
from core.config import Config, get_config, set_config, write_key_value_file
from core.enhancers import EnhanceMethod, enhance
from core.exceptions import ToolkitError
from core.imaging import WindowSpec, save_gray, save_image
from core.restorers import COMPARED_PIPELINES, PIPELINES, BackgroundLight, BlMethod, get_pipeline, restore
from core.simulator import DEPTH_KINDS, generate_case


logger = logging.getLogger(__name__)

ENHANCE_NAMES = [m.value for m in EnhanceMethod]
BL_NAMES = [m.value for m in BlMethod]


def handle_errors(func):
    """Turn toolkit errors into a logged message and exit code 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ToolkitError, ValueError) as e:
            logger.error(str(e))
            sys.exit(1)
    return wrapper


def _parse_tiles(text: Optional[str]) -> Optional[Tuple[int, int]]:
    if text is None:
        return None
    try:
        nx, ny = (int(part) for part in text.lower().split('x'))
    except ValueError:
        raise click.BadParameter(f"expected NXxNY, got {text}") from None
    return nx, ny


def _parse_bl(text: str) -> BackgroundLight:
    try:
        values = [float(part) for part in text.split(',')]
    except ValueError:
        raise click.BadParameter(f"expected R,G,B, got {text}") from None
    if len(values) != 3:
        raise click.BadParameter(f"expected three components, got {text}")
    if any(v > 1.0 for v in values):
        values = [v / 255.0 for v in values]
    return BackgroundLight.from_array(values, source="cli")


def _inputs(path: str) -> DatasetManifest:
    return ingest_dataset(path, resize=None)


@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='JSON or key/value configuration file')
@click.option('--jobs', type=int, default=None, help='Worker threads (default from config)')
@click.option('--seed', type=int, default=None, help='Reserved; recorded in the log only')
@click.option('--verbose', '-v', is_flag=True, help='Enable debug logging')
@click.pass_context
def cli(ctx, config_path, jobs, seed, verbose):
    """Underwater image restoration, enhancement and quality benchmarking."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        config = Config(Path(config_path)) if config_path else get_config()
    except ToolkitError as e:
        logger.error(str(e))
        sys.exit(1)
    set_config(config)
    if seed is not None:
        logger.debug(f"seed {seed} recorded; all methods are deterministic")
    ctx.obj = {'config': config, 'jobs': jobs if jobs is not None else config.bench.jobs}


@cli.command('enhance')
@click.option('--method', type=click.Choice(ENHANCE_NAMES), required=True)
@click.option('--in', 'input_path', type=click.Path(exists=True), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--clip', type=float, default=None, help='CLAHE clip limit')
@click.option('--tiles', default=None, help='CLAHE tile grid, e.g. 8x8')
@click.option('--percentile', type=float, default=None, help='ICM/UCM stretch tail in percent')
@click.option('--sigma', type=float, default=None, help='Rayleigh scale')
@click.option('--levels', type=int, default=None, help='Fusion pyramid levels')
@click.option('--rgb', is_flag=True, help='CLAHE per RGB channel instead of HSV value')
@click.pass_obj
@handle_errors
def enhance_command(obj, method, input_path, out_dir, clip, tiles, percentile, sigma, levels, rgb):
    """Run an IFM-free enhancer on an image or a directory."""
    settings = obj['config'].enhance
    overrides = {
        'clahe_clip': clip,
        'clahe_tiles': _parse_tiles(tiles),
        'stretch_percentile': percentile,
        'rayleigh_sigma': sigma,
        'fusion_levels': levels,
        'clahe_mode': 'rgb' if rgb else None,
    }
    settings = replace(settings, **{k: v for k, v in overrides.items() if v is not None})

    manifest = _inputs(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for path in manifest.images:
        target = out / f"{manifest.output_stem(path)}.png"
        save_image(enhance(manifest.load(path), method, settings), target)
        logger.info(f"{method}: {path.name} -> {target}")


@cli.command('restore')
@click.option('--method', type=click.Choice(sorted(PIPELINES)), required=True)
@click.option('--in', 'input_path', type=click.Path(exists=True), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--dump-bl', is_flag=True, help='Write the estimated background light per image')
@click.option('--dump-tm', is_flag=True, help='Write 8-bit transmission maps per image')
@click.option('--refine/--no-refine', default=False, help='Guided-filter the transmission maps')
@click.option('--t-floor', type=float, default=None, help='Transmission floor used at recovery')
@click.option('--post-enhance', type=click.Choice(ENHANCE_NAMES), default=None,
              help='Enhancer applied to the restored image')
@click.pass_obj
@handle_errors
def restore_command(obj, method, input_path, out_dir, dump_bl, dump_tm, refine, t_floor, post_enhance):
    """Run an IFM-based restoration pipeline on an image or a directory."""
    config = obj['config']
    pipeline = replace(get_pipeline(method), refine=refine,
                       t_floor=t_floor if t_floor is not None else config.kernels.t_floor,
                       guided_radius=config.kernels.guided_radius, guided_eps=config.kernels.guided_eps)
    win = WindowSpec(config.kernels.window_radius)
    post = functools.partial(enhance, method=post_enhance, settings=config.enhance) if post_enhance else None

    manifest = _inputs(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for path in manifest.images:
        stem = manifest.output_stem(path)
        restored, bl, tm = restore(manifest.load(path), pipeline, win, config.priors, post_enhance=post)
        save_image(restored, out / f"{stem}.png")
        if dump_bl:
            write_key_value_file(out / f"{stem}_bl.txt", {
                'bl': {'rgb': (bl.r, bl.g, bl.b), 'rgb8': bl.to_8bit(), 'source': bl.source,
                       'pixel': bl.pixel if bl.pixel is not None else 'none'},
            })
        if dump_tm:
            for name, channel in zip(('r', 'g', 'b'), (tm.t_r, tm.t_g, tm.t_b)):
                save_gray(channel, out / f"{stem}_tm_{name}.png")
        logger.info(f"{pipeline.name}: {path.name} B={bl.to_8bit()}")


@cli.command('simulate')
@click.option('--clear', 'clear_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--depth', 'depth_kind', default='ramp-vertical', show_default=True,
              help=f"Depth field: {', '.join(DEPTH_KINDS)}")
@click.option('--bl', 'bl_text', required=True, help='Background light R,G,B in [0,1] or 0-255')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.pass_obj
@handle_errors
def simulate_command(obj, clear_path, depth_kind, bl_text, out_dir):
    """Degrade a clear image into a synthetic test case."""
    generate_case(clear_path, depth_kind, _parse_bl(bl_text), obj['config'].priors, out_dir)


@cli.command('bl-accuracy')
@click.option('--in', 'input_path', type=click.Path(exists=True), required=True)
@click.option('--annotations', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--method', 'methods', type=click.Choice(BL_NAMES), multiple=True,
              help='Background-light method (repeatable; default all)')
@click.option('--tol-r', type=float, default=None, help='Red tolerance (0-255)')
@click.option('--tol-gb', type=float, default=None, help='Green/blue tolerance (0-255)')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None, help='Optional JSON output')
@click.pass_obj
@handle_errors
def bl_accuracy_command(obj, input_path, annotations, methods, tol_r, tol_gb, out_path):
    """Score background-light estimation against annotated ground truth."""
    config = obj['config']
    manifest = ingest_dataset(input_path, annotations, config.bench.target_size)
    tol = (tol_r if tol_r is not None else config.bench.tol_r,
           tol_gb if tol_gb is not None else config.bench.tol_gb)
    results = evaluate_bl_accuracy(manifest, list(methods) or BL_NAMES, tol,
                                   WindowSpec(config.kernels.window_radius), config.priors, obj['jobs'])

    click.echo(f"{'method':<12} {'R':>6} {'G':>6} {'B':>6} {'joint':>6}")
    for name, result in results.items():
        click.echo(f"{name:<12} {result.acc_r:6.3f} {result.acc_g:6.3f} {result.acc_b:6.3f} {result.joint:6.3f}")
    if out_path:
        with open(out_path, 'w', encoding='utf-8') as f:
            json.dump([r.to_dict() for r in results.values()], f, indent=2)
            f.write('\n')


@cli.command('benchmark')
@click.option('--in', 'input_path', type=click.Path(exists=True), required=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True)
@click.option('--enhancer', 'enhancers', type=click.Choice(ENHANCE_NAMES + [IDENTITY]), multiple=True,
              help='Enhancer to compare (repeatable; default all)')
@click.option('--restorer', 'restorers', type=click.Choice(sorted(PIPELINES)), multiple=True,
              help='Restoration pipeline to compare (repeatable; default the eight compared ones)')
@click.option('--annotations', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Also score background light against this CSV')
@click.pass_obj
@handle_errors
def benchmark_command(obj, input_path, out_dir, enhancers, restorers, annotations):
    """Compare methods over a dataset; writes report.csv and report.json."""
    config = obj['config']
    if not enhancers and not restorers:
        enhancers, restorers = tuple(ENHANCE_NAMES), COMPARED_PIPELINES
    manifest = ingest_dataset(input_path, annotations, config.bench.target_size)

    report = run_benchmark(manifest, list(enhancers), list(restorers), out_dir, config, obj['jobs'])
    out = Path(out_dir)
    emit_report(report, 'csv', out / 'report.csv')
    emit_report(report, 'json', out / 'report.json')

    if manifest.gt_bl:
        results = evaluate_bl_accuracy(manifest, BL_NAMES, (config.bench.tol_r, config.bench.tol_gb),
                                       WindowSpec(config.kernels.window_radius), config.priors, obj['jobs'])
        with open(out / 'bl_accuracy.json', 'w', encoding='utf-8') as f:
            json.dump([r.to_dict() for r in results.values()], f, indent=2)
            f.write('\n')

    if not report.all_ok:
        logger.error("Some benchmark rows failed; see the status column")
        sys.exit(1)


@cli.command('report')
@click.option('--in', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), required=True)
@handle_errors
def report_command(input_path, fmt, out_path):
    """Re-emit a saved JSON report."""
    emit_report(load_report(input_path), fmt, out_path)


def main(argv: Optional[List[str]] = None) -> int:
    """Console-script entry point."""
    try:
        cli.main(args=argv, prog_name='uwbench', standalone_mode=False)
    except click.exceptions.Abort:
        return 1
    except click.exceptions.ClickException as e:
        e.show()
        return e.exit_code
    except SystemExit as e:
        return int(e.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
