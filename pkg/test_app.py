#!/usr/bin/env python3
"""
Smoke-test application for the Underwater Image Quality Bench.

Exercises every component on a synthetic underwater scene from the command
line, without needing a dataset on disk.
"""

import sys
import logging
import argparse
import tempfile
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from core.config import get_config
from core.enhancers import EnhanceMethod, enhance
from core.imaging import ImageRGB, WindowSpec, save_image
from core.metrics import measure, psnr
from core.restorers import COMPARED_PIPELINES, BackgroundLight, get_pipeline, rank_bl_candidates, restore
from core.simulator import build_case, generate_case, reproduce_case
from bench.dataset import ingest_dataset
from bench.report import emit_report
from bench.runner import run_benchmark

WATER = BackgroundLight(0.1, 0.6, 0.7, source="smoke")


def _scene(width=96, height=64, seed=0):
    """Random clear scene with a bright object near the camera."""
    data = np.random.default_rng(seed).uniform(0.15, 0.85, size=(height, width, 3))
    data[4:16, 4:20] = 0.95
    return ImageRGB(data)


def test_config():
    """Show the active configuration."""
    print("\n=== Testing Configuration System ===")

    config = get_config()
    print(f"Window radius: {config.kernels.window_radius}")
    print(f"Transmission floor: {config.kernels.t_floor}")
    print(f"nrer: {config.priors.nrer}")
    print(f"Benchmark size: {config.bench.target_size}, jobs {config.bench.jobs}")

    print("✓ Configuration system working")


def test_enhancers():
    """Run every enhancer on a degraded scene."""
    print("\n=== Testing Enhancers ===")

    config = get_config()
    degraded = build_case(_scene(), "ramp-vertical", WATER, config.priors).degraded
    for method in EnhanceMethod:
        row = measure(enhance(degraded, method, config.enhance), config.metrics)
        print(f"  {method.value:<9} UIQM {row.uiqm:7.4f}  UCIQE {row.uciqe:.4f}  entropy {row.entropy:.3f}")

    print("✓ Enhancers working")


def test_restorers():
    """Run every compared pipeline and the background-light ranking."""
    print("\n=== Testing Restoration Pipelines ===")

    config = get_config()
    case = build_case(_scene(), "ramp-vertical", WATER, config.priors)
    win = WindowSpec(config.kernels.window_radius)

    print(f"Ground-truth light (8-bit): {WATER.to_8bit()}")
    for method, light in rank_bl_candidates(case.degraded, config.priors, win):
        print(f"  {method.value:<11} {light.to_8bit()}")

    for name in COMPARED_PIPELINES:
        restored, light, _ = restore(case.degraded, get_pipeline(name), win, config.priors)
        print(f"  {name:<6} B={light.to_8bit()}  PSNR vs clear {psnr(restored, case.clear):6.2f} dB")

    print("✓ Restoration pipelines working")


def test_simulator():
    """Write a case directory and reproduce it from its manifest."""
    print("\n=== Testing Simulator ===")

    config = get_config()
    with tempfile.TemporaryDirectory() as tmp:
        clear_path = Path(tmp) / "clear_scene.png"
        save_image(_scene(48, 32), clear_path)
        case = generate_case(clear_path, "radial", WATER, config.priors, Path(tmp) / "case")
        again = reproduce_case(Path(tmp) / "case")
        print(f"  Files: {sorted(p.name for p in (Path(tmp) / 'case').iterdir())}")
        print(f"  Reproduced exactly: {np.array_equal(case.degraded.data, again.degraded.data)}")

    print("✓ Simulator working")


def test_benchmark():
    """Benchmark a few methods on a tiny synthetic dataset."""
    print("\n=== Testing Benchmark ===")

    config = get_config()
    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp) / "data"
        data.mkdir()
        for seed in range(3):
            case = build_case(_scene(seed=seed), "ramp-vertical", WATER, config.priors)
            save_image(case.degraded, data / f"scene{seed}.png")

        manifest = ingest_dataset(data, resize=None)
        report = run_benchmark(manifest, ["identity", "clahe", "rghs"], ["ulap", "nom"],
                               Path(tmp) / "out", config, jobs=2)
        for summary in report.summarize():
            print(f"  {summary.method:<9} n={summary.count}  UIQM {summary.formatted('UIQM')}")
        emit_report(report, "csv", Path(tmp) / "out" / "report.csv")
        print(f"  All rows ok: {report.all_ok}")

    print("✓ Benchmark working")


def main():
    """Main test application."""
    parser = argparse.ArgumentParser(description="Underwater Image Quality Bench Smoke Tests")
    parser.add_argument("--test", choices=["all", "config", "enhance", "restore", "simulate", "bench"],
                        default="all", help="Run specific tests")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    args = parser.parse_args()

    # Setup logging
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    print("Underwater Image Quality Bench - Smoke Tests")
    print("=" * 50)

    test_functions = {
        "config": test_config,
        "enhance": test_enhancers,
        "restore": test_restorers,
        "simulate": test_simulator,
        "bench": test_benchmark,
    }

    selected = test_functions if args.test == "all" else {args.test: test_functions[args.test]}
    failed = 0
    for test_name, test_func in selected.items():
        try:
            test_func()
        except Exception as e:
            failed += 1
            print(f"\n❌ Test {test_name} failed: {e}")
            if args.verbose:
                import traceback
                traceback.print_exc()

    print("\n" + "=" * 50)
    print("Smoke tests completed!" if not failed else f"{failed} smoke test(s) failed")
    print("\nTo use the toolkit:")
    print("  1. Install dependencies: pip install -r requirements.txt")
    print("  2. Install the CLI: pip install -e .")
    print("  3. Benchmark a folder: uwbench benchmark --in images/ --out results/")

    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
