"""
Underwater Image Quality Bench

IFM-based restoration, IFM-free enhancement and no-reference quality
metrics for underwater images, with a benchmark harness around them.
"""

__version__ = "0.1.0"
__author__ = "Underwater Image Quality Bench Team"
