"""
Dataset ingestion: image enumeration and background-light annotations.

Annotation CSV rows are "filename, B_r, B_g, B_b" with 0-255 integers; an
optional header line starting with "filename" is skipped.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from core.exceptions import DatasetError
from core.imaging import ImageRGB, load_image, resize_bilinear


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IMAGE_SUFFIXES = {'.png', '.jpg', '.jpeg'}
DEFAULT_RESIZE = (600, 400)
HEADER_FIRST_CELL = 'filename'


@dataclass
class DatasetManifest:
    """Images of a dataset, their optional ground-truth light and the working size."""
    root: Path
    images: List[Path] = field(default_factory=list)
    gt_bl: Dict[str, Tuple[int, int, int]] = field(default_factory=dict)
    resize: Optional[Tuple[int, int]] = DEFAULT_RESIZE     # (width, height); None keeps native size

    def __post_init__(self):
        for name, triple in self.gt_bl.items():
            if len(triple) != 3 or any(not 0 <= v <= 255 for v in triple):
                raise DatasetError(f"Ground-truth light for {name} outside 0-255: {triple}")

    @property
    def annotated(self) -> List[Path]:
        return [path for path in self.images if path.name in self.gt_bl]

    def output_stem(self, path: Path) -> str:
        """Base name for files derived from an image; the full name when another image shares its stem."""
        if sum(p.stem == path.stem for p in self.images) > 1:
            return path.name
        return path.stem

    def load(self, path: Path) -> ImageRGB:
        """Load an image at the working size."""
        img = load_image(path)
        if self.resize is not None and (img.width, img.height) != tuple(self.resize):
            img = resize_bilinear(img, *self.resize)
        return img


def _parse_row(row: List[str], line: int, path: Path) -> Tuple[str, Tuple[int, int, int]]:
    cells = [cell.strip() for cell in row]
    if len(cells) != 4 or not cells[0]:
        raise DatasetError(f"{path}:{line}: expected 'filename,B_r,B_g,B_b', got {','.join(row)}")
    try:
        values = tuple(int(cell) for cell in cells[1:])
    except ValueError:
        raise DatasetError(f"{path}:{line}: background light must be integers, got {','.join(cells[1:])}") from None
    if any(not 0 <= v <= 255 for v in values):
        raise DatasetError(f"{path}:{line}: background light outside 0-255: {values}")
    return cells[0], values  # type: ignore[return-value]


def read_annotations(path: PathLike) -> Dict[str, Tuple[int, int, int]]:
    """Read the annotation CSV into filename -> (R, G, B)."""
    path = Path(path)
    annotations: Dict[str, Tuple[int, int, int]] = {}
    try:
        with open(path, newline='', encoding='utf-8') as f:
            for line, row in enumerate(csv.reader(f), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if line == 1 and len(row) == 4 and row[0].strip().lower() == HEADER_FIRST_CELL:
                    logger.debug(f"Skipping header of {path}: {row}")
                    continue
                name, values = _parse_row(row, line, path)
                annotations[name] = values
    except OSError as e:
        raise DatasetError(f"Cannot read annotations {path}: {e}") from e
    return annotations


def ingest_dataset(root: PathLike,
                   annotations: Optional[PathLike] = None,
                   resize: Optional[Tuple[int, int]] = DEFAULT_RESIZE) -> DatasetManifest:
    """
    Enumerate the PNG/JPEG images of a directory (or a single file).

    Args:
        root: Dataset directory or one image file
        annotations: Optional CSV of ground-truth background light
        resize: Working (width, height); None keeps each image's size

    Returns:
        DatasetManifest with images sorted by file name
    """
    root = Path(root)
    if root.is_file():
        images = [root] if root.suffix.lower() in IMAGE_SUFFIXES else []
    elif root.is_dir():
        images = sorted((p for p in root.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
                        key=lambda p: p.name)
    else:
        raise DatasetError(f"Dataset root {root} does not exist")

    gt_bl = read_annotations(annotations) if annotations else {}
    names = {p.name for p in images}
    for name in sorted(set(gt_bl) - names):
        logger.warning(f"Annotation for {name} has no matching image, ignored")
    missing = [p.name for p in images if p.name not in gt_bl]
    if gt_bl and missing:
        logger.warning(f"{len(missing)} images have no annotation and are excluded from BL accuracy")

    logger.info(f"Ingested {len(images)} images from {root} ({len(gt_bl)} annotations)")
    return DatasetManifest(root=root, images=images,
                           gt_bl={k: v for k, v in gt_bl.items() if k in names},
                           resize=tuple(resize) if resize else None)
