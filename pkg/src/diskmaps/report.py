"""CSV, JSON and image writers.

Floats are written with ``repr`` and JSON keys sorted, so identical results
give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .levelset import RasterGrid


class OutputError(OSError):
    pass


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _open(path: Path, mode: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, mode, **({"newline": ""} if "b" not in mode else {}))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def _jsonable(obj):
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def emit_json(path, obj) -> Path:
    path = Path(path)
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    with _open(path, "w") as fh:
        fh.write(text + "\n")
    return path


def grid_to_gray(grid: RasterGrid) -> np.ndarray:
    return np.where(grid.mask, 255, 0).astype(np.uint8)


def write_pgm(path, image: np.ndarray) -> Path:
    """Binary P5 graymap, maxval 255."""
    image = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = image.shape
    path = Path(path)
    with _open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(image.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5" or int(parts[3]) != 255:
        raise ValueError(f"{path}: not an 8-bit P5 graymap")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8, count=w * h).reshape(h, w)


def write_png(path, image: np.ndarray) -> Path:
    from PIL import Image

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(path, format="PNG")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def emit_image(stem, grid: RasterGrid) -> tuple[Path, Path]:
    """Write ``stem.pgm`` and ``stem.png`` (0 outside the set, 255 inside)."""
    stem = Path(stem)
    gray = grid_to_gray(grid)
    return write_pgm(stem.with_suffix(".pgm"), gray), write_png(stem.with_suffix(".png"), gray)
