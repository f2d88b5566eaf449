"""Serialization: binary PGM snapshots and CSV series, written atomically."""

from __future__ import annotations

import os
import tempfile

import numpy as np

from meiodrive.engine import ObservableSeries

# grayscale encoding of the three genotypes
GRAY = {0: 255, 1: 128, 2: 0}
_GRAY_LUT = np.array([255, 128, 0], dtype=np.uint8)


class OutputError(Exception):
    pass


def _atomic_write(path: str, payload: bytes) -> None:
    """Write via a temporary file in the same directory, then rename, so a
    failure never leaves a partial file behind."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory,
                                   prefix="." + os.path.basename(path) + ".")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as e:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OutputError(f"cannot write {path}: {e}") from e


def encode_pgm(gray: np.ndarray) -> bytes:
    """Binary PGM (P5, maxval 255, row-major, origin top-left)."""
    gray = np.asarray(gray, dtype=np.uint8)
    if gray.ndim != 2:
        raise ValueError("PGM payload must be two-dimensional")
    h, w = gray.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + gray.tobytes()


def genotype_gray(geno: np.ndarray) -> np.ndarray:
    geno = np.asarray(geno)
    if geno.min() < 0 or geno.max() > 2:
        raise ValueError("genotype codes must be 0, 1 or 2")
    return _GRAY_LUT[geno]


def write_snapshot(state, path: str) -> None:
    """Write one configuration as a PGM image.

    Accepts a lattice state (d=2: its grid; d=1: a single-row image) or a
    raw genotype array of 1 or 2 dimensions.
    """
    geno = state.grid() if hasattr(state, "grid") else np.asarray(state)
    if geno.ndim == 1:
        geno = geno[None, :]
    if geno.ndim != 2:
        raise ValueError("snapshots require a 1- or 2-dimensional state")
    _atomic_write(path, encode_pgm(genotype_gray(geno)))


def write_spacetime(snapshots, path: str) -> None:
    """d=1 space-time raster: one image row per sample time, top first."""
    rows = [np.asarray(s).reshape(-1) for s in snapshots]
    if not rows:
        raise ValueError("space-time raster needs at least one sample")
    _atomic_write(path, encode_pgm(genotype_gray(np.stack(rows))))


def format_series(series: ObservableSeries) -> str:
    lines = [",".join(["time"] + list(series.columns))]
    for row in series.rows():
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def write_series(series: ObservableSeries, path: str) -> None:
    """CSV with a header row; time first; 12 significant digits."""
    _atomic_write(path, format_series(series).encode("ascii"))


def write_text(text: str, path: str) -> None:
    _atomic_write(path, text.encode("utf-8"))
