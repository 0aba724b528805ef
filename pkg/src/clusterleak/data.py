"""Dataset generation and CSV ingestion.

Sources must land on exact integers: synthetic data is drawn integral,
and CSV cells are scaled by a fixed factor that has to clear every
decimal exactly (e.g. one-decimal data with scale 10).
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import numpy as np

from .simulation import Dataset


class CsvFormatError(ValueError):
    """Malformed CSV dataset (ragged or non-numeric rows)."""


class QuantizationError(ValueError):
    """A scaled CSV cell did not come out an exact integer."""


def gen_synthetic(n: int, d: int, lo: int, hi: int, rng: np.random.Generator) -> Dataset:
    """Draw an n x d matrix of integers uniform on [lo, hi] inclusive."""
    if lo > hi:
        raise ValueError(f"lo={lo} exceeds hi={hi}")
    values = rng.integers(lo, hi + 1, size=(n, d))
    return Dataset(tuple(tuple(int(v) for v in row) for row in values))


def load_csv(path, scale: int = 1, skip_header: bool = False) -> Dataset:
    """Read a numeric CSV and quantize it to exact integers.

    Every cell is parsed as an exact decimal, multiplied by ``scale`` and
    required to be integral afterwards; the offending row/column is named
    otherwise.
    """
    path = Path(path)
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    rows: list[tuple[int, ...]] = []
    width = None
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if skip_header and lineno == 1:
                continue
            if not cells:
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise CsvFormatError(
                    f"{path}: row {lineno} has {len(cells)} cells, expected {width}"
                )
            out = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    value = Fraction(cell.strip()) * scale
                except (ValueError, ZeroDivisionError) as exc:
                    raise CsvFormatError(
                        f"{path}: row {lineno}, column {colno}: not numeric: {cell!r}"
                    ) from exc
                if value.denominator != 1:
                    raise QuantizationError(
                        f"{path}: row {lineno}, column {colno}: "
                        f"{cell!r} * {scale} is not an integer"
                    )
                out.append(int(value))
            rows.append(tuple(out))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    return Dataset(tuple(rows))
