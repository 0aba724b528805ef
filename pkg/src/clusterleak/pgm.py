"""Binary PGM (P5) reading and writing for the image experiments.

Only 8-bit single-channel images (maxval 255) are supported; each image
becomes one flattened integer row of the dataset, in row-major pixel
order, files taken in lexicographic name order.
"""

from __future__ import annotations

from pathlib import Path

from .simulation import Dataset


class PgmFormatError(ValueError):
    """The file is not a binary 8-bit P5 image (or images disagree in shape)."""


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments between header tokens.
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PgmFormatError("truncated PGM header")
    return data[start:pos], pos


def read_pgm(path) -> tuple[int, int, list[int]]:
    """Parse one binary P5 file into (width, height, row-major pixels)."""
    path = Path(path)
    data = path.read_bytes()
    try:
        magic, pos = _read_token(data, 0)
        if magic != b"P5":
            raise PgmFormatError(f"{path}: not a binary PGM (magic {magic!r})")
        width_tok, pos = _read_token(data, pos)
        height_tok, pos = _read_token(data, pos)
        maxval_tok, pos = _read_token(data, pos)
    except PgmFormatError as exc:
        raise PgmFormatError(f"{path}: {exc}") from None
    try:
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except ValueError:
        raise PgmFormatError(f"{path}: non-numeric header fields") from None
    if maxval != 255:
        raise PgmFormatError(f"{path}: maxval must be 255, got {maxval}")
    if width < 1 or height < 1:
        raise PgmFormatError(f"{path}: bad dimensions {width}x{height}")
    pos += 1  # single whitespace byte separates header from raster
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise PgmFormatError(f"{path}: raster has {len(raster)} bytes, expected {width * height}")
    return width, height, list(raster)


def write_pgm(path, width: int, height: int, pixels) -> None:
    """Write pixels as a canonical binary P5 file (maxval 255)."""
    pixels = list(pixels)
    if len(pixels) != width * height:
        raise ValueError(f"got {len(pixels)} pixels for a {width}x{height} image")
    if any(not 0 <= int(p) <= 255 for p in pixels):
        raise ValueError("pixel values must lie in [0, 255]")
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + bytes(int(p) for p in pixels))


def list_pgm_files(path) -> list[Path]:
    """PGM files of a directory in lexicographic name order."""
    root = Path(path)
    if not root.is_dir():
        raise PgmFormatError(f"{root}: not a directory")
    return sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() == ".pgm")


def dir_shape(path) -> tuple[int, int]:
    """(width, height) shared by the images of a directory."""
    files = list_pgm_files(path)
    if not files:
        raise PgmFormatError(f"{path}: no .pgm files found")
    width, height, _ = read_pgm(files[0])
    return width, height


def load_pgm_dir(path) -> Dataset:
    """Flatten every image of a directory into one dataset row each."""
    files = list_pgm_files(path)
    if not files:
        raise PgmFormatError(f"{path}: no .pgm files found")
    rows = []
    shape = None
    for f in files:
        width, height, pixels = read_pgm(f)
        if shape is None:
            shape = (width, height)
        elif (width, height) != shape:
            raise PgmFormatError(
                f"{f}: dimensions {width}x{height} differ from first image {shape[0]}x{shape[1]}"
            )
        rows.append(tuple(pixels))
    return Dataset(tuple(rows))
