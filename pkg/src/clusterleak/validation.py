"""Input validation helpers shared across the package.

Everything downstream works in exact arithmetic (Python ints and
Fractions), so validation converts incoming arrays to plain nested
lists of ints and refuses anything that cannot be represented exactly.
"""

from __future__ import annotations

import numbers

import numpy as np


def check_integer_matrix(X, name: str = "X") -> list[list[int]]:
    """Coerce a 2-D array-like of exact integers to a list of int rows.

    Accepts nested sequences and numpy arrays.  Integer dtypes pass
    through; float entries are accepted only when they are exactly
    integral (so ``numpy`` float arrays holding whole numbers work).
    Raises ValueError for ragged, empty, non-2D or non-integral input.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
        X = X.tolist()
    rows = list(X)
    if not rows:
        raise ValueError(f"{name} must contain at least one row")
    out = []
    width = None
    for i, row in enumerate(rows):
        if isinstance(row, np.ndarray):
            row = row.tolist()
        if not isinstance(row, (list, tuple)):
            raise ValueError(f"{name} must be 2-dimensional; row {i} is not a sequence")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"{name} has ragged rows: row {i} has {len(row)} entries, expected {width}")
        out.append([check_integer_scalar(v, f"{name}[{i}][{j}]") for j, v in enumerate(row)])
    if width == 0:
        raise ValueError(f"{name} must have at least one column")
    return out


def check_integer_scalar(v, name: str = "value") -> int:
    """Convert one entry to an exact Python int or raise ValueError."""
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, float):
        if v.is_integer():
            return int(v)
        raise ValueError(f"{name} is not an exact integer: {v!r}")
    if isinstance(v, numbers.Rational):
        if v.denominator == 1:
            return int(v.numerator)
        raise ValueError(f"{name} is not an exact integer: {v!r}")
    raise ValueError(f"{name} has unsupported type {type(v).__name__}")


def check_random_state(random_state) -> np.random.Generator:
    """Build a numpy Generator from None, an int seed, a SeedSequence, or a Generator."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None or isinstance(random_state, (int, np.integer, np.random.SeedSequence)):
        return np.random.default_rng(random_state)
    raise ValueError(
        f"random_state must be None, an int, a SeedSequence or a Generator, got {type(random_state).__name__}"
    )
