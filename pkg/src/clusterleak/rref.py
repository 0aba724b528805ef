"""Exact rational row reduction and the single-nonzero leakage test.

The augmented system [W | C] is reduced to canonical RREF entirely in
rational arithmetic, pivoting only within the W block.  Any reduced row
whose W part holds exactly one nonzero entry pins the corresponding
variable to a unique value, read off the matching C row.  No floating
point enters at any stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class SingularMatrixError(ValueError):
    """Raised when an exact square solve meets a rank-deficient matrix."""


@dataclass(frozen=True)
class RrefResult:
    """Canonically reduced [W | C] split back into its two blocks."""

    w_rref: tuple[tuple[Fraction, ...], ...]
    c_rref: tuple[tuple[Fraction, ...], ...]
    pivot_cols: tuple[int, ...]


@dataclass(frozen=True)
class LeakageCertificate:
    """Variables pinned to unique values by single-nonzero reduced rows."""

    determined: tuple[tuple[int, tuple[Fraction, ...]], ...]

    @property
    def successful(self) -> bool:
        return bool(self.determined)

    def __len__(self) -> int:
        return len(self.determined)


def rref_augmented(w, c) -> RrefResult:
    """Reduce [w | c] to canonical RREF with pivots confined to the w block.

    Both sides receive identical row operations.  Entries may be ints or
    Fractions; arithmetic stays integral until a non-unit pivot forces a
    division, so typical binary systems reduce with pure integer work.
    Rows left without a pivot sort below pivot rows, all-zero rows last.
    """
    m = len(w)
    if len(c) != m:
        raise ValueError(f"w has {m} rows but c has {len(c)}")
    n_w = len(w[0]) if m else 0
    rows = [list(wr) + list(cr) for wr, cr in zip(w, c)]
    pivot_cols: list[int] = []
    piv = 0
    for col in range(n_w):
        at = next((i for i in range(piv, m) if rows[i][col] != 0), None)
        if at is None:
            continue
        rows[piv], rows[at] = rows[at], rows[piv]
        pivot = rows[piv][col]
        if pivot != 1:
            rows[piv] = [Fraction(v, pivot) for v in rows[piv]]
        prow = rows[piv]
        for i in range(m):
            if i == piv:
                continue
            f = rows[i][col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivot_cols.append(col)
        piv += 1
        if piv == m:
            break
    # Non-pivot rows are zero throughout the w block; push fully-zero rows
    # below rows that still carry a (necessarily inconsistent) c part.
    tail = rows[piv:]
    tail.sort(key=lambda r: all(v == 0 for v in r[n_w:]))
    rows[piv:] = tail
    w_rref = tuple(tuple(Fraction(v) for v in r[:n_w]) for r in rows)
    c_rref = tuple(tuple(Fraction(v) for v in r[n_w:]) for r in rows)
    return RrefResult(w_rref, c_rref, tuple(pivot_cols))


def leakage_rows(result: RrefResult) -> LeakageCertificate:
    """Collect every variable whose reduced row has exactly one nonzero.

    Such a row reads ``1 * y_j = value`` and holds in every solution of
    the system, so the variable is uniquely determined no matter how
    underdetermined the rest is.  An empty certificate means the run
    leaks nothing under this criterion.
    """
    determined = []
    for i, col in enumerate(result.pivot_cols):
        row = result.w_rref[i]
        if sum(1 for v in row if v != 0) == 1:
            determined.append((col, result.c_rref[i]))
    return LeakageCertificate(tuple(determined))


def solve_exact_square(w, c) -> list[list[Fraction]]:
    """Solve w @ y = c exactly for square nonsingular w (test oracle).

    Straightforward elimination to upper-triangular form followed by
    back-substitution, all in Fractions.  Kept deliberately independent
    of :func:`rref_augmented` so the two can cross-check each other.
    """
    n = len(w)
    if any(len(row) != n for row in w):
        raise ValueError("w must be square")
    if len(c) != n:
        raise ValueError(f"c must have {n} rows, got {len(c)}")
    width = len(c[0]) if n else 0
    a = [[Fraction(v) for v in row] for row in w]
    b = [[Fraction(v) for v in row] for row in c]
    for col in range(n):
        at = next((i for i in range(col, n) if a[i][col] != 0), None)
        if at is None:
            raise SingularMatrixError(f"no pivot available in column {col}")
        a[col], a[at] = a[at], a[col]
        b[col], b[at] = b[at], b[col]
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                b[i] = [x - f * y for x, y in zip(b[i], b[col])]
    y = [[Fraction(0)] * width for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(width):
            acc = b[i][j]
            for l in range(i + 1, n):
                acc -= a[i][l] * y[l][j]
            y[i][j] = acc / a[i][i]
    return y
