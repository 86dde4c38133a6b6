"""CSV reading and writing for dense non-negative matrices."""

import csv
import math

import numpy as np

from .solver import DataError


def load_csv(path, header=False, allow_negative=False):
    """Read a rectangular numeric CSV file into a float64 array.

    Raises :class:`DataError` for ragged rows, non-numeric or non-finite
    cells, and (unless ``allow_negative``) negative values; messages name
    the zero-based data row and column.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if header:
            next(reader, None)
        for r, raw in enumerate(reader):
            if not raw or all(not c.strip() for c in raw):
                continue
            row = []
            for c, cell in enumerate(raw):
                try:
                    x = float(cell)
                except ValueError:
                    raise DataError(f"{path}: non-numeric cell {cell!r} at (row {r}, col {c})") from None
                if not math.isfinite(x):
                    raise DataError(f"{path}: non-finite value {cell!r} at (row {r}, col {c})")
                if x < 0 and not allow_negative:
                    raise DataError(f"{path}: negative value {x!r} at (row {r}, col {c})")
                row.append(x)
            if rows and len(row) != len(rows[0]):
                raise DataError(f"{path}: row {r} has {len(row)} columns, expected {len(rows[0])}")
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data")
    return np.array(rows, dtype=np.float64)


def format_matrix(m):
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in m)


def save_csv(m, path):
    """Write ``m`` with 17 significant digits, which round-trips float64 exactly."""
    with open(path, "w", newline="") as fh:
        fh.write(format_matrix(m))
