"""Dense matrix helpers shared by every other module.

Matrices are plain 2-D ``float64`` numpy arrays. The helpers here validate
shapes and values and provide the few kernels the update rules need.
"""

import numpy as np

DEFAULT_EPS = 1e-12


class ShapeError(ValueError):
    """Operands have incompatible shapes."""


class DomainError(ValueError):
    """An input lies outside the domain of a cost or update (e.g. log of 0)."""


def as_real_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def as_nonneg_matrix(a, name="matrix"):
    """Return ``a`` as a finite, entrywise non-negative 2-D float64 array."""
    arr = as_real_matrix(a, name)
    if np.any(arr < 0):
        i, j = np.argwhere(arr < 0)[0]
        raise DomainError(f"{name} has a negative entry {arr[i, j]!r} at ({i}, {j})")
    return arr


def check_same_shape(a, b, names=("a", "b")):
    if a.shape != b.shape:
        raise ShapeError(f"{names[0]} has shape {a.shape} but {names[1]} has shape {b.shape}")


def check_factor_shapes(v, w, h):
    """Validate ``v ~ w @ h`` shapes: v (n, m), w (n, r), h (r, m)."""
    if w.shape[1] != h.shape[0]:
        raise ShapeError(f"w has shape {w.shape} but h has shape {h.shape}; inner dimensions differ")
    if v.shape != (w.shape[0], h.shape[1]):
        raise ShapeError(f"v has shape {v.shape}, expected {(w.shape[0], h.shape[1])} from w {w.shape} and h {h.shape}")


def matmul(a, b):
    a = as_real_matrix(a, "a")
    b = as_real_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a):
    # Contiguous copy so repeated transposes never alias the caller's buffer.
    return np.ascontiguousarray(as_real_matrix(a).T)


def hadamard_ratio(num, den, eps=DEFAULT_EPS):
    """Elementwise ``num / max(den, eps)``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    num = as_nonneg_matrix(num, "num")
    den = as_nonneg_matrix(den, "den")
    check_same_shape(num, den, ("num", "den"))
    return num / np.maximum(den, eps)
