"""Numerical probes of the convexity structure of the NMF objectives.

The counterexamples evaluate the midpoint inequality
``f(lam x1 + (1 - lam) x2) <= lam f(x1) + (1 - lam) f(x2)`` at two chosen
points and report ``gap = R - L``. A negative gap certifies that the
objective is not jointly convex in ``(w, h)``. Every ``L`` and ``R`` is
computed by calling the cost functions in :mod:`mmnmf.costs`; the closed
forms appear only in tests.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._matrix import DomainError
from .costs import CostKind, euclidean_cost, gkl_cost, gkl_terms, kl_terms


@dataclass(frozen=True)
class CounterexampleReport:
    left: float
    right: float
    gap: float
    lam: float
    points: tuple

    def to_dict(self):
        def plain(p):
            if isinstance(p, np.ndarray):
                return p.tolist()
            if isinstance(p, (tuple, list)):
                return [plain(q) for q in p]
            return float(p)

        return {
            "left": self.left,
            "right": self.right,
            "gap": self.gap,
            "lambda": self.lam,
            "points": plain(self.points),
        }


def midpoint_report(f, x1, x2, lam=0.5):
    """Evaluate the convexity inequality for ``f`` on the segment ``x1 -> x2``.

    ``x1`` and ``x2`` are tuples of arrays (or floats) passed as positional
    arguments to ``f``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    mid = tuple(lam * np.asarray(a, dtype=float) + (1 - lam) * np.asarray(b, dtype=float) for a, b in zip(x1, x2))
    left = float(f(*mid))
    right = float(lam * f(*x1) + (1 - lam) * f(*x2))
    return CounterexampleReport(left=left, right=right, gap=right - left, lam=lam, points=(x1, x2))


# Cost of a single entry as used by the counterexamples. The Euclidean version drops the 1/2.


def _sq_entry(v):
    return lambda w, h: 2.0 * euclidean_cost([[v]], np.atleast_1d(w)[None, :], np.atleast_1d(h)[:, None])


def _gkl_entry(v):
    return lambda w, h: gkl_cost([[v]], np.atleast_1d(w)[None, :], np.atleast_1d(h)[:, None])


def _check_v(v):
    if not (np.isfinite(v) and v > 0):
        raise DomainError(f"v must be a positive finite number, got {v!r}")


def _check_r(r):
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    return int(r)


def euclid_scalar_counterexample(v):
    """``(v - w h)^2`` between ``(0, 0)`` and ``(sqrt v, sqrt v)``; gap ``-v^2 / 16``."""
    _check_v(v)
    s = np.sqrt(v)
    return midpoint_report(_sq_entry(v), (0.0, 0.0), (s, s))


def euclid_vector_counterexample(v, r):
    _check_v(v)
    r = _check_r(r)
    s = np.full(r, np.sqrt(v / r))
    return midpoint_report(_sq_entry(v), (np.zeros(r), np.zeros(r)), (s, s))


def kl_scalar_counterexample(v):
    """GKL entry between ``(sqrt v, 3 sqrt v)`` and ``(3 sqrt v, sqrt v)``; gap ``v log(4 / 3e)``."""
    _check_v(v)
    s = np.sqrt(v)
    return midpoint_report(_gkl_entry(v), (s, 3 * s), (3 * s, s))


def kl_vector_counterexample(v, r):
    _check_v(v)
    r = _check_r(r)
    s = np.full(r, np.sqrt(v / r))
    return midpoint_report(_gkl_entry(v), (s, 3 * s), (3 * s, s))


def matrix_nonconvexity_witness(kind, n, m, r, v=1.0):
    """Embed the vector counterexample into a full ``(W, H)`` instance.

    The probe moves row 0 of ``W`` and column 0 of ``H``; ``V[0, 0] = v``.
    Every other cell must contribute an affine function of the probe
    parameter, otherwise its curvature would be added to the gap:

    * Euclidean: the remaining rows of ``W`` and columns of ``H`` are 0, so
      every other cell sees a constant reconstruction (0) and ``V = 1`` there.
    * GKL: the remaining factor entries are 1. Cells sharing the probe row
      or column have ``V = 0``, which reduces their divergence to the
      reconstruction itself, linear along the probe. All other cells have
      ``V = 1`` against a constant reconstruction.

    The gap of the full objective then equals the vector-level gap.
    """
    kind = CostKind(kind)
    _check_v(v)
    for name, d in (("n", n), ("m", m), ("r", r)):
        if int(d) != d or d < 1:
            raise ValueError(f"{name} must be a positive integer, got {d!r}")
    n, m, r = int(n), int(m), int(r)

    V = np.ones((n, m))
    if kind is CostKind.EUCLIDEAN:
        base_w, base_h = np.zeros((n, r)), np.zeros((r, m))
        s = np.full(r, np.sqrt(v / r))
        probe_1, probe_2 = (np.zeros(r), np.zeros(r)), (s, s)
        f = lambda W, H: 2.0 * euclidean_cost(V, W, H)
    else:
        base_w, base_h = np.ones((n, r)), np.ones((r, m))
        V[0, :] = 0.0
        V[:, 0] = 0.0
        s = np.full(r, np.sqrt(v / r))
        probe_1, probe_2 = (s, 3 * s), (3 * s, s)
        f = lambda W, H: gkl_cost(V, W, H)
    V[0, 0] = v

    def place(probe):
        W, H = base_w.copy(), base_h.copy()
        W[0, :] = probe[0]
        H[:, 0] = probe[1]
        return W, H

    return midpoint_report(f, place(probe_1), place(probe_2))


def gkl_scalar_derivative(v, w_row, h, a):
    """Partial derivative of ``D_GKL(v || w_row . h)`` with respect to ``h[a]``."""
    w_row = np.asarray(w_row, dtype=float)
    h = np.asarray(h, dtype=float)
    if not v > 0 or np.any(w_row <= 0) or np.any(h <= 0):
        raise DomainError("gkl_scalar_derivative needs v, w_row and h strictly positive")
    if w_row.shape != h.shape:
        raise ValueError(f"w_row {w_row.shape} and h {h.shape} differ in shape")
    s = float(w_row @ h)
    return w_row[a] / s * (s - v)


@dataclass(frozen=True)
class LandscapeSample:
    h_grid: np.ndarray
    kld_values: np.ndarray
    gkld_values: np.ndarray
    h_star: float

    def rows(self):
        return zip(self.h_grid.tolist(), self.kld_values.tolist(), self.gkld_values.tolist())

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["h", "kld", "gkld"])
            for row in self.rows():
                out.writerow([format(x, ".17g") for x in row])


def landscape_sample(v, w, grid):
    """Tabulate ``D_KL(v || w h)`` and ``D_GKL(v || w h)`` over ``grid``."""
    _check_v(v)
    if not (np.isfinite(w) and w > 0):
        raise DomainError(f"w must be positive, got {w!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly positive and strictly ascending")
    wh = w * grid
    return LandscapeSample(
        h_grid=grid,
        kld_values=kl_terms(v, wh),
        gkld_values=gkl_terms(v, wh),
        h_star=v / w,
    )


def linear_grid(h_min, h_max, steps):
    if not (0 < h_min < h_max):
        raise ValueError(f"need 0 < h_min < h_max, got {h_min}, {h_max}")
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    return np.linspace(h_min, h_max, int(steps))
