"""Objective functions for NMF and their derivatives with respect to ``h``.

Two objectives are supported:

* squared Euclidean distance, ``0.5 * sum((V - WH) ** 2)``
* generalized KL divergence, ``sum(V log(V / WH) - V + WH)``

Derivatives are provided for the ``h`` factor only. The ``w`` versions follow
from the identity ``cost(V, W, H) == cost(V.T, H.T, W.T)``.
"""

from enum import Enum

import numpy as np

from ._matrix import (
    DomainError,
    as_nonneg_matrix,
    check_factor_shapes,
    check_same_shape,
    transpose,
)


class CostKind(str, Enum):
    EUCLIDEAN = "euclidean"
    GKL = "gkl"


def _validated(v, w, h):
    v = as_nonneg_matrix(v, "v")
    w = as_nonneg_matrix(w, "w")
    h = as_nonneg_matrix(h, "h")
    check_factor_shapes(v, w, h)
    return v, w, h


def _check_log_domain(v, wh):
    bad = (v > 0) & (wh <= 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise DomainError(f"reconstruction is 0 at ({i}, {j}) where v = {v[i, j]!r} > 0")


def kl_terms(v, wh):
    """Elementwise ``v * log(v / wh)`` with ``0 * log 0 = 0``."""
    v = np.asarray(v, dtype=np.float64)
    wh = np.asarray(wh, dtype=np.float64)
    _check_log_domain(v, wh)
    out = np.zeros(np.broadcast(v, wh).shape)
    pos = np.broadcast_to(v > 0, out.shape)
    vb = np.broadcast_to(v, out.shape)
    whb = np.broadcast_to(wh, out.shape)
    out[pos] = vb[pos] * np.log(vb[pos] / whb[pos])
    return out


def gkl_terms(v, wh):
    """Elementwise generalized KL divergence ``v log(v / wh) - v + wh``."""
    return kl_terms(v, wh) - v + wh


def euclidean_cost(v, w, h):
    v, w, h = _validated(v, w, h)
    r = v - w @ h
    return 0.5 * float(np.sum(r * r))


def gkl_cost(v, w, h):
    v, w, h = _validated(v, w, h)
    return float(np.sum(gkl_terms(v, w @ h)))


def kl_cost_standard(v, wh):
    """Plain KL divergence ``sum(v log(v / wh))``; unlike GKL it can be negative."""
    v = as_nonneg_matrix(v, "v")
    wh = as_nonneg_matrix(wh, "wh")
    check_same_shape(v, wh, ("v", "wh"))
    return float(np.sum(kl_terms(v, wh)))


def cost(kind, v, w, h):
    kind = CostKind(kind)
    if kind is CostKind.EUCLIDEAN:
        return euclidean_cost(v, w, h)
    return gkl_cost(v, w, h)


def grad_h_euclidean(v, w, h):
    """Gradient of :func:`euclidean_cost` in ``h``: ``W^T W H - W^T V``."""
    v, w, h = _validated(v, w, h)
    return (w.T @ w) @ h - w.T @ v


def grad_h_gkl(v, w, h):
    """Gradient of :func:`gkl_cost` in ``h``.

    ``grad[a, mu] = sum_i W[i, a] - sum_i V[i, mu] W[i, a] / (WH)[i, mu]``
    """
    v, w, h = _validated(v, w, h)
    wh = w @ h
    _check_log_domain(v, wh)
    ratio = np.divide(v, wh, out=np.zeros_like(v), where=v > 0)
    return w.sum(axis=0)[:, None] - w.T @ ratio


def grad_w_euclidean(v, w, h):
    return transpose(grad_h_euclidean(transpose(v), transpose(h), transpose(w)))


def grad_w_gkl(v, w, h):
    return transpose(grad_h_gkl(transpose(v), transpose(h), transpose(w)))


def hessian_h_euclidean(w):
    """Hessian of the Euclidean cost in any single column of ``h``: ``W^T W``."""
    w = as_nonneg_matrix(w, "w")
    return w.T @ w
