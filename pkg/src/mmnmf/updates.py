"""Multiplicative update rules and the adaptive learning rates behind them.

Each ``update_h_*`` rescales every entry of ``H`` by a non-negative ratio,
using the pre-update ``H`` everywhere. The ``update_w_*`` rules are obtained
by running the ``H`` rule on ``(V.T, H.T, W.T)``; the ``*_direct`` variants
spell out the ``W`` formulas and exist for cross-checking.
"""

from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from ._matrix import (
    DEFAULT_EPS,
    ShapeError,
    as_nonneg_matrix,
    as_real_matrix,
    check_same_shape,
    hadamard_ratio,
    transpose,
)
from .costs import CostKind, _check_log_domain, _validated

# Test-only mutation hook; see ``perturbed_numerator``.
_numerator_scale = 1.0


@contextmanager
def perturbed_numerator(factor):
    """Scale the numerator of every H/W update by ``factor`` while active.

    Used to check that the verification battery notices a broken rule.
    """
    global _numerator_scale
    previous = _numerator_scale
    _numerator_scale = float(factor)
    try:
        yield
    finally:
        _numerator_scale = previous


@dataclass(frozen=True)
class Factorization:
    w: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        w = as_nonneg_matrix(self.w, "w")
        h = as_nonneg_matrix(self.h, "h")
        if w.shape[1] != h.shape[0]:
            raise ShapeError(f"w {w.shape} and h {h.shape} disagree on the rank")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "h", h)

    @property
    def rank(self):
        return self.w.shape[1]

    def reconstruct(self):
        return self.w @ self.h


def _gkl_quotient(v, wh):
    _check_log_domain(v, wh)
    return np.divide(v, wh, out=np.zeros_like(v), where=v > 0)


def update_h_euclidean(v, w, h, eps=DEFAULT_EPS):
    v, w, h = _validated(v, w, h)
    num = (w.T @ v) * _numerator_scale
    den = (w.T @ w) @ h
    return h * hadamard_ratio(num, den, eps)


def update_h_gkl(v, w, h, eps=DEFAULT_EPS):
    v, w, h = _validated(v, w, h)
    num = (w.T @ _gkl_quotient(v, w @ h)) * _numerator_scale
    den = np.broadcast_to(w.sum(axis=0)[:, None], h.shape)
    return h * hadamard_ratio(num, den, eps)


def update_w_euclidean(v, w, h, eps=DEFAULT_EPS):
    return transpose(update_h_euclidean(transpose(v), transpose(h), transpose(w), eps))


def update_w_gkl(v, w, h, eps=DEFAULT_EPS):
    return transpose(update_h_gkl(transpose(v), transpose(h), transpose(w), eps))


def update_w_euclidean_direct(v, w, h, eps=DEFAULT_EPS):
    v, w, h = _validated(v, w, h)
    return w * (v @ h.T) / np.maximum(w @ (h @ h.T), eps)


def update_w_gkl_direct(v, w, h, eps=DEFAULT_EPS):
    v, w, h = _validated(v, w, h)
    num = _gkl_quotient(v, w @ h) @ h.T
    return w * num / np.maximum(h.sum(axis=1)[None, :], eps)


UPDATE_H = {CostKind.EUCLIDEAN: update_h_euclidean, CostKind.GKL: update_h_gkl}
UPDATE_W = {CostKind.EUCLIDEAN: update_w_euclidean, CostKind.GKL: update_w_gkl}


def eta_euclidean(w, h, eps=DEFAULT_EPS):
    """Per-entry step size ``H / (W^T W H)`` that turns gradient descent multiplicative."""
    w = as_nonneg_matrix(w, "w")
    h = as_nonneg_matrix(h, "h")
    if w.shape[1] != h.shape[0]:
        raise ShapeError(f"w has shape {w.shape} but h has shape {h.shape}")
    return hadamard_ratio(h, (w.T @ w) @ h, eps)


def eta_gkl(w, h, eps=DEFAULT_EPS):
    """Per-entry step size ``H[a, mu] / sum_i W[i, a]``."""
    w = as_nonneg_matrix(w, "w")
    h = as_nonneg_matrix(h, "h")
    if w.shape[1] != h.shape[0]:
        raise ShapeError(f"w has shape {w.shape} but h has shape {h.shape}")
    return hadamard_ratio(h, np.broadcast_to(w.sum(axis=0)[:, None], h.shape), eps)


def additive_step(h, eta, grad):
    """Plain gradient step ``h - eta * grad``. The result may be negative."""
    h = as_real_matrix(h, "h")
    eta = as_nonneg_matrix(eta, "eta")
    grad = as_real_matrix(grad, "grad")
    check_same_shape(h, eta, ("h", "eta"))
    check_same_shape(h, grad, ("h", "grad"))
    return h - eta * grad
