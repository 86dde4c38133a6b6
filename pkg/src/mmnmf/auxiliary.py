"""Majorization-minimization machinery for a single column ``h``.

For fixed ``W`` and one data column ``v`` the cost ``F(h)`` is majorized by an
auxiliary function ``G(h, ht)`` with ``G(h, ht) >= F(h)`` and
``G(h, h) == F(h)``. Minimizing ``G`` in its first argument gives the next
iterate, and for both objectives here that minimizer is exactly the
multiplicative update applied to the column.
"""

from dataclasses import dataclass

import numpy as np

from ._matrix import DEFAULT_EPS, DomainError, ShapeError, as_nonneg_matrix
from .costs import CostKind, gkl_terms


class MajorizationError(AssertionError):
    """The chain ``F(h1) <= G(h1, h0) <= G(h0, h0) <= F(h0)`` was violated."""


CHAIN_SLACK = 1e-12


def _vector(x, name, size=None):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ShapeError(f"{name} has length {arr.shape[0]}, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class AuxContext:
    """Single-column problem: data ``v`` (n,), basis ``w`` (n, r), anchor ``ht`` (r,)."""

    v: np.ndarray
    w: np.ndarray
    ht: np.ndarray

    def __post_init__(self):
        w = as_nonneg_matrix(self.w, "w")
        v = _vector(self.v, "v", w.shape[0])
        ht = _vector(self.ht, "ht", w.shape[1])
        if np.any(v < 0):
            raise DomainError("v must be non-negative")
        if np.any(ht <= 0):
            raise DomainError("anchor ht must be strictly positive")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "ht", ht)

    @property
    def rank(self):
        return self.w.shape[1]

    def with_anchor(self, ht):
        return AuxContext(self.v, self.w, ht)


def _h(ctx, h):
    return _vector(h, "h", ctx.rank)


# Euclidean ----------------------------------------------------------------


def f_euclidean(ctx, h):
    r = ctx.v - ctx.w @ _h(ctx, h)
    return 0.5 * float(r @ r)


def _grad_f_euclidean(ctx, h):
    return ctx.w.T @ (ctx.w @ h - ctx.v)


def k_matrix(ctx):
    """Diagonal curvature matrix ``diag((W^T W ht) / ht)``."""
    return np.diag((ctx.w.T @ ctx.w) @ ctx.ht / ctx.ht)


def g_euclidean(ctx, h):
    h = _h(ctx, h)
    d = h - ctx.ht
    curv = (ctx.w.T @ ctx.w) @ ctx.ht / ctx.ht
    return f_euclidean(ctx, ctx.ht) + float(d @ _grad_f_euclidean(ctx, ctx.ht)) + 0.5 * float(d @ (curv * d))


def grad_g_euclidean(ctx, h):
    h = _h(ctx, h)
    curv = (ctx.w.T @ ctx.w) @ ctx.ht / ctx.ht
    return _grad_f_euclidean(ctx, ctx.ht) + curv * (h - ctx.ht)


def psd_gap(ctx, nu):
    """Evaluate ``nu^T M nu`` for ``M = diag(ht) (K - W^T W) diag(ht)`` two ways.

    Returns ``(direct, paired)``: the plain quadratic form, and the sum
    ``sum_ab 0.5 (nu_a - nu_b)^2 ht_a ht_b (W^T W)_ab`` it reduces to.
    Both are non-negative; disagreement flags an error in either formula.
    """
    nu = _vector(nu, "nu", ctx.rank)
    wtw = ctx.w.T @ ctx.w
    m = ctx.ht[:, None] * (k_matrix(ctx) - wtw) * ctx.ht[None, :]
    direct = float(nu @ m @ nu)
    diff = nu[:, None] - nu[None, :]
    paired = float(np.sum(0.5 * diff**2 * np.outer(ctx.ht, ctx.ht) * wtw))
    return direct, paired


def mm_argmin_euclidean(ctx, eps=DEFAULT_EPS):
    """Closed-form minimizer of :func:`g_euclidean`: ``ht * (W^T v) / (W^T W ht)``."""
    num = ctx.w.T @ ctx.v
    den = (ctx.w.T @ ctx.w) @ ctx.ht
    return ctx.ht * (num / np.maximum(den, eps))


# Generalized KL -------------------------------------------------------------


def f_gkl(ctx, h):
    wh = ctx.w @ _h(ctx, h)
    return float(np.sum(gkl_terms(ctx.v, wh)))


def _alpha(ctx):
    """Jensen weights for every row at once, shape (n, r).

    Rows with ``(W ht)_i == 0`` get all-zero weights.
    """
    num = ctx.w * ctx.ht[None, :]
    tot = num.sum(axis=1, keepdims=True)
    return np.divide(num, tot, out=np.zeros_like(num), where=tot > 0)


def jensen_weights(ctx, i):
    """Convex weights ``W[i, a] ht[a] / sum_b W[i, b] ht[b]`` for row ``i``."""
    n = ctx.w.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"row index {i} out of range for {n} rows")
    num = ctx.w[i] * ctx.ht
    tot = num.sum()
    if tot <= 0:
        raise DomainError(f"row {i} of w is all zero; Jensen weights undefined")
    return num / tot


def g_gkl(ctx, h):
    h = _h(ctx, h)
    v, w = ctx.v, ctx.w
    alpha = _alpha(ctx)
    weight = v[:, None] * alpha
    active = weight > 0
    wh_entries = w * h[None, :]
    if np.any(active & (wh_entries <= 0)):
        raise DomainError("log of a non-positive W[i, a] h[a] carries positive weight")
    logs = np.zeros_like(weight)
    logs[active] = np.log(wh_entries[active]) - np.log(alpha[active])
    vpos = v > 0
    const = float(np.sum(v[vpos] * np.log(v[vpos]))) - float(v.sum())
    return const + float(np.sum(wh_entries)) - float(np.sum(weight * logs))


def mm_argmin_gkl(ctx, eps=DEFAULT_EPS):
    """Closed-form minimizer of :func:`g_gkl`."""
    wht = ctx.w @ ctx.ht
    q = np.divide(ctx.v, wht, out=np.zeros_like(ctx.v), where=ctx.v > 0)
    if np.any((ctx.v > 0) & (wht <= 0)):
        raise DomainError("W ht is 0 where v > 0")
    num = ctx.w.T @ q
    den = ctx.w.sum(axis=0)
    return ctx.ht * (num / np.maximum(den, eps))


# Dispatch -------------------------------------------------------------------

_F = {CostKind.EUCLIDEAN: f_euclidean, CostKind.GKL: f_gkl}
_G = {CostKind.EUCLIDEAN: g_euclidean, CostKind.GKL: g_gkl}
_ARGMIN = {CostKind.EUCLIDEAN: mm_argmin_euclidean, CostKind.GKL: mm_argmin_gkl}


def f_value(ctx, h, kind):
    return _F[CostKind(kind)](ctx, h)


def g_value(ctx, h, kind):
    return _G[CostKind(kind)](ctx, h)


def mm_chain(ctx, h_next, kind):
    """Return ``(F(h1), G(h1, ht), G(ht, ht), F(ht))`` for inspection."""
    kind = CostKind(kind)
    return (
        _F[kind](ctx, h_next),
        _G[kind](ctx, h_next),
        _G[kind](ctx, ctx.ht),
        _F[kind](ctx, ctx.ht),
    )


def mm_step(ctx, kind, eps=DEFAULT_EPS, check=False):
    """One MM step ``argmin_h G(h, ht)``.

    With ``check=True`` the four-link chain is evaluated and a
    :class:`MajorizationError` raised if any link fails by more than
    ``CHAIN_SLACK * (1 + |F(ht)|)``.
    """
    kind = CostKind(kind)
    h_next = _ARGMIN[kind](ctx, eps)
    if check:
        chain = mm_chain(ctx, h_next, kind)
        tol = CHAIN_SLACK * (1.0 + abs(chain[-1]))
        for lo, hi in zip(chain, chain[1:]):
            if lo > hi + tol:
                raise MajorizationError(f"MM chain violated: {chain}")
    return h_next
