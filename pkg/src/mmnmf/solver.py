"""Alternating multiplicative-update driver with a cost trace."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ._matrix import DEFAULT_EPS, as_nonneg_matrix
from .costs import CostKind, cost
from .updates import UPDATE_H, UPDATE_W, Factorization

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-12
INIT_LOW, INIT_HIGH = 0.1, 1.0


class DataError(ValueError):
    """Input data violates a precondition of the solver."""


class MonotonicityError(RuntimeError):
    """The cost increased under an update, which the update rules forbid."""


class NonFiniteCostError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    rank: int
    cost: CostKind = CostKind.EUCLIDEAN
    max_iters: int = 200
    rel_tol: float = 1e-6
    eps: float = DEFAULT_EPS
    seed: int = 0
    init: str = "uniform"
    order: str = "hw"

    def __post_init__(self):
        object.__setattr__(self, "cost", CostKind(self.cost))
        if int(self.rank) != self.rank or self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank!r}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.init not in ("uniform", "provided"):
            raise ValueError(f"init must be 'uniform' or 'provided', got {self.init!r}")
        if self.order not in ("hw", "wh"):
            raise ValueError(f"order must be 'hw' or 'wh', got {self.order!r}")


@dataclass(frozen=True)
class IterationTrace:
    iter: int
    cost: float
    rel_delta: float
    monotone_ok: bool

    def to_dict(self):
        return {"iter": self.iter, "cost": self.cost, "rel_delta": self.rel_delta, "monotone_ok": self.monotone_ok}


@dataclass
class RunResult:
    factorization: Factorization
    trace: list = field(default_factory=list)
    converged: bool = False
    iters_used: int = 0
    initial_cost: float = float("nan")

    @property
    def final_cost(self):
        return self.trace[-1].cost if self.trace else self.initial_cost


def init_factors(n, m, config):
    """Draw ``W`` (n, r) and ``H`` (r, m) i.i.d. uniform on [0.1, 1.0]."""
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise ValueError(f"n and m must be positive integers, got {n!r}, {m!r}")
    rng = np.random.default_rng(int(config.seed))
    w = rng.uniform(INIT_LOW, INIT_HIGH, size=(int(n), config.rank))
    h = rng.uniform(INIT_LOW, INIT_HIGH, size=(config.rank, int(m)))
    return Factorization(w, h)


def _check_input(v, kind):
    try:
        v = as_nonneg_matrix(v, "v")
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    if kind is CostKind.GKL:
        zero_rows = np.flatnonzero(~v.any(axis=1))
        zero_cols = np.flatnonzero(~v.any(axis=0))
        if zero_rows.size or zero_cols.size:
            raise DataError(
                f"GKL factorization needs no all-zero rows or columns; rows {zero_rows.tolist()}, columns {zero_cols.tolist()}"
            )
    return v


def _rel_delta(prev, cur, eps):
    return (prev - cur) / max(prev, eps)


def _checked_cost(kind, v, w, h, where):
    c = cost(kind, v, w, h)
    if not np.isfinite(c):
        raise NonFiniteCostError(f"non-finite cost {c!r} after {where}")
    return c


def cost_scale(kind, v):
    """Cost of the all-zero model, used as a floor for the monotone slack.

    Near an exact factorization the cost sinks to the rounding noise of its
    own terms, whose size tracks this quantity rather than the cost itself.
    For the divergence the zero model is undefined, so ``sum(v)`` (the size of
    the individual terms) stands in.
    """
    kind = CostKind(kind)
    if kind is CostKind.EUCLIDEAN:
        return 0.5 * float(np.sum(v * v))
    return float(np.sum(v))


def _rose(prev, cur, floor):
    return cur - prev > MONOTONE_SLACK * max(prev, floor)


def solve(v, config, initial=None):
    """Factorize ``v ~ W H`` by alternating multiplicative updates.

    Each iteration applies both half-steps in ``config.order`` (``"hw"``:
    H then W) and records one :class:`IterationTrace`. The cost is checked
    after every half-step; an increase beyond ``MONOTONE_SLACK`` times the
    larger of the previous cost and :func:`cost_scale` raises
    :class:`MonotonicityError`. Iteration stops once the relative decrease
    over a full iteration drops below ``config.rel_tol``.
    """
    kind = config.cost
    v = _check_input(v, kind)
    n, m = v.shape
    if initial is None:
        if config.init == "provided":
            raise ValueError("config.init is 'provided' but no initial factorization was given")
        fac = init_factors(n, m, config)
    else:
        fac = initial if isinstance(initial, Factorization) else Factorization(*initial)
        if fac.w.shape != (n, config.rank) or fac.h.shape != (config.rank, m):
            raise DataError(
                f"initial factors {fac.w.shape}, {fac.h.shape} do not match v {v.shape} at rank {config.rank}"
            )
    w, h = fac.w, fac.h

    steps = ("h", "w") if config.order == "hw" else ("w", "h")
    floor = cost_scale(kind, v)
    prev = _checked_cost(kind, v, w, h, "initialization")
    result = RunResult(Factorization(w, h), initial_cost=prev)

    for it in range(1, config.max_iters + 1):
        start = prev
        for which in steps:
            if which == "h":
                h = UPDATE_H[kind](v, w, h, config.eps)
            else:
                w = UPDATE_W[kind](v, w, h, config.eps)
            cur = _checked_cost(kind, v, w, h, f"{which}-update of iteration {it}")
            if _rose(prev, cur, floor):
                raise MonotonicityError(
                    f"{kind.value} cost rose from {prev!r} to {cur!r} in the {which}-update of iteration {it}"
                )
            prev = cur
        rel = _rel_delta(start, prev, config.eps)
        result.trace.append(IterationTrace(it, prev, rel, not _rose(start, prev, floor)))
        result.iters_used = it
        logger.debug("iter %d cost %.6g rel_delta %.3g", it, prev, rel)
        if rel < config.rel_tol:
            result.converged = True
            break

    result.factorization = Factorization(w, h)
    return result
