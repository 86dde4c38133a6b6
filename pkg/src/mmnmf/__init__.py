"""Multiplicative-update NMF with numerical checks of its convergence theory."""

from ._matrix import DomainError, ShapeError, hadamard_ratio, matmul, transpose
from .costs import (
    CostKind,
    euclidean_cost,
    gkl_cost,
    grad_h_euclidean,
    grad_h_gkl,
    hessian_h_euclidean,
    kl_cost_standard,
)
from .estimator import MultiplicativeNMF
from .solver import (
    DataError,
    IterationTrace,
    MonotonicityError,
    RunResult,
    SolverConfig,
    cost_scale,
    init_factors,
    solve,
)
from .updates import (
    Factorization,
    additive_step,
    eta_euclidean,
    eta_gkl,
    update_h_euclidean,
    update_h_gkl,
    update_w_euclidean,
    update_w_gkl,
)

__all__ = [
    "CostKind",
    "DataError",
    "DomainError",
    "Factorization",
    "IterationTrace",
    "MonotonicityError",
    "MultiplicativeNMF",
    "RunResult",
    "ShapeError",
    "SolverConfig",
    "additive_step",
    "eta_euclidean",
    "eta_gkl",
    "euclidean_cost",
    "gkl_cost",
    "grad_h_euclidean",
    "grad_h_gkl",
    "hadamard_ratio",
    "hessian_h_euclidean",
    "init_factors",
    "kl_cost_standard",
    "matmul",
    "cost_scale",
    "solve",
    "transpose",
    "update_h_euclidean",
    "update_h_gkl",
    "update_w_euclidean",
    "update_w_gkl",
]
