"""scikit-learn compatible wrapper around :func:`mmnmf.solver.solve`."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_non_negative

from ._matrix import DEFAULT_EPS
from .costs import CostKind, cost
from .solver import SolverConfig, solve
from .updates import UPDATE_W, Factorization


class MultiplicativeNMF(TransformerMixin, BaseEstimator):
    """Non-negative matrix factorization by alternating multiplicative updates.

    Finds non-negative ``W`` and ``H`` with ``X ~ W H``. As in
    :class:`sklearn.decomposition.NMF`, the transformed data is ``W`` and the
    learned dictionary ``H`` is stored in ``components_``.

    Parameters
    ----------
    n_components : int, default=2
        Rank of the factorization.
    cost : {'euclidean', 'gkl'}, default='euclidean'
        Objective: half the squared Frobenius distance or the generalized
        Kullback-Leibler divergence.
    max_iter : int, default=200
        Maximum number of full (H and W) iterations.
    tol : float, default=1e-6
        Stop when the relative cost decrease over one iteration is below this.
    eps : float, default=1e-12
        Floor applied to every update denominator.
    random_state : int, default=0
        Seed for the uniform [0.1, 1.0] initialization.
    order : {'hw', 'wh'}, default='hw'
        Which factor is updated first within an iteration.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features)
    n_components_ : int
    reconstruction_err_ : float
        Final value of the selected cost.
    n_iter_ : int
    converged_ : bool
    trace_ : list of IterationTrace
    n_features_in_ : int
    """

    def __init__(self, n_components=2, *, cost="euclidean", max_iter=200, tol=1e-6,
                 eps=DEFAULT_EPS, random_state=0, order="hw"):
        self.n_components = n_components
        self.cost = cost
        self.max_iter = max_iter
        self.tol = tol
        self.eps = eps
        self.random_state = random_state
        self.order = order

    def _config(self):
        return SolverConfig(
            rank=self.n_components,
            cost=self.cost,
            max_iters=self.max_iter,
            rel_tol=self.tol,
            eps=self.eps,
            seed=self.random_state,
            order=self.order,
        )

    def fit_transform(self, X, y=None, W=None, H=None):
        """Learn the factorization of ``X`` and return ``W``.

        ``W`` and ``H`` may be passed together as a custom starting point.
        """
        X = check_array(X, dtype=np.float64)
        check_non_negative(X, "MultiplicativeNMF.fit")
        config = self._config()
        initial = None
        if (W is None) != (H is None):
            raise ValueError("W and H must be given together")
        if W is not None:
            initial = Factorization(np.array(W, dtype=np.float64), np.array(H, dtype=np.float64))
        result = solve(X, config, initial)
        self.components_ = result.factorization.h
        self.n_components_ = result.factorization.rank
        self.n_features_in_ = X.shape[1]
        self.reconstruction_err_ = result.final_cost
        self.n_iter_ = result.iters_used
        self.converged_ = result.converged
        self.trace_ = result.trace
        return result.factorization.w

    def fit(self, X, y=None, **params):
        self.fit_transform(X, **params)
        return self

    def transform(self, X):
        """Fit ``W`` for new data with ``components_`` held fixed."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        check_non_negative(X, "MultiplicativeNMF.transform")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        kind = CostKind(self.cost)
        h = self.components_
        rng = np.random.default_rng(self.random_state)
        w = rng.uniform(0.1, 1.0, size=(X.shape[0], self.n_components_))
        prev = cost(kind, X, w, h)
        for _ in range(self.max_iter):
            w = UPDATE_W[kind](X, w, h, self.eps)
            cur = cost(kind, X, w, h)
            if (prev - cur) / max(prev, self.eps) < self.tol:
                break
            prev = cur
        return w

    def inverse_transform(self, W):
        check_is_fitted(self, "components_")
        W = check_array(W, dtype=np.float64)
        return W @ self.components_
