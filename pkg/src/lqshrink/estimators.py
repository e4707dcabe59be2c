"""Scikit-learn style estimators wrapping the solvers.

Both estimators treat the forward operator matrix as ``X`` (one row per
measurement) and the observed data as ``y``, so they compose with
pipelines, grid search, and cloning like any linear model.  The fitted
coefficient vector is the recovered solution.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .shrinkage import ShrinkageRule, rule_by_name
from .solver import LandweberConfig, landweber_shrink, maxent_solve

__all__ = ["ShrinkedLandweber", "MaxEntRegressor"]


class ShrinkedLandweber(RegressorMixin, BaseEstimator):
    """Sparse recovery via the shrinked Landweber iteration.

    Parameters
    ----------
    q : float in [0, 1]
        Penalty exponent; smaller is sparser.
    alpha : float
        Uniform penalty weight (0 gives plain Landweber).
    rule : str, ShrinkageRule, or None
        Shrinkage rule or its registry name; None uses the hard-soft
        rule adapted to ``q``.
    nonneg : bool
        Force a nonnegative solution (negative shrink arguments map to 0).
    max_iters, rel_tol, normalize_operator
        Passed through to the iteration.

    Attributes
    ----------
    coef_ : ndarray
        Recovered solution.
    trace_ : SolverTrace
        Full per-iteration history.
    n_iter_ : int
    stop_reason_ : str
    """

    def __init__(
        self,
        q: float = 0.5,
        alpha: float = 1.0,
        rule=None,
        nonneg: bool = False,
        max_iters: int = 100_000,
        rel_tol: float = 1e-8,
        normalize_operator: bool = True,
    ):
        self.q = q
        self.alpha = alpha
        self.rule = rule
        self.nonneg = nonneg
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.normalize_operator = normalize_operator

    def _resolved_rule(self) -> ShrinkageRule | None:
        if self.rule is None or isinstance(self.rule, ShrinkageRule):
            return self.rule
        return rule_by_name(str(self.rule))

    def fit(self, X, y, g0=None):
        X, y = check_X_y(X, y, y_numeric=True)
        cfg = LandweberConfig(
            q=self.q,
            alpha=self.alpha,
            rule=self._resolved_rule(),
            nonneg=self.nonneg,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            normalize_operator=self.normalize_operator,
        )
        trace = landweber_shrink(X, y, cfg, g0=g0)
        self.coef_ = trace.iterate
        self.trace_ = trace
        self.n_iter_ = trace.iterations_used
        self.stop_reason_ = trace.stop_reason
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_


class MaxEntRegressor(RegressorMixin, BaseEstimator):
    """Positive solution via entropy-penalized least squares.

    Minimizes ``||y - X g||^2 + beta * sum g ln g`` over ``g > 0``; the
    standard smooth baseline for size-distribution recovery.
    """

    def __init__(
        self,
        beta: float = 1e-3,
        max_iters: int = 20_000,
        tol: float = 1e-10,
        floor: float = 1e-12,
    ):
        self.beta = beta
        self.max_iters = max_iters
        self.tol = tol
        self.floor = floor

    def fit(self, X, y, g0=None):
        X, y = check_X_y(X, y, y_numeric=True)
        self.coef_ = maxent_solve(
            X,
            y,
            beta=self.beta,
            max_iters=self.max_iters,
            tol=self.tol,
            floor=self.floor,
            g0=g0,
        )
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_
