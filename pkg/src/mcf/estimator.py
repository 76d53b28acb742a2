from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import DataMatrix
from .cumulant import RELIABLE_ESS, cumulant_profile
from .optimizer import OptimizerConfig, mcf


class CumulantMaxima(TransformerMixin, BaseEstimator):
    """Directions maximizing the cumulant function of the projected data.

    For a fixed radius ``r`` the estimator finds the unit directions ``theta``
    that locally maximize ``log mean exp(r * theta . (x - mean))``. At small
    radius the top direction is the first principal component; at larger
    radius the maxima point along the heaviest tails of the sample, i.e. the
    directions in which large anomalies concentrate.

    Do not standardize the columns before fitting: the relative scale of the
    variables is what distinguishes heavy from light tails.

    Parameters
    ----------
    radius : float or None, default=None
        Radius at which to maximize. ``None`` picks the largest radius at
        which the estimate stays reliable (see ``ess_min``).
    ess_min : float, default=10
        Minimum effective sample size of the exponential weights used to pick
        the radius automatically and to flag unreliable fits.
    starts : int, default=32
        Number of random starting directions for the ascent.
    max_iter : int, default=500
        Iteration cap per start.
    step_init : float, default=0.1
        Initial ascent step.
    grad_tol : float, default=1e-8
        Convergence threshold on the tangent gradient, relative to
        ``max(1, |G|)``.
    angle_dedup_deg : float, default=2.0
        Maxima closer than this angle are merged.
    random_state : int, default=0
        Seed for the starting directions.

    Attributes
    ----------
    components_ : ndarray of shape (n_maxima, n_features)
        Distinct local maxima, ordered by decreasing cumulant value.
    g_values_ : ndarray of shape (n_maxima,)
        Cumulant value at each maximum.
    basin_counts_ : ndarray of shape (n_maxima,)
        Number of starts that converged to each maximum.
    radius_ : float
        Radius actually used.
    mean_ : ndarray of shape (n_features,)
        Column means removed before fitting.
    pc1_ : ndarray of shape (n_features,)
        First principal component of the training data.
    ess_ : float
        Effective sample size at the top maximum.
    n_iter_ : int
        Largest number of ascent sweeps used by any start.
    warnings_ : list of str
        Diagnostics collected during the fit.
    result_ : MCFResult
        The full result record.
    n_features_in_ : int
    """

    def __init__(
        self,
        radius=None,
        ess_min=RELIABLE_ESS,
        starts=32,
        max_iter=500,
        step_init=0.1,
        grad_tol=1e-8,
        angle_dedup_deg=2.0,
        random_state=0,
    ):
        self.radius = radius
        self.ess_min = ess_min
        self.starts = starts
        self.max_iter = max_iter
        self.step_init = step_init
        self.grad_tol = grad_tol
        self.angle_dedup_deg = angle_dedup_deg
        self.random_state = random_state

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(
            starts=self.starts,
            max_iters=self.max_iter,
            step_init=self.step_init,
            grad_tol=self.grad_tol,
            angle_dedup_deg=self.angle_dedup_deg,
            seed=self.random_state,
        )

    def fit(self, X, y=None):
        """Locate the cumulant maxima of ``X``.

        Parameters
        ----------
        X : array-like of shape (n_samples, n_features)
        y : ignored

        Returns
        -------
        self
        """
        X = validate_data(self, X, ensure_min_samples=2, dtype=float)
        res = mcf(DataMatrix(X), self._config(), radius=self.radius, ess_min=self.ess_min)
        for msg in res.warnings:
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
        self.mean_ = X.mean(axis=0)
        self.components_ = res.directions
        self.g_values_ = res.g_values
        self.basin_counts_ = np.array([m.basin_count for m in res.maxima])
        self.radius_ = res.radius_used
        self.pc1_ = res.pc1
        self.ess_ = res.ess_at_radius
        self.n_iter_ = res.n_iter
        self.warnings_ = list(res.warnings)
        self.result_ = res
        self._X_centered = X - self.mean_
        return self

    def transform(self, X):
        """Project centered samples on the fitted maxima.

        Returns
        -------
        ndarray of shape (n_samples, n_maxima)
        """
        check_is_fitted(self, "components_")
        X = validate_data(self, X, reset=False, dtype=float)
        return (X - self.mean_) @ self.components_.T

    def profile(self, radii, component=0):
        """Cumulant profile of the training data along one fitted maximum."""
        check_is_fitted(self, "components_")
        return cumulant_profile(self._X_centered, self.components_[component], radii)
