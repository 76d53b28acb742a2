"""Empirical cumulant function of projected data.

For a centered sample ``x_1..x_N`` the plug-in estimate along the unit
direction ``theta`` at radius ``r`` is

    G(r, theta) = log( (1/N) * sum_i exp(r * theta . x_i) )

and is always evaluated with the maximum exponent shifted out. The same
exponential weights give the gradient and the effective sample size, so all
three are produced by one pass in :func:`evaluate`.
"""

from __future__ import annotations

import numpy as np

from .core import CumulantProfile, as_array, normalize
from .exceptions import NumericalError

__all__ = [
    "evaluate",
    "empirical_cumulant",
    "cumulant_gradient",
    "effective_sample_size",
    "cumulant_profile",
    "standard_error",
    "RELIABLE_ESS",
]

#: Default ESS below which an estimate is flagged as unreliable.
RELIABLE_ESS = 10.0


def _tilted(X, r, thetas):
    """Shifted weights ``exp(a - max a)`` with ``a = r * thetas @ X.T``, and the shifts.

    Weights are laid out ``(k, N)`` so every reduction runs along a contiguous
    row and numpy's pairwise summation applies; the result for one direction
    then does not depend on which other directions share the batch.
    """
    a = r * (thetas @ X.T)
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"non-finite projection at radius {r}")
    m = a.max(axis=1)
    return np.exp(a - m[:, None]), m


def evaluate(X, r: float, thetas, *, gradient: bool = True):
    """Cumulant values, tangent gradients and ESS for a batch of directions.

    Parameters
    ----------
    X : ndarray of shape (n_samples, n_features)
        Centered data.
    r : float
        Radius, finite and nonnegative.
    thetas : ndarray of shape (k, n_features)
        Unit directions, one per row.
    gradient : bool, default=True
        Skip the gradient (returned as ``None``) when False.

    Returns
    -------
    g : ndarray of shape (k,)
    grad : ndarray of shape (k, n_features) or None
        Euclidean gradient projected on the tangent space at each direction.
    ess : ndarray of shape (k,)
    """
    if not np.isfinite(r) or r < 0:
        raise NumericalError(f"radius must be finite and nonnegative, got {r}")
    thetas = np.atleast_2d(thetas)
    n = X.shape[0]
    w, m = _tilted(X, r, thetas)
    s = w.sum(axis=1)
    g = m + np.log(s) - np.log(n)
    ess = s**2 / np.sum(w * w, axis=1)
    grad = None
    if gradient:
        euclid = r * (w @ X) / s[:, None]
        radial = np.sum(euclid * thetas, axis=1)
        grad = euclid - radial[:, None] * thetas
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"non-finite cumulant estimate at radius {r}")
    return g, grad, ess


def empirical_cumulant(data, r: float, theta) -> float:
    """Plug-in cumulant function of the data projected on ``theta`` at radius ``r``.

    ``data`` is a centered :class:`~mcf.core.DataMatrix` or an array used
    as given. Returns exactly ``0.0`` at ``r = 0``.
    """
    X = as_array(data)
    if r == 0:
        return 0.0
    g, _, _ = evaluate(X, float(r), normalize(theta)[None, :], gradient=False)
    return float(g[0])


def cumulant_gradient(data, r: float, theta) -> np.ndarray:
    """Gradient of :func:`empirical_cumulant` with respect to ``theta``, tangent to the sphere."""
    X = as_array(data)
    theta = normalize(theta)
    if r == 0:
        return np.zeros_like(theta)
    _, grad, _ = evaluate(X, float(r), theta[None, :])
    return grad[0]


def effective_sample_size(data, r: float, theta) -> float:
    """Kish effective sample size ``(sum w)^2 / sum w^2`` of the exponential weights."""
    X = as_array(data)
    if r == 0:
        return float(X.shape[0])
    _, _, ess = evaluate(X, float(r), normalize(theta)[None, :], gradient=False)
    return float(ess[0])


def standard_error(data, r: float, theta) -> float:
    """Delta-method standard error of the cumulant estimate.

    ``Var(log mean w) ~ Var(w) / (N * mean(w)^2)``; weights are rescaled so
    this never overflows.
    """
    X = as_array(data)
    w, _ = _tilted(X, float(r), normalize(theta)[None, :])
    w = w[0] / w[0].mean()
    return float(np.std(w, ddof=1) / np.sqrt(X.shape[0]))


def cumulant_profile(data, theta, radii) -> CumulantProfile:
    """Evaluate the cumulant function and ESS along ``theta`` at each radius."""
    X = as_array(data)
    theta = normalize(theta)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    values = np.empty(len(radii))
    ess = np.empty(len(radii))
    for i, r in enumerate(radii):
        if r == 0:
            values[i], ess[i] = 0.0, X.shape[0]
            continue
        g, _, e = evaluate(X, r, theta[None, :], gradient=False)
        values[i], ess[i] = g[0], e[0]
    return CumulantProfile(direction=theta, radii=radii, values=values, ess=ess)
