"""Gaussian, skew-normal and shared-shock gamma families.

Each family provides its analytic cumulant function along a direction (for
the centered vector), the closed-form maximizing directions, and a seeded
sampler. These serve as oracles for the empirical pipeline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr

from .core import DataMatrix, normalize
from .exceptions import DegenerateModelWarning, NotPositiveDefinite, OutsideDomain
from .pca import fix_sign, leading_eigenpair

__all__ = [
    "GaussianParams",
    "SkewNormalParams",
    "GammaParams",
    "model_from_dict",
    "gaussian_cumulant",
    "gaussian_mcf",
    "sn_mean",
    "sn_cumulant_centered",
    "sn_mcf_small_radius",
    "sn_mcf_large_radius",
    "gamma_cumulant_centered",
    "gamma_max_radius",
    "gamma_large_radius",
    "gamma_mcf_large_radius",
    "gamma_covariance",
    "sample_gaussian",
    "sample_skew_normal",
    "sample_gamma",
]

SQRT_HALF_PI = np.sqrt(np.pi / 2.0)


def _spd(sigma) -> np.ndarray:
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"sigma must be square, got {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
        raise ValueError("sigma must be symmetric")
    if np.linalg.eigvalsh(sigma).min() <= 0:
        raise NotPositiveDefinite("sigma must be positive definite")
    sigma = sigma.copy()
    sigma.setflags(write=False)
    return sigma


@dataclass(frozen=True)
class GaussianParams:
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma", _spd(self.sigma))

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.tolist()}


@dataclass(frozen=True)
class SkewNormalParams:
    """Skew-normal density ``2 phi_Sigma(x) Phi(alpha . x)``; ``mu`` is derived."""

    sigma: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray = field(init=False)

    def __post_init__(self):
        sigma = _spd(self.sigma)
        alpha = np.asarray(self.alpha, dtype=float).ravel()
        if alpha.shape != (sigma.shape[0],):
            raise ValueError("alpha must have one entry per dimension")
        alpha.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "alpha", alpha)
        mu = sigma @ alpha / np.sqrt(SQRT_HALF_PI**2 * (1.0 + alpha @ sigma @ alpha))
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        return self.sigma - np.outer(self.mu, self.mu)

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.tolist(), "alpha": self.alpha.tolist(), "mu": self.mu.tolist()}


@dataclass(frozen=True)
class GammaParams:
    """Components ``x_i = z_0 + z_i`` with independent unit-scale gamma ``z_j``."""

    alpha0: float
    alphas: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float).ravel()
        if alphas.size < 1:
            raise ValueError("need at least one component shape")
        if not (self.alpha0 > 0 and np.all(alphas > 0)):
            raise ValueError("gamma shape parameters must be strictly positive")
        alphas.setflags(write=False)
        object.__setattr__(self, "alpha0", float(self.alpha0))
        object.__setattr__(self, "alphas", alphas)

    @property
    def dim(self) -> int:
        return self.alphas.size

    @property
    def mean(self) -> np.ndarray:
        return self.alpha0 + self.alphas

    def to_dict(self) -> dict:
        return {"alpha0": self.alpha0, "alphas": self.alphas.tolist()}


def model_from_dict(name: str, params: dict):
    """Build a parameter record from its JSON form (``name`` as used by the CLI)."""
    if name == "gaussian":
        return GaussianParams(sigma=params["sigma"])
    if name == "skew-normal":
        return SkewNormalParams(sigma=params["sigma"], alpha=params["alpha"])
    if name == "gamma":
        return GammaParams(alpha0=params["alpha0"], alphas=params["alphas"])
    raise ValueError(f"unknown model {name!r}")


# Gaussian


def gaussian_cumulant(p: GaussianParams, r: float, theta) -> float:
    theta = np.asarray(theta, dtype=float)
    return 0.5 * r * r * float(theta @ p.sigma @ theta)


def gaussian_mcf(p: GaussianParams) -> np.ndarray:
    """Leading eigenvector of sigma; the maximizer at every radius."""
    return leading_eigenpair(p.sigma).eigenvector


# Skew-normal


def sn_mean(p: SkewNormalParams) -> np.ndarray:
    return p.mu.copy()


def sn_cumulant_centered(p: SkewNormalParams, r: float, theta) -> float:
    """Cumulant function of ``theta . (X - mu)`` for the skew-normal vector.

    ``-r mu.theta + r^2/2 theta' Sigma theta + log(2 Phi(sqrt(pi/2) r mu.theta))``.
    ``log_ndtr`` keeps the last term accurate far into the lower tail.
    """
    theta = np.asarray(theta, dtype=float)
    m = float(p.mu @ theta)
    q = float(theta @ p.sigma @ theta)
    # log(2 Phi(x)) is formed first so it is exactly 0 when mu.theta = 0
    skew = np.log(2.0) + float(log_ndtr(SQRT_HALF_PI * r * m))
    return 0.5 * r * r * q - r * m + skew


def sn_mcf_small_radius(p: SkewNormalParams) -> np.ndarray:
    """Leading eigenvector of the skew-normal covariance ``Sigma - mu mu'``."""
    return leading_eigenpair(p.covariance).eigenvector


def sn_mcf_large_radius(p: SkewNormalParams) -> tuple[np.ndarray, np.ndarray]:
    """Asymptotic maximizers as the radius grows.

    The first is the top eigenvector of ``Sigma`` oriented so ``mu.theta >= 0``;
    the second is the top eigenvector of ``Sigma - (pi/2) mu mu'`` oriented
    so ``mu.theta < 0``.
    """
    if not np.any(p.mu):
        warnings.warn(
            "zero skewness: the skew-normal reduces to a Gaussian, maxima are +/- PC1",
            DegenerateModelWarning,
            stacklevel=2,
        )
        v = leading_eigenpair(p.sigma).eigenvector
        return v, -v
    v1 = leading_eigenpair(p.sigma).eigenvector
    if p.mu @ v1 < 0:
        v1 = -v1
    v2 = leading_eigenpair(p.sigma - 0.5 * np.pi * np.outer(p.mu, p.mu)).eigenvector
    if p.mu @ v2 >= 0:
        v2 = -v2
    return v1, v2


# Gamma


def gamma_covariance(p: GammaParams) -> np.ndarray:
    return p.alpha0 + np.diag(p.alphas)


# Arguments within a few ulps of 1 are treated as on the boundary: inputs such
# as 1/sqrt(2) cannot be represented exactly, and the logarithm there would be
# pure rounding noise.
BOUNDARY_BAND = 4 * np.finfo(float).eps


def _gamma_domain_check(r, theta):
    comp = r * theta
    if np.any(comp >= 1.0 - BOUNDARY_BAND):
        i = int(np.argmax(comp))
        raise OutsideDomain(
            f"r * theta[{i}] = {comp[i]:.17g} >= 1: component logarithm undefined",
            constraint="component",
        )
    total = r * math.fsum(theta)
    if total >= 1.0 - BOUNDARY_BAND:
        raise OutsideDomain(
            f"r * sum(theta) = {total:.17g} >= 1: shared-shock logarithm undefined",
            constraint="sum",
        )


def gamma_cumulant_centered(p: GammaParams, r: float, theta) -> float:
    """Cumulant function of ``theta . (X - mu)`` for the shared-shock gamma vector.

    Raises
    ------
    OutsideDomain
        When ``r * theta_i >= 1`` for some ``i`` or ``r * sum(theta) >= 1``.
    """
    theta = np.asarray(theta, dtype=float)
    _gamma_domain_check(r, theta)
    total = np.sum(theta)
    return float(
        -p.alpha0 * np.log1p(-r * total)
        - np.sum(p.alphas * np.log1p(-r * theta))
        - r * np.sum((p.alpha0 + p.alphas) * theta)
    )


def gamma_max_radius(d: int) -> float:
    """Largest radius keeping the cumulant finite for all but one direction: ``1/sqrt(d)``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 1.0 / np.sqrt(d)


def gamma_large_radius(d: int, eps: float = 1e-3) -> float:
    """A radius just inside the boundary, ``(1 - eps)/sqrt(d)``."""
    return (1.0 - eps) * gamma_max_radius(d)


def gamma_mcf_large_radius(d: int) -> np.ndarray:
    return np.full(d, 1.0 / np.sqrt(d))


# Samplers


def sample_gaussian(p: GaussianParams, n_samples: int, seed) -> DataMatrix:
    """Zero-mean Gaussian draws through the Cholesky factor of sigma."""
    try:
        L = np.linalg.cholesky(p.sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n_samples, p.dim))
    return DataMatrix(Z @ L.T)


def sample_skew_normal(p: SkewNormalParams, n_samples: int, seed) -> DataMatrix:
    """Skew-normal draws shifted by the population mean ``mu``.

    Uses reflection: with ``Y ~ N(0, Sigma)`` and ``W ~ N(0, 1)``, keep ``Y``
    when ``W <= alpha . Y`` and ``-Y`` otherwise.
    """
    L = np.linalg.cholesky(p.sigma)
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n_samples, p.dim)) @ L.T
    W = rng.standard_normal(n_samples)
    sign = np.where(W <= Y @ p.alpha, 1.0, -1.0)
    return DataMatrix(sign[:, None] * Y - p.mu)


def sample_gamma(p: GammaParams, n_samples: int, seed) -> DataMatrix:
    """Shared-shock gamma draws shifted by the population mean ``alpha0 + alpha_i``."""
    rng = np.random.default_rng(seed)
    z0 = rng.gamma(p.alpha0, 1.0, size=n_samples)
    z = rng.gamma(p.alphas, 1.0, size=(n_samples, p.dim))
    return DataMatrix(z0[:, None] + z - p.mean)
