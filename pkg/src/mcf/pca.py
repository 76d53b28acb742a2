"""Sample covariance and the leading eigenpair by shifted power iteration.

Only the top eigenpair is ever needed (it is the small-radius limit of the
cumulant maxima and the building block of the analytic oracles), so a
general eigensolver is not used.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import as_array
from .exceptions import DegenerateSpectrumWarning, NonConvergence

__all__ = ["EigenPair", "sample_covariance", "leading_eigenpair", "fix_sign"]

MAX_POWER_ITERS = 10_000


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenvector: np.ndarray


def fix_sign(v: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so that its first non-negligible coordinate is positive."""
    nz = np.flatnonzero(np.abs(v) > atol)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def sample_covariance(data) -> np.ndarray:
    """``X.T @ X / N`` for centered data (maximum-likelihood normalization)."""
    X = as_array(data)
    C = X.T @ X / X.shape[0]
    return 0.5 * (C + C.T)


def _power(A, shift, v0, tol, max_iter):
    """Power iteration on the shifted matrix ``A = M + shift * I``.

    ``A v - (lam + shift) v == M v - lam v``, so the residual is tested
    against the unshifted eigenvalue ``lam``.
    """
    v = v0 / np.linalg.norm(v0)
    lam = v @ A @ v - shift
    floor = np.finfo(float).eps * shift
    for _ in range(max_iter):
        w = A @ v
        v = w / np.linalg.norm(w)
        Av = A @ v
        lam_a = v @ Av
        lam = lam_a - shift
        if np.linalg.norm(Av - lam_a * v) <= tol * max(abs(lam), floor):
            return lam, v
    raise NonConvergence(
        f"power iteration did not converge in {max_iter} iterations", best=(lam, v)
    )


def leading_eigenpair(M, tol: float = 1e-10, max_iter: int = MAX_POWER_ITERS) -> EigenPair:
    """Largest eigenvalue of a symmetric matrix and its unit eigenvector.

    Power iteration runs on ``M + c I`` with ``c = |min diag(M)| + 1`` (raised
    to the Gershgorin bound when needed) so every shifted eigenvalue is
    positive and the top one dominates. Two independent starts are used; if
    they settle on directions more than 2 degrees apart with the same
    eigenvalue, a :class:`DegenerateSpectrumWarning` is issued.

    Raises
    ------
    NonConvergence
        If the relative residual is still above ``tol`` after ``max_iter``
        iterations.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    M = 0.5 * (M + M.T)
    d = M.shape[0]
    if d == 1:
        return EigenPair(float(M[0, 0]), np.ones(1))

    diag = np.diag(M)
    gersh = np.min(diag - (np.sum(np.abs(M), axis=1) - np.abs(diag)))
    c = max(abs(diag.min()) + 1.0, -gersh + 1.0)
    A = M + c * np.eye(d)

    starts = np.random.default_rng(0).standard_normal((2, d))
    (lam1, v1), (lam2, v2) = (_power(A, c, v0, tol, max_iter) for v0 in starts)
    if abs(lam1 - lam2) <= tol * max(abs(lam1), 1.0) and abs(v1 @ v2) < np.cos(np.radians(2.0)):
        warnings.warn(
            f"leading eigenvalue {lam1:.6g} is repeated; eigenvector is not unique",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    if lam2 > lam1:
        lam1, v1 = lam2, v2
    # coordinates at the solver's noise level do not decide the sign
    return EigenPair(float(lam1), fix_sign(v1, atol=max(1e-12, 1e4 * tol)))
