"""Shared data containers plus centering and direction helpers.

Observations are rows and variables are columns throughout the package.
Directions are plain 1-d numpy arrays of unit norm; radii are floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateDirection, InsufficientData, NotCentered

__all__ = [
    "DataMatrix",
    "CumulantProfile",
    "center",
    "normalize",
    "angle_between",
    "axis_angle",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An ``N x d`` sample of the random vector, with its centering state.

    Parameters
    ----------
    values : array-like of shape (n_samples, n_features)
        Observations in rows. A 1-d input is read as a single column.
    centered : bool, default=False
        Whether the sample mean has already been removed.
    mean : array-like of shape (n_features,), optional
        The mean that was subtracted. Zero when the data is not centered.
    """

    values: np.ndarray
    centered: bool = False
    mean: np.ndarray | None = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {values.shape}")
        n, d = values.shape
        if n < 2:
            raise InsufficientData(f"need at least 2 observations, got {n}")
        if d < 1:
            raise ValueError("need at least one variable")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains non-finite entries")
        mean = np.zeros(d) if self.mean is None else np.asarray(self.mean, dtype=float)
        if mean.shape != (d,):
            raise ValueError(f"mean must have shape ({d},), got {mean.shape}")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "mean", _frozen(mean))

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


def as_array(data, require_centered: bool = True) -> np.ndarray:
    """Return the raw ``(N, d)`` float array behind ``data``.

    A :class:`DataMatrix` must be centered when ``require_centered`` is set.
    Plain arrays are taken as given, so callers passing arrays are responsible
    for centering them (this is how the uncentered estimator is reached).
    """
    if isinstance(data, DataMatrix):
        if require_centered and not data.centered:
            raise NotCentered("DataMatrix must be centered first; call center()")
        return data.values
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {X.shape}")
    return X


def center(data) -> DataMatrix:
    """Subtract the column means.

    Already-centered matrices are returned unchanged.

    Raises
    ------
    InsufficientData
        If there are fewer than two observations.
    """
    if isinstance(data, DataMatrix):
        if data.centered:
            return data
        X = data.values
    else:
        X = np.asarray(data, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] < 2:
            raise InsufficientData(f"need at least 2 observations, got shape {X.shape}")
    mean = X.mean(axis=0)
    return DataMatrix(X - mean, centered=True, mean=mean)


def normalize(v) -> np.ndarray:
    """Scale ``v`` to unit Euclidean norm.

    Raises
    ------
    DegenerateDirection
        If ``v`` is zero or not finite.
    """
    v = np.asarray(v, dtype=float).ravel()
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise DegenerateDirection(f"cannot normalize vector with norm {norm}")
    return v / norm


def angle_between(u, v) -> float:
    """Angle in degrees between two directions."""
    u = normalize(u)
    v = normalize(v)
    return float(np.degrees(np.arccos(np.clip(u @ v, -1.0, 1.0))))


def axis_angle(u, v) -> float:
    """Angle in degrees between the lines spanned by ``u`` and ``v`` (sign ignored)."""
    a = angle_between(u, v)
    return min(a, 180.0 - a)


@dataclass(frozen=True)
class CumulantProfile:
    """The empirical cumulant function along one direction, sampled over radii."""

    direction: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    ess: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii.ndim != 1 or np.any(np.diff(radii) <= 0):
            raise ValueError("radii must be a strictly increasing 1-d sequence")
        if np.any(radii < 0):
            raise ValueError("radii must be nonnegative")
        for name in ("direction", "radii", "values", "ess"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def is_convex(self, rtol: float = 1e-8) -> bool:
        """Check second divided differences are nonnegative up to ``rtol * max|G|``."""
        r, g = self.radii, self.values
        if len(r) < 3:
            return True
        slopes = np.diff(g) / np.diff(r)
        curvature = np.diff(slopes)
        scale = max(float(np.max(np.abs(g))), 1e-300)
        return bool(np.all(curvature >= -rtol * scale))
