"""Maximization of the empirical cumulant function over the unit sphere.

At a fixed radius the objective is smooth on the sphere, so plain projected
gradient ascent with a normalization retraction and a backtracking step is
enough. All starts advance together: one matrix product per sweep evaluates
every start, which keeps 10^5-row problems fast.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import DataMatrix, as_array, center, normalize
from .cumulant import RELIABLE_ESS, evaluate
from .exceptions import (
    DegenerateSpectrumWarning,
    HeavyTailWarning,
    NonConvergence,
    NumericalError,
)
from .pca import leading_eigenpair, sample_covariance

__all__ = [
    "OptimizerConfig",
    "Maximum",
    "MCFResult",
    "initial_directions",
    "maximize_at_radius",
    "deduplicate",
    "auto_radius",
    "mcf",
]

logger = logging.getLogger(__name__)

STEP_FLOOR = 1e-12
STEP_CEIL = 1e12
N_RANDOM_PROBES = 8


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    max_iters: int = 500
    step_init: float = 0.1
    grad_tol: float = 1e-8
    angle_dedup_deg: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1 or self.max_iters < 1:
            raise ValueError("starts and max_iters must be positive")
        if not (self.step_init > 0 and self.grad_tol > 0):
            raise ValueError("step_init and grad_tol must be positive")
        if not 0 < self.angle_dedup_deg < 90:
            raise ValueError("angle_dedup_deg must lie in (0, 90)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Maximum:
    direction: np.ndarray
    g_value: float
    basin_count: int = 1


@dataclass
class MCFResult:
    """Distinct local maxima at one radius, best first, with the PC1 baseline."""

    radius_used: float
    maxima: list[Maximum]
    pc1: np.ndarray
    ess_at_radius: float
    warnings: list[str] = field(default_factory=list)
    n_converged: int = 0
    n_iter: int = 0

    @property
    def directions(self) -> np.ndarray:
        return np.array([m.direction for m in self.maxima])

    @property
    def g_values(self) -> np.ndarray:
        return np.array([m.g_value for m in self.maxima])

    def to_dict(self) -> dict:
        return {
            "radius_used": float(self.radius_used),
            "maxima": [
                {"theta": m.direction.tolist(), "g": float(m.g_value), "basin_count": int(m.basin_count)}
                for m in self.maxima
            ],
            "pc1": self.pc1.tolist(),
            "ess": float(self.ess_at_radius),
            "warnings": list(self.warnings),
        }


def initial_directions(d: int, starts: int, seed: int) -> np.ndarray:
    """Uniform points on the sphere; start ``i`` draws from its own ``(seed, i)`` stream."""
    out = np.empty((starts, d))
    for i in range(starts):
        rng = np.random.default_rng([seed, i])
        v = rng.standard_normal(d)
        while not np.any(v):
            v = rng.standard_normal(d)
        out[i] = v / np.linalg.norm(v)
    return out


def _ascend(X, r, thetas, cfg):
    """Run projected gradient ascent from every row of ``thetas``.

    Each sweep tries a Barzilai-Borwein step (``step_init`` on the first
    sweep) and halves it until the value increases. Once the expected gain
    falls below the rounding noise of the objective, a trial is accepted when
    the new gradient still points along the old one, i.e. the step did not
    overshoot the maximum along the search line.

    Returns final directions, values, gradient norms, a converged mask and
    per-start iteration counts.
    """
    k = thetas.shape[0]
    g, grad, _ = evaluate(X, r, thetas)
    step = np.full(k, cfg.step_init)
    gnorm = np.linalg.norm(grad, axis=1)
    converged = gnorm <= cfg.grad_tol * np.maximum(1.0, np.abs(g))
    stalled = np.zeros(k, dtype=bool)
    iters = np.zeros(k, dtype=int)
    noise = 64 * np.finfo(float).eps

    for _ in range(cfg.max_iters):
        active = np.flatnonzero(~converged & ~stalled)
        if active.size == 0:
            break
        iters[active] += 1
        prev_theta = thetas[active].copy()
        prev_grad = grad[active].copy()
        pending = active
        while pending.size:
            trial = thetas[pending] + step[pending, None] * grad[pending]
            trial /= np.linalg.norm(trial, axis=1)[:, None]
            g_new, grad_new, _ = evaluate(X, r, trial)
            g_old = g[pending]
            flat = np.abs(g_new - g_old) <= noise * np.maximum(1.0, np.abs(g_old))
            aligned = np.sum(grad_new * grad[pending], axis=1) > 0
            ok = (g_new > g_old) | (flat & aligned)
            acc = pending[ok]
            thetas[acc] = trial[ok]
            g[acc] = g_new[ok]
            grad[acc] = grad_new[ok]
            rej = pending[~ok]
            step[rej] *= 0.5
            floor = step[rej] < STEP_FLOOR
            stalled[rej[floor]] = True
            pending = rej[~floor]

        moved = ~stalled[active]
        idx = active[moved]
        ds = thetas[idx] - prev_theta[moved]
        dy = grad[idx] - prev_grad[moved]
        curv = -np.sum(ds * dy, axis=1)
        bb = np.sum(ds * ds, axis=1) / np.where(curv > 0, curv, 1.0)
        step[idx] = np.where(curv > 0, bb, 2.0 * step[idx]).clip(STEP_FLOOR, STEP_CEIL)
        gnorm = np.linalg.norm(grad, axis=1)
        converged = gnorm <= cfg.grad_tol * np.maximum(1.0, np.abs(g))

    return thetas, g, gnorm, converged, iters


def maximize_at_radius(data, r: float, cfg: OptimizerConfig | None = None, *, return_all: bool = False):
    """Local maxima of the empirical cumulant function on the unit sphere.

    Parameters
    ----------
    data : DataMatrix or ndarray
        Centered sample.
    r : float
        Radius, strictly positive.
    cfg : OptimizerConfig, optional
    return_all : bool, default=False
        Also return the per-start record ``(directions, values, converged, iterations)``.

    Returns
    -------
    list of (direction, value)
        One entry per start that met the first-order condition
        ``|tangent gradient| <= grad_tol * max(1, |G|)``, not yet deduplicated.

    Raises
    ------
    NonConvergence
        If no start converges; ``best`` carries the highest iterate.
    NumericalError
        If the objective is not finite at this radius.
    """
    cfg = cfg or OptimizerConfig()
    X = as_array(data)
    if not (np.isfinite(r) and r > 0):
        raise NumericalError(f"radius must be positive and finite, got {r}")
    d = X.shape[1]
    if d == 1:
        thetas = np.array([[1.0], [-1.0]])
        g, _, _ = evaluate(X, r, thetas, gradient=False)
        sols = [(thetas[i].copy(), float(g[i])) for i in range(2)]
        rec = (thetas, g, np.ones(2, dtype=bool), np.zeros(2, dtype=int))
        return (sols, rec) if return_all else sols

    thetas = initial_directions(d, cfg.starts, cfg.seed)
    thetas, g, gnorm, converged, iters = _ascend(X, float(r), thetas, cfg)
    logger.debug(
        "radius %.4g: %d/%d starts converged, median %d iterations",
        r, converged.sum(), len(converged), int(np.median(iters)),
    )
    if not converged.any():
        best = int(np.argmax(g))
        raise NonConvergence(
            f"no start converged within {cfg.max_iters} iterations at radius {r:.4g} "
            f"(smallest gradient norm {gnorm.min():.3g})",
            best=(thetas[best].copy(), float(g[best])),
        )
    sols = [(thetas[i].copy(), float(g[i])) for i in np.flatnonzero(converged)]
    return (sols, (thetas, g, converged, iters)) if return_all else sols


def deduplicate(solutions, angle_dedup_deg: float = 2.0) -> list[Maximum]:
    """Merge solutions closer than ``angle_dedup_deg`` degrees.

    Solutions are visited by descending value (ties broken by the
    lexicographically smallest direction); each is either kept or merged into
    the first kept solution within the threshold, which then counts one more
    start in its basin. Antipodal solutions are never merged.
    """
    order = sorted(solutions, key=lambda s: (-s[1], tuple(np.asarray(s[0]).tolist())))
    cos_thr = np.cos(np.radians(angle_dedup_deg))
    kept: list[list] = []
    for theta, value in order:
        theta = np.asarray(theta, dtype=float)
        for entry in kept:
            if float(entry[0] @ theta) >= cos_thr:
                entry[2] += 1
                break
        else:
            kept.append([theta, float(value), 1])
    return [Maximum(t, v, c) for t, v, c in kept]


def _probe_directions(d: int, seed: int) -> np.ndarray:
    eye = np.eye(d)
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((N_RANDOM_PROBES, d))
    rand /= np.linalg.norm(rand, axis=1)[:, None]
    return np.vstack([eye, -eye, rand])


def _min_ess(X, r, probes) -> float:
    _, _, ess = evaluate(X, r, probes, gradient=False)
    return float(ess.min())


def auto_radius(data, ess_min: float = RELIABLE_ESS, seed: int = 0, refine_steps: int = 5) -> float:
    """Largest radius at which the cumulant estimate stays reliable.

    Doubles ``r0 = 0.1 / sigma_max`` while the smallest effective sample size
    over the probe directions (the ``2d`` signed axes plus 8 random ones)
    stays at or above ``ess_min``, then bisects the last bracket
    ``refine_steps`` times.

    Emits :class:`HeavyTailWarning` and returns ``r0`` if even ``r0`` fails.
    """
    X = as_array(data)
    n, d = X.shape
    if not 1.0 < ess_min <= n:
        raise ValueError(f"ess_min must lie in (1, {n}], got {ess_min}")
    sigma_max = float(X.std(axis=0).max())
    if sigma_max == 0.0:
        raise NumericalError("all columns are constant")
    r0 = 0.1 / sigma_max
    probes = _probe_directions(d, seed)

    if _min_ess(X, r0, probes) < ess_min:
        warnings.warn(
            f"effective sample size is below {ess_min:g} already at radius {r0:.4g}; "
            "the distribution may decay slower than exponentially",
            HeavyTailWarning,
            stacklevel=2,
        )
        return r0

    lo = r0
    for _ in range(64):
        hi = 2.0 * lo
        if _min_ess(X, hi, probes) < ess_min:
            break
        lo = hi
    else:
        return lo
    for _ in range(refine_steps):
        mid = 0.5 * (lo + hi)
        if _min_ess(X, mid, probes) >= ess_min:
            lo = mid
        else:
            hi = mid
    return lo


def mcf(data, cfg: OptimizerConfig | None = None, radius: float | None = None,
        ess_min: float = RELIABLE_ESS) -> MCFResult:
    """Full pipeline: center, pick the radius, maximize, deduplicate, compare with PC1."""
    cfg = cfg or OptimizerConfig()
    dm = center(data if isinstance(data, DataMatrix) else DataMatrix(data))
    X = dm.values
    notes: list[str] = []

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = auto_radius(dm, ess_min=ess_min, seed=cfg.seed) if radius is None else float(radius)
        sols, (_, _, converged, iters) = maximize_at_radius(dm, r, cfg, return_all=True)
        pc1 = leading_eigenpair(sample_covariance(dm)).eigenvector
    for w in caught:
        if issubclass(w.category, (HeavyTailWarning, DegenerateSpectrumWarning)):
            notes.append(f"{w.category.__name__}: {w.message}")

    n_conv = int(converged.sum())
    if n_conv < len(converged):
        notes.append(f"NonConvergence: {len(converged) - n_conv} of {len(converged)} starts did not converge")

    maxima = deduplicate(sols, cfg.angle_dedup_deg)
    top = maxima[0].direction
    _, _, ess = evaluate(X, r, top[None, :], gradient=False)
    ess_top = float(ess[0])
    if ess_top < ess_min:
        notes.append(
            f"UnreliableEstimate: effective sample size {ess_top:.3g} at the top maximum "
            f"is below {ess_min:g}"
        )
    return MCFResult(
        radius_used=r,
        maxima=maxima,
        pc1=pc1,
        ess_at_radius=ess_top,
        warnings=notes,
        n_converged=n_conv,
        n_iter=int(iters.max()),
    )
