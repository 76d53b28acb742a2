"""Marginal tails of projected data and the tail-dominance check.

If the density of ``theta . X`` exceeds that of ``theta' . X`` beyond some
point ``z*``, the cumulant function along ``theta`` eventually exceeds the
one along ``theta'``. On a finite sample this can only be checked
statistically: :func:`verify_theorem1` compares the empirical cumulant
functions over a radius grid and reports where the estimates are reliable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import gaussian_kde

from .core import as_array, normalize
from .cumulant import RELIABLE_ESS, _tilted, evaluate
from .exceptions import DegenerateProjection, InsufficientData

__all__ = [
    "MarginalDensity",
    "TailDominanceReport",
    "marginal_density",
    "find_tail_crossing",
    "verify_theorem1",
    "silverman_bandwidth",
]

GRID_POINTS = 512
NOISE_FLOOR = 1e-6
MIN_RUN = 10
SIGNIFICANCE = 3.0


@dataclass(frozen=True)
class MarginalDensity:
    direction: np.ndarray
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def on(self, grid) -> np.ndarray:
        """Density interpolated on another grid, zero outside its own support."""
        return np.interp(grid, self.grid, self.density, left=0.0, right=0.0)


def silverman_bandwidth(z) -> float:
    """Rule-of-thumb bandwidth ``1.06 * std(z) * N^(-1/5)``."""
    z = np.asarray(z, dtype=float)
    return 1.06 * float(np.std(z, ddof=1)) * z.size ** (-0.2)


def marginal_density(data, theta, bandwidth: float | None = None) -> MarginalDensity:
    """Gaussian-kernel density of the projections ``theta . x_i``.

    The grid has 512 points spanning ``[min z - 3h, max z + 3h]``.

    Raises
    ------
    InsufficientData
        With fewer than 30 observations.
    DegenerateProjection
        If all projections coincide.
    """
    X = as_array(data)
    if X.shape[0] < 30:
        raise InsufficientData(f"need at least 30 observations, got {X.shape[0]}")
    theta = normalize(theta)
    z = X @ theta
    sd = float(np.std(z, ddof=1))
    if not sd > 1e-12 * max(1.0, float(np.max(np.abs(z)))):
        raise DegenerateProjection("projections have zero variance along this direction")
    h = silverman_bandwidth(z) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    # gaussian_kde scales its factor by the sample std, so pass h / sd
    kde = gaussian_kde(z, bw_method=h / sd)
    grid = np.linspace(z.min() - 3 * h, z.max() + 3 * h, GRID_POINTS)
    return MarginalDensity(direction=theta, grid=grid, density=kde(grid), bandwidth=h)


def _common_grid(fa, fb):
    if fa.grid.shape == fb.grid.shape and np.array_equal(fa.grid, fb.grid):
        return fa.grid, fa.density, fb.density
    n = max(fa.grid.size, fb.grid.size)
    grid = np.linspace(min(fa.grid[0], fb.grid[0]), max(fa.grid[-1], fb.grid[-1]), n)
    return grid, fa.on(grid), fb.on(grid)


def find_tail_crossing(fa, fb, noise_floor: float = NOISE_FLOOR, min_run: int = MIN_RUN):
    """Point beyond which ``fa`` is strictly above ``fb``, or ``None``.

    Only grid points where both densities exceed ``noise_floor`` are
    compared. Starting from the top of that region, the run of points with
    ``fa > fb`` is followed downward; ``z*`` is the grid point just below the
    run. At least ``min_run`` points must lie in the run.

    ``fa`` and ``fb`` are :class:`MarginalDensity` objects, or ``(grid,
    density)`` pairs.
    """
    if not isinstance(fa, MarginalDensity):
        fa = MarginalDensity(np.zeros(1), *map(np.asarray, fa), bandwidth=np.nan)
    if not isinstance(fb, MarginalDensity):
        fb = MarginalDensity(np.zeros(1), *map(np.asarray, fb), bandwidth=np.nan)
    grid, da, db = _common_grid(fa, fb)
    comparable = np.flatnonzero((da > noise_floor) & (db > noise_floor))
    if comparable.size == 0:
        return None
    top = comparable[-1]
    # restrict to the contiguous comparable block that ends at ``top``
    gaps = np.flatnonzero(np.diff(comparable) != 1)
    bottom = comparable[gaps[-1] + 1] if gaps.size else comparable[0]
    i = top
    while i >= bottom and da[i] > db[i]:
        i -= 1
    run = top - i
    if run < min_run:
        return None
    return float(grid[max(i, 0)])


@dataclass
class TailDominanceReport:
    """Outcome of a tail-dominance check between two directions.

    ``holds_for_radii`` lists ``(radius, G_a > G_b)`` for every tested
    radius. The per-radius arrays carry the estimates behind each decision:
    ``se_diff`` is the delta-method standard error of ``G_a - G_b`` and
    ``reliable`` marks radii where both effective sample sizes reach
    ``ess_min``.
    """

    z_star: float | None
    s_star_estimate: float | None
    holds_for_radii: list[tuple[float, bool]]
    g_a: np.ndarray = field(repr=False, default=None)
    g_b: np.ndarray = field(repr=False, default=None)
    se_diff: np.ndarray = field(repr=False, default=None)
    ess: np.ndarray = field(repr=False, default=None)
    reliable: np.ndarray = field(repr=False, default=None)
    ess_min: float = RELIABLE_ESS

    def __post_init__(self):
        if self.z_star is None and self.s_star_estimate is not None:
            raise ValueError("s_star_estimate requires a tail crossing z_star")

    @property
    def radii(self) -> np.ndarray:
        return np.array([r for r, _ in self.holds_for_radii])

    @property
    def holds(self) -> np.ndarray:
        return np.array([h for _, h in self.holds_for_radii], dtype=bool)

    @property
    def significant(self) -> np.ndarray:
        """Radii where ``G_a - G_b`` exceeds three standard errors."""
        return (self.g_a - self.g_b) > SIGNIFICANCE * self.se_diff

    def dominance_above_s_star(self) -> bool:
        """Dominance holds at every reliable radius from ``s_star_estimate`` on."""
        if self.s_star_estimate is None:
            return False
        sel = (self.radii >= self.s_star_estimate) & self.reliable
        return bool(sel.any() and self.holds[sel].all())

    @property
    def stable_dominance(self) -> bool:
        """Dominance that is statistically significant at every reliable radius past ``s*``."""
        if self.s_star_estimate is None:
            return False
        sel = (self.radii >= self.s_star_estimate) & self.reliable
        return bool(sel.any() and self.significant[sel].all())

    def to_dict(self) -> dict:
        return {
            "z_star": self.z_star,
            "s_star_estimate": self.s_star_estimate,
            "stable_dominance": self.stable_dominance,
            "radii": [
                {
                    "radius": float(r),
                    "holds": bool(h),
                    "g_a": float(ga),
                    "g_b": float(gb),
                    "se_diff": float(se),
                    "ess": float(e),
                    "reliable": bool(ok),
                }
                for (r, h), ga, gb, se, e, ok in zip(
                    self.holds_for_radii, self.g_a, self.g_b, self.se_diff, self.ess, self.reliable
                )
            ],
        }


def _diff_stats(X, r, thetas):
    """``G_a - G_b`` inputs at one radius: values, ESS and the paired standard error."""
    g, _, ess = evaluate(X, r, thetas, gradient=False)
    w, _ = _tilted(X, r, thetas)
    u = w[0] / w[0].mean() - w[1] / w[1].mean()
    se = float(np.std(u, ddof=1) / np.sqrt(X.shape[0]))
    return g, ess, se


def verify_theorem1(data, theta_a, theta_b, radii, ess_min: float = RELIABLE_ESS) -> TailDominanceReport:
    """Check that a heavier upper tail along ``theta_a`` wins the cumulant comparison.

    Parameters
    ----------
    data : DataMatrix or ndarray
        Centered sample with at least 30 rows.
    theta_a, theta_b : array-like
        The two directions; normalized here.
    radii : array-like
        Ascending radii at which the cumulant functions are compared.
    ess_min : float, default=10
        Radii where either direction's ESS is below this are flagged unreliable.

    Returns
    -------
    TailDominanceReport
        ``s_star_estimate`` is the smallest tested radius from which
        ``G_a > G_b`` holds at every larger tested radius; it is ``None`` when
        no upper-tail crossing of the marginal densities is found.
    """
    X = as_array(data)
    ta, tb = normalize(theta_a), normalize(theta_b)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or np.any(radii <= 0):
        raise ValueError("radii must be positive and strictly increasing")

    z_star = find_tail_crossing(marginal_density(X, ta), marginal_density(X, tb))

    thetas = np.vstack([ta, tb])
    g_a, g_b, se, ess = (np.empty(len(radii)) for _ in range(4))
    for i, r in enumerate(radii):
        g, e, s = _diff_stats(X, r, thetas)
        g_a[i], g_b[i], se[i], ess[i] = g[0], g[1], s, e.min()
    holds = g_a > g_b
    reliable = ess >= ess_min

    s_star = None
    if z_star is not None and holds[-1]:
        k = len(holds) - 1
        while k > 0 and holds[k - 1]:
            k -= 1
        s_star = float(radii[k])

    return TailDominanceReport(
        z_star=z_star,
        s_star_estimate=s_star,
        holds_for_radii=[(float(r), bool(h)) for r, h in zip(radii, holds)],
        g_a=g_a,
        g_b=g_b,
        se_diff=se,
        ess=ess,
        reliable=reliable,
        ess_min=ess_min,
    )
