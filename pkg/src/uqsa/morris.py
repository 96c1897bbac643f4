"""Morris screening: one-at-a-time trajectories on a level grid, elementary
effects, and their statistics (mu, mu*, sigma)."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .base import BaseAnalyzer
from .validation import as_float_array, as_sample_values, check_aligned, evaluate_rows


@dataclass(frozen=True)
class MorrisDesign:
    """R trajectory blocks of n_x + 1 points each, stacked row-wise in
    native units. Consecutive rows within a block differ in exactly one
    coordinate by that parameter's grid step."""

    matrix: np.ndarray
    n_trajectories: int
    n_levels: int
    delta: np.ndarray            # per-parameter step magnitude, native units
    bounds: np.ndarray           # (n_x, 2)
    seed: int

    def __post_init__(self):
        self.matrix.setflags(write=False)


@dataclass(frozen=True)
class MorrisStats:
    mu: np.ndarray
    mu_star: np.ndarray
    sigma: np.ndarray
    mu_norm: np.ndarray
    mu_star_norm: np.ndarray
    n_trajectories: int
    n_levels: int


class MorrisScreening(BaseAnalyzer):
    """Elementary-effects screening.

    Each trajectory starts from a random point on a p-level grid over the
    parameter bounds and perturbs every parameter exactly once, in random
    order, by the grid step Delta. The elementary effect of a step is the
    incremental ratio (y_after - y_before) / (signed step); over R
    trajectories their mean mu_i measures overall influence, the mean of
    absolute values mu_i* avoids sign cancellation in non-monotonic models,
    and the standard deviation sigma_i flags nonlinearity or interactions
    (the method cannot tell those two apart). Cost: R (n_x + 1) evaluations.

    The normalized step defaults to Delta = p / (2 (p - 1)) of each range,
    which balances level coverage for even p. ``grid_fraction`` instead puts
    the grid at that uniform spacing (e.g. 0.01 for a fine 101-level grid)
    and steps by one grid cell. Steps go up unless that would leave the
    bounds, in which case they go down.

    ``mu_norm_``/``mu_star_norm_`` rescale by x0_i / y0 (nominal point and
    response) so parameters with different units can be ranked together.
    """

    def __init__(self, n_trajectories=100, n_levels=20, grid_fraction=None, seed=0):
        self.n_trajectories = n_trajectories
        self.n_levels = n_levels
        self.grid_fraction = grid_fraction
        self.seed = seed

    def _grid(self):
        if self.grid_fraction is not None:
            frac = float(self.grid_fraction)
            if not 0.0 < frac <= 0.5:
                raise ValueError("grid_fraction must be in (0, 0.5]")
            n_levels = int(round(1.0 / frac)) + 1
            if abs((n_levels - 1) * frac - 1.0) > 1e-9:
                raise ValueError("grid_fraction must divide the unit range evenly")
            delta = 1.0 / (n_levels - 1)
        else:
            n_levels = int(self.n_levels)
            if n_levels < 2:
                raise ValueError("n_levels must be at least 2")
            delta = n_levels / (2.0 * (n_levels - 1.0))
        levels = np.arange(n_levels) / (n_levels - 1.0)
        return levels, delta, n_levels

    def design(self, specs):
        """Generate the trajectory design for the given parameter specs."""
        if self.n_trajectories < 2:
            raise ValueError("need at least 2 trajectories")
        bounds = np.array([spec.morris_range() for spec in specs])
        levels, delta_norm, n_levels = self._grid()
        lo, hi = bounds[:, 0], bounds[:, 1]
        span = hi - lo
        n = len(specs)
        rng = np.random.default_rng(self.seed)
        rows = np.empty((self.n_trajectories * (n + 1), n))
        r = 0
        for _ in range(self.n_trajectories):
            x = levels[rng.integers(0, n_levels, size=n)]
            order = rng.permutation(n)
            rows[r] = lo + x * span
            for k in order:
                if x[k] + delta_norm <= 1.0 + 1e-12:
                    x[k] += delta_norm
                elif x[k] - delta_norm >= -1e-12:
                    x[k] -= delta_norm
                else:
                    raise ValueError(
                        "no feasible step from a grid point; use an even number of levels"
                    )
                r += 1
                rows[r] = lo + x * span
            r += 1
        return MorrisDesign(matrix=rows, n_trajectories=self.n_trajectories,
                            n_levels=n_levels, delta=delta_norm * span,
                            bounds=bounds, seed=int(self.seed))

    def fit(self, X, y, x0=None, y0=None):
        """Elementary effects and statistics from design rows and outputs.

        The changed coordinate and signed step of every in-trajectory move
        are recovered from consecutive rows, so any design with the same
        block structure works. Pass the nominal point ``x0`` and nominal
        response ``y0`` to get the normalized statistics.
        """
        X = as_sample_values(X)
        y = as_float_array(y, name="y", ndim=1)
        check_aligned(X, y)
        n = X.shape[1]
        if X.shape[0] % (n + 1) != 0:
            raise ValueError(f"row count {X.shape[0]} is not a multiple of n_x + 1")
        R = X.shape[0] // (n + 1)
        if R < 2:
            raise ValueError("need at least 2 trajectories")
        effects = np.full((R, n), np.nan)
        for r in range(R):
            base = r * (n + 1)
            for step in range(n):
                diff = X[base + step + 1] - X[base + step]
                moved = np.nonzero(diff)[0]
                if moved.size != 1:
                    raise ValueError(
                        f"rows {base + step} and {base + step + 1} differ in "
                        f"{moved.size} coordinates; expected exactly one"
                    )
                k = moved[0]
                if not np.isnan(effects[r, k]):
                    raise ValueError(f"parameter {k} perturbed twice in trajectory {r}")
                effects[r, k] = (y[base + step + 1] - y[base + step]) / diff[k]
        self.effects_ = effects
        self.mu_ = effects.mean(axis=0)
        self.mu_star_ = np.abs(effects).mean(axis=0)
        self.sigma_ = effects.std(axis=0, ddof=1)
        self.n_trajectories_ = R
        if x0 is not None and y0 is not None and y0 != 0.0:
            x0 = as_float_array(x0, name="x0", ndim=1)
            self.mu_norm_ = self.mu_ * x0 / y0
            self.mu_star_norm_ = self.mu_star_ * x0 / y0
            self.normalized_available_ = True
        else:
            self.mu_norm_ = np.full(n, np.nan)
            self.mu_star_norm_ = np.full(n, np.nan)
            self.normalized_available_ = False
        return self

    def analyze(self, model, specs, threads=1):
        """Design, evaluate, and fit; normalization uses the spec nominals."""
        design = self.design(specs)
        y = evaluate_rows(model, design.matrix, threads=threads)
        x0 = np.array([spec.nominal for spec in specs])
        y0 = float(model(x0))
        self.design_ = design
        return self.fit(design.matrix, y, x0=x0, y0=y0)

    def classify(self, mu_star_threshold, sigma_threshold):
        """Tag each parameter from its (mu*, sigma) pair.

        "insignificant" below the mu* threshold; otherwise "linear" when
        sigma is small and "nonlinear_or_interacting" when it is not.
        """
        self._require_fitted("mu_star_")
        tags = []
        for ms, sg in zip(self.mu_star_, self.sigma_):
            if ms < mu_star_threshold:
                tags.append("insignificant")
            elif sg < sigma_threshold:
                tags.append("linear")
            else:
                tags.append("nonlinear_or_interacting")
        return tags

    def stats(self):
        self._require_fitted("mu_")
        return MorrisStats(
            mu=self.mu_, mu_star=self.mu_star_, sigma=self.sigma_,
            mu_norm=self.mu_norm_, mu_star_norm=self.mu_star_norm_,
            n_trajectories=self.n_trajectories_,
            n_levels=self._grid()[2],
        )
