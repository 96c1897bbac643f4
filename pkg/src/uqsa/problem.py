"""Input-parameter space, seeded sampling, and rank transforms.

All random draws in the package go through ``numpy.random.default_rng``
(PCG64). One generator is created per seeded operation and columns are
drawn in declared parameter order, so any result is reproducible from
(specs, sizes, seed) alone.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.stats import rankdata

from .validation import as_float_array

MAX_REDRAWS = 1000


@dataclass(frozen=True)
class ParameterSpec:
    """One uncertain input parameter.

    ``dist`` is "uniform" (support [lo, hi]) or "normal" (mean ``nominal``,
    standard deviation ``sd``). For normal parameters built from a relative
    uncertainty, sd = relative_uncertainty * nominal. ``morris_bounds``
    override the screening range; a normal parameter defaults to
    nominal +- 3 sd and a uniform one to its support. ``positive_only``
    redraws non-positive normal samples (physical pressure/energy/temperature
    parameters cannot go negative).
    """

    name: str
    dist: str
    nominal: float
    sd: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    relative_uncertainty: float = 0.0
    positive_only: bool = False
    morris_bounds: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.dist not in ("uniform", "normal"):
            raise ValueError(f"unknown distribution {self.dist!r} for {self.name!r}")
        if self.dist == "uniform" and not self.lo < self.hi:
            raise ValueError(f"uniform parameter {self.name!r} requires lo < hi")
        if self.dist == "normal" and self.sd < 0:
            raise ValueError(f"normal parameter {self.name!r} requires sd >= 0")
        if self.relative_uncertainty < 0:
            raise ValueError(f"relative uncertainty of {self.name!r} must be >= 0")
        if self.morris_bounds is not None and not self.morris_bounds[0] < self.morris_bounds[1]:
            raise ValueError(f"morris_bounds of {self.name!r} must be increasing")

    @classmethod
    def normal(cls, name, mean, rel_uncertainty=None, sd=None, positive_only=False,
               morris_bounds=None):
        """Normal parameter from either a relative uncertainty or an absolute sd."""
        if (rel_uncertainty is None) == (sd is None):
            raise ValueError("give exactly one of rel_uncertainty or sd")
        if sd is None:
            rel = float(rel_uncertainty)
            sd = rel * abs(mean)
        else:
            rel = abs(sd / mean) if mean != 0 else 0.0
        return cls(name=name, dist="normal", nominal=float(mean), sd=float(sd),
                   relative_uncertainty=rel, positive_only=positive_only,
                   morris_bounds=morris_bounds)

    @classmethod
    def uniform(cls, name, lo, hi, nominal=None):
        """Uniform parameter on [lo, hi]; nominal defaults to the midpoint."""
        if nominal is None:
            nominal = 0.5 * (lo + hi)
        return cls(name=name, dist="uniform", nominal=float(nominal),
                   lo=float(lo), hi=float(hi))

    def morris_range(self):
        """Screening bounds: explicit override, else +-3 sd (normal) or support."""
        if self.morris_bounds is not None:
            return tuple(self.morris_bounds)
        if self.dist == "uniform":
            return (self.lo, self.hi)
        return (self.nominal - 3.0 * self.sd, self.nominal + 3.0 * self.sd)

    def sample_column(self, rng, n):
        """Draw n independent samples from this parameter's distribution."""
        if self.dist == "uniform":
            return rng.uniform(self.lo, self.hi, n)
        values = rng.normal(self.nominal, self.sd, n)
        if self.positive_only:
            rounds = 0
            bad = values <= 0.0
            while np.any(bad):
                rounds += 1
                if rounds > MAX_REDRAWS:
                    raise ValueError(
                        f"could not draw a positive sample for {self.name!r} after "
                        f"{MAX_REDRAWS} redraws; check the spec"
                    )
                values[bad] = rng.normal(self.nominal, self.sd, int(bad.sum()))
                bad = values <= 0.0
        return values


@dataclass(frozen=True)
class SampleMatrix:
    """Immutable N x n_x table of input samples with column metadata."""

    values: np.ndarray
    columns: Tuple[str, ...]
    seed: int

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def n_x(self):
        return self.values.shape[1]

    def column(self, name):
        return self.values[:, self.columns.index(name)]


def sample_matrix(specs, n_samples, seed):
    """Independent column-wise samples of the given parameters.

    Columns are drawn in declared order from a single PCG64 generator, so
    the same (specs, n_samples, seed) always yields a bit-identical matrix.
    """
    if not specs:
        raise ValueError("specs must not be empty")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    rng = np.random.default_rng(seed)
    values = np.empty((n_samples, len(specs)))
    for k, spec in enumerate(specs):
        values[:, k] = spec.sample_column(rng, n_samples)
    return SampleMatrix(values=values, columns=tuple(s.name for s in specs), seed=int(seed))


def rank_transform(values):
    """Average-tie ranks of a vector, or column-wise ranks of a matrix.

    Ranks are invariant under any strictly increasing transform of the data,
    which is what makes the rank variants (SRRC/PRCC) robust to monotone
    nonlinearity.
    """
    arr = as_float_array(values, name="values")
    if arr.ndim == 1:
        return rankdata(arr, method="average")
    if arr.ndim == 2:
        return np.column_stack([rankdata(arr[:, k], method="average")
                                for k in range(arr.shape[1])])
    raise ValueError("rank_transform expects a vector or a matrix")


def truncated_resample(spec, draw, rng):
    """Return the draw unchanged if positive, else redraw until positive.

    Guards physically positive normal parameters against non-physical tails.
    At the relative uncertainties used here (<= 5%) the guard fires with
    probability below 1e-80, so it never distorts the statistics in practice.
    """
    if spec.dist != "normal":
        raise ValueError("truncated_resample applies to normal parameters only")
    value = float(draw)
    for _ in range(MAX_REDRAWS):
        if value > 0.0:
            return value
        value = float(rng.normal(spec.nominal, spec.sd))
    raise ValueError(
        f"could not draw a positive sample for {spec.name!r} after "
        f"{MAX_REDRAWS} redraws; check the spec"
    )
