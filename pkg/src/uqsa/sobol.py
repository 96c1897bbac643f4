"""First-order and total Sobol indices by the Glen-Isaac correlation
estimator with spurious-correlation correction (their scheme "D3")."""

from dataclasses import dataclass

import numpy as np

from .base import BaseAnalyzer
from .problem import sample_matrix
from .validation import as_float_array, as_sample_values, check_aligned, evaluate_rows

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SobolIndices:
    first: np.ndarray
    total: np.ndarray
    n_samples: int
    seed: int


class SobolEstimator(BaseAnalyzer):
    """Variance decomposition into first-order and total effects.

    Two independent N x n_x sample matrices X and X' are drawn from the
    input distributions. Radial sampling evaluates the model on X and X'
    (outputs g0, g0') and, for every parameter j, on X with column j taken
    from X' (outputs g_j) and on X' with column j taken from X (outputs
    g'_j), for N (2 + 2 n_x) evaluations in total. Each output vector is
    standardized by its own sample mean and standard deviation, then the
    correlation accumulators

        C_j  = mean of (g0 g'_j + g0' g_j) / 2     (pairs sharing only x_j)
        C'_j = mean of (g0 g_j + g0' g'_j) / 2     (pairs sharing all but x_j)
        CF_j = mean of (g0 g0' + g_j g'_j) / 2     (pairs sharing nothing)

    estimate S_j ~ C_j and T_j ~ 1 - C'_j. CF_j is the spurious correlation
    of independent outputs, zero only in the infinite-sample limit; the
    corrected indices remove its finite-sample bias:

        E_j  = (C_j  - CF_j C'_j) / (1 - CF_j^2)
        E'_j = (C'_j - CF_j C_j)  / (1 - CF_j^2)
        S_j  = C_j  - CF_j E'_j / (1 - E_j E'_j)
        T_j  = 1 - C'_j + CF_j E_j / (1 - E_j E'_j)

    Estimates of near-zero indices can come out slightly negative at finite
    N; they are reported as-is so convergence studies see the raw estimator.
    """

    def __init__(self, n_samples=10000, seed=0):
        self.n_samples = n_samples
        self.seed = seed

    def sample(self, specs):
        """The full radial evaluation matrix, N (2 + 2 n_x) rows.

        Layout: X, then X', then the n_x column-swapped copies of X, then
        the n_x column-swapped copies of X'. ``fit`` relies on this order.
        """
        if self.n_samples < 100:
            raise ValueError("n_samples must be at least 100")
        n = len(specs)
        rng = np.random.default_rng(self.seed)
        X = np.empty((self.n_samples, n))
        Xp = np.empty((self.n_samples, n))
        for k, spec in enumerate(specs):
            X[:, k] = spec.sample_column(rng, self.n_samples)
        for k, spec in enumerate(specs):
            Xp[:, k] = spec.sample_column(rng, self.n_samples)
        blocks = [X, Xp]
        for j in range(n):
            B = X.copy()
            B[:, j] = Xp[:, j]
            blocks.append(B)
        for j in range(n):
            B = Xp.copy()
            B[:, j] = X[:, j]
            blocks.append(B)
        return np.vstack(blocks)

    @staticmethod
    def _standardize(v, what):
        sd = v.std(ddof=1)
        if sd < DEGENERACY_TOL:
            raise ValueError(f"model output has zero variance ({what}); "
                             "indices are undefined")
        return (v - v.mean()) / sd

    def fit(self, X, y):
        """Indices from the radial matrix of ``sample`` and its outputs."""
        X = as_sample_values(X)
        y = as_float_array(y, name="y", ndim=1)
        check_aligned(X, y)
        n = X.shape[1]
        if X.shape[0] % (2 + 2 * n) != 0:
            raise ValueError(
                f"row count {X.shape[0]} is not N (2 + 2 n_x) for n_x = {n}"
            )
        N = X.shape[0] // (2 + 2 * n)
        g0 = self._standardize(y[:N], "base sample")
        g0p = self._standardize(y[N:2 * N], "resample")
        G = np.empty((N, n))
        Gp = np.empty((N, n))
        for j in range(n):
            G[:, j] = self._standardize(y[(2 + j) * N:(3 + j) * N], f"swap column {j}")
            Gp[:, j] = self._standardize(y[(2 + n + j) * N:(3 + n + j) * N],
                                         f"swap column {j}")

        C = (g0[:, None] * Gp + g0p[:, None] * G).sum(axis=0) / (2.0 * N)
        Cp = (g0[:, None] * G + g0p[:, None] * Gp).sum(axis=0) / (2.0 * N)
        CF = (np.sum(g0 * g0p) + (G * Gp).sum(axis=0)) / (2.0 * N)

        denom_cf = 1.0 - CF * CF
        if np.any(np.abs(denom_cf) < DEGENERACY_TOL):
            raise ValueError("spurious-correlation factor is degenerate (|CF| ~ 1)")
        E = (C - CF * Cp) / denom_cf
        Ep = (Cp - CF * C) / denom_cf
        denom = 1.0 - E * Ep
        if np.any(np.abs(denom) < DEGENERACY_TOL):
            raise ValueError("correction denominator 1 - E E' vanished; "
                             "estimator is numerically degenerate")
        self.first_order_ = C - CF * Ep / denom
        self.total_ = 1.0 - Cp + CF * E / denom
        self.n_samples_ = N
        return self

    def analyze(self, model, specs, threads=1):
        """Sample, evaluate the model on all radial rows, and fit."""
        X = self.sample(specs)
        y = evaluate_rows(model, X, threads=threads)
        return self.fit(X, y)

    def indices(self):
        self._require_fitted("first_order_")
        return SobolIndices(first=self.first_order_, total=self.total_,
                            n_samples=self.n_samples_, seed=int(self.seed))


def estimate_sobol(model, specs, n_samples, seed, threads=1):
    """One-call Sobol index estimate; cost N (2 + 2 n_x) model evaluations."""
    est = SobolEstimator(n_samples=n_samples, seed=seed)
    est.analyze(model, specs, threads=threads)
    return est.indices()
