"""Regression-based sensitivity: standardized regression coefficients and
partial correlation coefficients, each with a rank variant for monotone
nonlinear models."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base import BaseAnalyzer
from .problem import rank_transform
from .validation import as_float_array, as_sample_values, check_aligned

RANK_DEFICIENCY_RTOL = 1e-10


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    method: str
    r_squared: Optional[float]
    n_samples: int


def _column_sd(A, columns=None, what="X"):
    sd = A.std(axis=0, ddof=1)
    bad = np.nonzero(sd == 0.0)[0]
    if bad.size:
        name = columns[bad[0]] if columns is not None else f"column {bad[0]}"
        raise ValueError(f"{what} has zero variance in {name}; cannot standardize")
    return sd


def standardize(A, columns=None):
    """Center to mean 0 and scale to sample standard deviation 1 (ddof=1).

    Works column-wise on matrices and element-wise on vectors; a constant
    column is an error because standardization is undefined for it.
    """
    arr = as_float_array(A, name="data")
    if arr.ndim == 1:
        sd = arr.std(ddof=1)
        if sd == 0.0:
            raise ValueError("data has zero variance; cannot standardize")
        return (arr - arr.mean()) / sd
    if arr.ndim != 2:
        raise ValueError("standardize expects a vector or a matrix")
    sd = _column_sd(arr, columns)
    return (arr - arr.mean(axis=0)) / sd


def _prepare(X, y, rank):
    columns = getattr(X, "columns", None)
    Xv = as_sample_values(X)
    yv = as_float_array(y, name="y", ndim=1)
    check_aligned(Xv, yv)
    if Xv.shape[0] <= Xv.shape[1] + 1:
        raise ValueError("need more samples than inputs + 1")
    if rank:
        Xv = rank_transform(Xv)
        yv = rank_transform(yv)
    return Xv, yv, columns


class SRCAnalyzer(BaseAnalyzer):
    """Standardized regression coefficients from a least-squares linear fit.

    The response and every input column are standardized, then the (now
    intercept-free) linear model is fit by SVD-based least squares. The
    coefficients express response change per standard deviation of each
    input; ``r_squared_`` reports how much of the variance the linear model
    captures, which is the usual gauge of whether SRC ranking can be trusted.
    With ``rank=True`` the fit runs on average ranks (SRRC), the right choice
    when the raw-value fit has low R^2.
    """

    def __init__(self, rank=False):
        self.rank = rank

    def fit(self, X, y):
        Xv, yv, columns = _prepare(X, y, self.rank)
        Xs = standardize(Xv, columns)
        ys = standardize(yv)
        coef, _, eff_rank, _ = np.linalg.lstsq(Xs, ys, rcond=RANK_DEFICIENCY_RTOL)
        if eff_rank < Xs.shape[1]:
            raise np.linalg.LinAlgError(
                f"design is rank deficient (rank {eff_rank} < {Xs.shape[1]})"
            )
        residual = ys - Xs @ coef
        self.coefficients_ = coef
        self.r_squared_ = float(1.0 - residual @ residual / (ys @ ys))
        self.n_samples_ = Xv.shape[0]
        return self

    def result(self):
        self._require_fitted("coefficients_")
        return RegressionResult(self.coefficients_, "SRRC" if self.rank else "SRC",
                                self.r_squared_, self.n_samples_)


class PCCAnalyzer(BaseAnalyzer):
    """Partial correlation of each input with the response, all other inputs
    controlled.

    Computed from the precision matrix Q of the joint correlation matrix of
    (x_1..x_n, y): rho_{i,y|rest} = -Q_iy / sqrt(Q_ii Q_yy). This equals the
    classic residual-regression definition but needs a single factorization.
    Unlike SRC, a partial correlation excludes the influence the other inputs
    exert through their own relation to the response. ``rank=True`` gives
    PRCC on average ranks.
    """

    def __init__(self, rank=False):
        self.rank = rank

    def fit(self, X, y):
        Xv, yv, columns = _prepare(X, y, self.rank)
        _column_sd(Xv, columns)
        if yv.std(ddof=1) == 0.0:
            raise ValueError("y has zero variance")
        corr = np.corrcoef(np.column_stack([Xv, yv]), rowvar=False)
        smallest = np.linalg.eigvalsh(corr)[0]
        if smallest < 1e-12:
            raise ValueError("correlation matrix of (X, y) is singular; "
                             "inputs are collinear")
        Q = np.linalg.inv(corr)
        self.coefficients_ = -Q[:-1, -1] / np.sqrt(np.diag(Q)[:-1] * Q[-1, -1])
        self.n_samples_ = Xv.shape[0]
        return self

    def result(self):
        self._require_fitted("coefficients_")
        return RegressionResult(self.coefficients_, "PRCC" if self.rank else "PCC",
                                None, self.n_samples_)


def src(X, y):
    return SRCAnalyzer(rank=False).fit(X, y).result()


def srrc(X, y):
    return SRCAnalyzer(rank=True).fit(X, y).result()


def pcc(X, y):
    return PCCAnalyzer(rank=False).fit(X, y).result()


def prcc(X, y):
    return PCCAnalyzer(rank=True).fit(X, y).result()
