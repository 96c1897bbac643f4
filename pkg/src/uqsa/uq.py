"""Forward uncertainty propagation: the deterministic sandwich rule and
Monte Carlo sampling."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .problem import sample_matrix
from .validation import as_float_array, evaluate_rows

PSD_RTOL = 1e-10


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive-semidefinite input covariance with parameter order."""

    values: np.ndarray
    names: Tuple[str, ...]

    def __post_init__(self):
        v = as_float_array(self.values, name="covariance", ndim=2)
        if v.shape[0] != v.shape[1] or v.shape[0] != len(self.names):
            raise ValueError("covariance must be square and match the name list")
        if not np.allclose(v, v.T, rtol=0, atol=1e-12 * max(1.0, np.abs(v).max())):
            raise ValueError("covariance must be symmetric")
        if np.any(np.diag(v) < 0):
            raise ValueError("variances must be >= 0")
        tol = PSD_RTOL * max(np.trace(v), 1e-300)
        if np.linalg.eigvalsh(v)[0] < -tol:
            raise ValueError("covariance is not positive semidefinite")
        v.setflags(write=False)

    @classmethod
    def diagonal(cls, specs):
        """Independent-parameter covariance from the specs' standard deviations."""
        sds = np.array([s.sd if s.dist == "normal" else (s.hi - s.lo) / np.sqrt(12.0)
                        for s in specs])
        return cls(values=np.diag(sds ** 2), names=tuple(s.name for s in specs))


@dataclass(frozen=True)
class UncertaintyResult:
    """Response moments with a 95% interval.

    For Monte Carlo the interval is the confidence interval of the mean,
    mean +- 1.96 sd / sqrt(n_samples). For the deterministic methods there
    is no sample count; the interval is the normal-theory response band
    mean +- 1.96 sd.
    """

    mean: float
    variance: float
    sd: float
    ci95: Tuple[float, float]
    method: str
    n_samples: Optional[int] = None


def deterministic_uq(S, cov):
    """Sandwich rule: response covariance S C_x S^T from raw sensitivities.

    ``S`` holds unnormalized sensitivities in physical units, one row per
    response; a single response may be passed as a vector, returning the
    scalar variance. With a diagonal C_x this reduces to the familiar
    sum of (S_i sigma_i)^2.
    """
    Cx = cov.values if isinstance(cov, CovarianceMatrix) else \
        CovarianceMatrix(np.asarray(cov, dtype=float),
                         tuple(f"x{i}" for i in range(np.asarray(cov).shape[0]))).values
    S = as_float_array(S, name="S")
    single = S.ndim == 1
    S = np.atleast_2d(S)
    if S.shape[1] != Cx.shape[0]:
        raise ValueError(f"S has {S.shape[1]} columns but covariance is "
                         f"{Cx.shape[0]} x {Cx.shape[0]}")
    Cy = S @ Cx @ S.T
    return float(Cy[0, 0]) if single else Cy


def monte_carlo_uq(model, specs, n_samples, seed, threads=1):
    """Sampling-based moments of the response.

    Draws n_samples joint input samples, propagates them through the model,
    and reports the sample mean, the unbiased (1/(n-1)) variance, and the
    95% confidence interval of the mean.
    """
    X = sample_matrix(specs, n_samples, seed)
    y = evaluate_rows(model, X.values, threads=threads)
    return _mc_result(y, n_samples)


def _mc_result(y, n_samples):
    mean = float(y.mean())
    variance = float(y.var(ddof=1))
    sd = float(np.sqrt(variance))
    half = 1.96 * sd / np.sqrt(n_samples)
    return UncertaintyResult(mean=mean, variance=variance, sd=sd,
                             ci95=(mean - half, mean + half),
                             method="monte_carlo", n_samples=int(n_samples))


def _deterministic_result(y0, raw_sensitivities, cov, method):
    variance = deterministic_uq(raw_sensitivities, cov)
    sd = float(np.sqrt(variance))
    return UncertaintyResult(mean=float(y0), variance=float(variance), sd=sd,
                             ci95=(float(y0) - 1.96 * sd, float(y0) + 1.96 * sd),
                             method=method)


def uq_compare(model, specs, n_samples, seed, oat_raw, morris_mu_star, threads=1):
    """The three uncertainty estimates side by side.

    Monte Carlo propagation, the sandwich rule with OAT finite-difference
    sensitivities, and the sandwich rule with Morris mu* magnitudes (signs
    do not matter under a diagonal covariance since each term is squared).
    All three must describe the same nominal point.
    """
    x0 = np.array([s.nominal for s in specs])
    y0 = float(model(x0))
    cov = CovarianceMatrix.diagonal(specs)
    oat_raw = as_float_array(oat_raw, name="oat_raw", ndim=1)
    morris_mu_star = as_float_array(morris_mu_star, name="morris_mu_star", ndim=1)
    return {
        "monte_carlo": monte_carlo_uq(model, specs, n_samples, seed, threads=threads),
        "deterministic_oat": _deterministic_result(y0, oat_raw, cov, "deterministic_oat"),
        "deterministic_morris": _deterministic_result(y0, morris_mu_star, cov,
                                                      "deterministic_morris"),
    }
