"""One-at-a-time finite-difference sensitivity around a nominal point."""

from dataclasses import dataclass

import numpy as np

from .base import BaseAnalyzer
from .validation import as_float_array, as_sample_values, check_aligned, evaluate_rows

SCHEMES = ("forward", "central")


@dataclass(frozen=True)
class OatResult:
    """Raw (response units per input unit) and normalized (dimensionless)
    local sensitivities. ``normalized`` is NaN when the nominal response is
    zero; ``absolute_step`` marks inputs whose step fell back to an absolute
    value because the nominal was zero (or below the round-off floor)."""

    raw: np.ndarray
    normalized: np.ndarray
    scheme: str
    rel_step: float
    y0: float
    x0: np.ndarray
    absolute_step: np.ndarray
    n_evaluations: int


class OATSensitivity(BaseAnalyzer):
    """Local sensitivity by perturbing one input at a time.

    ``raw_[i]`` approximates dy/dx_i at the nominal point with a relative
    step ``rel_step`` (default +1%). The forward scheme costs n_x + 1 model
    evaluations, central costs 2 n_x + 1. ``normalized_[i]`` rescales by
    x0_i / y0 so rankings are unit-free.
    """

    def __init__(self, rel_step=0.01, scheme="forward", step_floor=1e-12):
        self.rel_step = rel_step
        self.scheme = scheme
        self.step_floor = step_floor

    def _check_params(self):
        if self.rel_step <= 0:
            raise ValueError("rel_step must be > 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")

    def _steps(self, x0):
        steps = self.rel_step * x0
        fallback = x0 == 0.0
        steps[fallback] = self.rel_step
        floored = np.abs(steps) < self.step_floor
        steps[floored] = np.copysign(self.step_floor, np.where(steps[floored] == 0, 1.0, steps[floored]))
        return steps, fallback | floored

    def design(self, x0):
        """Evaluation points: the nominal, then each one-at-a-time perturbation.

        Forward rows: [x0, x0 + d_1 e_1, ..., x0 + d_n e_n]; central appends
        the matching negative perturbations.
        """
        self._check_params()
        x0 = as_float_array(x0, name="x0", ndim=1)
        steps, _ = self._steps(x0)
        n = x0.size
        rows = [x0]
        for i in range(n):
            xp = x0.copy()
            xp[i] += steps[i]
            rows.append(xp)
        if self.scheme == "central":
            for i in range(n):
                xm = x0.copy()
                xm[i] -= steps[i]
                rows.append(xm)
        return np.array(rows)

    def fit(self, X, y):
        """Compute sensitivities from a design produced by ``design`` and the
        matching model outputs (first output is the nominal response)."""
        self._check_params()
        X = as_sample_values(X)
        y = as_float_array(y, name="y", ndim=1)
        check_aligned(X, y)
        n = X.shape[1]
        expected = n + 1 if self.scheme == "forward" else 2 * n + 1
        if X.shape[0] != expected:
            raise ValueError(
                f"{self.scheme} scheme expects {expected} rows for {n} inputs, got {X.shape[0]}"
            )
        x0 = X[0]
        y0 = y[0]
        steps = np.array([X[1 + i, i] - x0[i] for i in range(n)])
        if np.any(steps == 0.0):
            raise ValueError("design contains a zero perturbation step")
        if self.scheme == "forward":
            raw = (y[1:n + 1] - y0) / steps
        else:
            raw = (y[1:n + 1] - y[n + 1:]) / (2.0 * steps)
        _, fallback = self._steps(x0)

        self.x0_ = x0
        self.y0_ = float(y0)
        self.raw_ = raw
        self.absolute_step_ = fallback
        self.n_evaluations_ = expected
        if y0 != 0.0:
            self.normalized_ = raw * x0 / y0
            self.normalized_available_ = True
        else:
            self.normalized_ = np.full(n, np.nan)
            self.normalized_available_ = False
        return self

    def analyze(self, model, x0, threads=1):
        """Design, evaluate the model, and fit in one call."""
        X = self.design(x0)
        y = evaluate_rows(model, X, threads=threads)
        return self.fit(X, y)

    def result(self):
        self._require_fitted("raw_")
        return OatResult(
            raw=self.raw_, normalized=self.normalized_, scheme=self.scheme,
            rel_step=self.rel_step, y0=self.y0_, x0=self.x0_,
            absolute_step=self.absolute_step_, n_evaluations=self.n_evaluations_,
        )
