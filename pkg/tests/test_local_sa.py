import numpy as np
import pytest

from uqsa.local_sa import OATSensitivity
from uqsa.models import get_model


@pytest.fixture
def f1():
    return get_model("sfs1")


@pytest.fixture
def f3():
    return get_model("sfs3")


class TestForward:
    def test_linear_model_exact(self, f1):
        for step in (0.01, 0.1):
            an = OATSensitivity(rel_step=step).analyze(f1, np.array([0.3, 1.0, 2.0]))
            assert np.allclose(an.raw_, 1.0, atol=1e-9)

    def test_cubic_components_match_algebra(self, f3):
        an = OATSensitivity(rel_step=0.01).analyze(f3, np.ones(3))
        # ((1.01)^2 - 1)/0.01 and ((1.01)^3 - 1)/0.01
        assert an.raw_[1] == pytest.approx(2.01, abs=1e-10)
        assert an.raw_[2] == pytest.approx(3.0301, abs=1e-10)

    def test_cost_is_n_plus_one(self, f3):
        calls = []
        model = lambda X: (calls.append(np.atleast_2d(X).shape[0]), f3(X))[1]
        an = OATSensitivity().analyze(model, np.ones(3))
        assert an.n_evaluations_ == 4
        assert sum(calls) == 4

    def test_forward_error_linear_in_step(self, f3):
        # d/dx2 of x2^2 at 1 is 2; forward error is exactly the step size
        errs = []
        for step in (1e-2, 1e-3):
            an = OATSensitivity(rel_step=step).analyze(f3, np.ones(3))
            errs.append(abs(an.raw_[1] - 2.0))
        assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.05)


class TestCentral:
    def test_exact_for_quadratics(self, f3):
        an = OATSensitivity(rel_step=0.05, scheme="central").analyze(f3, np.ones(3))
        assert an.raw_[0] == pytest.approx(1.0, abs=1e-10)
        assert an.raw_[1] == pytest.approx(2.0, abs=1e-10)
        assert an.n_evaluations_ == 7

    def test_general_quadratic(self):
        def quad(X):
            x = np.atleast_2d(X)[:, 0]
            return 3.0 * x ** 2 - 2.0 * x + 1.0

        an = OATSensitivity(rel_step=0.1, scheme="central").analyze(quad, np.array([2.0]))
        assert an.raw_[0] == pytest.approx(3.0 * 2.0 * 2.0 - 2.0, rel=1e-12)


class TestNormalization:
    def test_normalized_definition(self, f3):
        an = OATSensitivity().analyze(f3, np.array([1.0, 2.0, 0.5]))
        assert np.allclose(an.normalized_, an.raw_ * an.x0_ / an.y0_)

    def test_invariant_under_output_rescale(self, f3):
        x0 = np.array([1.0, 2.0, 0.5])
        a = OATSensitivity().analyze(f3, x0)
        b = OATSensitivity().analyze(lambda X: 7.5 * f3(X), x0)
        assert np.allclose(a.normalized_, b.normalized_, rtol=1e-12)

    def test_zero_nominal_response_flags(self, f1):
        an = OATSensitivity().analyze(f1, np.array([-1.0, 0.0, 1.0]))
        assert not an.normalized_available_
        assert np.all(np.isnan(an.normalized_))
        assert np.allclose(an.raw_, 1.0, atol=1e-9)

    def test_zero_nominal_input_falls_back_to_absolute_step(self, f1):
        an = OATSensitivity().analyze(f1, np.array([0.0, 1.0, 2.0]))
        assert an.absolute_step_[0] and not an.absolute_step_[1]
        assert np.allclose(an.raw_, 1.0, atol=1e-9)


class TestDesignFitRoundTrip:
    def test_fit_matches_analyze(self, f3):
        x0 = np.array([0.5, 1.5, 2.5])
        an = OATSensitivity(scheme="central")
        X = an.design(x0)
        fitted = OATSensitivity(scheme="central").fit(X, f3(X))
        direct = OATSensitivity(scheme="central").analyze(f3, x0)
        assert np.allclose(fitted.raw_, direct.raw_)

    def test_row_count_checked(self, f3):
        an = OATSensitivity()
        X = an.design(np.ones(3))
        with pytest.raises(ValueError):
            an.fit(X[:-1], f3(X[:-1]))

    def test_misaligned_outputs_rejected(self, f3):
        an = OATSensitivity()
        X = an.design(np.ones(3))
        with pytest.raises(ValueError):
            an.fit(X, np.zeros(3))


class TestParams:
    def test_bad_scheme(self):
        with pytest.raises(ValueError):
            OATSensitivity(scheme="sideways").design(np.ones(2))

    def test_bad_step(self):
        with pytest.raises(ValueError):
            OATSensitivity(rel_step=0.0).design(np.ones(2))

    def test_get_params_roundtrip(self):
        an = OATSensitivity(rel_step=0.02, scheme="central")
        params = an.get_params()
        assert params["rel_step"] == 0.02 and params["scheme"] == "central"
        clone = OATSensitivity(**params)
        assert clone.get_params() == params
