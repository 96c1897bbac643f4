import numpy as np
import pytest

from uqsa.models import get_model
from uqsa.problem import ParameterSpec
from uqsa.uq import (CovarianceMatrix, UncertaintyResult, deterministic_uq,
                     monte_carlo_uq, uq_compare)


def f1_specs(sds=(1.0, 2.0, 3.0)):
    return [ParameterSpec.normal(f"x{i+1}", 0.0, sd=s) for i, s in enumerate(sds)]


class TestCovarianceMatrix:
    def test_diagonal_from_specs(self):
        specs = [ParameterSpec.normal("a", 1.0, sd=2.0),
                 ParameterSpec.uniform("b", 0.0, 6.0)]
        cov = CovarianceMatrix.diagonal(specs)
        assert cov.values[0, 0] == pytest.approx(4.0)
        assert cov.values[1, 1] == pytest.approx(36.0 / 12.0)
        assert cov.values[0, 1] == 0.0
        assert cov.names == ("a", "b")

    def test_asymmetry_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            CovarianceMatrix(np.array([[1.0, 0.5], [0.2, 1.0]]), ("a", "b"))

    def test_indefinite_rejected(self):
        with pytest.raises(ValueError, match="semidefinite"):
            CovarianceMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]), ("a", "b"))

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            CovarianceMatrix(np.array([[-1.0, 0.0], [0.0, 1.0]]), ("a", "b"))


class TestDeterministicUq:
    def test_linear_model_known_variance(self):
        # S = (1, 1, 1), sigma = (1, 2, 3): variance is 1 + 4 + 9 = 14 exactly
        cov = CovarianceMatrix.diagonal(f1_specs())
        assert deterministic_uq(np.ones(3), cov) == 14.0

    def test_diagonal_reduces_to_weighted_sum(self):
        rng = np.random.default_rng(0)
        S = rng.normal(size=5)
        sds = rng.uniform(0.5, 2.0, 5)
        cov = CovarianceMatrix(np.diag(sds ** 2), tuple("abcde"))
        assert deterministic_uq(S, cov) == pytest.approx(np.sum(S ** 2 * sds ** 2))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        S = rng.normal(size=4)
        A = rng.normal(size=(4, 4))
        cov = A @ A.T
        perm = rng.permutation(4)
        full = deterministic_uq(S, CovarianceMatrix(cov, tuple("abcd")))
        permuted = deterministic_uq(S[perm], CovarianceMatrix(cov[np.ix_(perm, perm)],
                                                              tuple("abcd")))
        assert permuted == pytest.approx(full, rel=1e-12)

    def test_multi_response_psd(self):
        rng = np.random.default_rng(2)
        S = rng.normal(size=(3, 5))
        A = rng.normal(size=(5, 5))
        Cy = deterministic_uq(S, CovarianceMatrix(A @ A.T, tuple("abcde")))
        assert Cy.shape == (3, 3)
        assert np.linalg.eigvalsh(Cy)[0] > -1e-10 * np.trace(Cy)

    def test_dimension_mismatch(self):
        cov = CovarianceMatrix.diagonal(f1_specs())
        with pytest.raises(ValueError):
            deterministic_uq(np.ones(4), cov)


class TestMonteCarloUq:
    def test_constant_model_collapses(self):
        model = lambda X: np.full(np.atleast_2d(X).shape[0], 4.2)
        res = monte_carlo_uq(model, f1_specs(), 500, seed=0)
        assert res.mean == pytest.approx(4.2)
        assert res.variance == 0.0
        assert res.ci95 == (pytest.approx(4.2), pytest.approx(4.2))

    def test_linear_model_moments(self):
        f1 = get_model("sfs1")
        res = monte_carlo_uq(f1, f1_specs(sds=(1.0, 1.0, 1.0)), 10**5, seed=1)
        assert abs(res.mean) < 0.03
        assert res.variance == pytest.approx(3.0, abs=0.1)
        assert res.sd == pytest.approx(np.sqrt(res.variance))
        assert res.n_samples == 10**5
        half = 1.96 * res.sd / np.sqrt(10**5)
        assert res.ci95 == (pytest.approx(res.mean - half), pytest.approx(res.mean + half))

    def test_converges_to_deterministic_for_linear_model(self):
        f1 = get_model("sfs1")
        specs = f1_specs()
        det = deterministic_uq(np.ones(3), CovarianceMatrix.diagonal(specs))
        mc = monte_carlo_uq(f1, specs, 10**5, seed=2)
        assert abs(mc.variance / det - 1.0) < 0.05

    def test_deterministic_given_seed(self):
        f1 = get_model("sfs1")
        a = monte_carlo_uq(f1, f1_specs(), 1000, seed=3)
        b = monte_carlo_uq(f1, f1_specs(), 1000, seed=3)
        assert a == b


class TestUqCompare:
    def test_linear_model_all_methods_agree(self):
        f1 = get_model("sfs1")
        specs = f1_specs()
        results = uq_compare(f1, specs, 10**4, seed=4,
                             oat_raw=np.ones(3), morris_mu_star=np.ones(3))
        assert set(results) == {"monte_carlo", "deterministic_oat",
                                "deterministic_morris"}
        assert results["deterministic_oat"].variance == 14.0
        assert results["deterministic_morris"].variance == 14.0
        assert results["monte_carlo"].variance == pytest.approx(14.0, rel=0.05)
        assert results["deterministic_oat"].n_samples is None
        assert results["monte_carlo"].n_samples == 10**4

    def test_ci_symmetry(self):
        f1 = get_model("sfs1")
        results = uq_compare(f1, f1_specs(), 2000, seed=5,
                             oat_raw=np.ones(3), morris_mu_star=np.ones(3))
        for res in results.values():
            assert res.ci95[1] - res.mean == pytest.approx(res.mean - res.ci95[0])
