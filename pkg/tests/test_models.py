import numpy as np
import pytest

from uqsa.models import (McfcParams, MorrisCoefficients, default_specs, get_model,
                         ishigami, list_models, mcfc_outputs, mcfc_power_efficiency,
                         mcfc_specs, mcfc_voltage_terms, morris_fn, sfs, sobol_g,
                         SOBOL_G_DEFAULT_A)


class TestSobolG:
    def test_zero_factor_at_center(self):
        # first constant is 0, and |4*0.5 - 2| = 0 kills the product
        assert sobol_g(np.full(8, 0.5)) == pytest.approx(0.0)

    def test_value_at_origin(self):
        # each factor is (2 + a_i) / (1 + a_i); direct product oracle
        a = np.array(SOBOL_G_DEFAULT_A)
        expected = np.prod((2.0 + a) / (1.0 + a))
        assert expected == pytest.approx(7280.0 / 1071.0, rel=1e-12)
        assert sobol_g(np.zeros(8))[0] == pytest.approx(expected, rel=1e-12)

    def test_ones_equals_origin(self):
        assert sobol_g(np.ones(8))[0] == pytest.approx(sobol_g(np.zeros(8))[0])

    def test_reflection_symmetry(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(0, 1, (50, 8))
        assert np.allclose(sobol_g(X), sobol_g(1.0 - X))

    def test_nonnegative(self):
        rng = np.random.default_rng(6)
        assert np.all(sobol_g(rng.uniform(0, 1, (200, 8))) >= 0.0)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            sobol_g(np.full(8, 1.2))
        with pytest.raises(ValueError):
            sobol_g(np.full(8, 0.5), a=[-1.0] * 8)


class TestIshigami:
    def test_zeros(self):
        assert ishigami(np.zeros(3))[0] == pytest.approx(0.0)

    def test_unit_sine(self):
        assert ishigami(np.array([np.pi / 2, 0.0, 0.0]))[0] == pytest.approx(1.0)

    def test_sum_of_unit_terms(self):
        x = np.array([np.pi / 2, np.pi / 2, 1.0])
        assert ishigami(x)[0] == pytest.approx(8.1)

    def test_odd_in_x1_when_x2_zero(self):
        rng = np.random.default_rng(7)
        x1 = rng.uniform(0, np.pi, 20)
        x3 = rng.uniform(-np.pi, np.pi, 20)
        plus = ishigami(np.column_stack([x1, np.zeros(20), x3]))
        minus = ishigami(np.column_stack([-x1, np.zeros(20), x3]))
        assert np.allclose(plus, -minus)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            ishigami(np.array([4.0, 0.0, 0.0]))


class TestMorrisFunction:
    def test_coefficients_reproducible(self):
        a = MorrisCoefficients(seed=9)
        b = MorrisCoefficients(seed=9)
        assert a.beta0 == b.beta0
        assert np.array_equal(a.beta1, b.beta1)
        assert np.array_equal(a.beta2, b.beta2)

    def test_structured_blocks(self):
        c = MorrisCoefficients(seed=9)
        assert np.all(c.beta1[:10] == 20.0)
        for i in range(6):
            for j in range(i + 1, 6):
                assert c.beta2[i, j] == -15.0
        assert np.all(c.beta2[np.tril_indices(20)] == 0.0)

    def test_constant_at_transform_zero(self):
        # w_i vanishes at x = 0.5 except for the fractional coordinates
        # {3, 5, 7}, where 1.1 x / (x + 0.1) = 0.5 solves to x = 1/12
        c = MorrisCoefficients(seed=9)
        x = np.full(20, 0.5)
        for idx in (2, 4, 6):
            x[idx] = 1.0 / 12.0
        assert morris_fn(x, c)[0] == pytest.approx(c.beta0, abs=1e-9)

    def test_fractional_transform_value(self):
        # moving only x3 to 0.5 adds beta1[2] * w3 with w3 = 2(0.55/0.6 - 0.5)
        c = MorrisCoefficients(seed=9)
        x = np.full(20, 0.5)
        for idx in (2, 4, 6):
            x[idx] = 1.0 / 12.0
        x[2] = 0.5
        w3 = 2.0 * (1.1 * 0.5 / 0.6 - 0.5)
        assert w3 == pytest.approx(5.0 / 6.0)
        assert morris_fn(x, c)[0] - c.beta0 == pytest.approx(c.beta1[2] * w3, abs=1e-9)

    def test_domain_checked(self):
        c = MorrisCoefficients(seed=9)
        with pytest.raises(ValueError):
            morris_fn(np.full(20, 1.5), c)


class TestSfs:
    def test_values(self):
        x = np.array([1.0, 2.0, 3.0])
        assert sfs(x, 1)[0] == 6.0
        assert sfs(x, 2)[0] == 6.0
        assert sfs(x, 3)[0] == 1.0 + 4.0 + 27.0
        assert sfs(x, 4)[0] == 1.0 + 1.0 * 4.0 + 27.0

    def test_bad_k(self):
        with pytest.raises(ValueError):
            sfs(np.ones(3), 5)


class TestMcfc:
    def test_nominal_point(self):
        p = McfcParams()  # j = 3000 default
        power, eta = mcfc_outputs(p)
        # frozen from an independent evaluation of the voltage chain;
        # headline figures are P ~ 1500 W m^-2 and eta ~ 39% near the optimum
        assert power == pytest.approx(1483.508, abs=0.01)
        assert eta == pytest.approx(0.385866, abs=1e-4)

    def test_voltage_terms_at_nominal(self):
        terms = mcfc_voltage_terms(McfcParams().as_row())
        e0, e, u_an, u_cat, u_ohm = (float(v[0]) for v in terms)
        assert e0 == pytest.approx(1.04213, abs=1e-4)
        assert e == pytest.approx(1.00304, abs=1e-4)
        assert u_an == pytest.approx(0.06280, abs=2e-4)
        assert u_cat == pytest.approx(0.27835, abs=5e-4)
        assert u_ohm == pytest.approx(0.16740, abs=2e-4)

    def test_legacy_delta_h_gives_394(self):
        power, eta = mcfc_power_efficiency(McfcParams().as_row(), delta_h=-242000.0)
        assert eta[0] == pytest.approx(0.3943, abs=1e-3)

    def test_ohmic_exponent_vanishes_at_923(self):
        row = McfcParams(T=923.0).as_row()
        _, _, _, _, u_ohm = mcfc_voltage_terms(row)
        assert u_ohm[0] == pytest.approx(0.5e-4 * 3000.0, rel=1e-14)

    def test_zero_current(self):
        p = McfcParams(j=0.0)
        power, eta = mcfc_outputs(p)
        _, e, u_an, u_cat, u_ohm = mcfc_voltage_terms(p.as_row())
        assert power == 0.0
        assert u_an[0] == u_cat[0] == u_ohm[0] == 0.0
        assert eta == pytest.approx(2.0 * 96485.0 * e[0] / 247300.0)

    def test_power_efficiency_ratio_identity(self):
        # P / (j (-dh) / (ne F)) equals eta exactly: both share the voltage
        rng = np.random.default_rng(8)
        X = np.tile(McfcParams().as_row(), (30, 1))
        X[:, 0] = rng.uniform(500.0, 5000.0, 30)
        X[:, 1] = rng.uniform(850.0, 950.0, 30)
        power, eta = mcfc_power_efficiency(X)
        assert np.allclose(power / (X[:, 0] * 247300.0 / (2.0 * 96485.0)), eta,
                           rtol=1e-12)

    def test_overpotentials_increase_with_current(self):
        rows = np.tile(McfcParams().as_row(), (4, 1))
        rows[:, 0] = [500.0, 1500.0, 3000.0, 6000.0]
        _, _, u_an, u_cat, u_ohm = mcfc_voltage_terms(rows)
        for u in (u_an, u_cat, u_ohm):
            assert np.all(np.diff(u) > 0.0)

    def test_nonpositive_pressure_rejected(self):
        row = McfcParams().as_row()
        row[4] = 0.0
        with pytest.raises(ValueError):
            mcfc_power_efficiency(row)

    def test_negative_power_allowed_at_extreme_current(self):
        row = McfcParams().as_row()
        row[0] = 20000.0
        power, _ = mcfc_power_efficiency(row)
        assert power[0] < 0.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            McfcParams(T=-1.0)
        with pytest.raises(ValueError):
            McfcParams(delta_h=1000.0)

    def test_specs_table(self):
        nine = mcfc_specs(j_nominal=3000.0)
        assert [s.name for s in nine][:2] == ["j", "T"]
        assert len(nine) == 9
        assert nine[0].sd == pytest.approx(30.0)
        eight = mcfc_specs()
        assert len(eight) == 8 and eight[0].name == "T"
        assert all(s.positive_only for s in nine)


class TestRegistry:
    def test_names(self):
        assert list_models() == ["ishigami", "mcfc_eta", "mcfc_power", "morris_fn",
                                 "sfs1", "sfs2", "sfs3", "sfs4", "sobol_g"]

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            get_model("nope")

    def test_handles_are_pure_and_shaped(self):
        m = get_model("ishigami")
        assert m.n_inputs == 3
        x = np.array([0.3, -0.2, 1.0])
        assert m(x) == m(x)
        batch = m(np.tile(x, (5, 1)))
        assert batch.shape == (5,)
        assert np.allclose(batch, m(x))

    def test_input_width_checked(self):
        with pytest.raises(ValueError):
            get_model("ishigami")(np.zeros(4))

    def test_default_specs_match_signatures(self):
        for name in list_models():
            model = get_model(name)
            specs = default_specs(name)
            assert tuple(s.name for s in specs) == model.param_names

    def test_morris_fn_model_reproducible(self):
        a = get_model("morris_fn", coeff_seed=4)
        b = get_model("morris_fn", coeff_seed=4)
        x = np.full(20, 0.25)
        assert a(x) == b(x)
