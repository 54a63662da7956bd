import numpy as np
import pytest

from src.core.hurst import HurstModel
from src.errors import DomainError
from src.simulation.densities import density_suite
from src.theory.asymptotics import (
    DensityModel,
    asymptotic_bias,
    asymptotic_mise,
    asymptotic_variance,
    mise_constants,
    optimal_m,
    psi,
    uniform_error_bound,
)


@pytest.fixture(scope="module")
def beta_1_2():
    return density_suite("beta_1_2").model


class TestConstants:
    def test_uniform(self):
        c_var, c_bias = mise_constants(DensityModel.uniform())
        assert c_var == pytest.approx(np.sqrt(np.pi) / 2.0, rel=1e-10)
        assert c_bias == pytest.approx(0.0, abs=1e-14)

    def test_uniform_printed_variant(self):
        _, c_bias = mise_constants(DensityModel.uniform(), bias_constant="printed")
        assert c_bias == pytest.approx(1.0 / 12.0, rel=1e-10)

    def test_linear_density(self, beta_1_2):
        c_var, c_bias = mise_constants(beta_1_2)
        assert c_var == pytest.approx(np.sqrt(np.pi) / 2.0, rel=1e-10)
        assert c_bias == pytest.approx(1.0 / 3.0, rel=1e-10)

    @pytest.mark.parametrize("name", ["beta_3_5", "beta_mix"])
    @pytest.mark.parametrize("bias_constant", ["derivative", "printed"])
    def test_stable_under_finer_quadrature(self, name, bias_constant):
        model = density_suite(name).model
        coarse = mise_constants(model, bias_constant, limit=200)
        fine = mise_constants(model, bias_constant, limit=400)
        np.testing.assert_allclose(fine, coarse, rtol=1e-6, atol=1e-12)

    def test_unknown_bias_constant(self, beta_1_2):
        with pytest.raises(DomainError):
            mise_constants(beta_1_2, bias_constant="squared")


class TestOptimalOrder:
    def test_formula(self, beta_1_2):
        c_var, c_bias = np.sqrt(np.pi) / 2.0, 1.0 / 3.0
        result = optimal_m(beta_1_2, 250)
        assert result.m_opt == pytest.approx((4.0 * c_bias / c_var) ** 0.4 * 250**0.4, rel=1e-9)
        assert result.m_rounded == round(result.m_opt)

    def test_minimizes_asymptotic_mise(self, beta_1_2):
        result = optimal_m(beta_1_2, 500)
        assert asymptotic_mise(beta_1_2, result.m_opt, 500) == pytest.approx(result.mise, rel=1e-10)
        for factor in (0.8, 1.25):
            assert asymptotic_mise(beta_1_2, factor * result.m_opt, 500) > result.mise

    def test_rate(self, beta_1_2):
        ratio = optimal_m(beta_1_2, 800).mise / optimal_m(beta_1_2, 100).mise
        assert ratio == pytest.approx(8.0**-0.8, rel=1e-12)

    def test_variance_only_density(self):
        with pytest.raises(DomainError):
            optimal_m(DensityModel.uniform(), 100)


class TestPointwise:
    def test_psi(self):
        assert float(psi(0.5)) == pytest.approx(1.0 / np.sqrt(np.pi))

    def test_bias_vanishes_at_midpoint(self, beta_1_2):
        assert float(asymptotic_bias(beta_1_2, 10, 0.5)) == pytest.approx(0.0, abs=1e-15)
        assert float(asymptotic_bias(beta_1_2, 10, 0.0)) == pytest.approx(-0.1)

    def test_bias_odd_for_linear_density(self, beta_1_2):
        x = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(asymptotic_bias(beta_1_2, 10, x), -asymptotic_bias(beta_1_2, 10, 1.0 - x), atol=1e-12)

    def test_bias_even_for_symmetric_density(self):
        model = density_suite("beta_mix").model
        x = np.linspace(0.0, 1.0, 21)
        np.testing.assert_allclose(asymptotic_bias(model, 12, x), asymptotic_bias(model, 12, 1.0 - x), rtol=1e-9, atol=1e-12)

    def test_variance_interior_and_boundary(self, beta_1_2):
        interior = asymptotic_variance(beta_1_2, 16, 100, 0.5)
        assert interior == pytest.approx(4.0 * float(psi(0.5)) / 100)
        assert asymptotic_variance(beta_1_2, 16, 100, 0.0) == pytest.approx(16 * 2.0 / 100)


class TestUniformBound:
    def test_terms(self, beta_1_2):
        model = HurstModel(0.7)
        expected = model.lam * 5**4 / 100.0**0.6 + 5**1.5 / np.sqrt(250) + (2.0 / 2.0) / 5
        assert uniform_error_bound(beta_1_2, 5, 250, 100.0, 0.7, 1.0) == pytest.approx(expected, rel=1e-9)

    def test_accepts_model(self, beta_1_2):
        a = uniform_error_bound(beta_1_2, 3, 250, 100.0, 0.7, 1.0)
        b = uniform_error_bound(beta_1_2, 3, 250, 100.0, HurstModel(0.7), 1.0)
        assert a == b

    def test_longer_horizon_tightens(self, beta_1_2):
        assert uniform_error_bound(beta_1_2, 3, 250, 1000.0, 0.7, 1.0) < uniform_error_bound(beta_1_2, 3, 250, 100.0, 0.7, 1.0)

    def test_rejects_nonpositive_lower_constant(self, beta_1_2):
        with pytest.raises(DomainError):
            uniform_error_bound(beta_1_2, 3, 250, 100.0, 0.7, 0.0)


class TestDensityModel:
    def test_rejects_unnormalized(self):
        import sympy as sp

        x = sp.Symbol("x")
        with pytest.raises(DomainError):
            DensityModel.from_expression("double", 2 + 0 * x, x)

    def test_sup_norms(self, beta_1_2):
        assert beta_1_2.sup_df == pytest.approx(2.0)
        assert beta_1_2.sup_d2f == pytest.approx(0.0, abs=1e-12)
