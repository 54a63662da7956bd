import numpy as np
import pytest
from scipy import integrate, stats

from src.errors import ConfigError, DomainError
from src.simulation.densities import (
    SUITE,
    PointMassDensity,
    available_densities,
    density_suite,
    sample_effects,
)


class TestSuite:
    @pytest.mark.parametrize("name", sorted(SUITE))
    def test_unit_mass(self, name):
        density = density_suite(name)
        x = np.linspace(0.0, 1.0, 20001)
        assert integrate.simpson(density.pdf(x), x=x) == pytest.approx(1.0, abs=1e-6)

    def test_linear_density(self):
        density = density_suite("beta_1_2")
        np.testing.assert_allclose(density.pdf(np.array([0.0, 0.5, 1.0])), [2.0, 1.0, 0.0], atol=1e-12)

    def test_beta_matches_scipy(self):
        x = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(density_suite("beta_3_5").pdf(x), stats.beta(3, 5).pdf(x), rtol=1e-10, atol=1e-12)

    def test_beta_mixture_is_symmetric(self):
        x = np.linspace(0.0, 1.0, 21)
        pdf = density_suite("beta_mix").pdf
        np.testing.assert_allclose(pdf(x), pdf(1.0 - x), rtol=1e-10, atol=1e-12)

    def test_truncated_normal_mixture_matches_scipy(self):
        def truncnorm(mean, sd):
            return stats.truncnorm((0.0 - mean) / sd, (1.0 - mean) / sd, loc=mean, scale=sd)

        x = np.linspace(0.0, 1.0, 41)
        expected = 0.6 * truncnorm(0.5, 0.1).pdf(x) + 0.4 * truncnorm(0.9, 0.03).pdf(x)
        np.testing.assert_allclose(density_suite("truncnorm_mix").pdf(x), expected, rtol=1e-8, atol=1e-10)

    def test_available(self):
        assert available_densities() == ["beta_1_2", "beta_3_5", "beta_mix", "truncnorm_mix", "user"]


class TestSampling:
    def test_samples_in_unit_interval(self, rng):
        for name in SUITE:
            draws = sample_effects(density_suite(name), 2000, rng)
            assert draws.shape == (2000,)
            assert draws.min() >= 0.0 and draws.max() <= 1.0

    def test_beta_sample_mean(self, rng):
        draws = sample_effects(density_suite("beta_3_5"), 20000, rng)
        assert draws.mean() == pytest.approx(3.0 / 8.0, abs=0.01)

    def test_mixture_weights(self, rng):
        draws = sample_effects(density_suite("truncnorm_mix"), 20000, rng)
        assert np.mean(draws > 0.75) == pytest.approx(0.4, abs=0.02)

    def test_deterministic_given_generator(self):
        density = density_suite("beta_mix")
        a = sample_effects(density, 50, np.random.default_rng(3))
        b = sample_effects(density, 50, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    def test_needs_subjects(self, rng):
        with pytest.raises(DomainError):
            sample_effects(density_suite("beta_1_2"), 0, rng)


class TestUserDensities:
    def test_user_mixture(self):
        density = density_suite("user", [{"kind": "beta", "a": 2, "b": 2, "weight": 1.0}])
        assert density.pdf(np.array([0.5]))[0] == pytest.approx(1.5)

    def test_weights_are_normalized(self):
        density = density_suite(
            "user",
            [
                {"kind": "beta", "a": 1, "b": 1, "weight": 3.0},
                {"kind": "beta", "a": 2, "b": 2, "weight": 1.0},
            ],
        )
        np.testing.assert_allclose(density.weights, [0.75, 0.25])

    def test_user_requires_components(self):
        with pytest.raises(ConfigError):
            density_suite("user")

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            density_suite("gamma_2")

    def test_reports_every_invalid_component(self):
        with pytest.raises(ConfigError) as exc_info:
            density_suite(
                "user",
                [
                    {"kind": "beta", "a": -1, "b": 2, "weight": 1.0},
                    {"kind": "truncnorm", "mean": 0.5, "sd": 0.0, "weight": 0.0},
                    {"kind": "cauchy", "weight": 1.0},
                ],
            )
        message = str(exc_info.value)
        assert "beta 'a' must be positive" in message
        assert "'sd' must be positive" in message
        assert "weight must be a positive number" in message
        assert "unknown kind 'cauchy'" in message


class TestPointMass:
    def test_constant_draws(self, rng):
        density = PointMassDensity(0.3)
        np.testing.assert_array_equal(density.sample(5, rng), 0.3)
        assert density.name == "point_mass_0.3"

    def test_has_no_pdf(self):
        with pytest.raises(DomainError):
            PointMassDensity().pdf(0.5)

    def test_outside_unit_interval(self):
        with pytest.raises(DomainError):
            PointMassDensity(1.5)
