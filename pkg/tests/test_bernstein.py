from math import comb

import numpy as np
import pytest
from scipy import integrate

from src.density.bernstein import (
    BernsteinDensity,
    bernstein_basis,
    bernstein_basis_matrix,
    bin_counts,
    fit_bernstein,
)
from src.density.ecdf import EmpiricalCdf
from src.errors import DomainError


def naive_estimate(samples, m, x):
    """f_hat(x) = sum_k m [F((k+1)/m) - F(k/m)] C(m-1,k) x^k (1-x)^(m-1-k), term by term."""
    n = len(samples)
    out = []
    for xi in x:
        total = 0.0
        for k in range(m):
            mass = sum(1 for s in samples if k / m < s <= (k + 1) / m) / n
            total += m * mass * comb(m - 1, k) * xi**k * (1.0 - xi) ** (m - 1 - k)
        out.append(total)
    return np.array(out)


class TestBasis:
    def test_partition_of_unity(self):
        rng = np.random.default_rng(0)
        for m in rng.integers(1, 101, size=40):
            x = rng.uniform(0.0, 1.0, size=25)
            np.testing.assert_allclose(bernstein_basis_matrix(int(m) - 1, x).sum(axis=1), 1.0, atol=1e-12)

    def test_closed_form_values(self):
        assert bernstein_basis(3, 1, 0.5) == pytest.approx(3 * 0.5**3, rel=1e-14)
        assert bernstein_basis(4, 0, 0.0) == 1.0
        assert bernstein_basis(4, 4, 1.0) == 1.0
        assert bernstein_basis(4, 2, 0.0) == 0.0

    @pytest.mark.parametrize("k", [-1, 5])
    def test_index_out_of_range(self, k):
        with pytest.raises(DomainError):
            bernstein_basis(4, k, 0.5)

    def test_outside_unit_interval(self):
        with pytest.raises(DomainError):
            bernstein_basis(4, 1, 1.5)


class TestEstimator:
    def test_matches_naive_double_loop(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(3, 40))
            m = int(rng.integers(1, 101))
            samples = rng.uniform(-0.1, 1.1, size=n)
            x = np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, size=5)])
            expected = naive_estimate(samples, m, x)
            np.testing.assert_allclose(fit_bernstein(samples, m)(x), expected, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 7, 30])
    def test_boundary_formulas(self, m):
        samples = np.random.default_rng(m).beta(2.0, 3.0, size=150)
        F = EmpiricalCdf(samples)
        values = fit_bernstein(samples, m)(np.array([0.0, 1.0]))
        assert values[0] == m * (F(1.0 / m) - F(0.0))
        assert values[1] == m * (F(1.0) - F((m - 1) / m))

    def test_integrates_to_one_inside_unit_interval(self):
        samples = np.random.default_rng(3).beta(3.0, 5.0, size=300)
        estimate = fit_bernstein(samples, 12)
        x = np.linspace(0.0, 1.0, 4001)
        assert estimate.mass == pytest.approx(1.0, abs=1e-12)
        assert integrate.simpson(estimate(x), x=x) == pytest.approx(1.0, abs=1e-8)

    def test_mass_excludes_samples_outside(self):
        samples = np.array([-0.2, 0.1, 0.4, 0.6, 1.3])
        assert fit_bernstein(samples, 5).mass == pytest.approx(0.6)

    def test_nonnegative_and_zero_outside(self):
        samples = np.random.default_rng(4).uniform(size=50)
        estimate = fit_bernstein(samples, 9)
        assert np.all(estimate(np.linspace(0.0, 1.0, 101)) >= 0.0)
        np.testing.assert_array_equal(estimate(np.array([-0.1, 1.1])), 0.0)

    def test_bin_counts_are_right_closed(self):
        counts = bin_counts(EmpiricalCdf(np.array([0.0, 0.25, 0.5, 0.75, 1.0])), 4)
        np.testing.assert_array_equal(counts, [1, 1, 1, 1])

    @pytest.mark.parametrize("m", [0, 2.5, -3])
    def test_invalid_order(self, m):
        with pytest.raises(DomainError):
            fit_bernstein(np.array([0.2, 0.4, 0.6]), m)

    def test_hyperparameter(self):
        estimate = BernsteinDensity(m=4, coeffs=np.ones(4))
        assert estimate.hyperparameter == 4.0
        assert estimate.mass == pytest.approx(1.0)


class TestEmpiricalCdf:
    def test_right_continuous(self):
        F = EmpiricalCdf([0.5, 0.2, 0.9, 0.2])
        assert F(0.2) == 0.5
        assert F(0.19) == 0.0
        assert F(1.0) == 1.0

    def test_rejects_empty_and_nan(self):
        with pytest.raises(DomainError):
            EmpiricalCdf([])
        with pytest.raises(DomainError):
            EmpiricalCdf([0.1, np.nan])
