import mpmath
import numpy as np
import pytest
from scipy import special

from src.core.grid import TimeGrid
from src.core.hurst import (
    HurstModel,
    d_dw,
    gamma_fn,
    kernel_cell_weights,
    kernel_cumulative,
    kernel_integral,
    kernel_kH,
    kernel_weight_matrix,
    weight_wH,
)
from src.errors import DomainError


class TestGamma:
    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 1.5, 2.3, 7.7, 15.0, 30.0])
    def test_matches_mpmath(self, x):
        expected = float(mpmath.gamma(mpmath.mpf(x)))
        assert gamma_fn(x) == pytest.approx(expected, rel=1e-10)

    def test_integer_factorials(self):
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.5])
    def test_rejects_nonpositive(self, x):
        with pytest.raises(DomainError):
            gamma_fn(x)


class TestHurstModel:
    @pytest.mark.parametrize("H", [0.55, 0.6, 0.7, 0.8, 0.9, 0.99])
    def test_constants_against_mpmath(self, H):
        h = mpmath.mpf(H)
        kappa = 2 * h * mpmath.gamma(1.5 - h) * mpmath.gamma(h + 0.5)
        lam = 2 * h * mpmath.gamma(3 - 2 * h) * mpmath.gamma(h + 0.5) / mpmath.gamma(1.5 - h)
        model = HurstModel(H)
        assert model.kappa == pytest.approx(float(kappa), rel=1e-10)
        assert model.lam == pytest.approx(float(lam), rel=1e-10)

    @pytest.mark.parametrize("H", [0.5, 1.0, 0.3, 1.2])
    def test_rejects_outside_open_interval(self, H):
        with pytest.raises(DomainError):
            HurstModel(H)

    def test_degenerate_brownian(self):
        model = HurstModel.degenerate_brownian()
        assert model.H == 0.5
        assert model.kappa == pytest.approx(1.0)
        assert model.lam == pytest.approx(1.0)

    def test_quadratic_risk_constant(self):
        model = HurstModel(0.7)
        assert model.lam / 100.0 ** 0.6 == pytest.approx(0.0622, abs=5e-4)


class TestKernel:
    def test_zero_outside_support(self, model):
        values = kernel_kH(model, 1.0, np.array([-0.5, 0.0, 1.0, 1.5]))
        np.testing.assert_array_equal(values, 0.0)

    def test_symmetric_in_s(self, model):
        s = np.linspace(0.05, 0.95, 19)
        np.testing.assert_allclose(kernel_kH(model, 1.0, s), kernel_kH(model, 1.0, 1.0 - s), rtol=1e-14)

    def test_weight_at_zero(self, model):
        assert weight_wH(model, 0.0) == 0.0

    @pytest.mark.parametrize("H", [0.55, 0.6, 0.7, 0.8, 0.9])
    @pytest.mark.parametrize("t", [0.5, 1.0, 10.0, 100.0])
    def test_integral_of_kernel_is_weight(self, H, t):
        model = HurstModel(H)
        ratio = kernel_integral(model, t, lambda s: np.ones_like(s)) / weight_wH(model, t)
        assert ratio == pytest.approx(1.0, abs=1e-4)

    def test_integral_against_linear_function(self, model):
        # int_0^t s k_H(t,s) ds = t^(3-2H) B(5/2-H, 3/2-H) / kappa
        t = 2.0
        expected = t ** (3.0 - 2.0 * model.H) * special.beta(2.5 - model.H, 1.5 - model.H) / model.kappa
        assert kernel_integral(model, t, lambda s: s) == pytest.approx(expected, rel=1e-5)

    def test_cell_weights_sum_to_weight(self, model):
        edges = np.linspace(0.0, 3.0, 17)
        assert kernel_cell_weights(model, 3.0, edges).sum() == pytest.approx(weight_wH(model, 3.0), rel=1e-12)

    def test_cell_weights_need_positive_t(self, model):
        with pytest.raises(DomainError):
            kernel_cell_weights(model, 0.0, np.array([0.0, 1.0]))


class TestWeightMatrix:
    def test_rows_sum_to_weight(self, model, small_grid):
        weights = kernel_weight_matrix(model, small_grid)
        np.testing.assert_allclose(weights.sum(axis=1), weight_wH(model, small_grid.nodes), rtol=1e-12)

    def test_causal_and_read_only(self, model, small_grid):
        weights = kernel_weight_matrix(model, small_grid)
        assert weights.shape == (small_grid.N + 1, small_grid.N)
        np.testing.assert_array_equal(weights[0], 0.0)
        assert np.all(np.triu(weights[1:], k=1) == 0.0)
        assert not weights.flags.writeable

    def test_cumulative_of_ones_is_weight(self, model, small_grid):
        cumulative = kernel_cumulative(model, small_grid, np.ones(small_grid.N))
        np.testing.assert_allclose(cumulative, weight_wH(model, small_grid.nodes), rtol=1e-12)

    def test_cumulative_checks_length(self, model, small_grid):
        with pytest.raises(DomainError):
            kernel_cumulative(model, small_grid, np.ones(small_grid.N + 1))


class TestDerivativeInW:
    def test_derivative_of_w_is_one(self, model, grid):
        np.testing.assert_allclose(d_dw(model, grid, weight_wH(model, grid.nodes)), 1.0, atol=1e-12)

    def test_batched(self, model, small_grid):
        g = np.vstack([weight_wH(model, small_grid.nodes), 3.0 * weight_wH(model, small_grid.nodes)])
        out = d_dw(model, small_grid, g)
        assert out.shape == (2, small_grid.N)
        np.testing.assert_allclose(out[1], 3.0, rtol=1e-12)

    def test_checks_length(self, model, small_grid):
        with pytest.raises(DomainError):
            d_dw(model, small_grid, np.zeros(small_grid.N))


class TestTimeGrid:
    def test_nodes(self):
        grid = TimeGrid(100.0, 1000)
        assert grid.nodes[0] == 0.0
        assert grid.nodes[-1] == 100.0
        assert grid.dt == pytest.approx(0.1)
        assert np.all(np.diff(grid.nodes) > 0)

    @pytest.mark.parametrize("T,N", [(0.0, 10), (-1.0, 10), (1.0, 1), (1.0, 2.5)])
    def test_rejects_invalid(self, T, N):
        with pytest.raises(DomainError):
            TimeGrid(T, N)

    def test_refine(self):
        assert TimeGrid(1.0, 10).refine() == TimeGrid(1.0, 20)
