import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, stats

from bernstein_density.basis import elevate_degree
from bernstein_density.exceptions import DomainError
from bernstein_density.model import (BernsteinModel, as_weights, cdf, loglik, mean_estimate,
                                     moment_estimate, pdf)
from bernstein_density.transform import SupportMap

simplex = st.integers(0, 15).flatmap(
    lambda m: st.lists(st.floats(0.0, 1.0), min_size=m + 1, max_size=m + 1)
    .filter(lambda v: sum(v) > 1e-3)
    .map(lambda v: np.array(v) / sum(v)))


def quad_moment(model, k):
    s = model.support
    return integrate.quad(lambda x: x ** k * model.pdf(x), s.a, s.b, epsabs=1e-13)[0]


class TestWeights:

    def test_normalizes_roundoff(self):
        assert_allclose(as_weights([0.5, 0.5 + 1e-12]).sum(), 1.0, rtol=1e-15)

    @pytest.mark.parametrize("w", [[], [0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0]])
    def test_rejects_non_simplex(self, w):
        with pytest.raises(DomainError):
            as_weights(w)

    def test_model_weights_read_only(self):
        model = BernsteinModel([0.25, 0.75])
        with pytest.raises(ValueError):
            model.weights[0] = 1.0


class TestDensity:

    def test_uniform(self):
        model = BernsteinModel([1.0])
        assert pdf(model, 0.3) == 1.0
        assert cdf(model, 0.3) == pytest.approx(0.3, rel=1e-15)

    def test_linear_density(self):
        # p = (0, 1) at degree 1 is f(t) = 2t
        model = BernsteinModel([0.0, 1.0])
        assert_allclose(model.pdf([0.0, 0.25, 1.0]), [0.0, 0.5, 2.0], rtol=1e-14)
        assert_allclose(model.cdf([0.0, 0.5, 1.0]), [0.0, 0.25, 1.0], rtol=1e-14)

    def test_beta_component(self):
        m, i = 11, 4
        w = np.zeros(m + 1)
        w[i] = 1.0
        model = BernsteinModel(w)
        t = np.linspace(0.01, 0.99, 17)
        assert_allclose(model.pdf(t), stats.beta.pdf(t, i + 1, m - i + 1), rtol=1e-10)
        assert_allclose(model.cdf(t), stats.beta.cdf(t, i + 1, m - i + 1), rtol=1e-10)

    def test_raw_scale(self):
        model = BernsteinModel([0.0, 1.0], SupportMap(2.0, 6.0))
        assert_allclose(model.pdf(4.0), 0.25, rtol=1e-14)
        assert_allclose(model.cdf(4.0), 0.25, rtol=1e-14)

    def test_zero_outside_support(self):
        model = BernsteinModel([0.2, 0.8], SupportMap(0.0, 2.0))
        assert_allclose(model.pdf([-1.0, 3.0]), [0.0, 0.0])
        assert_allclose(model.cdf([-1.0, 3.0]), [0.0, 1.0])

    @given(simplex)
    @settings(max_examples=200)
    def test_cdf_endpoints_and_monotone(self, w):
        model = BernsteinModel(w, SupportMap(-1.0, 3.0))
        x = np.linspace(-1.0, 3.0, 41)
        F = model.cdf(x)
        assert F[0] == 0.0
        assert abs(F[-1] - 1.0) < 1e-12
        assert np.all(np.diff(F) >= -1e-14)

    @given(simplex)
    @settings(max_examples=50)
    def test_integrates_to_one(self, w):
        model = BernsteinModel(w, SupportMap(1.0, 4.0))
        val = integrate.quad(model.pdf, 1.0, 4.0, epsabs=1e-12)[0]
        assert abs(val - 1.0) < 1e-9


class TestLoglik:

    def test_uniform_is_zero(self):
        assert loglik([1.0], [0.1, 0.5, 0.9]) == 0.0

    def test_example(self):
        # f(t) = 2t at t = 0.5, 1.0 gives log 1 + log 2
        assert_allclose(loglik([0.0, 1.0], [0.5, 1.0]), np.log(2.0), rtol=1e-14)

    def test_zero_density_is_minus_inf(self):
        assert loglik([0.0, 1.0], [0.0, 0.5]) == -np.inf

    @given(simplex, st.integers(1, 4),
           st.lists(st.floats(0.01, 0.99), min_size=1, max_size=30))
    @settings(max_examples=200)
    def test_invariant_under_elevation(self, w, r, x):
        a = loglik(w, x)
        b = loglik(elevate_degree(w, r), x)
        assert abs(a - b) <= 1e-9 * (1 + abs(a))


class TestMoments:

    def test_mean_uniform(self):
        assert mean_estimate(BernsteinModel([1.0], SupportMap(2.0, 4.0))) == pytest.approx(3.0)

    def test_mean_formula(self):
        # E = sum w_i (i + 1) / (m + 2)
        w = np.array([0.1, 0.2, 0.3, 0.4])
        assert_allclose(mean_estimate(BernsteinModel(w)), w @ np.arange(1, 5) / 5, rtol=1e-15)

    @given(simplex)
    @settings(max_examples=30)
    def test_against_quadrature(self, w):
        model = BernsteinModel(w, SupportMap(-2.0, 1.5))
        for k in (1, 2, 3):
            assert abs(moment_estimate(model, k) - quad_moment(model, k)) < 1e-9

    @pytest.mark.parametrize("k", [0, -1, 1.5])
    def test_bad_order(self, k):
        with pytest.raises(DomainError):
            moment_estimate(BernsteinModel([1.0]), k)
