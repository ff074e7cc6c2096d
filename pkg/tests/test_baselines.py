import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, stats

from bernstein_density.baselines import (KernelConfig, bandwidth, ecdf, kde,
                                         sheather_jones_bandwidth, silverman_bandwidth,
                                         vitale_cdf)
from bernstein_density.exceptions import DomainError

samples = st.lists(st.floats(-100, 100), min_size=1, max_size=50)


class TestEcdf:

    def test_example(self):
        assert ecdf([1.0, 2.0, 3.0], 2.0) == pytest.approx(2 / 3)

    def test_right_continuous(self):
        assert_allclose(ecdf([1.0, 1.0, 2.0], [0.999, 1.0, 2.0]), [0.0, 2 / 3, 1.0])

    @given(samples, st.floats(-200, 200))
    @settings(max_examples=200)
    def test_counts(self, data, x):
        assert ecdf(data, x) == sum(v <= x for v in data) / len(data)

    def test_empty(self):
        with pytest.raises(DomainError):
            ecdf([], 0.0)


class TestVitale:

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=40), st.integers(0, 30))
    @settings(max_examples=200)
    def test_is_a_cdf(self, data, m):
        t = np.linspace(0, 1, 51)
        F = vitale_cdf(data, m, t)
        assert F[0] == pytest.approx(ecdf(data, 0.0), abs=1e-14)
        assert F[-1] == pytest.approx(1.0, abs=1e-14)
        assert np.all(np.diff(F) >= -1e-14)

    def test_explicit_sum(self):
        data = [0.1, 0.35, 0.4, 0.8]
        m, t = 3, 0.6
        knots = [ecdf(data, i / (m + 1)) for i in range(m + 2)]
        ref = sum(knots[i] * stats.binom.pmf(i, m + 1, t) for i in range(m + 2))
        assert vitale_cdf(data, m, t) == pytest.approx(ref, rel=1e-13)

    def test_converges_to_ecdf_points(self):
        x = np.random.default_rng(0).beta(2, 2, 2000)
        t = np.linspace(0.1, 0.9, 9)
        assert np.max(np.abs(vitale_cdf(x, 400, t) - stats.beta.cdf(t, 2, 2))) < 0.03


class TestKde:

    def test_single_point(self):
        assert kde([0.0], x=0.0, h=1.0) == pytest.approx(0.3989422804014327, rel=1e-15)

    def test_integrates_to_one(self):
        x = np.random.default_rng(1).normal(size=50)
        h = silverman_bandwidth(x)
        val = integrate.quad(lambda v: kde(x, x=v, h=h), -np.inf, np.inf, limit=200)[0]
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_shape(self):
        out = kde([0.0, 1.0], KernelConfig("fixed", h=0.5), x=np.zeros((3, 2)))
        assert out.shape == (3, 2)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            KernelConfig("fixed")
        with pytest.raises(DomainError):
            KernelConfig(kernel="epanechnikov")


class TestBandwidth:

    def test_silverman_formula(self):
        x = np.arange(1.0, 11.0)
        q = statistics.quantiles(x, n=4, method="inclusive")
        spread = min(statistics.stdev(x), (q[2] - q[0]) / 1.34)
        assert silverman_bandwidth(x) == pytest.approx(0.9 * spread * 10 ** -0.2, rel=1e-14)

    def test_silverman_normal_sample(self):
        x = np.random.default_rng(2).normal(size=100)
        assert silverman_bandwidth(x) == pytest.approx(0.357, abs=0.05)

    def test_sheather_jones_normal_reference(self):
        x = np.random.default_rng(3).normal(size=500)
        h = sheather_jones_bandwidth(x)
        ref = 1.06 * x.std(ddof=1) * 500 ** -0.2
        assert 0.7 * ref < h < 1.3 * ref

    def test_dispatch(self):
        x = np.random.default_rng(4).normal(size=60)
        assert bandwidth(x) == silverman_bandwidth(x)
        assert bandwidth(x, KernelConfig("fixed", h=0.2)) == 0.2
        assert bandwidth(x, KernelConfig("sheather_jones")) == sheather_jones_bandwidth(x)

    def test_zero_spread(self):
        with pytest.raises(DomainError):
            silverman_bandwidth([1.0, 1.0, 1.0])
