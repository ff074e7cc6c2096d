import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import optimize, stats

from bernstein_density.exceptions import DomainError, InfeasibleModelError
from bernstein_density.fit import FitConfig, apply_symmetry, em_fit, init_weights
from bernstein_density.model import loglik

unit_samples = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=60).map(np.array)
TIGHT = FitConfig(max_iter=20000, tol=1e-13)


def best_on_grid_m2(x, steps=200):
    """Brute-force maximum over the 2-simplex with spacing 1/steps."""
    b = np.column_stack([(1 - x) ** 2, 2 * x * (1 - x), x ** 2]) * 3.0
    best = -np.inf
    for i in range(steps + 1):
        p0 = i / steps
        p1 = np.arange(steps - i + 1) / steps
        w = np.column_stack([np.full_like(p1, p0), p1, 1 - p0 - p1])
        with np.errstate(divide="ignore"):
            ll = np.log(b @ w.T).sum(axis=0)
        best = max(best, ll.max())
    return best


class TestConfig:

    @pytest.mark.parametrize("kw", [{"max_iter": 0}, {"tol": 0.0}, {"init": "random"},
                                    {"boundary_f0": -1.0}, {"zero_mask": (-1,)}])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            FitConfig(**kw)


class TestEmSmallCases:

    def test_degree_zero(self):
        res = em_fit([0.1, 0.7], 0)
        assert_array_equal(res.weights, [1.0])
        assert res.loglik == 0.0
        assert res.converged and res.n_iter == 1

    def test_single_midpoint_is_flat(self):
        # every degree-1 mixture has f(0.5) = 1
        res = em_fit([0.5], 1)
        assert_allclose(res.weights, [0.5, 0.5])
        assert res.loglik == pytest.approx(0.0, abs=1e-15)

    def test_degree_one_against_scalar_optimizer(self):
        x = np.array([0.1, 0.2, 0.25, 0.6, 0.9])
        neg = lambda p: -np.sum(np.log(2 * (p * (1 - x) + (1 - p) * x)))
        opt = optimize.minimize_scalar(neg, bounds=(0, 1), method="bounded",
                                       options={"xatol": 1e-12})
        res = em_fit(x, 1, TIGHT)
        assert_allclose(res.weights[0], opt.x, atol=1e-6)
        assert res.loglik >= -opt.fun - 1e-10

    def test_degree_two_against_grid_search(self):
        x = np.random.default_rng(11).beta(2, 3, 40)
        res = em_fit(x, 2, TIGHT)
        assert res.loglik >= best_on_grid_m2(x) - 1e-10

    def test_recovers_beta_component(self):
        # beta(3, 5) is component i=2 at degree 6
        x = np.random.default_rng(5).beta(3, 5, 20000)
        res = em_fit(x, 6, FitConfig(max_iter=5000, tol=1e-10))
        assert res.weights.argmax() == 2
        assert res.weights[2] > 0.7


class TestConstraints:

    def test_boundary_pins(self):
        x = np.random.default_rng(0).uniform(size=50)
        res = em_fit(x, 4, FitConfig(boundary_f0=0.6, boundary_f1=0.0))
        assert res.weights[0] == pytest.approx(0.12, abs=1e-15)
        assert res.weights[4] == 0.0
        assert_allclose(res.weights.sum(), 1.0, rtol=1e-14)

    def test_zero_mask(self):
        x = np.random.default_rng(1).uniform(size=50)
        res = em_fit(x, 5, FitConfig(zero_mask=(1, 3)))
        assert res.weights[1] == 0.0 and res.weights[3] == 0.0

    def test_pins_exceeding_mass(self):
        with pytest.raises(DomainError):
            em_fit([0.5], 1, FitConfig(boundary_f0=2.0, boundary_f1=2.0))

    def test_symmetric_conflict(self):
        with pytest.raises(DomainError):
            em_fit([0.5], 3, FitConfig(symmetric=True, boundary_f0=0.1, boundary_f1=0.2))

    def test_infeasible_start(self):
        with pytest.raises(InfeasibleModelError):
            em_fit([0.0, 0.5], 1, FitConfig(boundary_f0=0.0))

    def test_zero_weight_stays_zero(self):
        x = np.random.default_rng(2).uniform(0.2, 0.8, 40)
        res = em_fit(x, 4, init=[0.25, 0.25, 0.0, 0.25, 0.25])
        assert res.weights[2] == 0.0

    def test_symmetric(self):
        x = np.random.default_rng(3).beta(2, 5, 80)
        res = em_fit(x, 7, FitConfig(symmetric=True))
        assert_allclose(res.weights, res.weights[::-1], rtol=0, atol=1e-15)
        free = em_fit(x, 7)
        assert res.loglik <= free.loglik + 1e-9

    def test_symmetric_projection(self):
        assert_allclose(apply_symmetry([0.1, 0.2, 0.7]), [0.4, 0.2, 0.4])


class TestEmProperties:

    @given(unit_samples, st.integers(0, 12))
    @settings(max_examples=200, deadline=None)
    def test_simplex_and_monotone(self, x, m):
        res = em_fit(x, m, FitConfig(max_iter=200))
        assert np.all(res.weights >= 0)
        assert abs(res.weights.sum() - 1.0) < 1e-12
        d = np.diff(res.loglik_path)
        assert np.all(d >= -1e-9 * (1 + np.abs(res.loglik_path[:-1])))
        assert res.loglik == pytest.approx(loglik(res.weights, x), rel=1e-12, abs=1e-12)

    @given(unit_samples, st.integers(1, 8), st.randoms(use_true_random=False))
    @settings(max_examples=50, deadline=None)
    def test_permutation_invariant(self, x, m, rnd):
        y = x.copy()
        rnd.shuffle(y)
        a, b = em_fit(x, m), em_fit(y, m)
        assert_allclose(a.weights, b.weights, rtol=1e-9, atol=1e-14)

    def test_deterministic(self):
        x = np.random.default_rng(9).beta(5, 7, 100)
        assert_array_equal(em_fit(x, 9).weights, em_fit(x, 9).weights)

    def test_rejects_unscaled_data(self):
        with pytest.raises(DomainError):
            em_fit([0.5, 1.5], 2)


class TestInit:

    def test_uniform(self):
        assert_allclose(init_weights([0.3], 3), np.full(4, 0.25))

    def test_binomial(self):
        x = [0.2, 0.4]
        assert_allclose(init_weights(x, 5, "binomial"), stats.binom.pmf(range(6), 5, 0.3),
                        rtol=1e-10)

    def test_binomial_falls_back(self):
        with pytest.warns(RuntimeWarning):
            w = init_weights([0.0, 0.0], 3, "binomial")
        assert_allclose(w, np.full(4, 0.25))

    def test_empirical_tracks_data(self):
        x = np.random.default_rng(4).beta(2, 8, 500)
        w = init_weights(x, 9, "empirical")
        assert abs(w.sum() - 1.0) < 1e-14
        assert w.argmax() <= 3
        assert np.all(w > 0)

    @pytest.mark.parametrize("scheme", ["uniform", "binomial", "empirical"])
    def test_schemes_reach_same_optimum(self, scheme):
        x = np.random.default_rng(6).beta(5, 7, 200)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            res = em_fit(x, 8, FitConfig(init=scheme, max_iter=20000, tol=1e-13))
        ref = em_fit(x, 8, TIGHT)
        assert abs(res.loglik - ref.loglik) < 1e-6
