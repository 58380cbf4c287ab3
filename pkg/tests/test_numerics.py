import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overlapq import Erlang, Exponential, LogNormal, Quadrature, Uniform
from overlapq.errors import DomainError, QuadratureError
from overlapq.numerics import (adaptive_simpson, dkw_halfwidth, empirical_tail, grid_convolve,
                               integrate_semiinfinite, trapezoid_mass)


class TestAdaptiveSimpson:
    def test_polynomial_exact(self):
        value, err = adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0)
        assert value == pytest.approx(0.0, abs=1e-13)
        assert err < 1e-12

    def test_kink(self):
        value, _ = adaptive_simpson(lambda x: np.abs(x - 0.3), 0.0, 1.0, atol=1e-12)
        assert value == pytest.approx(0.09 / 2 + 0.49 / 2, abs=1e-10)

    def test_empty_interval(self):
        assert adaptive_simpson(np.sin, 1.0, 1.0) == (0.0, 0.0)

    def test_subdivision_limit_carries_estimate(self):
        with pytest.raises(QuadratureError) as info:
            adaptive_simpson(lambda x: np.sin(1.0 / (x + 1e-9)), 0.0, 1.0, atol=1e-14,
                             rtol=1e-14, max_subdivisions=200)
        assert math.isfinite(info.value.estimate)
        assert info.value.error > 0

    def test_nonfinite_integrand(self):
        with pytest.raises(DomainError):
            adaptive_simpson(lambda x: np.full_like(x, np.inf), 0.0, 1.0)


class TestSemiInfinite:
    def test_exponential(self):
        assert integrate_semiinfinite(lambda x: np.exp(-x), Exponential(1)) == pytest.approx(1, abs=1e-10)

    def test_double_rate(self):
        assert integrate_semiinfinite(lambda x: np.exp(-2 * x), Exponential(1)) == pytest.approx(0.5, abs=1e-10)

    def test_gamma_two(self):
        v = integrate_semiinfinite(lambda x: x * np.exp(-x), Erlang(2, 1))
        assert v == pytest.approx(1.0, abs=1e-8)

    def test_tail_beyond_truncation_is_added(self):
        # heavier integrand than the truncation law
        v, info = integrate_semiinfinite(lambda x: np.exp(-0.1 * x), Exponential(10),
                                         full_output=True)
        assert v == pytest.approx(10.0, rel=1e-9)
        assert info["tail_bound"] <= 1e-10

    @pytest.mark.parametrize("d", [Exponential(2.0), Erlang(3, 1.5), LogNormal(0.2, 0.7),
                                   Uniform(0.5, 2.0)])
    def test_density_integrates_to_one(self, d):
        assert integrate_semiinfinite(d.pdf, d, breakpoints=(0.5, 2.0)) == pytest.approx(1, abs=1e-6)

    def test_quadrature_validation(self):
        with pytest.raises(DomainError):
            Quadrature(atol=0)
        with pytest.raises(DomainError):
            Quadrature(truncation_quantile=1.0)


class TestGridConvolve:
    def test_exponential_pair(self):
        grid = np.linspace(0, 20, 20001)
        f = np.exp(-grid)
        out = grid_convolve(f, f, grid)
        assert out[1000] == pytest.approx(math.exp(-1), abs=1e-4)

    def test_uniform_triangle(self):
        grid = np.linspace(0, 2, 4001)
        f = (grid <= 1).astype(float)
        out = grid_convolve(f, f, grid)
        assert out[1000] == pytest.approx(0.5, abs=1e-4)

    def test_mass_loss_reported(self):
        grid = np.linspace(0, 30, 30001)
        f = np.exp(-grid)
        _, info = grid_convolve(f, f, grid, full_output=True)
        assert abs(info["mass_loss"]) < 1e-6

    def test_fft_matches_direct(self):
        grid = np.linspace(0, 10, 5001)
        f = np.exp(-grid)
        g = grid * np.exp(-grid)
        fft = grid_convolve(f, g, grid)
        direct = grid_convolve(f[:4001], g[:4001], grid[:4001])
        assert np.max(np.abs(fft[:4001] - direct)) < 1e-12

    def test_nonuniform_grid_rejected(self):
        grid = np.array([0.0, 0.1, 0.3])
        with pytest.raises(DomainError):
            grid_convolve(np.ones(3), np.ones(3), grid)

    def test_grid_must_start_at_zero(self):
        grid = np.linspace(1, 2, 5)
        with pytest.raises(DomainError):
            grid_convolve(np.ones(5), np.ones(5), grid)

    def test_trapezoid_mass(self):
        assert trapezoid_mass([1, 1, 1], 0.5) == 1.0


class TestEmpiricalTail:
    def test_examples(self):
        assert empirical_tail([1, 2, 3], [0, 2]).tolist() == [1.0, 1 / 3]
        assert empirical_tail([0, 0, 0], [0]).tolist() == [0.0]

    def test_empty(self):
        with pytest.raises(DomainError):
            empirical_tail([], [0.0])

    @given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=60),
           st.lists(st.floats(0, 120, allow_nan=False), min_size=1, max_size=30))
    @settings(max_examples=60, deadline=None)
    def test_bounded_and_nonincreasing(self, samples, grid):
        grid = np.sort(grid)
        tail = empirical_tail(samples, grid)
        assert np.all((tail >= 0) & (tail <= 1))
        assert np.all(np.diff(tail) <= 0)
        brute = [np.mean(np.asarray(samples) > t) for t in grid]
        assert np.allclose(tail, brute)


def test_dkw_halfwidth():
    assert dkw_halfwidth(10**6, 0.01) == pytest.approx(0.00163, abs=5e-6)
    assert dkw_halfwidth(100, 0.05) == pytest.approx(0.13581, abs=5e-6)
    with pytest.raises(DomainError):
        dkw_halfwidth(0, 0.01)
    with pytest.raises(DomainError):
        dkw_halfwidth(10, 1.5)
