import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from overlapq import (Deterministic, DeterministicBatch, Erlang, ExplicitBatch, Exponential,
                      GeometricBatch, HyperExponential, LogNormal, QueueModel, Uniform,
                      ZeroTruncatedPoisson, kfold_density)
from overlapq.distributions import BlockSum, batch_from_dict, continuous_from_dict
from overlapq.errors import DomainError, ModelSpecError
from overlapq.numerics import dkw_halfwidth, integrate_semiinfinite, trapezoid_mass
from overlapq.rng import stream

CONTINUOUS = [Exponential(1.5), Erlang(3, 2.0), Deterministic(0.7), Uniform(0.2, 1.4),
              LogNormal(0.1, 0.6), HyperExponential((0.3, 0.7), (0.5, 3.0))]
NON_ATOMIC = [d for d in CONTINUOUS if not isinstance(d, Deterministic)]
BATCHES = [DeterministicBatch(3), ExplicitBatch((0.2, 0.5, 0.3)), GeometricBatch(0.4),
           ZeroTruncatedPoisson(2.5)]

# independent reference laws
SCIPY = {
    "exponential": lambda d: stats.expon(scale=1 / d.rate),
    "erlang": lambda d: stats.gamma(d.shape, scale=1 / d.rate),
    "uniform": lambda d: stats.uniform(d.lo, d.hi - d.lo),
    "lognormal": lambda d: stats.lognorm(d.log_sd, scale=math.exp(d.log_mean)),
}


class TestContinuous:
    def test_cdf_examples(self):
        assert Exponential(1).cdf(0.0) == 0.0
        assert Deterministic(1).cdf(0.5) == 0.0
        assert Deterministic(1).cdf(1.5) == 1.0
        assert Exponential(1).cdf(math.log(2)) == pytest.approx(0.5, abs=1e-15)

    def test_exponential_cdf_against_density_integral(self):
        d = Exponential(1)
        from overlapq.numerics import integrate_interval
        v, _ = integrate_interval(d.pdf, 0.0, math.log(2))
        assert v == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("d", CONTINUOUS, ids=lambda d: d.family)
    def test_cdf_plus_tail_exact(self, d):
        x = np.linspace(0, 10, 2001)
        assert np.all(d.cdf(x) + d.tail(x) == 1.0)
        assert np.all(np.diff(d.cdf(x)) >= 0)

    @pytest.mark.parametrize("d", [d for d in NON_ATOMIC if d.family in SCIPY],
                             ids=lambda d: d.family)
    def test_against_reference(self, d):
        ref = SCIPY[d.family](d)
        x = np.linspace(0, 8, 97)
        assert np.allclose(d.cdf(x), ref.cdf(x), atol=1e-14)
        assert np.allclose(d.pdf(x), ref.pdf(x), atol=1e-13)
        p = np.linspace(0.01, 0.99, 25)
        assert np.allclose([d.quantile(v) for v in p], ref.ppf(p), rtol=1e-9)

    def test_hyperexponential_mixture(self):
        d = HyperExponential((0.3, 0.7), (0.5, 3.0))
        x = np.linspace(0, 5, 11)
        assert np.allclose(d.tail(x), 0.3 * np.exp(-0.5 * x) + 0.7 * np.exp(-3 * x))
        assert d.cdf(d.quantile(0.9)) == pytest.approx(0.9, abs=1e-10)

    def test_laplace_examples(self):
        for d in CONTINUOUS:
            assert d.laplace(0.0) == 1.0
        assert Exponential(1).laplace(1.0) == pytest.approx(0.5)
        assert Deterministic(1).laplace(2.0) == pytest.approx(math.exp(-2))
        with pytest.raises(DomainError):
            Exponential(1).laplace(-1.0)

    @pytest.mark.parametrize("d", NON_ATOMIC, ids=lambda d: d.family)
    def test_laplace_matches_quadrature(self, d):
        for s in (0.3, 1.0, 4.0):
            numeric = integrate_semiinfinite(lambda x: np.exp(-s * x) * d.pdf(x), d,
                                             breakpoints=(0.2, 1.4))
            assert d.laplace(s) == pytest.approx(numeric, abs=1e-8)

    @pytest.mark.parametrize("d", CONTINUOUS, ids=lambda d: d.family)
    def test_laplace_nonincreasing(self, d):
        vals = [d.laplace(s) for s in np.linspace(0, 10, 21)]
        assert np.all(np.diff(vals) <= 1e-15)

    @pytest.mark.parametrize("d", CONTINUOUS, ids=lambda d: d.family)
    def test_sampling_within_dkw_band(self, d):
        n = 10**6
        x = np.sort(d.sample(stream(7), n))
        grid = (np.array([d.quantile(p) for p in np.linspace(0.001, 0.999, 200)]) if not d.atoms
                else np.array([0.5, 0.7, 0.9]))
        emp = np.searchsorted(x, grid, side="right") / n
        assert np.max(np.abs(emp - d.cdf(grid))) <= dkw_halfwidth(n, 0.01)

    def test_sample_means(self):
        assert np.all(Deterministic(2).sample(stream(0), 10) == 2.0)
        assert Exponential(1).sample(stream(1), 10**6).mean() == pytest.approx(1, abs=0.01)
        assert Erlang(2, 1).sample(stream(2), 10**6).mean() == pytest.approx(2, abs=0.02)

    @pytest.mark.parametrize("bad", [lambda: Exponential(0), lambda: Erlang(0, 1),
                                     lambda: Erlang(1.5, 1), lambda: Uniform(1, 1),
                                     lambda: Uniform(-1, 1), lambda: LogNormal(0, 0),
                                     lambda: HyperExponential((0.5, 0.6), (1, 2)),
                                     lambda: Deterministic(-1)])
    def test_invalid_parameters(self, bad):
        with pytest.raises(DomainError):
            bad()


class TestBatch:
    def test_pgf_examples(self):
        assert DeterministicBatch(2).pgf(0.5) == 0.25
        assert ExplicitBatch((0.5, 0.5)).pgf(0.5) == 0.375
        for b in BATCHES:
            assert b.pgf(1.0) == pytest.approx(1.0, abs=1e-12)
            assert b.pgf(0.0) == 0.0
        with pytest.raises(DomainError):
            DeterministicBatch(2).pgf(1.5)

    @pytest.mark.parametrize("b", BATCHES, ids=lambda b: b.family)
    def test_pgf_nondecreasing(self, b):
        z = np.linspace(0, 1, 201)
        assert np.all(np.diff(b.pgf(z)) >= 0)

    def test_pgf_against_direct_sum(self):
        b = ZeroTruncatedPoisson(2.5)
        z = 0.6
        ref = (math.exp(2.5 * z) - 1) / (math.exp(2.5) - 1)
        assert b.pgf(z) == pytest.approx(ref, abs=1e-12)
        g = GeometricBatch(0.4)
        assert g.pgf(z) == pytest.approx(0.4 * z / (1 - 0.6 * z), abs=1e-12)

    def test_truncation(self):
        g = GeometricBatch(0.5)
        assert 0 < g.truncation_bound < 1e-12
        assert g.max_size == 40

    def test_sampling(self):
        assert np.all(DeterministicBatch(3).sample(stream(0), 100) == 3)
        x = ExplicitBatch((0.5, 0.5)).sample(stream(1), 10**6)
        assert np.mean(x == 1) == pytest.approx(0.5, abs=0.002)
        assert GeometricBatch(0.5).sample(stream(2), 10**6).mean() == pytest.approx(2, abs=0.01)
        assert np.all(ZeroTruncatedPoisson(0.3).sample(stream(3), 1000) >= 1)

    @pytest.mark.parametrize("bad", [lambda: DeterministicBatch(0), lambda: ExplicitBatch(()),
                                     lambda: ExplicitBatch((0.5, 0.6)),
                                     lambda: ExplicitBatch((0.0, 0.0)), lambda: GeometricBatch(0),
                                     lambda: ZeroTruncatedPoisson(-1)])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            bad()


class TestSchema:
    def test_round_trip(self):
        for d in CONTINUOUS:
            assert continuous_from_dict(d.to_dict()) == d
        for b in BATCHES:
            assert batch_from_dict(b.to_dict()) == b
        m = QueueModel(Uniform(0, 2), GeometricBatch(0.3), LogNormal(0, 1))
        assert QueueModel.from_dict(m.to_dict()) == m

    @pytest.mark.parametrize("data,field", [
        ({"batch": {"family": "deterministic", "b": 1},
          "service": {"family": "exponential", "rate": 1}}, "arrival"),
        ({"arrival": {"family": "weibull"}, "batch": {"family": "deterministic", "b": 1},
          "service": {"family": "exponential", "rate": 1}}, "arrival.family"),
        ({"arrival": {"family": "exponential", "rate": 1}, "batch": {"family": "deterministic", "b": 1},
          "service": {"family": "exponential", "rate": "x"}}, "service.rate"),
        ({"arrival": {"family": "exponential", "rate": 1}, "batch": {"family": "explicit-pmf", "pmf": [0.2]},
          "service": {"family": "exponential", "rate": 1}}, "batch.pmf"),
    ])
    def test_errors_name_field(self, data, field):
        with pytest.raises(ModelSpecError) as info:
            QueueModel.from_dict(data)
        assert info.value.field == field
        assert field in str(info.value)


class TestKFold:
    def test_exponential(self):
        h = kfold_density(Exponential(1), 1, [0.0, 1.0])
        assert h.values[0] == 1.0
        h2 = kfold_density(Exponential(1), 2, [1.0])
        assert h2.values[0] == pytest.approx(math.exp(-1), abs=1e-14)
        assert h2.method == "closed-form"

    def test_exponential_against_grid_convolution(self):
        from overlapq.numerics import grid_convolve
        grid = np.linspace(0, 30, 30001)
        f = np.exp(-grid)
        conv = grid_convolve(f, f, grid)
        # x = 0 carries the mass-conserving boundary value, not the density
        assert np.max(np.abs(conv - kfold_density(Exponential(1), 2, grid).values)[1:]) < 1e-4

    def test_uniform_triangle(self):
        h = kfold_density(Uniform(0, 1), 2, [0.5, 1.0, 1.5])
        assert h.method == "grid-convolution"
        assert np.allclose(h.values, [0.5, 1.0, 0.5], atol=1e-3)

    def test_uniform_irwin_hall(self):
        x = np.linspace(0.05, 2.95, 30)
        # Irwin-Hall density for n = 3
        ref = np.where(x < 1, x**2 / 2, np.where(x < 2, (-2 * x**2 + 6 * x - 3) / 2, (3 - x)**2 / 2))
        assert np.allclose(kfold_density(Uniform(0, 1), 3, x).values, ref, atol=2e-3)

    def test_deterministic_atom(self):
        h = kfold_density(Deterministic(1.5), 2, [0.0, 3.0])
        assert h.atom == 3.0 and np.all(h.values == 0)

    @pytest.mark.parametrize("d", NON_ATOMIC, ids=lambda d: d.family)
    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_mass_one(self, d, k):
        block = BlockSum(d, k)
        if block.kind == "gamma":
            g = block.gamma
            total = integrate_semiinfinite(g.pdf, g)
        else:
            x, dens = block.grid_density()
            total = trapezoid_mass(dens, x[1] - x[0])
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_invalid_k(self):
        with pytest.raises(DomainError):
            kfold_density(Exponential(1), 0, [0.0])

    def test_blocksum_mean(self):
        b = BlockSum(LogNormal(0, 0.5), 3)
        assert b.expect(lambda x: x) == pytest.approx(3 * LogNormal(0, 0.5).mean(), rel=1e-6)


@given(st.floats(0.05, 20), st.floats(0, 50))
@settings(max_examples=80, deadline=None)
def test_exponential_tail_is_exact(rate, x):
    d = Exponential(rate)
    assert d.tail(x) + d.cdf(x) == 1.0
    assert d.tail(x) == pytest.approx(math.exp(-rate * x), rel=1e-12, abs=1e-300)
