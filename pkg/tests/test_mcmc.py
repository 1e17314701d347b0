import math

import numpy as np
import pytest
from scipy import stats

from bevdep.extremal import AngularCoefficients, validate_angular
from bevdep.likelihood import log_likelihood_eta
from bevdep.mcmc import (ChainOutput, ChainState, InitializationError, McmcConfig,
                         acceptance_log_ratio, diagnostics, effective_sample_size, propose_k, run,
                         run_chains, step)
from bevdep.models import AsymmetricLogistic, SymmetricLogistic, sample_bivariate, true_point_masses
from bevdep.prior import PoissonPrior, k_prior_pmf

POIS7 = PoissonPrior(7.0)
SMALL = dict(iterations=4000, burn_in=2000, thin=2)


@pytest.fixture(scope="module")
def sl_data():
    return sample_bivariate(SymmetricLogistic(0.45), 100, np.random.default_rng(1))


def state(k, ll=0.0):
    return ChainState(k, AngularCoefficients([0.5] * k), ll)


class TestProposal:
    def test_from_minimum(self, rng):
        for _ in range(50):
            assert propose_k(3, rng) == (4, 0.0, math.log(0.5))

    def test_interior(self, rng):
        draws = [propose_k(5, rng) for _ in range(4000)]
        ups = sum(d[0] == 6 for d in draws)
        assert {d[0] for d in draws} == {4, 6}
        assert ups / 4000 == pytest.approx(0.5, abs=0.03)
        assert all(d[1] == d[2] == math.log(0.5) for d in draws)

    def test_down_to_minimum(self, rng):
        down = next(d for d in iter(lambda: propose_k(4, rng), None) if d[0] == 3)
        assert down == (3, math.log(0.5), 0.0)

    def test_invalid(self, rng):
        with pytest.raises(ValueError):
            propose_k(2, rng)


class TestAcceptance:
    cfg = McmcConfig(prior=POIS7)

    def test_identical(self):
        assert acceptance_log_ratio(self.cfg, state(5), state(5)) == 0.0

    def test_edge(self):
        r = acceptance_log_ratio(self.cfg, state(3), state(4), (0.0, math.log(0.5)))
        assert r == pytest.approx(math.log(7) + math.log(0.5))

    def test_interior(self):
        q = (math.log(0.5), math.log(0.5))
        assert acceptance_log_ratio(self.cfg, state(5), state(6), q) == pytest.approx(math.log(7 / 3))

    def test_antisymmetric(self):
        a, b = state(4, -10.0), state(3, -12.5)
        fwd = acceptance_log_ratio(self.cfg, a, b, (math.log(0.5), 0.0))
        bwd = acceptance_log_ratio(self.cfg, b, a, (0.0, math.log(0.5)))
        assert fwd == pytest.approx(-bwd)


class TestConfig:
    def test_defaults(self):
        cfg = McmcConfig()
        assert (cfg.iterations, cfg.burn_in, cfg.thin) == (500_000, 400_000, 4)
        assert cfg.n_kept == 25_000
        assert cfg.prior == POIS7
        assert cfg.refresh_prob == 0.0

    @pytest.mark.parametrize("kw", [dict(burn_in=10, iterations=10), dict(thin=0),
                                    dict(init_k=2), dict(refresh_prob=1.0), dict(iterations=0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            McmcConfig(**kw)


class TestRun:
    def test_kept_count_and_validity(self, sl_data):
        cfg = McmcConfig(seed=3, **SMALL)
        out = run(cfg, sl_data)
        assert len(out) == cfg.n_kept == 1000
        assert len(out.k_trace) == cfg.iterations
        for c, ll in zip(out.states(), out.logliks):
            assert validate_angular(c)
        for i in range(0, len(out), 97):
            c = AngularCoefficients(out.etas[i])
            assert out.logliks[i] == pytest.approx(log_likelihood_eta(c, sl_data), rel=1e-10)

    def test_reproducible(self, sl_data):
        cfg = McmcConfig(seed=9, **SMALL)
        a, b = run(cfg, sl_data), run(cfg, sl_data)
        np.testing.assert_array_equal(a.ks, b.ks)
        np.testing.assert_array_equal(a.logliks, b.logliks)
        assert all(np.array_equal(x, y) for x, y in zip(a.etas, b.etas))
        c = run(McmcConfig(seed=10, **SMALL), sl_data)
        assert not np.array_equal(a.logliks, c.logliks)

    def test_refresh_move(self, sl_data):
        out = run(McmcConfig(seed=2, refresh_prob=0.5, **SMALL), sl_data)
        assert all(validate_angular(c) for c in out.states())

    def test_init_k(self):
        out = run(McmcConfig(seed=1, init_k=20, iterations=10, burn_in=0, thin=1), None)
        assert out.k_trace[0] in (19, 20, 21)

    def test_step(self, sl_data, rng):
        cfg = McmcConfig()
        s = state(4, log_likelihood_eta(AngularCoefficients([0.5] * 4), sl_data))
        for _ in range(50):
            s = step(cfg, s, sl_data, rng)
            assert validate_angular(s.eta)
            assert s.loglik == pytest.approx(log_likelihood_eta(s.eta, sl_data), rel=1e-10)

    def test_step_rejects_invalid_state(self, rng):
        bad = ChainState(3, AngularCoefficients([0.6, 0.5, 0.4]), 0.0)
        with pytest.raises(InitializationError):
            step(McmcConfig(), bad, None, rng)

    def test_impossible_likelihood(self):
        with pytest.raises(InitializationError):
            run(McmcConfig(iterations=10, burn_in=0), lambda eta: -math.inf)

    def test_chains(self, sl_data):
        cfg = McmcConfig(seed=4, iterations=1000, burn_in=500, thin=1)
        serial = run_chains(cfg, sl_data, 3, workers=1)
        parallel = run_chains(cfg, sl_data, 3, workers=2)
        for a, b in zip(serial, parallel):
            np.testing.assert_array_equal(a.logliks, b.logliks)
        assert not np.array_equal(serial[0].logliks, serial[1].logliks)
        np.testing.assert_array_equal(serial[1].logliks, run(cfg, sl_data, chain_index=1).logliks)


class TestPriorRecovery:
    def test_k_marginal(self):
        cfg = McmcConfig(iterations=200_000, burn_in=1000, thin=1, seed=5)
        out = run(cfg, None)
        ks, counts = np.unique(out.ks, return_counts=True)
        emp = dict(zip(ks.tolist(), counts / len(out)))
        support = range(3, 40)
        tv = 0.5 * sum(abs(emp.get(k, 0.0) - k_prior_pmf(POIS7, k)) for k in support)
        assert tv < 0.03
        assert diagnostics(out).k_median == pytest.approx(9.0, abs=1.0)

    def test_p0_marginal_is_uniform(self):
        out = run(McmcConfig(iterations=100_000, burn_in=1000, thin=10, seed=6), None)
        p0 = np.array([e[0] for e in out.etas])
        assert stats.kstest(p0, stats.uniform(0, 0.5).cdf).statistic < 0.03


class TestDiagnostics:
    def test_constant_chain(self):
        n = 100
        out = ChainOutput(np.full(n, 3), [np.array([0.5] * 3)] * n, np.full(n, -5.0), 0.0)
        d = diagnostics(out)
        assert d.acceptance_rate == 0.0
        assert d.loglik_ess == 1.0
        assert d.k_counts == {3: 100}

    def test_empty(self):
        with pytest.raises(ValueError):
            diagnostics(ChainOutput(np.array([], dtype=int), [], np.array([]), 0.0))

    def test_ess_iid(self, rng):
        assert effective_sample_size(rng.normal(size=20000)) == pytest.approx(20000, rel=0.1)

    def test_ess_ar1(self, rng):
        rho, n = 0.8, 50000
        x = np.empty(n)
        x[0] = 0
        e = rng.normal(size=n)
        for i in range(1, n):
            x[i] = rho * x[i - 1] + e[i]
        assert effective_sample_size(x) == pytest.approx(n * (1 - rho) / (1 + rho), rel=0.15)

    @pytest.mark.slow
    def test_sl_fit_order(self, sl_data):
        out = run(McmcConfig(seed=0), sl_data)
        assert 4 <= diagnostics(out).k_median <= 12


@pytest.mark.slow
def test_asymmetric_masses():
    # at n = 100 the vertex masses are dominated by the prior; n = 1000 pins them down
    m = AsymmetricLogistic(0.6, 0.3, 0.8)
    data = sample_bivariate(m, 1000, np.random.default_rng(7))
    out = run(McmcConfig(seed=1, iterations=150_000, burn_in=100_000, refresh_prob=0.5), data)
    p0, p1 = true_point_masses(m)
    assert np.median([e[0] for e in out.etas]) == pytest.approx(p0, abs=0.1)
    assert np.median([1 - e[-1] for e in out.etas]) == pytest.approx(p1, abs=0.1)
