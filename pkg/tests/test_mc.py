"""Monte Carlo estimators: determinism, exact path-level symmetries, and
agreement with the quadrature analytics (4-standard-error bands)."""

import numpy as np
import pytest

from fcir_lab import analytics, mc
from fcir_lab.errors import DomainError, NonpositiveStart
from fcir_lab.fbm import Seed, fbm_cov
from fcir_lab.fou import ModelParams


def params(h, a, sigma=1.0, y0=1.0):
    return ModelParams(H=h, a=a, sigma=sigma, y0=y0)


class TestDeterminism:
    def test_same_seed_bit_identical(self):
        p = params(0.7, -1.0, y0=0.5)
        a = mc.estimate_hitting_prob(p, 2.0, 1500, 64, Seed(9), threads=2)
        b = mc.estimate_hitting_prob(p, 2.0, 1500, 64, Seed(9), threads=2)
        assert a.mean == b.mean and a.stderr == b.stderr

    def test_worker_count_invariance(self):
        p = params(0.7, -1.0, y0=0.5)
        lone = mc.estimate_hitting_prob(p, 2.0, 2500, 64, Seed(9), threads=1)
        pool = mc.estimate_hitting_prob(p, 2.0, 2500, 64, Seed(9), threads=8)
        assert lone.mean == pool.mean and lone.stderr == pool.stderr

    def test_cholesky_generator_supported(self):
        p = params(0.6, -0.5, y0=0.5)
        est = mc.estimate_hitting_prob(p, 1.0, 500, 32, Seed(4),
                                       generator="cholesky")
        assert 0.0 <= est.mean <= 1.0

    def test_unknown_generator(self):
        with pytest.raises(DomainError):
            mc.estimate_hitting_prob(params(0.5, 0.5, y0=1.0), 1.0, 10, 8,
                                     Seed(0), generator="euler")


class TestHitting:
    def test_far_start_never_hits(self):
        # level y0/sigma = 1000: sup-tail bound ~ e^{-500000}, so no path hits
        p = params(0.7, 1.0, sigma=0.1, y0=100.0)
        est = mc.estimate_hitting_prob(p, 1.0, 2000, 64, Seed(3))
        assert est.mean == 0.0 and est.stderr == 0.0

    def test_start_monotonicity_exact(self):
        low = params(0.7, -1.0, y0=0.4)
        high = params(0.7, -1.0, y0=0.8)
        e_low = mc.estimate_hitting_prob(low, 2.0, 2000, 64, Seed(6))
        e_high = mc.estimate_hitting_prob(high, 2.0, 2000, 64, Seed(6))
        assert e_high.mean <= e_low.mean

    def test_study_monotone_and_consistent(self):
        p = params(0.7, -1.0, y0=0.5)
        study = mc.hitting_study(p, (4.0, 1.0, 2.0), 2000, 64, Seed(10))
        assert np.array_equal(study.horizons, [1.0, 2.0, 4.0])
        means = [e.mean for e in study.estimates]
        assert means[0] <= means[1] <= means[2]
        assert study.estimates[0].n_samples == 2000

    def test_negative_drift_hits_more_with_horizon(self):
        p = params(0.7, -1.0, y0=0.5)
        study = mc.hitting_study(p, (1.0, 8.0), 4000, 64, Seed(11))
        lo, hi = study.estimates
        assert hi.mean - lo.mean > 4.0 * (lo.stderr + hi.stderr)

    def test_requires_positive_start(self):
        with pytest.raises(NonpositiveStart):
            mc.estimate_hitting_prob(params(0.5, 0.0, y0=0.0), 1.0, 10, 8, Seed(0))

    def test_validation(self):
        p = params(0.5, 0.0, y0=1.0)
        with pytest.raises(DomainError):
            mc.estimate_hitting_prob(p, 1.0, 0, 8, Seed(0))
        with pytest.raises(DomainError):
            mc.hitting_study(p, (), 10, 8, Seed(0))


class TestSupTail:
    def test_level_zero_is_certain(self):
        est = mc.estimate_sup_tail(1.0, 0.7, [0.0, 0.5], 2.0, 1000, 32, Seed(5))
        assert est[0].mean == 1.0

    def test_monotone_in_level(self):
        est = mc.estimate_sup_tail(1.0, 0.7, [0.25, 0.5, 1.0, 2.0], 4.0, 3000,
                                   64, Seed(5))
        means = [e.mean for e in est]
        assert all(b <= a for a, b in zip(means, means[1:]))

    def test_mirrored_noise_identity(self):
        levels = [0.5, 1.0, 1.5]
        up = mc.estimate_sup_tail(1.0, 0.7, levels, 4.0, 2000, 64, Seed(6))
        down = mc.estimate_sup_tail(1.0, 0.7, [-x for x in reversed(levels)],
                                    4.0, 2000, 64, Seed(6), negate_noise=True)
        for u, d in zip(up, reversed(down)):
            assert u.mean == d.mean and u.stderr == d.stderr

    def test_levels_validation(self):
        with pytest.raises(DomainError):
            mc.estimate_sup_tail(1.0, 0.7, [], 1.0, 10, 8, Seed(0))
        with pytest.raises(DomainError):
            mc.estimate_sup_tail(1.0, 0.7, [1.0, 0.5], 1.0, 10, 8, Seed(0))


class TestEmpiricalCov:
    def test_j_process_zero_drift_matches_fbm(self):
        p = params(0.6, 0.0, y0=1.0)
        est = mc.empirical_cov("j_process", p, [(1.0, 2.0)], 2 * 10**4, 64, Seed(7))
        ref = fbm_cov(1.0, 2.0, 0.6)
        assert abs(est[0].mean - ref) < 4.0 * est[0].stderr

    def test_fou_matches_quadrature(self):
        p = params(0.7, -1.0)
        est = mc.empirical_cov("fou", p, [(0.5, 1.5)], 2 * 10**4, 128, Seed(8))
        ref = analytics.ou_cov(1.5, 0.5, p)
        assert abs(est[0].mean - ref) < 4.0 * est[0].stderr

    def test_diagonal_matches_variance(self):
        p = params(0.7, -1.0)
        est = mc.empirical_cov("fou", p, [(1.0, 1.0)], 2 * 10**4, 128, Seed(9))
        ref = analytics.ou_var(1.0, p)
        assert abs(est[0].mean - ref) < 4.0 * est[0].stderr

    def test_pair_validation(self):
        p = params(0.5, 0.0)
        with pytest.raises(DomainError):
            mc.empirical_cov("fou", p, [], 10, 8, Seed(0))
        with pytest.raises(DomainError):
            mc.empirical_cov("fou", p, [(0.123456, 1.0)], 10, 8, Seed(0))
        with pytest.raises(DomainError):
            mc.empirical_cov("marginal", p, [(0.5, 1.0)], 10, 8, Seed(0))


class TestValidationSweep:
    def test_covariance_check_passes_at_reduced_scale(self):
        from fcir_lab.validation import check_mc_covariance, covariance_sweep

        result = check_mc_covariance(seed=0, n_paths=2000, threads=None)
        assert result.passed, result.detail
        rows = covariance_sweep(seed=0, n_paths=500)
        assert len(rows) == 24
        for s, t, emp, ref, se in rows:
            assert s <= t and se > 0.0


class TestResolveThreads:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv("FCIR_THREADS", "3")
        assert mc.resolve_threads(5) == 5

    def test_env_fallback(self, monkeypatch):
        monkeypatch.setenv("FCIR_THREADS", "3")
        assert mc.resolve_threads(None) == 3

    def test_default_positive(self, monkeypatch):
        monkeypatch.delenv("FCIR_THREADS", raising=False)
        assert mc.resolve_threads(None) >= 1

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            mc.resolve_threads(0)
