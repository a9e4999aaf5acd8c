import math

import numpy as np
import pytest

from mmadoa.models import PolarizationState
from mmadoa.signals import (
    Scenario,
    gen_snapshots,
    noncentrality,
    realized_signal_cov,
    rss,
    rss_moments,
    sample_cov,
)


class TestScenario:
    def test_snr_definition(self):
        scenario = Scenario.single(0.3, power_w=2.0, snapshots=10, noise_power_w=0.5)
        assert scenario.snr[0] == pytest.approx(4.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            Scenario.single(0.3, power_w=-1.0, snapshots=10, noise_power_w=0.5)
        with pytest.raises(ValueError):
            Scenario.single(0.3, power_w=1.0, snapshots=0, noise_power_w=0.5)
        with pytest.raises(ValueError):
            Scenario(np.array([[0.1, 0.0], [0.2, 0.0]]), np.array([1.0]), 5, 0.1)


class TestGenSnapshots:
    def test_noise_free_columns_equal_response(self, planar_antenna):
        truth = planar_antenna["truth"]
        scenario = Scenario.single(0.4, power_w=1.0, snapshots=16, noise_power_w=0.0)
        block = gen_snapshots(scenario, truth, seed=3)
        response = truth.response(0.4)
        # unit-modulus waveform: every column is a phase-rotated response
        ratios = block.samples / response[:, None]
        assert np.abs(np.abs(ratios) - 1.0).max() < 1e-12
        assert np.abs(ratios - ratios[0:1, :]).max() < 1e-12

    def test_deterministic_given_seed(self, planar_antenna):
        scenario = Scenario.single(0.4, power_w=1.5, snapshots=32, noise_power_w=0.7)
        first = gen_snapshots(scenario, planar_antenna["truth"], seed=11)
        second = gen_snapshots(scenario, planar_antenna["truth"], seed=11)
        assert np.array_equal(first.samples, second.samples)
        assert np.array_equal(first.waveforms, second.waveforms)

    def test_noise_variance_matches_configuration(self):
        # zero response: the block is pure noise with variance sigma^2 per entry
        class _Null:
            planar = True

            def response(self, theta, phi=0.0):
                return np.zeros(2, dtype=complex)

        scenario = Scenario.single(0.1, power_w=1.0, snapshots=50_000, noise_power_w=2.0)
        block = gen_snapshots(scenario, _Null(), seed=5)
        variance = np.mean(np.abs(block.samples) ** 2)
        standard_error = 2.0 / math.sqrt(block.samples.size)
        assert abs(variance - 2.0) < 5.0 * standard_error

    def test_polarized_scenario_needs_polarimetric_model(self, planar_antenna):
        scenario = Scenario.single(
            0.4, power_w=1.0, snapshots=4, noise_power_w=0.0,
            polarization=PolarizationState(0.5, 0.0),
        )
        with pytest.raises(ValueError, match="polarimetric"):
            gen_snapshots(scenario, planar_antenna["response"], seed=1)


class TestRss:
    def test_noise_free_unit_modulus_recovers_gain(self, planar_antenna):
        truth = planar_antenna["truth"]
        scenario = Scenario.single(0.4, power_w=1.0, snapshots=8, noise_power_w=0.0)
        block = gen_snapshots(scenario, truth, seed=3)
        assert np.allclose(rss(block), np.abs(truth.response(0.4)) ** 2)

    def test_zero_block(self):
        assert np.all(rss(np.zeros((3, 7), complex)) == 0.0)

    def test_constant_block(self):
        assert np.allclose(rss(np.full((2, 5), 2.0 + 0j)), 4.0)


class TestSampleCov:
    def test_rank_one_outer_product(self):
        block = np.array([[1.0], [1j]])
        expected = np.array([[1.0, -1j], [1j, 1.0]])
        assert np.allclose(sample_cov(block), expected)

    def test_zero_block(self):
        assert np.all(sample_cov(np.zeros((3, 4), complex)) == 0.0)

    def test_diagonal_equals_rss(self, planar_antenna):
        scenario = Scenario.single(0.2, power_w=1.0, snapshots=64, noise_power_w=0.3)
        block = gen_snapshots(scenario, planar_antenna["truth"], seed=2)
        assert np.allclose(np.diag(sample_cov(block)).real, rss(block))

    def test_hermitian_psd(self, planar_antenna):
        scenario = Scenario.single(0.2, power_w=1.0, snapshots=64, noise_power_w=0.3)
        block = gen_snapshots(scenario, planar_antenna["truth"], seed=2)
        cov = sample_cov(block)
        assert np.abs(cov - cov.conj().T).max() < 1e-14
        assert np.linalg.eigvalsh(cov).min() > -1e-12


class TestRssMoments:
    def test_noise_free_limit(self):
        mean, cov = rss_moments(np.array([0.5, 2.0]), 3.0, 0.0, 100)
        assert np.allclose(mean, [1.5, 6.0])
        assert np.all(cov == 0.0)

    def test_unit_case(self):
        mean, cov = rss_moments(np.array([1.0]), 1.0, 1.0, 1)
        assert mean[0] == pytest.approx(2.0)
        assert cov[0, 0] == pytest.approx(3.0)

    def test_covariance_is_diagonal(self):
        _, cov = rss_moments(np.array([1.0, 2.0, 0.5]), 1.0, 0.3, 10)
        assert np.count_nonzero(cov - np.diag(np.diag(cov))) == 0

    def test_monte_carlo_agreement(self, planar_antenna):
        # simulation oracle for the noncentral chi-squared moments
        truth = planar_antenna["truth"]
        gain = np.abs(truth.response(0.7)) ** 2
        snapshots, trials = 200, 4000
        power, noise = 1.3, 0.8
        scenario = Scenario.single(0.7, power_w=power, snapshots=snapshots, noise_power_w=noise)
        values = np.empty((trials, gain.size))
        for trial in range(trials):
            values[trial] = rss(gen_snapshots(scenario, truth, seed=trial))
        mean, cov = rss_moments(gain, power, noise, snapshots)
        variance = np.diag(cov)
        mean_se = np.sqrt(variance / trials)
        var_se = variance * math.sqrt(2.0 / (trials - 1))
        assert np.all(np.abs(values.mean(axis=0) - mean) < 4.0 * mean_se)
        assert np.all(np.abs(values.var(axis=0, ddof=1) - variance) < 4.0 * var_se)

    def test_noise_only_chi_square_scaling(self):
        # (2N / sigma^2) rss has mean 2N and variance 4N
        class _Null:
            planar = True

            def response(self, theta, phi=0.0):
                return np.zeros(3, dtype=complex)

        snapshots, noise, trials = 64, 0.5, 3000
        scenario = Scenario.single(0.1, power_w=1.0, snapshots=snapshots, noise_power_w=noise)
        scaled = np.array(
            [
                2.0 * snapshots / noise * rss(gen_snapshots(scenario, _Null(), seed=t))
                for t in range(trials)
            ]
        ).ravel()
        assert abs(scaled.mean() - 2 * snapshots) < 5.0 * math.sqrt(4 * snapshots / scaled.size)
        assert abs(scaled.var(ddof=1) - 4 * snapshots) < 6.0 * 4 * snapshots * math.sqrt(2.0 / scaled.size)


class TestNoncentrality:
    def test_zero_power(self):
        assert noncentrality(1.0, 0.0, 100) == 0.0

    def test_paper_scale(self):
        assert noncentrality(1.0, 1.0, 1000) == 1000.0

    def test_linearity(self):
        base = noncentrality(0.5, 2.0, 10)
        assert noncentrality(1.0, 2.0, 10) == pytest.approx(2.0 * base)
        assert noncentrality(0.5, 4.0, 10) == pytest.approx(2.0 * base)
        assert noncentrality(0.5, 2.0, 20) == pytest.approx(2.0 * base)


class TestCovExpectation:
    def test_mean_sample_cov_matches_model(self, planar_antenna):
        truth = planar_antenna["truth"]
        theta, power, noise, snapshots, trials = 0.5, 1.2, 0.6, 32, 1200
        scenario = Scenario.single(theta, power_w=power, snapshots=snapshots, noise_power_w=noise)
        acc = np.zeros((4, 4), dtype=complex)
        for trial in range(trials):
            acc += sample_cov(gen_snapshots(scenario, truth, seed=trial))
        mean_cov = acc / trials
        response = truth.response(theta)
        expected = power * np.outer(response, response.conj()) + noise * np.eye(4)
        # entrywise 3-sigma bound with variance ~ |R_ii R_jj| / (N * trials)
        scale = np.sqrt(np.outer(np.diag(expected).real, np.diag(expected).real))
        bound = 3.0 * scale / math.sqrt(snapshots * trials)
        assert np.all(np.abs(mean_cov - expected) < bound + 1e-12)
