import math

import numpy as np
import pytest

from qdephasing.channels import ChannelKind, NoiseRates, apply_closed_form, channel_params
from qdephasing.oracle import (
    ensemble_average,
    ensemble_series,
    oracle_report,
    phase_paths,
    sample_trajectory,
    trajectory_phases,
)
from qdephasing.qmat import pure_density, validate
from qdephasing.rng import counter_normals

from conftest import BELL, ROBUST_23, random_mixed, random_pure

R3 = 1 / math.sqrt(3)
PHI1 = np.array([R3, R3, 0, R3])
RATES = NoiseRates(0.5, 1.0, 2.0)


class TestSampleTrajectory:
    def test_zero_rates_exact(self, rng):
        psi = random_pure(rng)
        out = sample_trajectory(psi, 3.0, NoiseRates(), seed=1, index=4)
        assert np.array_equal(out, pure_density(psi))

    def test_diagonal_exact(self, rng):
        psi = random_pure(rng)
        for k in range(20):
            out = sample_trajectory(psi, 2.0, RATES, seed=9, index=k)
            assert np.array_equal(np.diag(out), np.diag(pure_density(psi)))
            assert validate(out).passed

    def test_rho23_immune_to_collective(self, rng):
        psi = random_pure(rng)
        for k in range(20):
            out = sample_trajectory(psi, 5.0, NoiseRates(Gamma=3.0), seed=2, index=k)
            assert out[1, 2] == pytest.approx(psi[1] * np.conj(psi[2]), abs=1e-15)

    def test_deterministic(self):
        a = sample_trajectory(BELL, 1.0, RATES, 5, 17)
        b = sample_trajectory(BELL, 1.0, RATES, 5, 17)
        assert np.array_equal(a, b)

    def test_mixed_input(self, rng):
        rho = random_mixed(rng)
        out = sample_trajectory(rho, 1.0, RATES, 5, 0)
        assert np.array_equal(np.diag(out), np.diag(rho))

    def test_negative_time(self):
        with pytest.raises(ValueError):
            sample_trajectory(BELL, -1.0, RATES, 0, 0)


def test_phases_2_plus_3_cancel():
    z = counter_normals(4, np.arange(500), 3)
    phi = trajectory_phases(z, 1.3, RATES)
    np.testing.assert_allclose(phi[:, 1] + phi[:, 2], 0, atol=1e-15)


class TestEnsemble:
    def test_refuses_small_n(self):
        with pytest.raises(ValueError, match="at least 100"):
            ensemble_average(BELL, 1.0, RATES, 99, 0)

    def test_bell_collective_gamma4(self):
        g = 0.7
        t = 2 / g
        ens = ensemble_average(BELL, t, NoiseRates(Gamma=g), 100_000, 123)
        expected = math.exp(-4) / 2
        assert abs(ens.mean[0, 3].real - expected) <= 5 * ens.stderr_re[0, 3]
        assert expected == pytest.approx(0.00916, abs=1e-5)

    def test_robust_state_exact(self):
        ens = ensemble_average(ROBUST_23, 4.0, NoiseRates(Gamma=2.0), 100, 1)
        np.testing.assert_allclose(ens.mean, pure_density(ROBUST_23), atol=1e-15)
        assert np.all(ens.stderr <= 1e-15)

    def test_mean_is_valid_state(self, rng):
        ens = ensemble_average(random_pure(rng), 1.0, RATES, 2000, 3)
        assert validate(ens.mean).passed

    def test_stderr_scales(self, rng):
        psi = random_pure(rng)
        small = ensemble_average(psi, 0.8, RATES, 20_000, 8)
        big = ensemble_average(psi, 0.8, RATES, 80_000, 8)
        mask = small.stderr_re > 1e-6
        ratio = small.stderr_re[mask] / big.stderr_re[mask]
        np.testing.assert_allclose(ratio, 2.0, rtol=0.05)

    def test_generic_state_5sigma(self, rng):
        psi = random_pure(rng)
        for ens in ensemble_series(psi, [0.3, 1.0, 2.5], RATES, 100_000, 77):
            cf = apply_closed_form(ChannelKind.FULL_TWELVE, channel_params(ens.t, RATES), pure_density(psi))
            z_re, z_im = ens.z_scores(cf)
            assert max(z_re.max(), z_im.max()) <= 5

    def test_bit_reproducible_across_workers(self):
        a = ensemble_series(PHI1, [0.5, 2.0], RATES, 30_000, 42, workers=1)
        b = ensemble_series(PHI1, [0.5, 2.0], RATES, 30_000, 42, workers=4)
        for x, y in zip(a, b):
            assert np.array_equal(x.mean, y.mean)
            assert np.array_equal(x.stderr_re, y.stderr_re)

    def test_prefix_of_larger_ensemble(self):
        # trajectory i is the same draw whatever n is
        ens = ensemble_average(PHI1, 1.0, RATES, 100, 42)
        manual = np.mean([sample_trajectory(PHI1, 1.0, RATES, 42, k) for k in range(100)], axis=0)
        np.testing.assert_allclose(ens.mean, manual, atol=1e-15)


class TestPhasePaths:
    def test_shape_and_start(self):
        p = phase_paths(1, np.arange(10), [0.0, 0.5, 1.0], RATES)
        assert p.shape == (10, 3, 4)
        assert np.all(p[:, 0, :] == 0)

    def test_marginals_match_single_draw(self):
        n = 100_000
        t = 1.5
        paths = phase_paths(6, np.arange(n), [t / 2, t], RATES)[:, 1, :]
        single = trajectory_phases(counter_normals(6, np.arange(n), 3), t, RATES)
        for k in range(4):
            v_paths, v_single = paths[:, k].var(), single[:, k].var()
            se = v_single * math.sqrt(2 / n)
            assert abs(v_paths - v_single) < 5 * math.sqrt(2) * se
            assert abs(paths[:, k].mean()) < 5 * math.sqrt(v_single / n)

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            phase_paths(1, [0], [1.0, 0.5], RATES)


class TestReport:
    def test_t0_row_zero(self):
        rep = oracle_report(PHI1, RATES, [0.0, 1.0], 1000, 0)
        assert rep.rows[0].max_z == 0.0
        assert np.all(rep.rows[0].z_re == 0) and np.all(rep.rows[0].z_im == 0)

    def test_pass_phi1(self):
        rep = oracle_report(PHI1, RATES, [0.2, 1.0, 3.0], 100_000, 2003)
        assert rep.passed, rep.worst()
        row = rep.rows[1]
        p = channel_params(row.t, RATES)
        # class-1 concurrence without the collective field would be 2 gA gB |a1 a4|; the
        # collective part reduces it further, so compare MC with the closed form
        assert abs(row.C_mc - row.C_closed) <= 5 * row.C_stderr + 1e-3
        assert row.C_closed <= 2 * p.gamma_A * p.gamma_B / 3 + 1e-12

    def test_local_only_concurrence_law(self):
        rates = NoiseRates(0.0, 1.0, 2.0)
        rep = oracle_report(PHI1, rates, [0.5], 100_000, 5)
        p = channel_params(0.5, rates)
        row = rep.rows[0]
        assert row.C_closed == pytest.approx(2 * p.gamma_A * p.gamma_B / 3, abs=1e-12)
        assert abs(row.C_mc - row.C_closed) <= 5 * row.C_stderr

    def test_wrong_closed_form_is_caught(self):
        # sanity: the oracle detects a mismatched model
        ens = ensemble_average(PHI1, 1.0, RATES, 100_000, 1)
        wrong = apply_closed_form("AB", channel_params(1.0, RATES), pure_density(PHI1))
        z_re, _ = ens.z_scores(wrong)
        assert z_re.max() > 5
