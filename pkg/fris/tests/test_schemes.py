import math
import os
import unittest

import numpy as np
from django.test import SimpleTestCase, tag

from fris import oracles, schemes
from fris.ceo import CeoParams
from fris.channel import ChannelSet
from fris.exceptions import InfeasibleConfigurationError
from fris.numerics import RngStream
from fris.schemes import AoParams
from fris.secrecy import rate_from_ratio

FAST = AoParams(max_iters=5, ceo=CeoParams(sample_size=40, max_iters=10))


def assert_monotone(testcase, trace, slack=1e-10):
    for previous, current in zip(trace, trace[1:]):
        testcase.assertGreaterEqual(current, previous - slack * abs(previous))


class SchemeInvariantsMixin:
    def check_result(self, result, power, n_hat=None):
        self.assertAlmostEqual(result.beamformer.power, power, delta=1e-9 * power)
        self.assertAlmostEqual(result.secrecy_rate, rate_from_ratio(result.objective_ratio), delta=1e-12)
        self.assertGreaterEqual(result.secrecy_rate, 0.0)
        if n_hat is not None:
            self.assertEqual(int(result.config.selection.sum()), n_hat)


class TestSelections(SimpleTestCase):
    def test_central_selection(self):
        config = schemes.central_selection(100, 16, 3)
        np.testing.assert_array_equal(config.selected, np.arange(42, 58))
        self.assertFalse(config.phase_index.any())

    def test_central_selection_full(self):
        self.assertTrue(schemes.central_selection(16, 16, 1).selection.all())

    def test_central_selection_infeasible(self):
        with self.assertRaises(InfeasibleConfigurationError):
            schemes.central_selection(8, 9, 1)

    def test_random_selection(self):
        config = schemes.random_selection(20, 5, 2, RngStream(3), random_phases=True)
        self.assertEqual(config.budget, 5)
        self.assertFalse(config.phase_index[~config.selection].any())
        again = schemes.random_selection(20, 5, 2, RngStream(3), random_phases=True)
        self.assertEqual(config, again)
        plain = schemes.random_selection(20, 5, 2, RngStream(3))
        self.assertFalse(plain.phase_index.any())


class TestAoCeo(SchemeInvariantsMixin, SimpleTestCase):
    def test_invariants_and_monotone_trace(self):
        channels, power, noise_power = oracles.small_instance(1, num_antennas=4, num_locations=20)
        result = schemes.run_ao_ceo(channels, power, noise_power, 4, 3, FAST, RngStream(1))
        self.check_result(result, power, n_hat=4)
        self.assertEqual(result.scheme, schemes.AO_CEO)
        self.assertEqual(len(result.trace), result.iterations)
        self.assertLessEqual(result.iterations, FAST.max_iters)
        assert_monotone(self, result.trace)
        self.assertAlmostEqual(result.objective_ratio, result.trace[-1], delta=1e-9 * result.trace[-1])

    def test_more_iterations_never_hurt(self):
        channels, power, noise_power = oracles.small_instance(2, num_antennas=4, num_locations=20)
        one = schemes.run_ao_ceo(channels, power, noise_power, 4, 2,
                                 AoParams(max_iters=1, ceo=FAST.ceo), RngStream(2))
        five = schemes.run_ao_ceo(channels, power, noise_power, 4, 2,
                                  AoParams(max_iters=5, ceo=FAST.ceo), RngStream(2))
        self.assertGreaterEqual(five.objective_ratio, one.objective_ratio * (1 - 1e-10))

    def test_near_joint_optimum_on_small_instances(self):
        hits = 0
        for seed in range(10):
            channels, power, noise_power = oracles.small_instance(seed)
            _, optimum = oracles.exhaustive_joint_optimum(channels, power, noise_power, 2, 1)
            result = schemes.run_ao_ceo(channels, power, noise_power, 2, 1, AoParams(), RngStream(seed, (1,)))
            self.assertLessEqual(result.objective_ratio, optimum * (1 + 1e-9))
            hits += result.objective_ratio >= 0.98 * optimum
        self.assertGreaterEqual(hits, 8)

    def test_budget_too_large(self):
        channels, power, noise_power = oracles.small_instance(3)
        with self.assertRaises(InfeasibleConfigurationError):
            schemes.run_ao_ceo(channels, power, noise_power, 7, 1, FAST, RngStream(3))

    def test_deterministic(self):
        channels, power, noise_power = oracles.small_instance(4, num_locations=12)
        first = schemes.run_ao_ceo(channels, power, noise_power, 3, 2, FAST, RngStream(4))
        second = schemes.run_ao_ceo(channels, power, noise_power, 3, 2, FAST, RngStream(4))
        self.assertEqual(first.objective_ratio, second.objective_ratio)
        self.assertEqual(first.config, second.config)


class TestBaselines(SchemeInvariantsMixin, SimpleTestCase):
    def setUp(self):
        self.channels, self.power, self.noise_power = oracles.small_instance(
            5, num_antennas=4, num_locations=16)

    def run_named(self, scheme, n_hat=4, bits=2, seed=0):
        return schemes.run_scheme(scheme, self.channels, self.power, self.noise_power, n_hat, bits,
                                  FAST, RngStream(seed))

    def test_every_scheme_runs(self):
        for scheme in schemes.SCHEMES:
            result = self.run_named(scheme)
            self.assertEqual(result.scheme, scheme)
            self.check_result(result, self.power, n_hat=None if scheme == schemes.NO_SURFACE else 4)

    def test_unknown_scheme(self):
        with self.assertRaises(ValueError):
            self.run_named("sdr_relaxation")

    def test_conventional_ris_uses_central_block(self):
        result = self.run_named(schemes.CONVENTIONAL_RIS)
        np.testing.assert_array_equal(result.config.selected, [6, 7, 8, 9])
        assert_monotone(self, result.trace)

    def test_random_selection_monotone(self):
        assert_monotone(self, self.run_named(schemes.RANDOM_SELECTION_PHASE_OPT).trace)

    def test_full_budget_reduces_to_conventional(self):
        conventional = self.run_named(schemes.CONVENTIONAL_RIS, n_hat=16)
        for scheme in (schemes.RANDOM_SELECTION_PHASE_OPT, schemes.AO_CEO):
            result = self.run_named(scheme, n_hat=16)
            self.assertEqual(result.scheme, scheme)
            self.assertEqual(conventional.config, result.config)
            self.assertEqual(conventional.objective_ratio, result.objective_ratio)

    def test_random_selection_without_refinement(self):
        unrefined = schemes.run_random_selection_phase_opt(self.channels, self.power, self.noise_power, 4, 2,
                                                           FAST, RngStream(7), refine=False)
        one_shot = schemes.run_fris_random_phases(self.channels, self.power, self.noise_power, 4, 2,
                                                  RngStream(7))
        self.assertEqual(unrefined.config, one_shot.config)
        self.assertEqual(unrefined.objective_ratio, one_shot.objective_ratio)

    def test_random_phases_is_one_shot(self):
        result = self.run_named(schemes.FRIS_RANDOM_PHASES)
        self.assertEqual(result.iterations, 1)
        self.assertEqual(result.trace, [])

    def test_random_phases_with_ceo_selection(self):
        result = self.run_named(schemes.FRIS_RANDOM_PHASES_CEO)
        self.assertEqual(result.scheme, schemes.FRIS_RANDOM_PHASES_CEO)
        self.assertEqual(result.config.budget, 4)

    def test_unpolished_variant(self):
        result = self.run_named(schemes.AO_CEO_UNPOLISHED)
        self.assertEqual(result.scheme, schemes.AO_CEO_UNPOLISHED)
        assert_monotone(self, result.trace)


class TestNoSurface(SimpleTestCase):
    def test_independent_of_grid_size(self):
        small, power, noise_power = oracles.small_instance(9, num_antennas=4, num_locations=16)
        large, _, _ = oracles.small_instance(9, num_antennas=4, num_locations=100)
        self.assertEqual(schemes.run_no_surface(small, power, noise_power).secrecy_rate,
                         schemes.run_no_surface(large, power, noise_power).secrecy_rate)

    def test_no_eavesdropper_leakage(self):
        h_dB = np.array([0.3 + 0.1j, -0.2j])
        channels = ChannelSet(h_dB=h_dB, h_dE=np.zeros(2), G=np.ones((2, 2)), h_rB=np.ones(2),
                              h_rE=np.ones(2), corr_root=np.eye(2))
        result = schemes.run_no_surface(channels, 2.0, 0.01)
        expected = math.log2(1.0 + 2.0 * np.linalg.norm(h_dB) ** 2 / 0.01)
        self.assertAlmostEqual(result.secrecy_rate, expected, places=10)
        self.assertIsNone(result.config)


@tag("slow")
@unittest.skipUnless(os.environ.get("FRIS_SLOW_TESTS"), "set FRIS_SLOW_TESTS=1 to run")
class TestSmallInstanceOracle(SimpleTestCase):
    def test_within_two_percent_of_joint_optimum(self):
        hits = 0
        for seed in range(100):
            channels, power, noise_power = oracles.small_instance(1000 + seed)
            _, optimum = oracles.exhaustive_joint_optimum(channels, power, noise_power, 2, 1)
            result = schemes.run_ao_ceo(channels, power, noise_power, 2, 1, AoParams(),
                                        RngStream(1000 + seed, (1,)))
            self.assertLessEqual(result.objective_ratio, optimum * (1 + 1e-9))
            hits += result.objective_ratio >= 0.98 * optimum
        self.assertGreaterEqual(hits, 90)

    def test_ao_converges_on_default_instances(self):
        for seed in range(100):
            channels, power, noise_power = oracles.small_instance(seed, num_antennas=4, num_locations=100)
            result = schemes.run_ao_ceo(channels, power, noise_power, 16, 3, AoParams(), RngStream(seed, (1,)))
            assert_monotone(self, result.trace)
            self.assertTrue(result.iterations < 20 or
                            result.trace[-1] - result.trace[-2] < 1e-3 * abs(result.trace[-2]))
