import math

import numpy as np
from django.test import SimpleTestCase

from fris import beamform, oracles
from fris.numerics import complex_gaussian


def ratio_of(h_b, h_e, beamformer, power, noise_power):
    return beamform.beamformer_ratio(h_b, h_e, beamformer.w / math.sqrt(power), power, noise_power)


class TestSolveP2(SimpleTestCase):
    def setUp(self):
        self.generator = np.random.default_rng(21)

    def test_full_power(self):
        for M in (1, 2, 4, 8):
            h_b, h_e = complex_gaussian(self.generator, (M,)), complex_gaussian(self.generator, (M,))
            w = beamform.solve_p2(h_b, h_e, 3.0, 0.5)
            self.assertAlmostEqual(w.power, 3.0, delta=1e-9 * 3.0)

    def test_single_antenna(self):
        w = beamform.solve_p2(np.array([0.3 - 0.2j]), np.array([1.0j]), 2.0, 1.0)
        self.assertEqual(w.w[0].imag, 0.0)
        self.assertAlmostEqual(w.w[0].real, math.sqrt(2.0), places=14)

    def test_no_eavesdropper_gives_mrt(self):
        h_b = complex_gaussian(self.generator, (4,))
        w = beamform.solve_p2(h_b, np.zeros(4), 2.0, 0.1)
        mrt = h_b / np.linalg.norm(h_b)
        self.assertAlmostEqual(abs(np.vdot(mrt, w.w / math.sqrt(2.0))), 1.0, places=10)
        expected = 1.0 + 2.0 * np.linalg.norm(h_b) ** 2 / 0.1
        self.assertAlmostEqual(ratio_of(h_b, np.zeros(4), w, 2.0, 0.1), expected, delta=1e-9 * expected)

    def test_parallel_channels(self):
        h_b = complex_gaussian(self.generator, (3,))
        c = 0.4 - 0.3j
        h_e = c * h_b
        power, noise_power = 5.0, 0.2
        w = beamform.solve_p2(h_b, h_e, power, noise_power)
        gain = np.linalg.norm(h_b) ** 2
        expected = (noise_power + power * gain) / (noise_power + power * abs(c) ** 2 * gain)
        self.assertAlmostEqual(ratio_of(h_b, h_e, w, power, noise_power), expected, delta=1e-9 * expected)

    def test_beats_random_directions(self):
        for M in (2, 4, 8):
            for _ in range(5):
                h_b, h_e = complex_gaussian(self.generator, (M,)), complex_gaussian(self.generator, (M,))
                w = beamform.solve_p2(h_b, h_e, 1.0, 1.0)
                best = ratio_of(h_b, h_e, w, 1.0, 1.0)
                bound = oracles.sampled_ratio_bound(h_b, h_e, 1.0, 1.0, self.generator, 10 ** 4)
                self.assertLessEqual(bound, best + 1e-9)

    def test_improves_on_any_previous_beamformer(self):
        h_b, h_e = complex_gaussian(self.generator, (4,)), complex_gaussian(self.generator, (4,))
        previous = complex_gaussian(self.generator, (4,))
        previous = previous / np.linalg.norm(previous)
        w = beamform.solve_p2(h_b, h_e, 2.0, 0.3)
        self.assertGreaterEqual(ratio_of(h_b, h_e, w, 2.0, 0.3),
                                beamform.beamformer_ratio(h_b, h_e, previous, 2.0, 0.3) - 1e-10)

    def test_deterministic(self):
        h_b, h_e = complex_gaussian(self.generator, (4,)), complex_gaussian(self.generator, (4,))
        np.testing.assert_array_equal(beamform.solve_p2(h_b, h_e, 1.0, 1.0).w,
                                      beamform.solve_p2(h_b, h_e, 1.0, 1.0).w)

    def test_zero_legitimate_channel(self):
        h_e = np.array([1.0, 1.0j])
        with self.assertLogs("fris.beamform", level="WARNING"):
            w = beamform.solve_p2(np.zeros(2), h_e, 1.0, 1.0)
        self.assertAlmostEqual(w.power, 1.0, places=12)
        self.assertLess(abs(np.vdot(h_e, w.w)), 1e-12)

    def test_invalid_inputs(self):
        with self.assertRaises(ValueError):
            beamform.solve_p2(np.ones(2), np.ones(3), 1.0, 1.0)
        with self.assertRaises(ValueError):
            beamform.solve_p2(np.ones(2), np.ones(2), 0.0, 1.0)
        with self.assertRaises(ValueError):
            beamform.solve_p2(np.ones(2), np.ones(2), 1.0, -1.0)


class TestSolveP2Subspace(SimpleTestCase):
    def setUp(self):
        self.generator = np.random.default_rng(33)

    def test_matches_full_solver(self):
        for M in (2, 4, 8):
            for _ in range(10):
                h_b, h_e = complex_gaussian(self.generator, (M,)), complex_gaussian(self.generator, (M,))
                full = ratio_of(h_b, h_e, beamform.solve_p2(h_b, h_e, 4.0, 0.7), 4.0, 0.7)
                fast = ratio_of(h_b, h_e, beamform.solve_p2_subspace(h_b, h_e, 4.0, 0.7), 4.0, 0.7)
                self.assertAlmostEqual(fast, full, delta=1e-9 * full)

    def test_two_antennas_same_vector(self):
        h_b, h_e = complex_gaussian(self.generator, (2,)), complex_gaussian(self.generator, (2,))
        np.testing.assert_allclose(beamform.solve_p2_subspace(h_b, h_e, 1.0, 1.0).w,
                                   beamform.solve_p2(h_b, h_e, 1.0, 1.0).w, atol=1e-9)

    def test_orthogonal_channels(self):
        h_b = np.array([3.0, 0.0, 0.0, 0.0], dtype=complex)
        h_e = np.array([0.0, 1.0, 0.0, 0.0], dtype=complex)
        w = beamform.solve_p2_subspace(h_b, h_e, 100.0, 1e-3)
        np.testing.assert_allclose(w.w / 10.0, [1.0, 0.0, 0.0, 0.0], atol=1e-9)
        self.assertLess(abs(np.vdot(h_e, w.w)) ** 2 / 1e-3, 1e-9)

    def test_parallel_channels_fall_back(self):
        h_b = complex_gaussian(self.generator, (4,))
        h_e = 0.5 * h_b
        np.testing.assert_array_equal(beamform.solve_p2_subspace(h_b, h_e, 1.0, 1.0).w,
                                      beamform.solve_p2(h_b, h_e, 1.0, 1.0).w)

    def test_full_power(self):
        h_b, h_e = complex_gaussian(self.generator, (8,)), complex_gaussian(self.generator, (8,))
        self.assertAlmostEqual(beamform.solve_p2_subspace(h_b, h_e, 6.0, 1.0).power, 6.0, delta=6e-9)
