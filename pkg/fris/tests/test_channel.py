import math

import numpy as np
from django.test import SimpleTestCase

from fris import channel, numerics
from fris.channel import FadingParams, PathLossModel, SystemGeometry
from fris.exceptions import DomainError
from fris.numerics import RngStream


class TestGeometry(SimpleTestCase):
    def test_default_spacing_is_eighth_wavelength(self):
        geometry = SystemGeometry()
        self.assertAlmostEqual(geometry.spacing_over_wavelength, 0.125, places=12)
        self.assertAlmostEqual(geometry.spacing, 0.0125, places=12)

    def test_validation(self):
        with self.assertRaises(ValueError):
            SystemGeometry(num_locations=1)
        with self.assertRaises(ValueError):
            SystemGeometry(aperture=0.0)
        with self.assertRaises(ValueError):
            SystemGeometry(eve_position=(50.0, 0.0, 1.5))
        with self.assertRaises(ValueError):
            SystemGeometry(fris_axis=(0.0, 0.0, 0.0))

    def test_unit_conversions(self):
        self.assertAlmostEqual(channel.dbm_to_watts(-80.0), 1e-11, delta=1e-24)
        self.assertAlmostEqual(channel.dbm_to_watts(30.0), 1.0, places=12)
        self.assertAlmostEqual(channel.db_to_linear(5.0), 10 ** 0.5, places=12)


class TestBuildCorrelation(SimpleTestCase):
    def test_single_location(self):
        np.testing.assert_array_equal(channel.build_correlation(1, 0.5), [[1.0]])

    def test_half_wavelength_pair(self):
        R = channel.build_correlation(2, 0.5)
        self.assertAlmostEqual(R[0, 1], -0.3042421776440938, places=9)
        self.assertEqual(R[0, 0], 1.0)

    def test_toeplitz_and_symmetric(self):
        R = channel.build_correlation(8, 0.3)
        for i in range(7):
            for j in range(7):
                self.assertEqual(R[i, j], R[i + 1, j + 1])
                self.assertEqual(R[i, j], R[j, i])
        np.testing.assert_array_equal(np.diag(R), np.ones(8))
        self.assertEqual(R[0, 3], numerics.bessel_j0(2 * math.pi * 3 * 0.3))

    def test_psd_after_construction(self):
        R = channel.build_correlation(100, 0.125)
        self.assertGreaterEqual(numerics.hermitian_eig(R)[0][0], -1e-8)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            channel.build_correlation(0, 0.5)
        with self.assertRaises(ValueError):
            channel.build_correlation(4, 0.0)


class TestPathLoss(SimpleTestCase):
    def test_unit_distance(self):
        for exponent in (2.0, 2.2, 2.8):
            self.assertAlmostEqual(channel.path_loss_linear(1.0, exponent), 1e-3, delta=1e-15)

    def test_reference_values(self):
        self.assertAlmostEqual(channel.path_loss_linear(10.0, 2.2), 10 ** -5.2, delta=1e-16)
        expected = 10 ** ((-30.0 - 28.0 * math.log10(50.0)) / 10.0)
        self.assertAlmostEqual(channel.path_loss_linear(50.0, 2.8) / expected, 1.0, places=12)

    def test_non_positive_distance(self):
        for d in (0.0, -1.0):
            with self.assertRaises(DomainError):
                channel.path_loss_linear(d, 2.2)

    def test_blockage_only_on_direct_links(self):
        geometry = SystemGeometry()
        blocked = channel.link_gains(geometry, PathLossModel())
        clear = channel.link_gains(geometry, PathLossModel(blockage_direct=0.0))
        self.assertAlmostEqual(blocked.direct_bob / clear.direct_bob, 10 ** -2.5, places=12)
        self.assertAlmostEqual(blocked.direct_eve / clear.direct_eve, 10 ** -2.5, places=12)
        self.assertEqual(blocked.ap_fris, clear.ap_fris)
        self.assertEqual(blocked.bob, clear.bob)
        self.assertEqual(blocked.eve, clear.eve)


class TestLosComponent(SimpleTestCase):
    def test_broadside_is_all_ones(self):
        # Both axes orthogonal to the AP-FRIS direction (-45, -10, 5).
        axis = (10.0, -45.0, 0.0)
        geometry = SystemGeometry(num_locations=6, fris_axis=axis, ap_axis=axis)
        np.testing.assert_allclose(channel.los_component(geometry, 3), np.ones((6, 3)), atol=1e-12)

    def test_unit_modulus_rank_one(self):
        G = channel.los_component(SystemGeometry(), 4)
        self.assertEqual(G.shape, (100, 4))
        np.testing.assert_allclose(np.abs(G), 1.0, atol=1e-12)
        singular = np.linalg.svd(G, compute_uv=False)
        self.assertLessEqual(singular[1], 1e-10 * singular[0])


class TestRealizeChannels(SimpleTestCase):
    def realize(self, seed=0, geometry=None, fading=None, M=3, **kwargs):
        return channel.realize_channels(geometry or SystemGeometry(num_locations=8), PathLossModel(),
                                        fading or FadingParams(), M, RngStream(seed), **kwargs)

    def test_shapes_and_read_only(self):
        channels = self.realize()
        self.assertEqual(channels.h_dB.shape, (3,))
        self.assertEqual(channels.G.shape, (8, 3))
        self.assertEqual(channels.h_rE.shape, (8,))
        self.assertEqual(channels.num_antennas, 3)
        self.assertEqual(channels.num_locations, 8)
        with self.assertRaises(ValueError):
            channels.h_dB[0] = 0.0

    def test_deterministic(self):
        first, second = self.realize(seed=4), self.realize(seed=4)
        self.assertEqual(first.digest(), second.digest())
        np.testing.assert_array_equal(first.G, second.G)
        self.assertNotEqual(first.digest(), self.realize(seed=5).digest())

    def test_logs_realization(self):
        with self.assertLogs("fris.channel", level="DEBUG") as cm:
            self.realize(seed=6)
        self.assertEqual(len(cm.output), 1)
        self.assertIn("seed=6 key=(): N=8 M=3", cm.output[0])

    def test_root_reproduces_correlation(self):
        channels = self.realize(geometry=SystemGeometry())
        root = channels.corr_root
        R = channels.correlation
        self.assertLessEqual(np.linalg.norm(root @ root.conj().T - R) / np.linalg.norm(R), 1e-8)

    def test_correlation_depends_on_spacing_ratio_only(self):
        short = self.realize(geometry=SystemGeometry(num_locations=8, wavelength=0.1))
        long = self.realize(geometry=SystemGeometry(num_locations=8, wavelength=0.2))
        np.testing.assert_array_equal(short.correlation, long.correlation)
        np.testing.assert_array_equal(short.corr_root, long.corr_root)

    def test_strong_rician_limit(self):
        geometry = SystemGeometry(num_locations=8)
        channels = self.realize(geometry=geometry, fading=FadingParams(rician_k=1e9))
        gains = channel.link_gains(geometry, PathLossModel())
        los = math.sqrt(gains.ap_fris) * channel.los_component(geometry, 3)
        self.assertLessEqual(np.linalg.norm(channels.G - los) / np.linalg.norm(channels.G), 1e-4)

    def test_swapping_users_swaps_channels(self):
        geometry = SystemGeometry(num_locations=8)
        swapped = SystemGeometry(bob_position=geometry.eve_position, eve_position=geometry.bob_position,
                                 num_locations=8)
        streams = dict(channel.LINK_STREAMS, direct_bob=1, direct_eve=0, reflect_bob=4, reflect_eve=3)
        original = self.realize(seed=2, geometry=geometry)
        mirrored = self.realize(seed=2, geometry=swapped, link_streams=streams)
        np.testing.assert_allclose(mirrored.h_dB, original.h_dE, rtol=1e-14)
        np.testing.assert_allclose(mirrored.h_dE, original.h_dB, rtol=1e-14)
        np.testing.assert_allclose(mirrored.h_rB, original.h_rE, rtol=1e-14)
        np.testing.assert_allclose(mirrored.h_rE, original.h_rB, rtol=1e-14)
        np.testing.assert_array_equal(mirrored.G, original.G)

    def test_direct_link_power_includes_blockage(self):
        geometry = SystemGeometry(num_locations=4)
        gains = channel.link_gains(geometry, PathLossModel())
        energy = np.mean([np.linalg.norm(self.realize(seed=s, geometry=geometry, M=4).h_dB) ** 2
                          for s in range(2000)])
        self.assertAlmostEqual(energy / (4 * gains.direct_bob), 1.0, delta=0.1)

    def test_reflect_covariance(self):
        geometry = SystemGeometry(num_locations=4, aperture=0.375)
        gains = channel.link_gains(geometry, PathLossModel())
        samples = np.array([self.realize(seed=s, geometry=geometry, M=1).h_rB for s in range(10000)])
        covariance = samples.T @ samples.conj() / samples.shape[0]
        R = channel.build_correlation(4, geometry.spacing_over_wavelength)
        self.assertLessEqual(np.max(np.abs(covariance - gains.bob * R)), 0.05 * gains.bob)
