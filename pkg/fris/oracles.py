"""Brute-force references for small instances.

Used by ``manage.py fris selftest`` and the test suite. Nothing here is
fast; sizes are meant to stay at a few dozen configurations.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np
from scipy import integrate

from . import beamform, schemes
from .channel import FadingParams, PathLossModel, SystemGeometry, build_correlation, realize_channels
from .numerics import RngStream, bessel_j0, complex_gaussian, max_generalized_rayleigh, psd_matrix_root
from .secrecy import FrisConfig, ObjectiveEvaluator, effective_channels, objective_ratio

logger = logging.getLogger(__name__)


def j0_integral(x):
    """J0(x) = (1/pi) int_0^pi cos(x sin t) dt, by adaptive quadrature"""
    value, _ = integrate.quad(lambda t: math.cos(x * math.sin(t)), 0.0, math.pi,
                              epsabs=1e-13, epsrel=1e-13, limit=200)
    return value / math.pi


def all_configs(N, n_hat, bits):
    """Every feasible (selection, phase) pair: C(N, N_hat) * 2^(B N_hat) configurations"""
    levels = range(2 ** bits)
    for chosen in combinations(range(N), n_hat):
        for phases in product(levels, repeat=n_hat):
            phase_index = np.zeros(N, dtype=np.int64)
            phase_index[list(chosen)] = phases
            yield FrisConfig.from_indices(N, chosen, bits, phase_index)


def exhaustive_joint_optimum(channels, power, noise_power, n_hat, bits):
    """Best (config, ratio) with each config paired with its optimal beamformer"""
    best_config, best_ratio = None, -np.inf
    for config in all_configs(channels.num_locations, n_hat, bits):
        h_b, h_e = effective_channels(channels, config)
        w = beamform.solve_p2(h_b, h_e, power, noise_power)
        ratio = objective_ratio(channels, config, w, noise_power)
        if ratio > best_ratio:
            best_config, best_ratio = config, ratio
    return best_config, best_ratio


def exhaustive_phases(channels, w, config, noise_power):
    """Best phases for a frozen selection and beamformer"""
    evaluator = ObjectiveEvaluator(channels, w, noise_power)
    selected = config.selected
    best_config, best_ratio = config, evaluator.ratio(config)
    for phases in product(range(2 ** config.bits), repeat=selected.size):
        phase_index = np.zeros(config.num_locations, dtype=np.int64)
        phase_index[selected] = phases
        candidate = config.with_phases(phase_index)
        ratio = evaluator.ratio(candidate)
        if ratio > best_ratio:
            best_config, best_ratio = candidate, ratio
    return best_config, best_ratio


def random_unit_vectors(generator, M, count):
    v = complex_gaussian(generator, (count, M))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sampled_ratio_bound(h_b, h_e, power, noise_power, generator, count=10 ** 4):
    """Largest beamformer ratio over ``count`` random unit directions"""
    v = random_unit_vectors(generator, h_b.shape[0], count)
    signal_b = np.abs(v @ h_b.conj()) ** 2
    signal_e = np.abs(v @ h_e.conj()) ** 2
    return float(np.max((noise_power + power * signal_b) / (noise_power + power * signal_e)))


def sampled_rayleigh_bound(A, B, generator, count=10 ** 5):
    v = random_unit_vectors(generator, A.shape[0], count)
    numerator = np.einsum("ki,ij,kj->k", v.conj(), A, v).real
    denominator = np.einsum("ki,ij,kj->k", v.conj(), B, v).real
    return float(np.max(numerator / denominator))


def small_instance(seed, num_antennas=2, num_locations=6, power_dbm=20.0):
    """Default geometry shrunk to ``num_locations`` grid points"""
    geometry = SystemGeometry(num_locations=num_locations)
    channels = realize_channels(geometry, PathLossModel(), FadingParams(), num_antennas, RngStream(seed))
    return channels, 10.0 ** ((power_dbm - 30.0) / 10.0), FadingParams().noise_power


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        return f"[{'ok' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _bessel_check():
    grid = np.linspace(0.0, 50.0, 50)
    error = max(abs(bessel_j0(x) - j0_integral(x)) for x in grid)
    return Check("bessel_j0", error <= 1e-8, f"max |error| {error:.2e} on [0, 50]")


def _root_check():
    worst = 0.0
    for N in (8, 50, 100):
        for spacing in (1.0 / 8.0, 0.5):
            R = build_correlation(N, spacing)
            L = psd_matrix_root(R)
            worst = max(worst, np.linalg.norm(L @ L.conj().T - R) / np.linalg.norm(R))
    return Check("psd_matrix_root", worst <= 1e-8, f"max relative residual {worst:.2e}")


def _beamformer_check(seed, instances):
    generator = RngStream(seed, (7,)).generator()
    worst_gap, worst_mismatch = -np.inf, 0.0
    for M in (2, 4, 8):
        for _ in range(instances):
            h_b, h_e = complex_gaussian(generator, (M,)), complex_gaussian(generator, (M,))
            full = beamform.solve_p2(h_b, h_e, 1.0, 1.0)
            fast = beamform.solve_p2_subspace(h_b, h_e, 1.0, 1.0)
            ratio = beamform.beamformer_ratio(h_b, h_e, full.w, 1.0, 1.0)
            fast_ratio = beamform.beamformer_ratio(h_b, h_e, fast.w, 1.0, 1.0)
            bound = sampled_ratio_bound(h_b, h_e, 1.0, 1.0, generator, 2000)
            worst_gap = max(worst_gap, bound - ratio)
            worst_mismatch = max(worst_mismatch, abs(fast_ratio - ratio) / ratio)
    passed = worst_gap <= 1e-9 and worst_mismatch <= 1e-9
    return Check("solve_p2", passed,
                 f"sampled excess {worst_gap:.2e}, subspace mismatch {worst_mismatch:.2e}")


def _rayleigh_check(seed):
    generator = RngStream(seed, (8,)).generator()
    X = complex_gaussian(generator, (4, 4))
    Y = complex_gaussian(generator, (4, 4))
    A = X @ X.conj().T
    B = Y @ Y.conj().T + np.eye(4)
    value, _ = max_generalized_rayleigh(A, B)
    bound = sampled_rayleigh_bound(A, B, generator, 20000)
    return Check("max_generalized_rayleigh", bound <= value * (1 + 1e-12),
                 f"value {value:.6g}, sampled max {bound:.6g}")


def _ao_check(seed, instances):
    params = schemes.AoParams()
    hits, exceeded = 0, 0
    for index in range(instances):
        channels, power, noise_power = small_instance(seed + index)
        _, optimum = exhaustive_joint_optimum(channels, power, noise_power, 2, 1)
        result = schemes.run_ao_ceo(channels, power, noise_power, 2, 1, params,
                                    RngStream(seed + index, (1,)))
        if result.objective_ratio >= optimum * 0.98:
            hits += 1
        if result.objective_ratio > optimum * (1 + 1e-9):
            exceeded += 1
    passed = hits >= math.ceil(0.9 * instances) and exceeded == 0
    return Check("ao_ceo vs exhaustive", passed,
                 f"{hits}/{instances} within 2% of the joint optimum, {exceeded} above it")


def run_selftest(seed=0, instances=20):
    """Run the oracle checks; returns a list of Check"""
    checks = [
        _bessel_check(),
        _root_check(),
        _rayleigh_check(seed),
        _beamformer_check(seed, max(1, instances // 2)),
        _ao_check(seed, instances),
    ]
    for check in checks:
        log = logger.info if check.passed else logger.error
        log(str(check))
    return checks
