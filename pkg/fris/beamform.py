"""Closed-form transmit beamforming for a fixed surface configuration.

The optimum spends the full budget, w = sqrt(P) w_bar, with w_bar the
dominant generalized eigenvector of (P h_B h_B^H + s I, P h_E h_E^H + s I).
Both pencils are divided by the noise power s before solving.
"""
import logging

import numpy as np

from . import numerics
from .secrecy import Beamformer

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9


def _validate(h_b, h_e, power, noise_power):
    h_b = np.asarray(h_b, dtype=complex).reshape(-1)
    h_e = np.asarray(h_e, dtype=complex).reshape(-1)
    if h_b.shape != h_e.shape:
        raise ValueError(f"h_B and h_E must have equal length, got {h_b.shape} and {h_e.shape}")
    if power <= 0 or noise_power <= 0:
        raise ValueError("transmit power and noise power must be positive")
    return h_b, h_e


def _pencil(h, snr_scale):
    return np.eye(h.shape[0]) + snr_scale * np.outer(h, h.conj())


def _quiet_direction(h_e):
    """Unit vector minimizing |h_E^H v|, used when Bob's channel vanishes"""
    M = h_e.shape[0]
    if M == 1 or not np.any(h_e):
        v = np.zeros(M, dtype=complex)
        v[0] = 1.0
        return v
    _, U = numerics.hermitian_eig(np.outer(h_e, h_e.conj()))
    v = numerics.canonical_phase(U[:, 0])
    return v / np.linalg.norm(v)


def _degenerate(h_e, power):
    logger.warning("Legitimate channel is zero; steering away from the eavesdropper")
    return Beamformer(np.sqrt(power) * _quiet_direction(h_e), power)


def solve_p2(h_b, h_e, power, noise_power):
    h_b, h_e = _validate(h_b, h_e, power, noise_power)
    if not np.any(h_b):
        return _degenerate(h_e, power)
    scale = power / noise_power
    _, w_bar = numerics.max_generalized_rayleigh(_pencil(h_b, scale), _pencil(h_e, scale))
    return Beamformer(np.sqrt(power) * w_bar, power)


def solve_p2_subspace(h_b, h_e, power, noise_power):
    """Same optimum as ``solve_p2`` found inside span{h_B, h_E}.

    Any generalized eigenvector with eigenvalue other than one lies in that
    span, so a 2x2 pencil suffices. Falls back to ``solve_p2`` when the
    channels are parallel or M < 2.
    """
    h_b, h_e = _validate(h_b, h_e, power, noise_power)
    if not np.any(h_b):
        return _degenerate(h_e, power)
    if h_b.shape[0] < 2:
        return solve_p2(h_b, h_e, power, noise_power)

    basis, upper = np.linalg.qr(np.column_stack([h_b, h_e]))
    if abs(upper[1, 1]) <= RANK_TOL * np.linalg.norm(h_e):
        return solve_p2(h_b, h_e, power, noise_power)

    scale = power / noise_power
    b = basis.conj().T @ h_b
    e = basis.conj().T @ h_e
    _, v = numerics.max_generalized_rayleigh(_pencil(b, scale), _pencil(e, scale))
    w_bar = numerics.canonical_phase(basis @ v)
    w_bar = w_bar / np.linalg.norm(w_bar)
    return Beamformer(np.sqrt(power) * w_bar, power)


def beamformer_ratio(h_b, h_e, w_bar, power, noise_power):
    """(sigma^2 + P|h_B^H w|^2) / (sigma^2 + P|h_E^H w|^2) for a unit-norm w"""
    return ((noise_power + power * abs(np.vdot(h_b, w_bar)) ** 2)
            / (noise_power + power * abs(np.vdot(h_e, w_bar)) ** 2))
