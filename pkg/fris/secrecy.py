"""Effective channels, SNRs, secrecy rate and the fractional objective.

Optimizers work on the ratio (1 + gamma_B) / (1 + gamma_E); the clamped
log difference is only applied when a rate is reported.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleConfigurationError

logger = logging.getLogger(__name__)

POWER_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class FrisConfig:
    """Element selection s and phase indices; theta_n = 2 pi index_n / 2^B"""
    selection: np.ndarray
    phase_index: np.ndarray
    bits: int
    budget: int

    def __post_init__(self):
        selection = np.array(self.selection, dtype=bool)
        phase_index = np.array(self.phase_index, dtype=np.int64)
        if selection.ndim != 1 or selection.shape != phase_index.shape:
            raise ValueError("selection and phase_index must be vectors of equal length")
        if self.bits < 1:
            raise ValueError(f"phase resolution needs at least one bit, got {self.bits}")
        if np.any(phase_index < 0) or np.any(phase_index >= 2 ** self.bits):
            raise ValueError(f"phase indices must lie in [0, {2 ** self.bits})")
        if int(selection.sum()) != self.budget:
            raise InfeasibleConfigurationError(
                f"{int(selection.sum())} elements selected but the budget is {self.budget}"
            )
        selection.flags.writeable = False
        phase_index.flags.writeable = False
        object.__setattr__(self, "selection", selection)
        object.__setattr__(self, "phase_index", phase_index)

    @classmethod
    def from_indices(cls, N, selected, bits, phase_index=None):
        selection = np.zeros(N, dtype=bool)
        selection[list(selected)] = True
        if phase_index is None:
            phase_index = np.zeros(N, dtype=np.int64)
        return cls(selection, phase_index, bits, int(selection.sum()))

    @property
    def num_locations(self):
        return self.selection.shape[0]

    @property
    def selected(self):
        return np.flatnonzero(self.selection)

    @property
    def phases(self):
        return 2.0 * np.pi * self.phase_index / 2 ** self.bits

    @property
    def reflection(self):
        """Diagonal of Phi: s_n exp(j theta_n)"""
        return self.selection * np.exp(1j * self.phases)

    def with_phases(self, phase_index):
        return FrisConfig(self.selection, phase_index, self.bits, self.budget)

    def __eq__(self, other):
        if not isinstance(other, FrisConfig):
            return NotImplemented
        return (self.bits == other.bits and self.budget == other.budget
                and np.array_equal(self.selection, other.selection)
                and np.array_equal(self.phase_index, other.phase_index))

    def __hash__(self):
        return hash((self.bits, self.budget, self.selection.tobytes(), self.phase_index.tobytes()))

    def __str__(self):
        pairs = ", ".join(f"{n}:{self.phase_index[n]}" for n in self.selected)
        return f"FrisConfig(B={self.bits}, [{pairs}])"


@dataclass(frozen=True, eq=False)
class Beamformer:
    w: np.ndarray
    power_budget: float

    def __post_init__(self):
        w = np.array(self.w, dtype=complex).reshape(-1)
        if self.power_budget <= 0:
            raise ValueError(f"power budget must be positive, got {self.power_budget}")
        if np.vdot(w, w).real > self.power_budget * (1.0 + POWER_SLACK):
            raise ValueError(f"||w||^2 = {np.vdot(w, w).real:.6e} exceeds P_AP = {self.power_budget:.6e}")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @property
    def power(self):
        return float(np.vdot(self.w, self.w).real)


def effective_channel(direct, reflect, G, config):
    """h with h^H = direct^H + reflect^H Phi G"""
    direct = np.asarray(direct, dtype=complex)
    reflect = np.asarray(reflect, dtype=complex)
    G = np.asarray(G, dtype=complex)
    N, M = G.shape
    if direct.shape != (M,) or reflect.shape != (N,) or config.num_locations != N:
        raise ValueError(
            f"dimension mismatch: direct {direct.shape}, reflect {reflect.shape}, "
            f"G {G.shape}, config N={config.num_locations}"
        )
    return direct + G.conj().T @ (config.reflection.conj() * reflect)


def snr(h_eff, w, noise_power):
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    w = w.w if isinstance(w, Beamformer) else np.asarray(w, dtype=complex)
    return float(abs(np.vdot(h_eff, w)) ** 2 / noise_power)


def secrecy_rate(gamma_b, gamma_e):
    if gamma_b < 0 or gamma_e < 0:
        raise ValueError("SNRs must be non-negative")
    return max(0.0, math.log2(1.0 + gamma_b) - math.log2(1.0 + gamma_e))


def rate_from_ratio(ratio):
    return max(0.0, math.log2(ratio))


def phase_levels(bits):
    """exp(j theta) for every phase index 0 .. 2^B - 1"""
    levels = 2 ** bits
    return np.exp(1j * 2.0 * np.pi * np.arange(levels) / levels)


def effective_channels(channels, config):
    """(h_B, h_E) for a configuration; Phi = 0 when config is None"""
    if config is None:
        return np.array(channels.h_dB), np.array(channels.h_dE)
    return (effective_channel(channels.h_dB, channels.h_rB, channels.G, config),
            effective_channel(channels.h_dE, channels.h_rE, channels.G, config))


def snr_pair(channels, config, w, noise_power):
    h_b, h_e = effective_channels(channels, config)
    return snr(h_b, w, noise_power), snr(h_e, w, noise_power)


def objective_ratio(channels, config, w, noise_power):
    gamma_b, gamma_e = snr_pair(channels, config, w, noise_power)
    return (1.0 + gamma_b) / (1.0 + gamma_e)


class ObjectiveEvaluator:
    """Batched objective for a fixed beamformer.

    With w fixed, h^H w = h_d^H w + sum_n conj(h_r[n]) phi_n (G w)[n], so a
    configuration costs one dot product per user.
    """

    def __init__(self, channels, w, noise_power):
        if noise_power <= 0:
            raise ValueError(f"noise power must be positive, got {noise_power}")
        w = w.w if isinstance(w, Beamformer) else np.asarray(w, dtype=complex)
        gw = channels.G @ w
        self.noise_power = noise_power
        self.direct_b = np.vdot(channels.h_dB, w)
        self.direct_e = np.vdot(channels.h_dE, w)
        self.coeff_b = channels.h_rB.conj() * gw
        self.coeff_e = channels.h_rE.conj() * gw

    def _ratio(self, signal_b, signal_e):
        return ((self.noise_power + np.abs(signal_b) ** 2)
                / (self.noise_power + np.abs(signal_e) ** 2))

    def ratios(self, reflections):
        """Objective ratios for a (K, N) array of Phi diagonals"""
        reflections = np.atleast_2d(reflections)
        return self._ratio(self.direct_b + reflections @ self.coeff_b,
                           self.direct_e + reflections @ self.coeff_e)

    def ratio(self, config):
        return float(self.ratios(config.reflection)[0])

    def phase_sweep(self, config, n):
        """Ratios for every phase value of element n, the others held fixed"""
        reflection = config.reflection
        candidates = phase_levels(config.bits)
        base_b = self.direct_b + reflection @ self.coeff_b - reflection[n] * self.coeff_b[n]
        base_e = self.direct_e + reflection @ self.coeff_e - reflection[n] * self.coeff_e[n]
        return self._ratio(base_b + candidates * self.coeff_b[n], base_e + candidates * self.coeff_e[n])

    def ascend_phases(self, selection, phase_index, bits, max_passes):
        """Cyclic coordinate ascent over the phases of a batch of configurations.

        Every row of ``selection`` must select the same number of elements.
        A step moves the next selected element of each row to its best phase
        given the rest of that row, ties going to the smallest index. Stops
        after a pass that changes no row. Returns (phase_index, ratios).
        """
        selection = np.atleast_2d(np.asarray(selection, dtype=bool))
        phase_index = np.array(np.atleast_2d(phase_index), dtype=np.int64)
        count = selection.shape[0]
        candidates = phase_levels(bits)
        rows = np.arange(count)
        columns = np.nonzero(selection)[1].reshape(count, -1)
        for _ in range(max_passes):
            reflections = selection * candidates[phase_index]
            signal_b = self.direct_b + reflections @ self.coeff_b
            signal_e = self.direct_e + reflections @ self.coeff_e
            changed = False
            for slot in range(columns.shape[1]):
                n = columns[:, slot]
                current = candidates[phase_index[rows, n]]
                coeff_b, coeff_e = self.coeff_b[n], self.coeff_e[n]
                base_b = signal_b - current * coeff_b
                base_e = signal_e - current * coeff_e
                values = self._ratio(base_b[:, None] + np.outer(coeff_b, candidates),
                                     base_e[:, None] + np.outer(coeff_e, candidates))
                choice = np.argmax(values, axis=1)
                moved = choice != phase_index[rows, n]
                if moved.any():
                    changed = True
                    phase_index[rows, n] = choice
                    signal_b = base_b + candidates[choice] * coeff_b
                    signal_e = base_e + candidates[choice] * coeff_e
            if not changed:
                break
        return phase_index, self.ratios(selection * candidates[phase_index])
