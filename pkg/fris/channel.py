"""FRIS geometry, Jakes correlation, path loss and random channel realizations.

A realization holds the direct AP-user channels, the AP-FRIS matrix with its
Rician LoS part, and the correlated FRIS-user channels. Path loss is taken
per link between terminal positions and the FRIS center (far field).
"""
import hashlib
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

from . import numerics
from .exceptions import DomainError

logger = logging.getLogger(__name__)

X_AXIS = (1.0, 0.0, 0.0)

# Sub-stream ids of the five random components of a realization.
LINK_STREAMS = {
    "direct_bob": 0,
    "direct_eve": 1,
    "ap_fris": 2,
    "reflect_bob": 3,
    "reflect_eve": 4,
}


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm):
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def _unit(vector, name):
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if vector.shape != (3,) or norm == 0:
        raise ValueError(f"{name} must be a nonzero 3-vector")
    return vector / norm


@dataclass(frozen=True)
class SystemGeometry:
    ap_position: tuple = (0.0, 0.0, 10.0)
    bob_position: tuple = (50.0, 0.0, 1.5)
    eve_position: tuple = (55.0, 5.0, 1.5)
    fris_center: tuple = (45.0, 10.0, 5.0)
    num_locations: int = 100
    aperture: float = 12.375
    wavelength: float = 0.1
    fris_axis: tuple = X_AXIS
    ap_axis: tuple = X_AXIS

    def __post_init__(self):
        if self.num_locations < 2:
            raise ValueError(f"FRIS needs at least 2 locations, got {self.num_locations}")
        if self.aperture <= 0 or self.wavelength <= 0:
            raise ValueError("aperture and wavelength must be positive")
        positions = [self.ap_position, self.bob_position, self.eve_position, self.fris_center]
        for i in range(len(positions)):
            for j in range(i + 1, len(positions)):
                if np.array_equal(positions[i], positions[j]):
                    raise ValueError("AP, Bob, Eve and FRIS center must be pairwise distinct")
        _unit(self.fris_axis, "fris_axis")
        _unit(self.ap_axis, "ap_axis")

    @property
    def spacing(self):
        """d_s in meters"""
        return self.aperture * self.wavelength / (self.num_locations - 1)

    @property
    def spacing_over_wavelength(self):
        return self.aperture / (self.num_locations - 1)

    def distance(self, a, b):
        return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass(frozen=True)
class PathLossModel:
    reference_loss: float = -30.0
    exponent_ap_fris: float = 2.2
    exponent_other: float = 2.8
    blockage_direct: float = 25.0

    def __post_init__(self):
        if self.exponent_ap_fris <= 0 or self.exponent_other <= 0:
            raise ValueError("path loss exponents must be positive")
        if not math.isfinite(self.reference_loss):
            raise ValueError("reference loss must be finite")


@dataclass(frozen=True)
class FadingParams:
    rician_k: float = 10.0 ** 0.5
    noise_power: float = dbm_to_watts(-80.0)

    def __post_init__(self):
        if self.rician_k < 0:
            raise ValueError(f"Rician K must be non-negative, got {self.rician_k}")
        if self.noise_power <= 0:
            raise ValueError(f"noise power must be positive, got {self.noise_power}")


def _read_only(array):
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class ChannelSet:
    h_dB: np.ndarray
    h_dE: np.ndarray
    G: np.ndarray
    h_rB: np.ndarray
    h_rE: np.ndarray
    corr_root: np.ndarray
    correlation: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("h_dB", "h_dE", "G", "h_rB", "h_rE", "corr_root"):
            object.__setattr__(self, name, _read_only(getattr(self, name)))
        n, m = self.G.shape
        if self.h_dB.shape != (m,) or self.h_dE.shape != (m,):
            raise ValueError(f"direct channels must have length M={m}")
        if self.h_rB.shape != (n,) or self.h_rE.shape != (n,):
            raise ValueError(f"reflect channels must have length N={n}")
        if self.corr_root.shape != (n, n):
            raise ValueError(f"correlation root must be {n}x{n}")

    @property
    def num_antennas(self):
        return self.G.shape[1]

    @property
    def num_locations(self):
        return self.G.shape[0]

    def digest(self):
        sha = hashlib.sha256()
        for array in (self.h_dB, self.h_dE, self.G, self.h_rB, self.h_rE, self.corr_root):
            sha.update(np.ascontiguousarray(array).tobytes())
        return sha.hexdigest()


def build_correlation(N, d_s_over_lambda):
    """Real symmetric Toeplitz Jakes matrix R[i, j] = J0(2 pi |i - j| d_s / lambda)"""
    if N < 1 or d_s_over_lambda <= 0:
        raise ValueError(f"need N >= 1 and d_s/lambda > 0, got N={N}, d_s/lambda={d_s_over_lambda}")
    lags = 2.0 * np.pi * np.arange(N) * d_s_over_lambda
    return linalg.toeplitz(special.j0(lags))


def path_loss_linear(d, exponent, model=None):
    model = model or PathLossModel()
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d}")
    return db_to_linear(model.reference_loss - 10.0 * exponent * math.log10(d))


def los_component(geometry, M):
    """Rank-one LoS matrix a_FRIS(phi) a_AP(psi)^H with unit-modulus entries"""
    center = np.asarray(geometry.fris_center, dtype=float)
    ap = np.asarray(geometry.ap_position, dtype=float)
    to_ap = (ap - center) / np.linalg.norm(ap - center)
    cos_phi = float(np.dot(_unit(geometry.fris_axis, "fris_axis"), to_ap))
    cos_psi = float(np.dot(_unit(geometry.ap_axis, "ap_axis"), -to_ap))

    n = np.arange(geometry.num_locations)
    m = np.arange(M)
    a_fris = np.exp(1j * 2.0 * np.pi * n * geometry.spacing_over_wavelength * cos_phi)
    a_ap = np.exp(1j * 2.0 * np.pi * (m / 2.0) * cos_psi)
    return np.outer(a_fris, a_ap.conj())


@dataclass(frozen=True)
class LinkGains:
    direct_bob: float
    direct_eve: float
    ap_fris: float
    bob: float
    eve: float


def link_gains(geometry, pathloss):
    blockage = db_to_linear(-pathloss.blockage_direct)
    ap, bob, eve, center = (geometry.ap_position, geometry.bob_position,
                            geometry.eve_position, geometry.fris_center)
    return LinkGains(
        direct_bob=blockage * path_loss_linear(geometry.distance(ap, bob), pathloss.exponent_other, pathloss),
        direct_eve=blockage * path_loss_linear(geometry.distance(ap, eve), pathloss.exponent_other, pathloss),
        ap_fris=path_loss_linear(geometry.distance(ap, center), pathloss.exponent_ap_fris, pathloss),
        bob=path_loss_linear(geometry.distance(center, bob), pathloss.exponent_other, pathloss),
        eve=path_loss_linear(geometry.distance(center, eve), pathloss.exponent_other, pathloss),
    )


def realize_channels(geometry, pathloss, fading, M, rng, link_streams=LINK_STREAMS):
    if M < 1:
        raise ValueError(f"M must be at least 1, got {M}")
    N = geometry.num_locations
    gains = link_gains(geometry, pathloss)
    R = build_correlation(N, geometry.spacing_over_wavelength)
    root = numerics.psd_matrix_root(R)

    def draw(link, shape):
        return numerics.complex_gaussian(rng.substream(link_streams[link]).generator(), shape)

    K = fading.rician_k
    G = math.sqrt(gains.ap_fris) * (
        math.sqrt(K / (K + 1.0)) * los_component(geometry, M)
        + math.sqrt(1.0 / (K + 1.0)) * root @ draw("ap_fris", (N, M))
    )
    logger.debug(f"Channels for seed={rng.seed} key={rng.stream_id}: N={N} M={M} "
                 f"d_s/lambda={geometry.spacing_over_wavelength:.4g} "
                 f"cascade bob={10.0 * math.log10(gains.ap_fris * gains.bob):.1f} dB "
                 f"eve={10.0 * math.log10(gains.ap_fris * gains.eve):.1f} dB")
    return ChannelSet(
        h_dB=math.sqrt(gains.direct_bob) * draw("direct_bob", (M,)),
        h_dE=math.sqrt(gains.direct_eve) * draw("direct_eve", (M,)),
        G=G,
        h_rB=math.sqrt(gains.bob) * (root @ draw("reflect_bob", (N,))),
        h_rE=math.sqrt(gains.eve) * (root @ draw("reflect_eve", (N,))),
        corr_root=root,
        correlation=R,
    )
