"""Complex linear-algebra and special-function kernels.

Everything here is a pure function of its inputs. Random draws go through
``RngStream``, a (seed, key) pair that always rebuilds the same numpy
generator, so a stream can be handed to any worker without sharing state.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .exceptions import DomainError, NotPositiveSemidefiniteError, SingularMatrixError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-8
PD_TOL = 1e-12
SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by a seed and a key path.

    Identical (seed, key) pairs rebuild identical generators. Sub-streams
    extend the key path through ``SeedSequence`` spawn keys, which numpy
    guarantees to be independent of their siblings.
    """
    seed: int
    key: tuple = ()

    def __post_init__(self):
        if not 0 <= self.seed < SEED_LIMIT:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "key", tuple(int(k) for k in self.key))

    @property
    def stream_id(self):
        return self.key

    def substream(self, *ids):
        return RngStream(self.seed, self.key + tuple(ids))

    def generator(self):
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def seed_sequence(self):
        return np.random.SeedSequence(self.seed, spawn_key=self.key)

    def fingerprint(self):
        """63-bit integer identifying the stream, used as the per-record seed"""
        state = self.seed_sequence().generate_state(2, dtype=np.uint32)
        return int((int(state[0]) << 31) ^ int(state[1]))


def bessel_j0(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_j0 requires a finite argument, got {x}")
    return float(special.j0(x))


def is_hermitian(A, tol=HERMITIAN_TOL):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    return bool(np.max(np.abs(A - A.conj().T)) <= tol * scale)


def _as_hermitian(A, name="A"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not is_hermitian(A):
        raise ValueError(f"{name} is not Hermitian")
    # Exact symmetry for LAPACK; the deviation is below HERMITIAN_TOL.
    return 0.5 * (A + A.conj().T)


def hermitian_eig(A):
    """Eigendecomposition A = U diag(lam) U^H with ascending real eigenvalues"""
    A = _as_hermitian(A)
    eigenvalues, U = linalg.eigh(A)
    return eigenvalues, U


def canonical_phase(v, tol=1e-12):
    """Rotate v so that its first non-negligible entry is real and positive"""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        return v.copy()
    nonzero = np.flatnonzero(np.abs(v) > tol * norm)
    pivot = v[nonzero[0]]
    rotated = v * (abs(pivot) / pivot)
    rotated[nonzero[0]] = abs(pivot)
    return rotated


def psd_matrix_root(A):
    """Symmetric root L = U sqrt(max(lam, 0)) U^H, so that L L^H = A_clipped.

    Cholesky is not usable here: Jakes matrices at sub-wavelength spacing are
    numerically rank-deficient.
    """
    eigenvalues, U = hermitian_eig(A)
    scale = np.linalg.norm(A)
    most_negative = float(eigenvalues[0])
    if most_negative < -PSD_TOL * max(scale, np.finfo(float).tiny):
        raise NotPositiveSemidefiniteError(
            f"matrix has eigenvalue {most_negative:.3e} below -{PSD_TOL:g} * ||A||_F"
        )
    if most_negative < 0:
        logger.debug(f"Clipping eigenvalues down to {most_negative:.3e} in matrix root")
    root = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (U * root) @ U.conj().T


def max_generalized_rayleigh(A, B):
    """Maximum of v^H A v / v^H B v and a unit-norm maximizer.

    scipy reduces the pencil through the Cholesky factor of B and solves the
    resulting ordinary Hermitian problem.
    """
    A = _as_hermitian(A, "A")
    B = _as_hermitian(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"A and B must have the same shape, got {A.shape} and {B.shape}")

    b_min = float(linalg.eigvalsh(B)[0])
    if b_min <= PD_TOL * np.linalg.norm(B):
        raise SingularMatrixError(f"B is not positive definite (min eigenvalue {b_min:.3e})")

    _, vectors = linalg.eigh(A, B)
    v = canonical_phase(vectors[:, -1])
    v = v / np.linalg.norm(v)
    value = float(np.real(np.vdot(v, A @ v)) / np.real(np.vdot(v, B @ v)))
    return value, v


def sample_complex_gaussian(rng, n):
    """n i.i.d. CN(0, 1) entries drawn from a fresh generator of ``rng``"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    generator = rng.generator() if isinstance(rng, RngStream) else rng
    return complex_gaussian(generator, (n,))


def complex_gaussian(generator, shape):
    draws = generator.standard_normal(tuple(shape) + (2,))
    return (draws[..., 0] + 1j * draws[..., 1]) / math.sqrt(2.0)
