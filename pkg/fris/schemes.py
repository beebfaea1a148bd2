"""The AO-CEO driver and the benchmark schemes.

Every scheme maps one ChannelSet to a SchemeResult. Randomness comes from
sub-streams of the ``rng`` handed in, so schemes run on the same trial are
paired but never share draws.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import beamform, ceo
from .ceo import CeoParams
from .exceptions import InfeasibleConfigurationError
from .numerics import RngStream
from .secrecy import FrisConfig, effective_channels, objective_ratio, rate_from_ratio

logger = logging.getLogger(__name__)

AO_CEO = "ao_ceo"
AO_CEO_UNPOLISHED = "ao_ceo_unpolished"
RANDOM_SELECTION_PHASE_OPT = "random_selection_phase_opt"
CONVENTIONAL_RIS = "conventional_ris"
FRIS_RANDOM_PHASES = "fris_random_phases"
FRIS_RANDOM_PHASES_CEO = "fris_random_phases_ceo"
NO_SURFACE = "no_surface"

# Fixed sub-stream ids inside a scheme's stream.
INIT_STREAM = 0
CEO_STREAM = 1
SELECTION_STREAM = 2
PHASE_STREAM = 3

MONOTONE_SLACK = 1e-10


@dataclass(frozen=True)
class AoParams:
    max_iters: int = 20
    rel_tolerance: float = 1e-3
    ceo: CeoParams = field(default_factory=CeoParams)

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"AO needs at least one iteration, got {self.max_iters}")
        if self.rel_tolerance <= 0:
            raise ValueError(f"relative tolerance must be positive, got {self.rel_tolerance}")


@dataclass
class SchemeResult:
    scheme: str
    secrecy_rate: float
    objective_ratio: float
    iterations: int
    config: FrisConfig
    beamformer: beamform.Beamformer
    trace: list = field(default_factory=list)


def _check_budget(n_hat, N):
    if n_hat > N:
        raise InfeasibleConfigurationError(f"cannot activate {n_hat} of {N} locations")


def _result(scheme, channels, config, w, noise_power, iterations, trace):
    ratio = objective_ratio(channels, config, w, noise_power)
    return SchemeResult(scheme, rate_from_ratio(ratio), ratio, iterations, config, w, trace)


def _beamformer(channels, config, power, noise_power):
    h_b, h_e = effective_channels(channels, config)
    return beamform.solve_p2_subspace(h_b, h_e, power, noise_power)


def _converged(previous, current, rel_tolerance):
    return previous is not None and current - previous < rel_tolerance * abs(previous)


def random_selection(N, n_hat, bits, rng, random_phases=False):
    """Uniform N_hat-subset; phases uniform on F or all zero"""
    generator = rng.generator() if isinstance(rng, RngStream) else rng
    chosen = generator.choice(N, size=n_hat, replace=False)
    phase_index = np.zeros(N, dtype=np.int64)
    if random_phases:
        phase_index[chosen] = generator.integers(0, 2 ** bits, size=n_hat)
    return FrisConfig.from_indices(N, chosen, bits, phase_index)


def central_selection(N, n_hat, bits):
    """The N_hat contiguous grid locations around the middle of the surface"""
    _check_budget(n_hat, N)
    start = (N - n_hat) // 2
    return FrisConfig.from_indices(N, range(start, start + n_hat), bits)


def run_ao_ceo(channels, power, noise_power, n_hat, bits, params, rng, scheme=AO_CEO):
    """Alternate closed-form beamforming with CEO surface configuration"""
    N = channels.num_locations
    _check_budget(n_hat, N)
    config = random_selection(N, n_hat, bits, rng.substream(INIT_STREAM))
    if n_hat == N:
        # Nothing left to select: the surface is a conventional one.
        logger.debug(f"{scheme}: all {N} locations active, running phase-only AO")
        return _alternate_phases(scheme, channels, config, power, noise_power, params)

    trace = []
    previous = None
    iteration = 0
    w = None
    for iteration in range(1, params.max_iters + 1):
        w = _beamformer(channels, config, power, noise_power)
        ceo_params = ceo.with_rng(params.ceo, rng.substream(CEO_STREAM, iteration))
        config, ratio = ceo.solve_p3(channels, w, n_hat, bits, ceo_params, noise_power,
                                     incumbent=config)
        trace.append(ratio)
        logger.debug(f"{scheme} AO iteration {iteration}: ratio={ratio:.8g}")
        if previous is not None and ratio < previous - MONOTONE_SLACK * abs(previous):
            logger.warning(f"{scheme} objective decreased from {previous:.10g} to {ratio:.10g}")
        if _converged(previous, ratio, params.rel_tolerance):
            break
        previous = ratio
    return _result(scheme, channels, config, w, noise_power, iteration, trace)


def _alternate_phases(scheme, channels, config, power, noise_power, params):
    """AO of closed-form beamforming and phase refinement on a frozen selection"""
    trace = []
    previous = None
    iteration = 0
    w = None
    for iteration in range(1, params.max_iters + 1):
        w = _beamformer(channels, config, power, noise_power)
        config = ceo.refine_phases(channels, w, config, noise_power)
        ratio = objective_ratio(channels, config, w, noise_power)
        trace.append(ratio)
        if _converged(previous, ratio, params.rel_tolerance):
            break
        previous = ratio
    return _result(scheme, channels, config, w, noise_power, iteration, trace)


def run_conventional_ris(channels, power, noise_power, n_hat, bits, params):
    config = central_selection(channels.num_locations, n_hat, bits)
    return _alternate_phases(CONVENTIONAL_RIS, channels, config, power, noise_power, params)


def run_random_selection_phase_opt(channels, power, noise_power, n_hat, bits, params, rng,
                                   refine=True):
    """Uniformly random selection, then phase AO; ``refine=False`` gives the random-phase one-shot"""
    N = channels.num_locations
    _check_budget(n_hat, N)
    if not refine:
        return run_fris_random_phases(channels, power, noise_power, n_hat, bits, rng)
    config = random_selection(N, n_hat, bits, rng.substream(SELECTION_STREAM))
    return _alternate_phases(RANDOM_SELECTION_PHASE_OPT, channels, config, power, noise_power, params)


def run_fris_random_phases(channels, power, noise_power, n_hat, bits, rng,
                           optimize_selection=False, params=None):
    """Random phases with a closed-form beamformer, one shot.

    The selection is uniformly random by default. With ``optimize_selection``
    it comes from an unpolished CEO run and only the phases are redrawn.
    """
    N = channels.num_locations
    _check_budget(n_hat, N)
    scheme = FRIS_RANDOM_PHASES
    if optimize_selection:
        scheme = FRIS_RANDOM_PHASES_CEO
        params = params or AoParams()
        seed_config = random_selection(N, n_hat, bits, rng.substream(INIT_STREAM))
        w = _beamformer(channels, seed_config, power, noise_power)
        ceo_params = ceo.with_rng(params.ceo, rng.substream(CEO_STREAM))
        ceo_params = replace(ceo_params, final_phase_polish=False, refine_samples=False)
        chosen, _ = ceo.solve_p3(channels, w, n_hat, bits, ceo_params, noise_power)
        generator = rng.substream(PHASE_STREAM).generator()
        phase_index = np.zeros(N, dtype=np.int64)
        phase_index[chosen.selected] = generator.integers(0, 2 ** bits, size=n_hat)
        config = chosen.with_phases(phase_index)
    else:
        config = random_selection(N, n_hat, bits, rng.substream(SELECTION_STREAM), random_phases=True)
    w = _beamformer(channels, config, power, noise_power)
    return _result(scheme, channels, config, w, noise_power, 1, [])


def run_no_surface(channels, power, noise_power):
    w = _beamformer(channels, None, power, noise_power)
    return _result(NO_SURFACE, channels, None, w, noise_power, 1, [])


def run_scheme(scheme, channels, power, noise_power, n_hat, bits, params, rng):
    """Dispatch by scheme id; ``rng`` is the scheme's own stream"""
    if scheme == AO_CEO:
        return run_ao_ceo(channels, power, noise_power, n_hat, bits, params, rng)
    if scheme == AO_CEO_UNPOLISHED:
        unpolished = AoParams(params.max_iters, params.rel_tolerance,
                              replace(params.ceo, final_phase_polish=False, refine_samples=False))
        return run_ao_ceo(channels, power, noise_power, n_hat, bits, unpolished, rng,
                          scheme=AO_CEO_UNPOLISHED)
    if scheme == RANDOM_SELECTION_PHASE_OPT:
        return run_random_selection_phase_opt(channels, power, noise_power, n_hat, bits, params, rng)
    if scheme == CONVENTIONAL_RIS:
        return run_conventional_ris(channels, power, noise_power, n_hat, bits, params)
    if scheme == FRIS_RANDOM_PHASES:
        return run_fris_random_phases(channels, power, noise_power, n_hat, bits, rng)
    if scheme == FRIS_RANDOM_PHASES_CEO:
        return run_fris_random_phases(channels, power, noise_power, n_hat, bits, rng,
                                      optimize_selection=True, params=params)
    if scheme == NO_SURFACE:
        return run_no_surface(channels, power, noise_power)
    raise ValueError(f"unknown scheme {scheme!r}")


SCHEMES = (
    AO_CEO,
    AO_CEO_UNPOLISHED,
    RANDOM_SELECTION_PHASE_OPT,
    CONVENTIONAL_RIS,
    FRIS_RANDOM_PHASES,
    FRIS_RANDOM_PHASES_CEO,
    NO_SURFACE,
)

# The five schemes compared in the benchmark figures.
DEFAULT_SCHEMES = (
    AO_CEO,
    RANDOM_SELECTION_PHASE_OPT,
    CONVENTIONAL_RIS,
    FRIS_RANDOM_PHASES,
    NO_SURFACE,
)