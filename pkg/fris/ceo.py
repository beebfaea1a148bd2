"""Cross-entropy search over element selection and discrete phases.

The sampling law is a PMF over the N grid locations; a sample picks N_hat
distinct locations from it and gives each selected element a uniformly
random phase. By default those phases are then taken to a coordinate-wise
optimum before ranking, so a sample is scored by what its selection can
reach rather than by its phase draw. Elites are refit by element frequency
and the PMF is smoothed towards the fit.
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InfeasibleConfigurationError, InfeasiblePmfError
from .numerics import RngStream
from .secrecy import FrisConfig, ObjectiveEvaluator

logger = logging.getLogger(__name__)

PMF_TOL = 1e-12
PMF_FLOOR = 1e-12
IMPROVEMENT_TOL = 1e-6
MAX_REFINE_PASSES = 20


@dataclass(frozen=True)
class CeoParams:
    sample_size: int = None  # None means 5N
    elite_ratio: float = 0.1
    smoothing: float = 0.7
    max_iters: int = 30
    stagnation_patience: int = 5
    final_phase_polish: bool = True
    refine_samples: bool = True
    rng: RngStream = field(default_factory=lambda: RngStream(0))

    def __post_init__(self):
        if self.sample_size is not None and self.sample_size < 2:
            raise ValueError(f"sample size must be at least 2, got {self.sample_size}")
        if not 0 < self.elite_ratio <= 1:
            raise ValueError(f"elite ratio must lie in (0, 1], got {self.elite_ratio}")
        if not 0 < self.smoothing <= 1:
            raise ValueError(f"smoothing must lie in (0, 1], got {self.smoothing}")
        if self.max_iters < 1 or self.stagnation_patience < 1:
            raise ValueError("max_iters and stagnation_patience must be positive")

    def samples_for(self, N):
        return self.sample_size if self.sample_size is not None else 5 * N

    def elites_for(self, N):
        return max(1, math.ceil(self.elite_ratio * self.samples_for(N) - 1e-9))


class SelectionPmf:
    def __init__(self, p):
        p = np.array(p, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("PMF must be a non-empty vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > PMF_TOL * max(1, p.size):
            raise ValueError(f"not a valid PMF (min {p.min():.3e}, sum {p.sum():.15f})")
        p.flags.writeable = False
        self.p = p

    @classmethod
    def uniform(cls, N, mask=None):
        support = np.ones(N, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        if not support.any():
            raise InfeasiblePmfError("selection mask is empty")
        return cls(support / support.sum())

    def __len__(self):
        return self.p.size

    @property
    def support(self):
        return self.p > 0

    def floored(self, floor=PMF_FLOOR, mask=None):
        """Lift every allowed entry (all, or those in ``mask``) to at least ``floor``"""
        support = np.ones(self.p.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        lifted = np.where(support, np.maximum(self.p, floor), 0.0)
        return SelectionPmf(lifted / lifted.sum())

    def __repr__(self):
        return f"SelectionPmf(N={self.p.size}, support={int(self.support.sum())})"


def _generator(rng):
    return rng.generator() if isinstance(rng, RngStream) else rng


def sample_selections(pmf, n_hat, bits, rng, count):
    """Draw ``count`` configurations as (selection, phase_index) arrays.

    Selection uses Gumbel-top-k keys log p + Gumbel, which picks the same
    ordered set law as sequential proportional draws with renormalization.
    Zero-mass locations are never picked.
    """
    generator = _generator(rng)
    N = len(pmf)
    if int(pmf.support.sum()) < n_hat:
        raise InfeasiblePmfError(
            f"PMF has {int(pmf.support.sum())} positive entries, {n_hat} needed"
        )
    with np.errstate(divide="ignore"):
        log_p = np.log(pmf.p)
    keys = log_p + generator.gumbel(size=(count, N))
    selection = np.zeros((count, N), dtype=bool)
    if n_hat > 0:
        top = np.argpartition(-keys, n_hat - 1, axis=1)[:, :n_hat]
        np.put_along_axis(selection, top, True, axis=1)
    phases = generator.integers(0, 2 ** bits, size=(count, N))
    phases[~selection] = 0
    return selection, phases


def sample_config(pmf, n_hat, bits, rng):
    selection, phases = sample_selections(pmf, n_hat, bits, rng, 1)
    return FrisConfig(selection[0], phases[0], bits, n_hat)


def _frequencies(selections, n_hat):
    selections = np.asarray(selections, dtype=bool)
    return SelectionPmf(selections.sum(axis=0) / (selections.shape[0] * n_hat))


def update_pmf(elites, N, n_hat):
    if not elites:
        raise ValueError("elite set is empty")
    selections = np.array([elite.selection for elite in elites], dtype=bool)
    if selections.shape[1] != N or np.any(selections.sum(axis=1) != n_hat):
        raise InfeasibleConfigurationError(f"every elite must select {n_hat} of {N} locations")
    return _frequencies(selections, n_hat)


def smooth_pmf(prev, hat, alpha):
    if len(prev) != len(hat):
        raise ValueError("PMF dimensions differ")
    if not 0 < alpha <= 1:
        raise ValueError(f"smoothing must lie in (0, 1], got {alpha}")
    mixed = (1.0 - alpha) * prev.p + alpha * hat.p
    return SelectionPmf(mixed / mixed.sum())


def _reflections(selection, phases, bits):
    return selection * np.exp(1j * 2.0 * np.pi * phases / 2 ** bits)


@dataclass
class CeoOutcome:
    config: FrisConfig
    ratio: float
    iterations: int
    trace: list


def run_ceo(channels, w, n_hat, bits, params, noise_power, selection_mask=None, incumbent=None):
    N = channels.num_locations
    if n_hat > N:
        raise InfeasibleConfigurationError(f"cannot activate {n_hat} of {N} locations")
    mask = None if selection_mask is None else np.asarray(selection_mask, dtype=bool)
    evaluator = ObjectiveEvaluator(channels, w, noise_power)
    K = params.samples_for(N)
    K_e = params.elites_for(N)

    pmf = SelectionPmf.uniform(N, mask)
    best_config, best_ratio = None, -np.inf
    if incumbent is not None:
        best_config, best_ratio = incumbent, evaluator.ratio(incumbent)

    trace = []
    stale = 0
    iteration = 0
    for iteration in range(1, params.max_iters + 1):
        generator = params.rng.substream(iteration).generator()
        selection, phases = sample_selections(pmf.floored(mask=mask), n_hat, bits, generator, K)
        if params.refine_samples:
            phases, ratios = evaluator.ascend_phases(selection, phases, bits, MAX_REFINE_PASSES)
        else:
            ratios = evaluator.ratios(_reflections(selection, phases, bits))

        order = np.argsort(-ratios, kind="stable")
        elites = order[:K_e]
        leader = elites[0]
        if ratios[leader] > best_ratio * (1.0 + IMPROVEMENT_TOL) or best_config is None:
            stale = 0
        else:
            stale += 1
        if ratios[leader] > best_ratio or best_config is None:
            best_ratio = float(ratios[leader])
            best_config = FrisConfig(selection[leader], phases[leader], bits, n_hat)

        pmf = smooth_pmf(pmf, _frequencies(selection[elites], n_hat), params.smoothing)
        trace.append(best_ratio)
        logger.debug(f"CEO iteration {iteration}: best={best_ratio:.6g} elite_min={ratios[elites[-1]]:.6g}")
        if stale >= params.stagnation_patience:
            break

    if params.final_phase_polish:
        best_config = refine_phases(channels, w, best_config, noise_power)
        best_ratio = evaluator.ratio(best_config)
    return CeoOutcome(best_config, float(best_ratio), iteration, trace)


def solve_p3(channels, w, n_hat, bits, params, noise_power, selection_mask=None, incumbent=None):
    """Best configuration found by the CEO loop and its objective ratio"""
    outcome = run_ceo(channels, w, n_hat, bits, params, noise_power, selection_mask, incumbent)
    return outcome.config, outcome.ratio


def refine_phases(channels, w, config, noise_power):
    """Cyclic coordinate ascent over the phases of the selected elements.

    Each step moves one element to the best of its 2^B phases (ties go to
    the smallest index); stops after a pass without change.
    """
    evaluator = ObjectiveEvaluator(channels, w, noise_power)
    phase_index, _ = evaluator.ascend_phases(config.selection, config.phase_index, config.bits,
                                             MAX_REFINE_PASSES)
    return config.with_phases(phase_index[0])


def with_rng(params, rng):
    return replace(params, rng=rng)
