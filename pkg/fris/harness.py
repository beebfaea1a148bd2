"""Monte Carlo sweeps over channel realizations.

One trial realizes channels once and runs every requested scheme on them.
Channel draws depend on (base_seed, trial) only, so all sweep points share
the same realizations; scheme draws depend on (base_seed, sweep index,
trial, scheme). Output is identical for any worker count.
"""
import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import schemes
from .ceo import CeoParams
from .channel import FadingParams, PathLossModel, SystemGeometry, db_to_linear, dbm_to_watts, realize_channels
from .exceptions import ConfigurationError, FrisException, InfeasibleConfigurationError, OutputError
from .numerics import SEED_LIMIT, RngStream

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("power", "n_hat", "n_total", "eve_x")

CHANNEL_DOMAIN = 0
SCHEME_DOMAIN = 1

PRESET_TRIALS = 200

PRESETS = {
    "fig2": ("power", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
    "fig3": ("n_hat", (4.0, 8.0, 16.0, 24.0, 32.0)),
    "fig4": ("n_total", (16.0, 25.0, 50.0, 75.0, 100.0)),
    "fig5": ("eve_x", (48.0, 50.0, 52.0, 54.0, 56.0, 58.0, 60.0)),
}

CSV_HEADER = ("sweep_var", "sweep_value", "trial", "scheme", "secrecy_rate_bps_hz",
              "objective_ratio", "ao_iters", "wall_ms", "seed")
SUMMARY_HEADER = ("sweep_var", "sweep_value", "scheme", "mean_secrecy_rate", "std_error", "trials")


@dataclass(frozen=True)
class ExperimentConfig:
    ap_position: tuple = (0.0, 0.0, 10.0)
    bob_position: tuple = (50.0, 0.0, 1.5)
    eve_position: tuple = (55.0, 5.0, 1.5)
    fris_center: tuple = (45.0, 10.0, 5.0)
    fris_axis: tuple = (1.0, 0.0, 0.0)
    ap_axis: tuple = (1.0, 0.0, 0.0)
    aperture: float = 12.375
    wavelength: float = 0.1
    reference_loss_db: float = -30.0
    exponent_ap_fris: float = 2.2
    exponent_other: float = 2.8
    blockage_db: float = 25.0
    rician_k_db: float = 5.0
    noise_power_dbm: float = -80.0
    num_antennas: int = 4
    num_locations: int = 100
    num_active: int = 16
    phase_bits: int = 3
    power_dbm: float = 20.0
    trials: int = 1000
    base_seed: int = 0
    schemes: tuple = schemes.DEFAULT_SCHEMES
    sweep_variable: str = "power"
    sweep_values: tuple = (20.0,)
    ceo_sample_size: int = None
    ceo_elite_ratio: float = 0.1
    ceo_smoothing: float = 0.7
    ceo_max_iters: int = 30
    ceo_patience: int = 5
    final_phase_polish: bool = True
    ao_max_iters: int = 20
    ao_rel_tolerance: float = 1e-3
    output: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.base_seed < SEED_LIMIT:
            raise ConfigurationError(f"seed must lie in [0, 2^64), got {self.base_seed}")
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ConfigurationError(f"unknown sweep variable {self.sweep_variable!r}")
        values = tuple(float(v) for v in self.sweep_values)
        if not values:
            raise ConfigurationError("sweep grid is empty")
        if list(values) != sorted(values):
            raise ConfigurationError(f"sweep grid must be sorted ascending, got {values}")
        unknown = [s for s in self.schemes if s not in schemes.SCHEMES]
        if unknown or not self.schemes:
            raise ConfigurationError(f"unknown or empty scheme list: {unknown}")
        object.__setattr__(self, "sweep_values", values)
        object.__setattr__(self, "schemes", tuple(self.schemes))

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def pathloss(self):
        return PathLossModel(self.reference_loss_db, self.exponent_ap_fris,
                             self.exponent_other, self.blockage_db)

    def fading(self):
        return FadingParams(db_to_linear(self.rician_k_db), dbm_to_watts(self.noise_power_dbm))

    def ao_params(self):
        ceo = CeoParams(sample_size=self.ceo_sample_size, elite_ratio=self.ceo_elite_ratio,
                        smoothing=self.ceo_smoothing, max_iters=self.ceo_max_iters,
                        stagnation_patience=self.ceo_patience,
                        final_phase_polish=self.final_phase_polish)
        return schemes.AoParams(self.ao_max_iters, self.ao_rel_tolerance, ceo)

    def point(self, value):
        """Operating point with the swept variable set to ``value``"""
        num_locations, num_active, power_dbm = self.num_locations, self.num_active, self.power_dbm
        eve = self.eve_position
        if self.sweep_variable == "power":
            power_dbm = value
        elif self.sweep_variable == "n_hat":
            num_active = int(round(value))
        elif self.sweep_variable == "n_total":
            num_locations = int(round(value))
        elif self.sweep_variable == "eve_x":
            eve = (value,) + tuple(eve[1:])
        geometry = SystemGeometry(self.ap_position, self.bob_position, eve, self.fris_center,
                                  num_locations, self.aperture, self.wavelength,
                                  self.fris_axis, self.ap_axis)
        return SweepPoint(value, geometry, num_active, dbm_to_watts(power_dbm))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    geometry: SystemGeometry
    num_active: int
    power: float


@dataclass(frozen=True)
class TrialRecord:
    sweep_var: str
    sweep_value: float
    trial: int
    scheme: str
    secrecy_rate: float
    objective_ratio: float
    ao_iters: int
    wall_ms: float
    seed: int


@dataclass(frozen=True)
class SummaryRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    mean: float
    std_error: float
    trials: int


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list
    summary: list
    errors: dict = field(default_factory=dict)


def preset_config(name, trials=PRESET_TRIALS, **overrides):
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}")
    variable, values = PRESETS[name]
    return replace(ExperimentConfig(sweep_variable=variable, sweep_values=values, trials=trials),
                   **overrides)


def channel_stream(config, trial):
    return RngStream(config.base_seed, (CHANNEL_DOMAIN, trial))


def scheme_stream(config, sweep_index, trial, scheme):
    return RngStream(config.base_seed, (SCHEME_DOMAIN, sweep_index, trial,
                                        schemes.SCHEMES.index(scheme)))


def realize_trial(config, point, trial):
    return realize_channels(point.geometry, config.pathloss(), config.fading(),
                            config.num_antennas, channel_stream(config, trial))


def run_trial(config, sweep_index, point, trial):
    channels = realize_trial(config, point, trial)
    noise_power = config.fading().noise_power
    params = config.ao_params()
    records = []
    for scheme in config.schemes:
        rng = scheme_stream(config, sweep_index, trial, scheme)
        start = time.perf_counter()
        result = schemes.run_scheme(scheme, channels, point.power, noise_power,
                                    point.num_active, config.phase_bits, params, rng)
        wall_ms = (time.perf_counter() - start) * 1000.0
        records.append(TrialRecord(config.sweep_variable, point.value, trial, scheme,
                                   result.secrecy_rate, result.objective_ratio,
                                   result.iterations, wall_ms, rng.fingerprint()))
    logger.debug(f"Trial {trial} at {config.sweep_variable}={point.value:g} done")
    return records


def summarize(records, scheme_order=None):
    groups = {}
    for record in records:
        groups.setdefault((record.sweep_var, record.sweep_value, record.scheme), []).append(record.secrecy_rate)
    order = list(scheme_order or schemes.SCHEMES)

    def key(item):
        (_, value, scheme), _ = item
        return (value, order.index(scheme) if scheme in order else len(order), scheme)

    rows = []
    for (variable, value, scheme), rates in sorted(groups.items(), key=key):
        rates = np.asarray(rates, dtype=float)
        std_error = float(rates.std(ddof=1) / math.sqrt(rates.size)) if rates.size > 1 else 0.0
        rows.append(SummaryRow(variable, value, scheme, float(rates.mean()), std_error, int(rates.size)))
    return rows


def run_sweep(config, threads=1):
    """Run every (sweep value, trial) task and collect records in task order"""
    logger.info(f"Starting {config.sweep_variable} sweep over {list(config.sweep_values)} "
                f"with {config.trials} trials, schemes={list(config.schemes)}, threads={threads}")
    errors = {}
    tasks = []
    for sweep_index, value in enumerate(config.sweep_values):
        try:
            point = config.point(value)
            if point.num_active > point.geometry.num_locations:
                raise InfeasibleConfigurationError(
                    f"N_hat={point.num_active} exceeds N={point.geometry.num_locations}"
                )
        except (FrisException, ValueError) as exc:
            logger.warning(f"Skipping {config.sweep_variable}={value:g}: {exc}")
            errors[value] = str(exc)
            continue
        tasks.extend((sweep_index, point, trial) for trial in range(config.trials))

    def work(task):
        return run_trial(config, *task)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="fris-trial") as pool:
            batches = list(pool.map(work, tasks))
    else:
        batches = [work(task) for task in tasks]

    records = [record for batch in batches for record in batch]
    summary = summarize(records, config.schemes)
    logger.info(f"Sweep finished: {len(records)} records, {len(errors)} infeasible points")
    return SweepResult(config, records, summary, errors)


def _number(value):
    return format(value, ".17g") if isinstance(value, float) else str(value)


def _write_rows(path, header, rows):
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.info(f"Wrote {len(rows)} rows to {path}")


def write_csv(records, path):
    rows = [
        (r.sweep_var, _number(float(r.sweep_value)), r.trial, r.scheme, _number(float(r.secrecy_rate)),
         _number(float(r.objective_ratio)), r.ao_iters, _number(float(r.wall_ms)), r.seed)
        for r in records
    ]
    _write_rows(path, CSV_HEADER, rows)


def write_summary_csv(summary, path):
    rows = [
        (s.sweep_var, _number(float(s.sweep_value)), s.scheme, _number(s.mean),
         _number(s.std_error), s.trials)
        for s in summary
    ]
    _write_rows(path, SUMMARY_HEADER, rows)


def summary_path(path):
    root, ext = os.path.splitext(path)
    return f"{root}_summary{ext or '.csv'}"


def parse_config_text(text):
    """Flat ``key = value`` lines with ``#`` comments, as a dict of strings"""
    values = {}
    errors = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            errors[f"line {number}"] = f"expected 'key = value', got {raw.strip()!r}"
            continue
        if key in values:
            errors[key] = f"duplicate key on line {number}"
        values[key] = value.strip()
    if errors:
        raise ConfigurationError("malformed config file", errors)
    return values


def load_config(path):
    from .forms import ExperimentConfigForm

    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    form = ExperimentConfigForm(parse_config_text(text))
    if not form.is_valid():
        errors = {key: "; ".join(messages) for key, messages in form.errors.items()}
        raise ConfigurationError(f"invalid config file {path}", errors)
    return form.to_config()


def cli_main(argv=None):
    """Run ``manage.py fris`` with ``argv`` and return its exit status"""
    from django.core.management import ManagementUtility

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "frislab.settings")
    argv = list(argv or [])
    try:
        ManagementUtility(["manage.py", "fris", *argv]).execute()
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
