from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from dataclasses import replace
import logging
import os

from fris import harness, oracles
from fris.exceptions import ConfigurationError, FrisException
from fris.models import SweepRun
from fris.numerics import SEED_LIMIT

logger = logging.getLogger(__name__)

EXPERIMENTS = tuple(harness.PRESETS) + ("run", "selftest")


def _scheme_list(value):
    return tuple(part.strip() for part in value.split(",") if part.strip())


class Command(BaseCommand):
    help = 'Run FRIS secrecy-rate sweeps (fig2..fig5 presets or a config file) and write CSV results'

    def add_arguments(self, parser):
        parser.add_argument("experiment", choices=EXPERIMENTS)
        parser.add_argument("--config", help="key = value experiment file (required for 'run')")
        parser.add_argument("--trials", type=int, help="trials per sweep point (selftest: instances)")
        parser.add_argument("--seed", type=int, help="base seed; presets default to FRIS_SEED")
        parser.add_argument("--out", help="trial CSV path; the summary goes next to it")
        parser.add_argument("--threads", type=int, default=settings.FRIS['DEFAULT_THREADS'])
        parser.add_argument("--schemes", type=_scheme_list, help="comma separated scheme ids")
        parser.add_argument("--save", action="store_true", help="store the run and its results in the database")

    def handle(self, *args, **options):
        experiment = options["experiment"]
        if options["threads"] < 1:
            raise CommandError(f"--threads must be at least 1, got {options['threads']}")
        if experiment == "selftest":
            return self.selftest(options)

        config = self.build_config(experiment, options)
        out = config.output or os.path.join(settings.FRIS['OUTPUT_DIR'], f"{experiment}.csv")

        run = None
        if options["save"]:
            run = SweepRun.objects.create(
                preset="" if experiment == "run" else experiment,
                sweep_variable=config.sweep_variable,
                config=config.as_dict(),
                base_seed=config.base_seed,
                trials=config.trials,
                status=SweepRun.RUNNING,
            )

        self.stdout.write(f"Running {experiment}: {config.sweep_variable} over "
                          f"{', '.join(f'{v:g}' for v in config.sweep_values)} "
                          f"({config.trials} trials, seed={config.base_seed})")
        try:
            result = harness.run_sweep(config, threads=options["threads"])
            harness.write_csv(result.records, out)
            harness.write_summary_csv(result.summary, harness.summary_path(out))
        except FrisException as exc:
            if run is not None:
                run.mark(SweepRun.FAILED, str(exc))
            raise CommandError(str(exc))

        for value, message in result.errors.items():
            self.stderr.write(f"Skipped {config.sweep_variable}={value:g}: {message}")
        for row in result.summary:
            self.stdout.write(f"{row.sweep_var}={row.sweep_value:g} {row.scheme:<26} "
                              f"{row.mean:.4f} +/- {row.std_error:.4f} (n={row.trials})")
        if run is not None:
            run.record_results(result.records)
            self.stdout.write(f"Saved sweep run id={run.id}")
        self.stdout.write(f"Results written to {out}")

    def build_config(self, experiment, options):
        try:
            if experiment == "run":
                if not options["config"]:
                    raise CommandError("'run' requires --config <file>")
                config = harness.load_config(options["config"])
            else:
                config = harness.preset_config(experiment, trials=settings.FRIS['PRESET_TRIALS'],
                                               base_seed=settings.FRIS['DEFAULT_SEED'])

            overrides = {}
            if options["trials"] is not None:
                overrides["trials"] = options["trials"]
            if options["seed"] is not None:
                overrides["base_seed"] = options["seed"]
            if options["schemes"] is not None:
                overrides["schemes"] = options["schemes"]
            if options["out"]:
                overrides["output"] = options["out"]
            return replace(config, **overrides)
        except ConfigurationError as exc:
            details = "; ".join(f"{key}: {message}" for key, message in exc.errors.items())
            raise CommandError(f"{exc}{' (' + details + ')' if details else ''}")

    def selftest(self, options):
        seed = options["seed"] if options["seed"] is not None else settings.FRIS['DEFAULT_SEED']
        if not 0 <= seed < SEED_LIMIT:
            raise CommandError(f"--seed must lie in [0, 2^64), got {seed}")
        checks = oracles.run_selftest(seed, instances=options["trials"] or 20)
        for check in checks:
            self.stdout.write(str(check))
        failed = [check.name for check in checks if not check.passed]
        if failed:
            raise CommandError(f"selftest failed: {', '.join(failed)}")
        self.stdout.write("All checks passed")
