from django.db import models
from django.db.models import Avg, Count, StdDev

import logging

logger = logging.getLogger(__name__)


class SweepRunManager(models.Manager):
    def finished(self):
        return self.filter(status=SweepRun.DONE)


class SweepRun(models.Model):
    """One harness invocation; its TrialResult rows hang off ``results``"""
    NEW = 10
    RUNNING = 20
    DONE = 30
    FAILED = 40

    STATUSES = ((NEW, "New"), (RUNNING, "Running"), (DONE, "Done"), (FAILED, "Failed"))

    preset = models.CharField(max_length=16, blank=True)
    sweep_variable = models.CharField(max_length=16)
    config = models.JSONField(default=dict)
    base_seed = models.BigIntegerField(default=0)
    trials = models.PositiveIntegerField(default=1)
    status = models.IntegerField(choices=STATUSES, default=NEW)
    message = models.TextField(blank=True)

    date_updated = models.DateTimeField(auto_now=True)
    date_added = models.DateTimeField(auto_now_add=True)

    objects = SweepRunManager()

    class Meta:
        verbose_name = "Sweep run"
        verbose_name_plural = "Sweep runs"
        ordering = ("-date_added",)

    def __str__(self):
        label = self.preset or "run"
        return f"{label} #{self.pk} ({self.sweep_variable}, seed={self.base_seed})"

    def mark(self, status, message=""):
        self.status = status
        self.message = message
        self.save(update_fields=["status", "message", "date_updated"])

    def record_results(self, records):
        rows = [
            TrialResult(
                run=self,
                sweep_value=record.sweep_value,
                trial=record.trial,
                scheme=record.scheme,
                secrecy_rate=record.secrecy_rate,
                objective_ratio=record.objective_ratio,
                ao_iters=record.ao_iters,
                wall_ms=record.wall_ms,
                seed=record.seed,
            )
            for record in records
        ]
        TrialResult.objects.bulk_create(rows, batch_size=500)
        logger.info(f"Stored {len(rows)} trial results for sweep run id={self.id}")
        self.mark(SweepRun.DONE)
        return len(rows)

    def summary(self):
        return (self.results.values("sweep_value", "scheme")
                .annotate(mean_rate=Avg("secrecy_rate"), spread=StdDev("secrecy_rate", sample=True),
                          trials=Count("id"))
                .order_by("sweep_value", "scheme"))


class TrialResult(models.Model):
    run = models.ForeignKey(SweepRun, on_delete=models.CASCADE, related_name="results")
    sweep_value = models.FloatField()
    trial = models.PositiveIntegerField()
    scheme = models.CharField(max_length=32)
    secrecy_rate = models.FloatField()
    objective_ratio = models.FloatField()
    ao_iters = models.PositiveIntegerField(default=1)
    wall_ms = models.FloatField(default=0.0)
    seed = models.BigIntegerField()

    class Meta:
        verbose_name = "Trial result"
        verbose_name_plural = "Trial results"
        ordering = ("run", "sweep_value", "trial", "scheme")
        constraints = [
            models.UniqueConstraint(fields=("run", "sweep_value", "trial", "scheme"),
                                    name="unique_trial_result"),
        ]

    def __str__(self):
        return f"{self.scheme} trial {self.trial} @ {self.sweep_value:g}: {self.secrecy_rate:.4f}"
