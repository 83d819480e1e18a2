from django.db import models

from apps.confgen.sampling import ConfigSource

from .outcomes import FailureClass


class Campaign(models.Model):
    """
    An imported campaign ledger.

    Attributes:
        label (str): Experiment ID of the ledger (header ``label``, or the file stem).
        ledger_path (str): Absolute path of the imported ledger; re-importing the
            same path replaces the campaign's trials.
        config_mode (str): "centroids", "swarm" or "defaults".
        rng_seed (str): The campaign's 64-bit seed as a decimal string. SQLite
            integers are signed 64-bit, so seeds above 2**63 do not fit a number column.
        opt_levels (str): The two optimization levels, comma separated.
        stop_reason (str or None): Footer stop reason; None for a ledger whose
            campaign did not finish normally.
        trial_count (int): Number of trial lines imported.

    Notes:
        Trial rows are the browsing copy; the ledger file stays the source of truth.
    """

    label = models.CharField(max_length=200)
    ledger_path = models.CharField(max_length=500, unique=True)
    config_mode = models.CharField(max_length=20, choices=[(source.value, source.value) for source in ConfigSource])
    rng_seed = models.CharField(max_length=20)
    opt_levels = models.CharField(max_length=100)
    generator_cmd = models.TextField()
    compiler_cmd = models.TextField()
    time_budget_seconds = models.FloatField()
    stop_reason = models.CharField(max_length=20, blank=True, null=True)
    started_at = models.DateTimeField()
    ended_at = models.DateTimeField(blank=True, null=True)
    trial_count = models.PositiveIntegerField(default=0)
    imported_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ["-started_at"]

    def __str__(self) -> str:
        return f"{self.label} ({self.trial_count} trials)"


class Trial(models.Model):
    campaign = models.ForeignKey(Campaign, on_delete=models.CASCADE, related_name="trials")
    trial_id = models.PositiveIntegerField()
    centroid_index = models.PositiveIntegerField(blank=True, null=True)
    draw_seed = models.BigIntegerField()
    generator_seed = models.BigIntegerField()
    failure_class = models.CharField(max_length=30, choices=FailureClass.choices)
    differential = models.BooleanField(default=False)
    flags = models.JSONField(default=list, blank=True)
    outcomes = models.JSONField(default=dict, blank=True)
    program_path = models.CharField(
        max_length=500,
        blank=True,
        null=True,
        help_text="Saved program, relative to the campaign's artifact directory.",
    )
    detail = models.TextField(blank=True)

    class Meta:
        constraints = [
            models.UniqueConstraint(fields=["campaign", "trial_id"], name="unique_trial_per_campaign"),
        ]
        ordering = ["campaign", "trial_id"]

    def __str__(self) -> str:
        return f"Trial #{self.trial_id} {self.get_failure_class_display()} ({self.campaign.label})"
