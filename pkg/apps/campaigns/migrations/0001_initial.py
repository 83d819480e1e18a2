# Generated by Django 5.2

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="Campaign",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("label", models.CharField(max_length=200)),
                ("ledger_path", models.CharField(max_length=500, unique=True)),
                (
                    "config_mode",
                    models.CharField(
                        choices=[
                            ("centroids", "centroids"),
                            ("swarm", "swarm"),
                            ("defaults", "defaults"),
                        ],
                        max_length=20,
                    ),
                ),
                ("rng_seed", models.CharField(max_length=20)),
                ("opt_levels", models.CharField(max_length=100)),
                ("generator_cmd", models.TextField()),
                ("compiler_cmd", models.TextField()),
                ("time_budget_seconds", models.FloatField()),
                ("stop_reason", models.CharField(blank=True, max_length=20, null=True)),
                ("started_at", models.DateTimeField()),
                ("ended_at", models.DateTimeField(blank=True, null=True)),
                ("trial_count", models.PositiveIntegerField(default=0)),
                ("imported_at", models.DateTimeField(auto_now=True)),
            ],
            options={
                "ordering": ["-started_at"],
            },
        ),
        migrations.CreateModel(
            name="Trial",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("trial_id", models.PositiveIntegerField()),
                ("centroid_index", models.PositiveIntegerField(blank=True, null=True)),
                ("draw_seed", models.BigIntegerField()),
                ("generator_seed", models.BigIntegerField()),
                (
                    "failure_class",
                    models.CharField(
                        choices=[
                            ("none", "None"),
                            ("miscompilation", "Miscompilation"),
                            ("crashO0", "Crash(0)"),
                            ("crashO3", "Crash(3)"),
                            ("crashBoth", "Crash(both)"),
                            ("timeoutO0", "Timeout(0)"),
                            ("timeoutO3", "Timeout(3)"),
                            ("timeoutBoth", "Timeout(both)"),
                            ("runDivergenceTimeout", "Run timeout divergence"),
                            ("generatorError", "Generator error"),
                            ("compileErrorBoth", "Compile error(both)"),
                        ],
                        max_length=30,
                    ),
                ),
                ("differential", models.BooleanField(default=False)),
                ("flags", models.JSONField(blank=True, default=list)),
                ("outcomes", models.JSONField(blank=True, default=dict)),
                (
                    "program_path",
                    models.CharField(
                        blank=True,
                        help_text="Saved program, relative to the campaign's artifact directory.",
                        max_length=500,
                        null=True,
                    ),
                ),
                ("detail", models.TextField(blank=True)),
                (
                    "campaign",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="trials",
                        to="campaigns.campaign",
                    ),
                ),
            ],
            options={
                "ordering": ["campaign", "trial_id"],
                "constraints": [
                    models.UniqueConstraint(
                        fields=("campaign", "trial_id"),
                        name="unique_trial_per_campaign",
                    )
                ],
            },
        ),
    ]
