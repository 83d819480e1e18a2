# Generated by Django 5.2

from django.db import migrations, models


class Migration(migrations.Migration):

    dependencies = [
        ("campaigns", "0001_initial"),
    ]

    operations = [
        migrations.AlterField(
            model_name="trial",
            name="failure_class",
            field=models.CharField(
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
                    ("compileErrorO0", "Compile error(0)"),
                    ("compileErrorO3", "Compile error(3)"),
                    ("compileErrorBoth", "Compile error(both)"),
                ],
                max_length=30,
            ),
        ),
    ]
