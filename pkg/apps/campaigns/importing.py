import logging
from pathlib import Path

from django.db import transaction
from django.utils.dateparse import parse_datetime

from .ledger import read_ledger
from .models import Campaign, Trial

logger = logging.getLogger(__name__)


@transaction.atomic
def import_ledger(path: Path) -> Campaign:
    """
    Store a ledger's campaign and trials in the database.

    The ledger is keyed by its resolved path: importing it again updates the
    campaign and replaces all of its trials.
    """
    ledger = read_ledger(path)
    header, spec = ledger.header, ledger.header["spec"]
    footer = ledger.footer or {}
    campaign, created = Campaign.objects.update_or_create(
        ledger_path=str(Path(path).resolve()),
        defaults={
            "label": ledger.label,
            "config_mode": header["configSource"].get("mode", "centroids"),
            "rng_seed": str(spec["rngSeed"]),
            "opt_levels": ",".join(spec["optLevels"]),
            "generator_cmd": " ".join(spec["generatorCmd"]),
            "compiler_cmd": " ".join(spec["compilerCmd"]),
            "time_budget_seconds": spec["timeBudget"],
            "stop_reason": footer.get("stopReason"),
            "started_at": parse_datetime(header["startedAt"]),
            "ended_at": parse_datetime(footer["endedAt"]) if footer else None,
            "trial_count": len(ledger.trials),
        },
    )
    if not created:
        campaign.trials.all().delete()

    Trial.objects.bulk_create(
        Trial(
            campaign=campaign,
            trial_id=record.trial_id,
            centroid_index=record.centroid_index,
            draw_seed=record.draw_seed,
            generator_seed=record.generator_seed,
            failure_class=record.failure_class.value,
            differential=record.differential,
            flags=record.flags,
            outcomes={level: outcome.to_dict() for level, outcome in record.outcomes.items()},
            program_path=record.program_path,
            detail=record.detail,
        )
        for record in ledger.trials
    )
    logger.info("%s %s with %d trials", "Imported" if created else "Re-imported", campaign.label, len(ledger.trials))
    return campaign
