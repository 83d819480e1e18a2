"""
Campaign ledgers.

A ledger is append-only JSON lines: one header (spec echo and config
source, enough to reproduce the campaign), one line per trial in trialId
order, and a footer when the campaign ends normally. Everything that
varies between identical runs sits under ``timing`` or in the
``startedAt``/``endedAt`` fields.
"""

import threading
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any

from django.utils import timezone

from apps.core.errors import LocatedError
from apps.core.jsonl import dumps_line, iter_lines
from apps.corpus.serializers import first_error
from apps.features.catalog import FEATURE_NAMES, GeneratorConfig, check_feature_order
from featurefuzz import LEDGER_FORMAT_VERSION, __version__

from .outcomes import FailureClass, LevelOutcome, classify, is_differential
from .serializers import LedgerFooterSerializer, LedgerHeaderSerializer, TrialLineSerializer

STOP_REASONS = ("budget", "max-trials", "interrupted")


class LedgerCorrupt(LocatedError):
    pass


@dataclass
class TrialRecord:
    trial_id: int
    centroid_index: int | None
    draw_seed: int
    generator_seed: int
    config: GeneratorConfig | None
    flags: list[str]
    outcomes: dict[str, LevelOutcome]
    failure_class: FailureClass
    detail: str = ""
    program_path: str | None = None
    timing: dict[str, Any] = field(default_factory=dict)

    @property
    def differential(self) -> bool:
        return is_differential(self.failure_class)

    def rederive_class(self, opt_levels: tuple[str, str]) -> FailureClass:
        """Class recomputed from the stored outcomes (generator errors have none)."""
        if not self.outcomes:
            return FailureClass.GENERATOR_ERROR
        low, high = (self.outcomes[level] for level in opt_levels)
        return classify(low, high)

    def to_line(self) -> dict:
        return {
            "kind": "trial",
            "trialId": self.trial_id,
            "centroidIndex": self.centroid_index,
            "drawSeed": self.draw_seed,
            "generatorSeed": self.generator_seed,
            "config": list(self.config.enabled) if self.config is not None else None,
            "flags": list(self.flags),
            "programPath": self.program_path,
            "outcomes": {level: outcome.to_dict() for level, outcome in self.outcomes.items()},
            "failureClass": self.failure_class.value,
            "differential": self.differential,
            "detail": self.detail,
            "timing": self.timing,
        }

    @classmethod
    def from_line(cls, line: dict) -> "TrialRecord":
        config = None
        if line["config"] is not None:
            config = GeneratorConfig(
                tuple(bool(bit) for bit in line["config"]),
                source_centroid=line["centroidIndex"],
                draw_seed=line["drawSeed"],
            )
        durations = line.get("timing", {}).get("levels", {})
        outcomes = {}
        for level, data in line["outcomes"].items():
            seconds = durations.get(level, {})
            outcomes[level] = LevelOutcome.from_dict(
                {
                    **data,
                    "compileSeconds": seconds.get("compileSeconds", 0.0),
                    "runSeconds": seconds.get("runSeconds", 0.0),
                }
            )
        return cls(
            trial_id=line["trialId"],
            centroid_index=line["centroidIndex"],
            draw_seed=line["drawSeed"],
            generator_seed=line["generatorSeed"],
            config=config,
            flags=list(line["flags"]),
            outcomes=outcomes,
            failure_class=FailureClass(line["failureClass"]),
            detail=line.get("detail", ""),
            program_path=line.get("programPath"),
            timing=dict(line.get("timing", {})),
        )


def class_counts(records) -> dict[str, int]:
    counts = Counter(FailureClass(record.failure_class).value for record in records)
    return {choice.value: counts.get(choice.value, 0) for choice in FailureClass}


def header_line(label: str, spec: dict, config_source: dict, started_at: datetime) -> dict:
    return {
        "kind": "header",
        "formatVersion": LEDGER_FORMAT_VERSION,
        "tool": f"featurefuzz {__version__}",
        "label": label,
        "featureOrder": list(FEATURE_NAMES),
        "spec": spec,
        "configSource": config_source,
        "startedAt": started_at.isoformat(),
    }


class LedgerWriter:
    """
    Single writer for one ledger file.

    Trials may be submitted out of order by concurrent workers; they are
    written strictly in trialId order, starting at ``first_trial_id``.
    """

    def __init__(self, path: Path, header: dict, first_trial_id: int = 0):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "w", encoding="utf-8")
        self._lock = threading.Lock()
        self._pending: dict[int, TrialRecord] = {}
        self._next = first_trial_id
        self.written: list[TrialRecord] = []
        self._write(header)

    def _write(self, line: dict) -> None:
        self._handle.write(dumps_line(line) + "\n")
        self._handle.flush()

    def submit(self, record: TrialRecord) -> None:
        with self._lock:
            self._pending[record.trial_id] = record
            while self._next in self._pending:
                ready = self._pending.pop(self._next)
                self._write(ready.to_line())
                self.written.append(ready)
                self._next += 1

    @property
    def stranded(self) -> list[TrialRecord]:
        """Submitted trials still waiting on an earlier trialId."""
        with self._lock:
            return [self._pending[key] for key in sorted(self._pending)]

    def close(self, stop_reason: str | None = None) -> None:
        with self._lock:
            if stop_reason is not None:
                self._write(
                    {
                        "kind": "footer",
                        "trials": len(self.written),
                        "counts": class_counts(self.written),
                        "stopReason": stop_reason,
                        "endedAt": timezone.now().isoformat(),
                    }
                )
            self._handle.close()


@dataclass
class Ledger:
    path: Path
    header: dict
    trials: list[TrialRecord]
    footer: dict | None = None

    @property
    def label(self) -> str:
        return self.header.get("label") or self.path.stem

    @property
    def opt_levels(self) -> tuple[str, str]:
        return tuple(self.header["spec"]["optLevels"])

    def trial(self, trial_id: int) -> TrialRecord | None:
        for record in self.trials:
            if record.trial_id == trial_id:
                return record
        return None


def _validated(serializer_class, obj, number: int, what: str) -> dict:
    if obj is None:
        raise LedgerCorrupt(f"{what} is not valid JSON", line=number)
    serializer = serializer_class(data=obj)
    if not serializer.is_valid():
        raise LedgerCorrupt(f"bad {what}: {first_error(serializer.errors)}", line=number)
    return obj


def read_ledger(path: Path, verify_classes: bool = True) -> Ledger:
    """
    Parse and validate a ledger.

    Any malformed line or duplicated trialId raises :class:`LedgerCorrupt`
    with the line number, as does (with ``verify_classes``) a trial whose
    outcomes do not re-derive its recorded class.
    """
    path = Path(path)
    if not path.is_file():
        raise LedgerCorrupt(f"ledger not found: {path}")
    lines = iter_lines(path)
    first = next(lines, None)
    if first is None:
        raise LedgerCorrupt(f"{path} is empty", line=1)
    number, obj, _ = first
    header = _validated(LedgerHeaderSerializer, obj, number, "ledger header")
    if header["formatVersion"] != LEDGER_FORMAT_VERSION:
        raise LedgerCorrupt(
            f"ledger format {header['formatVersion']}, expected {LEDGER_FORMAT_VERSION}", line=number
        )
    if not check_feature_order(header["featureOrder"]):
        raise LedgerCorrupt("ledger feature order differs from the canonical order", line=number)
    opt_levels = tuple(header["spec"].get("optLevels", ()))

    trials: list[TrialRecord] = []
    seen: set[int] = set()
    footer = None
    for number, obj, _ in lines:
        if footer is not None:
            raise LedgerCorrupt("line after the ledger footer", line=number)
        if isinstance(obj, dict) and obj.get("kind") == "footer":
            footer = _validated(LedgerFooterSerializer, obj, number, "ledger footer")
            continue
        line = _validated(TrialLineSerializer, obj, number, "trial line")
        record = TrialRecord.from_line(line)
        if record.trial_id in seen:
            raise LedgerCorrupt(f"duplicate trialId {record.trial_id}", line=number)
        seen.add(record.trial_id)
        if record.outcomes and set(record.outcomes) != set(opt_levels):
            raise LedgerCorrupt("trial outcomes do not match the ledger's optimization levels", line=number)
        if verify_classes and record.rederive_class(opt_levels) != record.failure_class:
            raise LedgerCorrupt(
                f"trial {record.trial_id} is recorded as {record.failure_class.value} "
                f"but its outcomes classify as {record.rederive_class(opt_levels).value}",
                line=number,
            )
        trials.append(record)
    return Ledger(path=path, header=header, trials=trials, footer=footer)
