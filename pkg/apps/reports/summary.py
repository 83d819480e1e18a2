"""
Failure-count tables.

One ``ExperimentSummary`` per ledger, counted from the recorded
``failureClass`` of each trial line. The CSV columns follow the usual
result-table layout: test inputs, crashes per level with their total,
timeouts per level with their total, miscompilations, then the auxiliary
classes.
"""

import csv
import json
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from pathlib import Path

from apps.campaigns.ledger import Ledger, read_ledger
from apps.campaigns.outcomes import FailureClass

SUMMARY_COLUMNS = [
    ("label", "Experiment ID"),
    ("test_inputs", "Test input"),
    ("crash_o0", FailureClass.CRASH_O0.label),
    ("crash_o3", FailureClass.CRASH_O3.label),
    ("crash_both", FailureClass.CRASH_BOTH.label),
    ("total_crash", "Total Crash"),
    ("timeout_o0", FailureClass.TIMEOUT_O0.label),
    ("timeout_o3", FailureClass.TIMEOUT_O3.label),
    ("timeout_both", FailureClass.TIMEOUT_BOTH.label),
    ("total_timeout", "Total Timeout"),
    ("miscompilation", FailureClass.MISCOMPILATION.label),
    ("generator_error", FailureClass.GENERATOR_ERROR.label),
    ("compile_error_o0", FailureClass.COMPILE_ERROR_O0.label),
    ("compile_error_o3", FailureClass.COMPILE_ERROR_O3.label),
    ("compile_error_both", FailureClass.COMPILE_ERROR_BOTH.label),
    ("run_divergence_timeout", FailureClass.RUN_DIVERGENCE_TIMEOUT.label),
]


@dataclass(frozen=True)
class ExperimentSummary:
    label: str
    test_inputs: int = 0
    crash_o0: int = 0
    crash_o3: int = 0
    crash_both: int = 0
    timeout_o0: int = 0
    timeout_o3: int = 0
    timeout_both: int = 0
    miscompilation: int = 0
    generator_error: int = 0
    compile_error_o0: int = 0
    compile_error_o3: int = 0
    compile_error_both: int = 0
    run_divergence_timeout: int = 0

    @property
    def total_crash(self) -> int:
        return self.crash_o0 + self.crash_o3 + self.crash_both

    @property
    def total_timeout(self) -> int:
        return self.timeout_o0 + self.timeout_o3 + self.timeout_both

    @property
    def failures(self) -> int:
        return (
            self.total_crash
            + self.total_timeout
            + self.miscompilation
            + self.generator_error
            + self.compile_error_o0
            + self.compile_error_o3
            + self.compile_error_both
            + self.run_divergence_timeout
        )

    def row(self) -> list:
        return [getattr(self, attribute) for attribute, _ in SUMMARY_COLUMNS]

    def to_dict(self) -> dict:
        document = asdict(self)
        document["total_crash"] = self.total_crash
        document["total_timeout"] = self.total_timeout
        return {column: document[attribute] for attribute, column in SUMMARY_COLUMNS}


def summarize_classes(label: str, classes: Iterable[str]) -> ExperimentSummary:
    counts = Counter(FailureClass(value) for value in classes)
    return ExperimentSummary(
        label=label,
        test_inputs=sum(counts.values()),
        crash_o0=counts[FailureClass.CRASH_O0],
        crash_o3=counts[FailureClass.CRASH_O3],
        crash_both=counts[FailureClass.CRASH_BOTH],
        timeout_o0=counts[FailureClass.TIMEOUT_O0],
        timeout_o3=counts[FailureClass.TIMEOUT_O3],
        timeout_both=counts[FailureClass.TIMEOUT_BOTH],
        miscompilation=counts[FailureClass.MISCOMPILATION],
        generator_error=counts[FailureClass.GENERATOR_ERROR],
        compile_error_o0=counts[FailureClass.COMPILE_ERROR_O0],
        compile_error_o3=counts[FailureClass.COMPILE_ERROR_O3],
        compile_error_both=counts[FailureClass.COMPILE_ERROR_BOTH],
        run_divergence_timeout=counts[FailureClass.RUN_DIVERGENCE_TIMEOUT],
    )


def summarize_ledger(ledger: Ledger) -> ExperimentSummary:
    return summarize_classes(ledger.label, (record.failure_class for record in ledger.trials))


def summarize(path: Path) -> ExperimentSummary:
    """Summary of one ledger file; the footer's counts are not trusted."""
    return summarize_ledger(read_ledger(path, verify_classes=False))


def write_summaries(summaries: Sequence[ExperimentSummary], csv_path: Path, json_path: Path) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([column for _, column in SUMMARY_COLUMNS])
        for summary in summaries:
            writer.writerow(summary.row())
    document = {"experiments": [summary.to_dict() for summary in summaries]}
    json_path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
