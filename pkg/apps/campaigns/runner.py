"""
The campaign loop: draw a configuration, generate a program, compile and
run it at both optimization levels, classify, and record the trial.

The generator and compiler run from the invoking directory, so relative
paths in command templates keep their meaning; every path substituted
into a template is absolute. Compiled binaries run inside their trial
directory.
"""

import hashlib
import logging
import re
import shutil
import threading
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from django.utils import timezone

from apps.confgen.sampling import (
    ConfigDispenser,
    ConfigDraw,
    ConfigStream,
    config_from_draw,
    stream_from_description,
)
from apps.core.errors import FeatureFuzzError

from .ledger import Ledger, LedgerWriter, TrialRecord, class_counts, header_line
from .outcomes import FailureClass, LevelOutcome, OutcomeStatus, StdoutDigest, classify
from .process import ExecutableNotFound, ProcessResult, run_bounded
from .spec import CampaignSpec, CompilerNotFound, GeneratorNotFound

logger = logging.getLogger(__name__)

ICE_MARKER = "internal compiler error"
PROGRAM_NAME = "program.c"
TRIALS_DIR = "trials"


def _level_name(opt_level: str) -> str:
    return re.sub(r"[^\w.]+", "", opt_level) or "level"


def _first_line(data: bytes, marker: str | None = None) -> str:
    text = data.decode("utf-8", errors="replace")
    for line in text.splitlines():
        if marker is None or marker in line.lower():
            return line.strip()[:200]
    return ""


def is_compiler_crash(result: ProcessResult) -> bool:
    """Killed by a signal, an exit code other than 0 or 1, or an ICE diagnostic."""
    exit = result.exit
    if exit.signaled or exit.code not in (0, 1):
        return True
    return ICE_MARKER in result.stderr.decode("utf-8", errors="replace").lower()


def digest(stdout: bytes, head_bytes: int) -> StdoutDigest:
    return StdoutDigest(
        sha256=hashlib.sha256(stdout).hexdigest(),
        size=len(stdout),
        head=stdout[:head_bytes].decode("utf-8", errors="replace"),
    )


@dataclass(frozen=True)
class GeneratedProgram:
    path: Path | None
    detail: str = ""
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.path is not None


def generate_program(spec: CampaignSpec, flags: list[str], seed: int, workdir: Path) -> GeneratedProgram:
    """Run the generator; a failure is returned, only a missing generator raises."""
    output = workdir / PROGRAM_NAME
    result = run_bounded(
        spec.generator_argv(flags, seed, output),
        spec.generator_timeout,
        not_found=GeneratorNotFound,
    )
    (workdir / "generator.stderr").write_bytes(result.stderr)
    if result.timed_out:
        return GeneratedProgram(None, f"generator timed out after {spec.generator_timeout:g}s", result.seconds)
    if result.returncode != 0:
        detail = f"generator {result.exit.describe()}"
        message = _first_line(result.stderr)
        return GeneratedProgram(None, f"{detail}: {message}" if message else detail, result.seconds)
    if not output.is_file() or output.stat().st_size == 0:
        return GeneratedProgram(None, "generator produced no program", result.seconds)
    return GeneratedProgram(output, "", result.seconds)


def compile_and_run(spec: CampaignSpec, program: Path, opt_level: str, workdir: Path) -> tuple[LevelOutcome, str]:
    """Outcome of one optimization level plus a short note for the ledger."""
    name = _level_name(opt_level)
    binary = workdir / f"program{name}"
    compiled = run_bounded(
        spec.compiler_argv(opt_level, program, binary),
        spec.compile_timeout,
        not_found=CompilerNotFound,
    )
    (workdir / f"{name}.compile.stderr").write_bytes(compiled.stderr)

    if compiled.timed_out:
        logger.debug("Compiler timed out at %s on %s", opt_level, program)
        return LevelOutcome(opt_level, OutcomeStatus.COMPILE_TIMEOUT, compile_seconds=compiled.seconds), ""
    if is_compiler_crash(compiled):
        note = _first_line(compiled.stderr, ICE_MARKER) or compiled.exit.describe()
        return (
            LevelOutcome(opt_level, OutcomeStatus.COMPILER_CRASH, compiled.exit, compile_seconds=compiled.seconds),
            f"{opt_level}: {note}",
        )
    if compiled.returncode != 0 or not binary.is_file():
        note = _first_line(compiled.stderr) or "no binary produced"
        return (
            LevelOutcome(opt_level, OutcomeStatus.COMPILE_ERROR, compiled.exit, compile_seconds=compiled.seconds),
            f"{opt_level}: {note}",
        )

    try:
        ran = run_bounded([str(binary)], spec.run_timeout, cwd=workdir)
    except ExecutableNotFound as exc:
        return (
            LevelOutcome(opt_level, OutcomeStatus.COMPILE_ERROR, compiled.exit, compile_seconds=compiled.seconds),
            f"{opt_level}: {exc}",
        )
    (workdir / f"{name}.run.stdout").write_bytes(ran.stdout)
    common = {"compile_exit": compiled.exit, "compile_seconds": compiled.seconds, "run_seconds": ran.seconds}
    if ran.timed_out:
        logger.debug("Binary timed out at %s on %s", opt_level, program)
        return LevelOutcome(opt_level, OutcomeStatus.RUN_TIMEOUT, **common), ""
    if ran.exit.signaled:
        return LevelOutcome(opt_level, OutcomeStatus.RUN_CRASH, run_exit=ran.exit, **common), ""
    stdout = digest(ran.stdout, spec.stdout_head_bytes)
    return LevelOutcome(opt_level, OutcomeStatus.OK, run_exit=ran.exit, stdout=stdout, **common), ""


def execute_trial(spec: CampaignSpec, draw: ConfigDraw, workdir: Path) -> TrialRecord:
    """Generate, compile and run one trial inside ``workdir``."""
    workdir = Path(workdir).absolute()
    workdir.mkdir(parents=True, exist_ok=True)
    started = timezone.now()
    generated = generate_program(spec, draw.flags, draw.generator_seed, workdir)
    timing: dict = {"startedAt": started.isoformat(), "generateSeconds": round(generated.seconds, 6)}
    record = TrialRecord(
        trial_id=draw.index,
        centroid_index=draw.centroid_index,
        draw_seed=draw.draw_seed,
        generator_seed=draw.generator_seed,
        config=draw.config,
        flags=draw.flags,
        outcomes={},
        failure_class=FailureClass.GENERATOR_ERROR,
        detail=generated.detail,
        timing=timing,
    )
    if not generated.ok:
        timing["endedAt"] = timezone.now().isoformat()
        return record

    notes = []
    for opt_level in spec.opt_levels:
        outcome, note = compile_and_run(spec, generated.path, opt_level, workdir)
        record.outcomes[opt_level] = outcome
        if note:
            notes.append(note)
    low, high = (record.outcomes[level] for level in spec.opt_levels)
    record.failure_class = classify(low, high)
    if record.failure_class == FailureClass.MISCOMPILATION:
        notes.append(_divergence_note(low, high))
    record.detail = "; ".join(note for note in notes if note)
    timing["levels"] = {
        level: {"compileSeconds": round(outcome.compile_seconds, 6), "runSeconds": round(outcome.run_seconds, 6)}
        for level, outcome in record.outcomes.items()
    }
    timing["endedAt"] = timezone.now().isoformat()
    return record


def _divergence_note(low: LevelOutcome, high: LevelOutcome) -> str:
    crashed = [outcome for outcome in (low, high) if outcome.status == OutcomeStatus.RUN_CRASH]
    if crashed:
        return "; ".join(f"{outcome.opt_level}: binary {outcome.run_exit.describe()}" for outcome in crashed)
    if low.stdout.sha256 != high.stdout.sha256:
        return f"stdout differs between {low.opt_level} and {high.opt_level}"
    return f"exit differs: {low.run_exit.describe()} vs {high.run_exit.describe()}"


@dataclass
class CampaignResult:
    ledger_path: Path
    trials: int
    counts: dict[str, int]
    stop_reason: str
    elapsed: float

    @property
    def failures(self) -> int:
        return sum(count for name, count in self.counts.items() if name != FailureClass.NONE.value)


class Campaign:
    """
    One differential-testing campaign.

    Workers pull draws from a shared dispenser (so round-robin order is
    global), run trials in their own working directories and hand the
    records to a single ordered ledger writer. No trial starts once the
    budget has elapsed; trials already running are finished and recorded.
    """

    def __init__(
        self,
        spec: CampaignSpec,
        stream: ConfigStream,
        ledger_path: Path,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.spec = spec
        self.stream = stream
        self.ledger_path = Path(ledger_path)
        self.clock = clock
        self.dispenser = ConfigDispenser(stream, limit=spec.max_trials)
        self._stop = threading.Event()
        self._interrupted = False

    def request_stop(self) -> None:
        """Stop dispensing new trials (used by the SIGINT handler)."""
        if not self._stop.is_set():
            logger.info("Stop requested; finishing in-flight trials")
        self._interrupted = True
        self._stop.set()

    def workdir_for(self, trial_id: int) -> Path:
        return self.spec.artifact_dir / TRIALS_DIR / str(trial_id)

    def _preserve(self, record: TrialRecord) -> None:
        workdir = self.workdir_for(record.trial_id)
        if record.failure_class == FailureClass.NONE:
            shutil.rmtree(workdir, ignore_errors=True)
            return
        class_dir = self.spec.artifact_dir / record.failure_class.value
        class_dir.mkdir(parents=True, exist_ok=True)
        target = class_dir / f"{record.trial_id}.c"
        program = workdir / PROGRAM_NAME
        if program.is_file():
            shutil.copyfile(program, target)
        else:
            target.touch()
        record.program_path = target.relative_to(self.spec.artifact_dir).as_posix()
        logger.info("Trial %d: %s (%s)", record.trial_id, record.failure_class.value, record.detail or "no detail")

    def _worker(self, deadline: float, writer: LedgerWriter) -> None:
        while not self._stop.is_set() and self.clock() < deadline:
            draw = self.dispenser.take()
            if draw is None:
                return
            try:
                record = execute_trial(self.spec, draw, self.workdir_for(draw.index))
            except (ExecutableNotFound, OSError):
                self._stop.set()
                raise
            self._preserve(record)
            writer.submit(record)

    def run(self) -> CampaignResult:
        spec = self.spec
        spec.artifact_dir.mkdir(parents=True, exist_ok=True)
        started_at = timezone.now()
        header = header_line(spec.label, spec.to_dict(), self.stream.describe(), started_at)
        writer = LedgerWriter(self.ledger_path, header)
        started = self.clock()
        deadline = started + spec.time_budget
        logger.info(
            "Campaign %s: budget %.0fs, %d worker(s), ledger %s",
            spec.label or self.ledger_path.stem,
            spec.time_budget,
            spec.workers,
            self.ledger_path,
        )

        try:
            with ThreadPoolExecutor(max_workers=spec.workers, thread_name_prefix="trial") as pool:
                futures = [pool.submit(self._worker, deadline, writer) for _ in range(spec.workers)]
                for future in futures:
                    future.result()
        except (ExecutableNotFound, OSError):
            writer.close()
            raise

        if self._interrupted:
            stop_reason = "interrupted"
        elif spec.max_trials is not None and self.dispenser.dispensed >= spec.max_trials:
            stop_reason = "max-trials"
        else:
            stop_reason = "budget"
        writer.close(stop_reason)
        elapsed = self.clock() - started
        logger.info("Campaign stopped (%s) after %d trials in %.1fs", stop_reason, len(writer.written), elapsed)
        return CampaignResult(
            ledger_path=self.ledger_path,
            trials=len(writer.written),
            counts=class_counts(writer.written),
            stop_reason=stop_reason,
            elapsed=elapsed,
        )


class TrialNotFound(FeatureFuzzError):
    pass


class ReplayMismatch(FeatureFuzzError):
    pass


@dataclass
class ReplayResult:
    recorded: TrialRecord
    replayed: TrialRecord

    @property
    def matches(self) -> bool:
        return self.recorded.failure_class == self.replayed.failure_class


def replay_trial(ledger: Ledger, trial_id: int, workdir: Path, **spec_overrides) -> ReplayResult:
    """
    Re-run one recorded trial from its ledger alone.

    The configuration is re-sampled from the header's config source and the
    trial's draw seed, and must equal the recorded one before anything runs.
    ``spec_overrides`` replace campaign spec fields, e.g. command templates
    for tools that moved.
    """
    recorded = ledger.trial(trial_id)
    if recorded is None:
        raise TrialNotFound(f"no trial {trial_id} in {ledger.path}")
    spec = CampaignSpec.from_dict(ledger.header["spec"], artifact_dir=workdir, workers=1, **spec_overrides)
    stream = stream_from_description(ledger.header["configSource"])

    config = None
    if stream.centroid_set is not None:
        if recorded.centroid_index is None or recorded.centroid_index >= stream.centroid_set.k:
            raise ReplayMismatch(f"trial {trial_id} names centroid {recorded.centroid_index}, which the ledger lacks")
        centroid = stream.centroid_set.centroids[recorded.centroid_index]
        config = config_from_draw(centroid, recorded.centroid_index, recorded.draw_seed)
    recorded_bits = recorded.config.enabled if recorded.config is not None else None
    if (config.enabled if config is not None else None) != recorded_bits:
        raise ReplayMismatch(f"trial {trial_id}: configuration re-sampled from its draw seed differs from the ledger")

    draw = ConfigDraw(recorded.trial_id, recorded.centroid_index, recorded.draw_seed, recorded.generator_seed, config)
    replayed = execute_trial(spec, draw, workdir / str(trial_id))
    logger.info(
        "Replayed trial %d: recorded %s, now %s",
        trial_id,
        recorded.failure_class.value,
        replayed.failure_class.value,
    )
    return ReplayResult(recorded, replayed)
