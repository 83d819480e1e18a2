"""
Per-level outcomes and the failure taxonomy.

``classify`` is a pure function of two ``LevelOutcome`` values, so the
failure class of any ledger trial can be re-derived from its stored
outcomes.
"""

import signal as signals
from dataclasses import dataclass

from django.db import models


class OutcomeStatus(models.TextChoices):
    OK = "ok", "OK"
    COMPILER_CRASH = "compilerCrash", "Compiler crash"
    COMPILE_TIMEOUT = "compileTimeout", "Compile timeout"
    COMPILE_ERROR = "compileError", "Compile error"
    RUN_TIMEOUT = "runTimeout", "Run timeout"
    RUN_CRASH = "runCrash", "Run crash"


class FailureClass(models.TextChoices):
    # labels are the summary table's column names
    NONE = "none", "None"
    MISCOMPILATION = "miscompilation", "Miscompilation"
    CRASH_O0 = "crashO0", "Crash(0)"
    CRASH_O3 = "crashO3", "Crash(3)"
    CRASH_BOTH = "crashBoth", "Crash(both)"
    TIMEOUT_O0 = "timeoutO0", "Timeout(0)"
    TIMEOUT_O3 = "timeoutO3", "Timeout(3)"
    TIMEOUT_BOTH = "timeoutBoth", "Timeout(both)"
    RUN_DIVERGENCE_TIMEOUT = "runDivergenceTimeout", "Run timeout divergence"
    GENERATOR_ERROR = "generatorError", "Generator error"
    COMPILE_ERROR_O0 = "compileErrorO0", "Compile error(0)"
    COMPILE_ERROR_O3 = "compileErrorO3", "Compile error(3)"
    COMPILE_ERROR_BOTH = "compileErrorBoth", "Compile error(both)"


DIFFERENTIAL_CLASSES = frozenset(
    {
        FailureClass.MISCOMPILATION,
        FailureClass.CRASH_O0,
        FailureClass.CRASH_O3,
        FailureClass.TIMEOUT_O0,
        FailureClass.TIMEOUT_O3,
        FailureClass.COMPILE_ERROR_O0,
        FailureClass.COMPILE_ERROR_O3,
    }
)
CRASH_CLASSES = frozenset({FailureClass.CRASH_O0, FailureClass.CRASH_O3, FailureClass.CRASH_BOTH})
TIMEOUT_CLASSES = frozenset({FailureClass.TIMEOUT_O0, FailureClass.TIMEOUT_O3, FailureClass.TIMEOUT_BOTH})


def is_differential(failure_class: FailureClass) -> bool:
    return FailureClass(failure_class) in DIFFERENTIAL_CLASSES


@dataclass(frozen=True)
class ExitDescriptor:
    """How a process ended: an exit code, or the signal that killed it."""

    code: int | None = None
    signal: int | None = None

    @classmethod
    def from_returncode(cls, returncode: int) -> "ExitDescriptor":
        if returncode < 0:
            return cls(signal=-returncode)
        return cls(code=returncode)

    @property
    def signaled(self) -> bool:
        return self.signal is not None

    def describe(self) -> str:
        if self.signal is not None:
            try:
                return signals.Signals(self.signal).name
            except ValueError:
                return f"signal {self.signal}"
        return f"exit {self.code}"

    def to_dict(self) -> dict:
        return {"code": self.code, "signal": self.signal}

    @classmethod
    def from_dict(cls, data: dict | None) -> "ExitDescriptor | None":
        if data is None:
            return None
        return cls(code=data.get("code"), signal=data.get("signal"))


@dataclass(frozen=True)
class StdoutDigest:
    sha256: str
    size: int
    head: str

    def to_dict(self) -> dict:
        return {"sha256": self.sha256, "size": self.size, "head": self.head}

    @classmethod
    def from_dict(cls, data: dict | None) -> "StdoutDigest | None":
        if data is None:
            return None
        return cls(sha256=data["sha256"], size=data["size"], head=data["head"])


class OutcomeInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class LevelOutcome:
    """
    Result of compiling and running one program at one optimization level.

    ``stdout`` is set exactly when ``status`` is ok. ``run_exit`` is None when
    the binary never ran. Durations stay out of ``to_dict``; the ledger keeps
    them with the trial's timing.
    """

    opt_level: str
    status: OutcomeStatus
    compile_exit: ExitDescriptor | None = None
    run_exit: ExitDescriptor | None = None
    stdout: StdoutDigest | None = None
    compile_seconds: float = 0.0
    run_seconds: float = 0.0

    def __post_init__(self):
        if (self.status == OutcomeStatus.OK) != (self.stdout is not None):
            raise OutcomeInvariantError("stdout digest is recorded exactly for ok outcomes")

    def to_dict(self) -> dict:
        return {
            "optLevel": self.opt_level,
            "status": self.status.value,
            "compileExit": self.compile_exit.to_dict() if self.compile_exit else None,
            "runExit": self.run_exit.to_dict() if self.run_exit else None,
            "stdout": self.stdout.to_dict() if self.stdout else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LevelOutcome":
        return cls(
            opt_level=data["optLevel"],
            status=OutcomeStatus(data["status"]),
            compile_exit=ExitDescriptor.from_dict(data.get("compileExit")),
            run_exit=ExitDescriptor.from_dict(data.get("runExit")),
            stdout=StdoutDigest.from_dict(data.get("stdout")),
            compile_seconds=data.get("compileSeconds", 0.0),
            run_seconds=data.get("runSeconds", 0.0),
        )


def _one_sided(low: bool, high: bool, low_class, high_class, both_class) -> FailureClass | None:
    if low and high:
        return both_class
    if low:
        return low_class
    if high:
        return high_class
    return None


def classify(low: LevelOutcome, high: LevelOutcome) -> FailureClass:
    """
    Failure class of a trial from its low (-O0) and high (-O3) outcomes.

    Precedence: compiler crash, compile timeout, compile error, run timeout,
    then the run comparison. Crash classes are kept for compilers that died
    or reported an internal error; a program rejected with ordinary
    diagnostics is a compile error, one-sided or at both levels.
    """
    Status = OutcomeStatus

    found = _one_sided(
        low.status == Status.COMPILER_CRASH,
        high.status == Status.COMPILER_CRASH,
        FailureClass.CRASH_O0,
        FailureClass.CRASH_O3,
        FailureClass.CRASH_BOTH,
    )
    if found is None:
        found = _one_sided(
            low.status == Status.COMPILE_TIMEOUT,
            high.status == Status.COMPILE_TIMEOUT,
            FailureClass.TIMEOUT_O0,
            FailureClass.TIMEOUT_O3,
            FailureClass.TIMEOUT_BOTH,
        )
    if found is None:
        found = _one_sided(
            low.status == Status.COMPILE_ERROR,
            high.status == Status.COMPILE_ERROR,
            FailureClass.COMPILE_ERROR_O0,
            FailureClass.COMPILE_ERROR_O3,
            FailureClass.COMPILE_ERROR_BOTH,
        )
    if found is not None:
        return found

    if Status.RUN_TIMEOUT in (low.status, high.status):
        return FailureClass.RUN_DIVERGENCE_TIMEOUT

    if low.status == Status.RUN_CRASH and high.status == Status.RUN_CRASH:
        same_signal = low.run_exit == high.run_exit
        return FailureClass.NONE if same_signal else FailureClass.MISCOMPILATION
    if Status.RUN_CRASH in (low.status, high.status):
        return FailureClass.MISCOMPILATION

    if low.stdout.sha256 != high.stdout.sha256 or low.run_exit != high.run_exit:
        return FailureClass.MISCOMPILATION
    return FailureClass.NONE
