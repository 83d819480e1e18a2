"""
Bounded external processes.

Every child runs in its own session so a timeout can kill the whole
process group (a compiler driver and its cc1, a binary and anything it
forked) rather than only the direct child.
"""

import logging
import os
import signal
import subprocess
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from apps.core.errors import FeatureFuzzError

from .outcomes import ExitDescriptor

logger = logging.getLogger(__name__)


class ExecutableNotFound(FeatureFuzzError):
    pass


@dataclass(frozen=True)
class ProcessResult:
    argv: tuple[str, ...]
    returncode: int | None
    stdout: bytes
    stderr: bytes
    timed_out: bool
    seconds: float

    @property
    def exit(self) -> ExitDescriptor | None:
        if self.returncode is None:
            return None
        return ExitDescriptor.from_returncode(self.returncode)


def _kill_group(process: subprocess.Popen) -> None:
    try:
        os.killpg(process.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        process.kill()


def run_bounded(
    argv: Sequence[str],
    timeout: float,
    cwd: Path | None = None,
    not_found: type[ExecutableNotFound] = ExecutableNotFound,
) -> ProcessResult:
    """
    Run ``argv`` without a shell, killing its process group after ``timeout`` seconds.

    A timed out result has ``timed_out`` set and no return code. A missing or
    non-executable program raises ``not_found``.
    """
    argv = tuple(str(arg) for arg in argv)
    started = time.monotonic()
    try:
        process = subprocess.Popen(
            argv,
            cwd=cwd,
            stdin=subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,
        )
    except (FileNotFoundError, PermissionError, NotADirectoryError) as exc:
        raise not_found(f"cannot execute {argv[0]!r}: {exc.strerror or exc}") from exc

    try:
        stdout, stderr = process.communicate(timeout=timeout)
    except subprocess.TimeoutExpired:
        _kill_group(process)
        stdout, stderr = process.communicate()
        seconds = time.monotonic() - started
        logger.debug("Killed %s after %.2fs", argv[0], seconds)
        return ProcessResult(argv, None, stdout, stderr, True, seconds)

    return ProcessResult(argv, process.returncode, stdout, stderr, False, time.monotonic() - started)
