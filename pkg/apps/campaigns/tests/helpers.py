import hashlib
import shlex
import sys
from pathlib import Path

from apps.campaigns.ledger import TrialRecord
from apps.campaigns.outcomes import ExitDescriptor, FailureClass, LevelOutcome, OutcomeStatus, StdoutDigest
from apps.campaigns.spec import CampaignSpec
from apps.features.catalog import GeneratorConfig

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
DOUBLES_DIR = Path(__file__).resolve().parents[3] / "tools" / "doubles"
MOCK_GENERATOR = DOUBLES_DIR / "mock_csmith.py"
MOCK_COMPILER = DOUBLES_DIR / "mock_cc.py"


def generator_template(*extra: str) -> str:
    parts = [sys.executable, str(MOCK_GENERATOR), "{flags}", *extra, "--seed", "{seed}", "--output", "{output}"]
    return shlex.join(parts)


def compiler_template() -> str:
    return shlex.join([sys.executable, str(MOCK_COMPILER), "{optlevel}", "-o", "{output}", "{input}"])


def mock_spec(artifact_dir: Path, **overrides) -> CampaignSpec:
    values = {
        "generator_cmd": generator_template(),
        "compiler_cmd": compiler_template(),
        "artifact_dir": artifact_dir,
        "compile_timeout": 1.5,
        "run_timeout": 1.5,
        "generator_timeout": 10.0,
        "time_budget": 600.0,
        "rng_seed": 20240611,
        "label": "mock",
    }
    values.update(overrides)
    return CampaignSpec(**values)


def outcome(opt_level: str, status: str, stdout: str = "checksum = 0\n", exit: int = 0, signal: int = 11) -> LevelOutcome:
    """A ``LevelOutcome`` with plausible exit data for ``status``."""
    status = OutcomeStatus(status)
    if status == OutcomeStatus.OK:
        data = stdout.encode()
        return LevelOutcome(
            opt_level,
            status,
            compile_exit=ExitDescriptor(code=0),
            run_exit=ExitDescriptor(code=exit),
            stdout=StdoutDigest(hashlib.sha256(data).hexdigest(), len(data), stdout),
        )
    if status == OutcomeStatus.COMPILER_CRASH:
        return LevelOutcome(opt_level, status, compile_exit=ExitDescriptor(signal=6))
    if status == OutcomeStatus.COMPILE_ERROR:
        return LevelOutcome(opt_level, status, compile_exit=ExitDescriptor(code=1))
    if status == OutcomeStatus.RUN_CRASH:
        return LevelOutcome(
            opt_level, status, compile_exit=ExitDescriptor(code=0), run_exit=ExitDescriptor(signal=signal)
        )
    if status == OutcomeStatus.RUN_TIMEOUT:
        return LevelOutcome(opt_level, status, compile_exit=ExitDescriptor(code=0))
    return LevelOutcome(opt_level, status)


def trial_record(trial_id: int, low="ok", high="ok", failure_class=FailureClass.NONE, **levels) -> TrialRecord:
    """A ledger trial with all features enabled; ``levels`` go to both outcomes."""
    return TrialRecord(
        trial_id=trial_id,
        centroid_index=0,
        draw_seed=1000 + trial_id,
        generator_seed=trial_id,
        config=GeneratorConfig.all_enabled(),
        flags=[],
        outcomes={"-O0": outcome("-O0", low, **levels), "-O3": outcome("-O3", high, **levels)},
        failure_class=failure_class,
    )
