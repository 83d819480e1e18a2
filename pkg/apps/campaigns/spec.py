"""
Campaign parameters and command templates.

Templates are split with shell quoting rules but never run through a
shell. ``{flags}`` must be a whole argument and expands to one argument
per feature flag; the other placeholders are substituted inside
arguments.
"""

import re
import shlex
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from apps.core.errors import FeatureFuzzError
from apps.core.seeds import validate_seed

from .process import ExecutableNotFound

GENERATOR_PLACEHOLDERS = ("{flags}", "{seed}", "{output}")
COMPILER_PLACEHOLDERS = ("{optlevel}", "{input}", "{output}")

_BUDGET_RE = re.compile(
    r"^(?:(?P<h>\d+(?:\.\d+)?)h)?(?:(?P<m>\d+(?:\.\d+)?)m)?(?:(?P<s>\d+(?:\.\d+)?)s)?$"
)


class InvalidCampaignSpec(FeatureFuzzError):
    pass


class GeneratorNotFound(ExecutableNotFound):
    pass


class CompilerNotFound(ExecutableNotFound):
    pass


def parse_budget(text: str | float | int) -> float:
    """Seconds from ``13h``, ``90m``, ``1h30m``, ``45s`` or a plain number of seconds."""
    if isinstance(text, (int, float)):
        seconds = float(text)
    else:
        value = text.strip().lower()
        try:
            seconds = float(value)
        except ValueError:
            match = _BUDGET_RE.match(value)
            if not value or match is None:
                raise InvalidCampaignSpec(f"cannot parse time budget {text!r}") from None
            seconds = (
                float(match["h"] or 0) * 3600 + float(match["m"] or 0) * 60 + float(match["s"] or 0)
            )
    if seconds < 0:
        raise InvalidCampaignSpec("time budget must not be negative")
    return seconds


def split_template(template: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(template, str):
        try:
            return tuple(shlex.split(template))
        except ValueError as exc:
            raise InvalidCampaignSpec(f"cannot split command template {template!r}: {exc}") from exc
    return tuple(template)


def _check_template(name: str, argv: tuple[str, ...], placeholders: Sequence[str]) -> None:
    if not argv:
        raise InvalidCampaignSpec(f"{name} command template is empty")
    joined = " ".join(argv)
    missing = [placeholder for placeholder in placeholders if placeholder not in joined]
    if missing:
        raise InvalidCampaignSpec(f"{name} command template lacks {', '.join(missing)}")


def _substitute(argument: str, values: dict[str, str]) -> str:
    for placeholder, value in values.items():
        argument = argument.replace(placeholder, value)
    return argument


@dataclass(frozen=True)
class CampaignSpec:
    generator_cmd: tuple[str, ...]
    compiler_cmd: tuple[str, ...]
    artifact_dir: Path
    opt_levels: tuple[str, str] = ("-O0", "-O3")
    compile_timeout: float = 10.0
    run_timeout: float = 10.0
    generator_timeout: float = 60.0
    time_budget: float = 13 * 3600.0
    rng_seed: int = 0
    workers: int = 1
    max_trials: int | None = None
    label: str = ""
    stdout_head_bytes: int = field(default=4096, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generator_cmd", split_template(self.generator_cmd))
        object.__setattr__(self, "compiler_cmd", split_template(self.compiler_cmd))
        object.__setattr__(self, "artifact_dir", Path(self.artifact_dir).absolute())
        object.__setattr__(self, "opt_levels", tuple(self.opt_levels))

        _check_template("generator", self.generator_cmd, GENERATOR_PLACEHOLDERS)
        _check_template("compiler", self.compiler_cmd, COMPILER_PLACEHOLDERS)
        if any("{flags}" in arg and arg != "{flags}" for arg in self.generator_cmd):
            raise InvalidCampaignSpec("{flags} must be a whole argument of the generator template")
        if len(self.opt_levels) != 2 or self.opt_levels[0] == self.opt_levels[1]:
            raise InvalidCampaignSpec(f"need two distinct optimization levels, got {list(self.opt_levels)}")
        for name in ("compile_timeout", "run_timeout", "generator_timeout"):
            if getattr(self, name) <= 0:
                raise InvalidCampaignSpec(f"{name.replace('_', '-')} must be positive")
        if self.time_budget < 0:
            raise InvalidCampaignSpec("time budget must not be negative")
        if self.workers < 1:
            raise InvalidCampaignSpec("workers must be at least 1")
        if self.max_trials is not None and self.max_trials < 0:
            raise InvalidCampaignSpec("max-trials must not be negative")
        try:
            validate_seed(self.rng_seed)
        except ValueError as exc:
            raise InvalidCampaignSpec(str(exc)) from None

    def generator_argv(self, flags: Sequence[str], seed: int, output: Path) -> list[str]:
        values = {"{seed}": str(seed), "{output}": str(output)}
        argv: list[str] = []
        for argument in self.generator_cmd:
            if argument == "{flags}":
                argv.extend(flags)
            else:
                argv.append(_substitute(argument, values))
        return argv

    def compiler_argv(self, opt_level: str, source: Path, output: Path) -> list[str]:
        values = {"{optlevel}": opt_level, "{input}": str(source), "{output}": str(output)}
        return [_substitute(argument, values) for argument in self.compiler_cmd]

    def to_dict(self) -> dict:
        return {
            "generatorCmd": list(self.generator_cmd),
            "compilerCmd": list(self.compiler_cmd),
            "optLevels": list(self.opt_levels),
            "compileTimeout": self.compile_timeout,
            "runTimeout": self.run_timeout,
            "generatorTimeout": self.generator_timeout,
            "timeBudget": self.time_budget,
            "rngSeed": self.rng_seed,
            "workers": self.workers,
            "maxTrials": self.max_trials,
            "artifactDir": str(self.artifact_dir),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "CampaignSpec":
        values = {
            "generator_cmd": data["generatorCmd"],
            "compiler_cmd": data["compilerCmd"],
            "opt_levels": data["optLevels"],
            "compile_timeout": data["compileTimeout"],
            "run_timeout": data["runTimeout"],
            "generator_timeout": data.get("generatorTimeout", 60.0),
            "time_budget": data["timeBudget"],
            "rng_seed": data["rngSeed"],
            "workers": data.get("workers", 1),
            "max_trials": data.get("maxTrials"),
            "artifact_dir": data["artifactDir"],
            "label": data.get("label", ""),
        }
        values.update(overrides)
        return cls(**values)
