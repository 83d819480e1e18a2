"""
Base class for the toolkit's management commands.

Options are declared with :meth:`ToolkitCommand.option` instead of
``parser.add_argument`` so that each value can come from, in order of
precedence, the command line, a ``--config`` file, or the toolkit defaults
in ``settings.FEATUREFUZZ``. Argparse never sees a default, which is how
an explicit flag is told apart from an absent one.
"""

import json
import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand, CommandError, CommandParser
from dotenv import dotenv_values

from .errors import FeatureFuzzError, IOFailure
from .manifest import RunManifest
from .seeds import fresh_seed, validate_seed

logger = logging.getLogger(__name__)

VERBOSITY_LEVELS = {0: logging.WARNING, 1: None, 2: logging.DEBUG, 3: logging.DEBUG}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def comma_list(item_type: Callable[[str], Any]) -> Callable[[str], list[Any]]:
    """Argparse type for ``--k 1,2,4`` style values."""

    def parse(value: str) -> list[Any]:
        return [item_type(part.strip()) for part in value.split(",") if part.strip()]

    parse.__name__ = f"comma_list({getattr(item_type, '__name__', 'value')})"
    return parse


def parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class OptionSpec:
    flag: str
    dest: str
    kind: str  # "value", "flag", "append" or "nargs"
    type: Callable[[str], Any]
    default: Any
    seed: bool = False
    # value may start with "-", e.g. --opt-levels -O0,-O3
    dash_value: bool = False

    @property
    def key(self) -> str:
        return self.flag.lstrip("-")


def load_config_file(path: Path) -> dict[str, Any]:
    """
    Read a flat key/value config file.

    ``.json`` files may be a plain object or a run manifest (its
    ``parameters`` are used); anything else is parsed as a dotenv file.
    Keys are flag names without the leading dashes.
    """
    if not path.is_file():
        raise CommandError(f"config file not found: {path}")
    if path.suffix == ".json":
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CommandError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise CommandError(f"config file {path} must hold a JSON object")
        if "subcommand" in document and isinstance(document.get("parameters"), dict):
            document = document["parameters"]
        return {str(key): value for key, value in document.items()}
    return {str(key): value for key, value in dotenv_values(path).items()}


class ToolkitCommand(BaseCommand):
    """
    Shared plumbing for featurefuzz subcommands.

    Subclasses set ``subcommand`` (the hyphenated CLI name), declare their
    options in ``add_toolkit_arguments`` and implement ``run(params)``,
    returning the primary output path(s) the run manifest is written next to.
    """

    subcommand: str = ""
    requires_system_checks = []
    writes_manifest = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.option_specs: dict[str, OptionSpec] = {}

    def option(
        self,
        parser: CommandParser,
        flag: str,
        *,
        type: Callable[[str], Any] = str,
        default: Any = None,
        kind: str = "value",
        seed: bool = False,
        dash_value: bool = False,
        help: str = "",
        metavar: str | None = None,
    ) -> None:
        dest = flag.lstrip("-").replace("-", "_")
        if kind == "flag":
            parser.add_argument(flag, dest=dest, action="store_const", const=True, default=None, help=help)
        elif kind == "append":
            parser.add_argument(flag, dest=dest, action="append", type=type, default=None, help=help, metavar=metavar)
        elif kind == "nargs":
            parser.add_argument(flag, dest=dest, nargs="+", type=type, default=None, help=help, metavar=metavar)
        else:
            parser.add_argument(flag, dest=dest, type=type, default=None, help=help, metavar=metavar)
        self.option_specs[dest] = OptionSpec(flag, dest, kind, type, default, seed, dash_value)

    def dash_value_flags(self) -> set[str]:
        return {spec.flag for spec in self.option_specs.values() if spec.dash_value}

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument(
            "--config",
            type=Path,
            default=None,
            help="Flat key/value file (dotenv or JSON, or a run manifest) supplying option values.",
        )
        self.add_toolkit_arguments(parser)

    def add_toolkit_arguments(self, parser: CommandParser) -> None:
        raise NotImplementedError

    def run(self, params: dict[str, Any]) -> Path | Iterable[Path] | None:
        raise NotImplementedError

    # Resolution

    def _coerce(self, spec: OptionSpec, value: Any) -> Any:
        if spec.kind == "flag":
            return value if isinstance(value, bool) else parse_bool(str(value))
        if spec.kind in ("append", "nargs"):
            items = value if isinstance(value, list) else [
                part for part in str(value).split(",") if part.strip()
            ]
            return [spec.type(item if isinstance(item, str) else str(item)) for item in items]
        if isinstance(value, list):
            value = ",".join(str(item) for item in value)
        return spec.type(value if isinstance(value, str) else str(value))

    def resolve_parameters(self, options: dict[str, Any]) -> tuple[dict[str, Any], RunManifest]:
        file_values: dict[str, Any] = {}
        if options.get("config") is not None:
            file_values = load_config_file(options["config"])
        known = {spec.key for spec in self.option_specs.values()}
        unknown = sorted(set(file_values) - known)
        if unknown:
            raise CommandError(f"unknown keys in config file: {', '.join(unknown)}")

        params: dict[str, Any] = {}
        seeds: dict[str, int] = {}
        drawn: list[str] = []
        for dest, spec in self.option_specs.items():
            value = options.get(dest)
            if value is None and file_values.get(spec.key) not in (None, ""):
                try:
                    value = self._coerce(spec, file_values[spec.key])
                except (TypeError, ValueError) as exc:
                    raise CommandError(f"bad value for {spec.key!r} in config file: {exc}") from exc
            if value is None:
                value = spec.default() if callable(spec.default) else spec.default
            if spec.seed:
                if value is None:
                    value = fresh_seed()
                    drawn.append(spec.key)
                try:
                    validate_seed(value)
                except ValueError as exc:
                    raise CommandError(str(exc)) from exc
                seeds[spec.key] = value
            params[dest] = value

        manifest = RunManifest(
            subcommand=self.subcommand,
            parameters={self.option_specs[dest].key: value for dest, value in params.items()},
            seeds=seeds,
            drawn_seeds=drawn,
        )
        return params, manifest

    def require(self, params: dict[str, Any], *dests: str) -> None:
        missing = [self.option_specs[dest].flag for dest in dests if params.get(dest) in (None, [])]
        if missing:
            raise CommandError(f"missing required option(s): {', '.join(missing)}")

    def configure_logging(self, verbosity: int) -> None:
        level = VERBOSITY_LEVELS.get(verbosity, logging.DEBUG)
        if level is not None:
            logging.getLogger("apps").setLevel(level)

    def handle(self, *args, **options):
        self.configure_logging(options.get("verbosity", 1))
        params, manifest = self.resolve_parameters(options)
        for name in manifest.drawn_seeds:
            logger.info("No --%s given; drew %d from system entropy", name, manifest.seeds[name])
        try:
            self.finish(self.run(params), manifest)
        except FeatureFuzzError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except OSError as exc:
            failure = IOFailure.from_os_error(exc)
            failure.__cause__ = exc
            raise CommandError(str(failure), returncode=failure.exit_code) from failure
        return None

    def finish(self, outputs: Path | Iterable[Path] | None, manifest: RunManifest) -> None:
        if not self.writes_manifest or outputs is None:
            return
        if isinstance(outputs, Path):
            outputs = [outputs]
        manifest.finish()
        for output in outputs:
            manifest.write_next_to(output)
