import json
import platform
from dataclasses import dataclass, field
from datetime import datetime
from importlib import metadata
from pathlib import Path
from typing import Any

from django.utils import timezone

import featurefuzz


def tool_versions() -> dict[str, str]:
    versions = {
        "featurefuzz": featurefuzz.__version__,
        "python": platform.python_version(),
        "datasetFormat": str(featurefuzz.DATASET_FORMAT_VERSION),
        "centroidsFormat": str(featurefuzz.CENTROIDS_FORMAT_VERSION),
        "ledgerFormat": str(featurefuzz.LEDGER_FORMAT_VERSION),
    }
    for distribution in ("Django", "djangorestframework", "numpy"):
        try:
            versions[distribution] = metadata.version(distribution)
        except metadata.PackageNotFoundError:
            versions[distribution] = "unknown"
    return versions


def manifest_path_for(output: Path) -> Path:
    """Manifests sit next to the primary output (inside it for directories)."""
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


@dataclass
class RunManifest:
    """
    Record of one subcommand invocation.

    Fields:
        subcommand (str): Hyphenated subcommand name, e.g. ``gen-config``.
        parameters (dict): Every resolved option keyed by flag name without
            dashes. Feeding the manifest back through ``--config`` repeats
            the run with the same parameters.
        seeds (dict): Seed values used by the run, including drawn ones.
        drawn_seeds (list): Names of seeds that came from system entropy.
        tool_versions (dict): Toolkit, format and library versions.
        started_at / ended_at (datetime): Run lifecycle timestamps.
    """

    subcommand: str
    parameters: dict[str, Any]
    seeds: dict[str, int] = field(default_factory=dict)
    drawn_seeds: list[str] = field(default_factory=list)
    tool_versions: dict[str, str] = field(default_factory=tool_versions)
    started_at: datetime = field(default_factory=timezone.now)
    ended_at: datetime | None = None

    def finish(self) -> "RunManifest":
        self.ended_at = timezone.now()
        return self

    def to_dict(self, manifest_path: Path | None = None) -> dict[str, Any]:
        document = {
            "subcommand": self.subcommand,
            "parameters": {key: _jsonable(value) for key, value in self.parameters.items()},
            "seeds": dict(self.seeds),
            "drawnSeeds": list(self.drawn_seeds),
            "toolVersions": dict(self.tool_versions),
            "startedAt": self.started_at.isoformat(),
            "endedAt": self.ended_at.isoformat() if self.ended_at else None,
        }
        if manifest_path is not None:
            document["reinvoke"] = [self.subcommand, "--config", str(manifest_path)]
        return document

    def write_next_to(self, output: Path) -> Path:
        path = manifest_path_for(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(self.to_dict(path), indent=2) + "\n", encoding="utf-8"
        )
        return path
