"""Centroids files: the JSON document ``cluster`` writes and ``gen-config``/``campaign`` read."""

import json
from dataclasses import dataclass
from pathlib import Path

from apps.core.errors import FeatureFuzzError
from apps.corpus.dataset import FeatureOrderMismatch, FormatVersionMismatch
from apps.corpus.serializers import first_error
from apps.features.catalog import FEATURE_NAMES, Centroid, check_feature_order
from featurefuzz import CENTROIDS_FORMAT_VERSION

from .kmeans import ClusterResult
from .serializers import CentroidsDocumentSerializer


class CentroidsFormatError(FeatureFuzzError):
    pass


@dataclass(frozen=True)
class CentroidsFile:
    path: str
    centroids: tuple[Centroid, ...]
    seed: int | None = None
    inertia: float | None = None
    cluster_sizes: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centroids)


def centroids_document(result: ClusterResult) -> dict:
    params = result.params
    return {
        "formatVersion": CENTROIDS_FORMAT_VERSION,
        "featureOrder": list(FEATURE_NAMES),
        "k": result.k,
        "seed": params.seed,
        "nInit": params.n_init,
        "maxIter": params.max_iter,
        "tolerance": params.tolerance,
        "inertia": result.inertia,
        "clusterSizes": list(result.cluster_sizes),
        "centroids": [list(centroid.values) for centroid in result.centroids],
        "iterationsRun": result.iterations_run,
        "restartIndex": result.restart_index,
        "converged": result.converged,
        "restartInertias": list(result.restart_inertias),
        "assignment": result.assignment,
    }


def save_centroids(result: ClusterResult, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(centroids_document(result), indent=2) + "\n", encoding="utf-8")
    return path


def parse_centroids(document, source: str = "<memory>") -> CentroidsFile:
    if not isinstance(document, dict):
        raise CentroidsFormatError(f"{source}: centroids file must hold a JSON object")
    version = document.get("formatVersion")
    if isinstance(version, int) and version != CENTROIDS_FORMAT_VERSION:
        raise FormatVersionMismatch(f"{source}: centroids format {version}, expected {CENTROIDS_FORMAT_VERSION}")
    serializer = CentroidsDocumentSerializer(data=document)
    if not serializer.is_valid():
        raise CentroidsFormatError(f"{source}: {first_error(serializer.errors)}")
    data = serializer.validated_data
    if not check_feature_order(data["featureOrder"]):
        raise FeatureOrderMismatch(f"{source}: centroid feature order differs from the canonical order")
    return CentroidsFile(
        path=source,
        centroids=tuple(Centroid.from_values(row) for row in data["centroids"]),
        seed=data.get("seed"),
        inertia=data.get("inertia"),
        cluster_sizes=tuple(data.get("clusterSizes") or ()),
    )


def load_centroids(path: Path) -> CentroidsFile:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CentroidsFormatError(f"centroids file not found: {path}") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CentroidsFormatError(f"cannot read centroids file {path}: {exc}") from exc
    return parse_centroids(document, str(path))
