"""
How often each feature appears in the centroids.

A feature's score is the mean of its value over every centroid of every
run given; the score's band ranks it as very frequent, occasional or
rare. Runs are anything with a ``centroids`` tuple (a loaded centroids
file or a fresh ``ClusterResult``).
"""

import csv
import json
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from apps.core.errors import FeatureFuzzError
from apps.corpus.dataset import CorpusStats
from apps.features.catalog import FEATURE_COUNT, FEATURE_NAMES

DEFAULT_BANDS = (0.33, 0.66)


class InvalidBands(FeatureFuzzError):
    pass


class FrequencyBand(str, Enum):
    VERY_FREQUENT = "very frequent"
    OCCASIONALLY = "occasionally"
    RARELY = "rarely"


def band_for(score: float, bands: tuple[float, float]) -> FrequencyBand:
    low, high = bands
    if score >= high:
        return FrequencyBand.VERY_FREQUENT
    if score >= low:
        return FrequencyBand.OCCASIONALLY
    return FrequencyBand.RARELY


def check_bands(bands: Sequence[float]) -> tuple[float, float]:
    if len(bands) != 2 or not 0 < bands[0] < bands[1] < 1:
        raise InvalidBands(f"bands must be two thresholds with 0 < low < high < 1, got {list(bands)}")
    return float(bands[0]), float(bands[1])


@dataclass(frozen=True)
class FeatureFrequency:
    index: int
    name: str
    corpus_program_count: int | None
    centroid_values: tuple[tuple[float, ...], ...]  # per run, one value per centroid
    score: float
    band: FrequencyBand


@dataclass(frozen=True)
class FeatureFrequencyReport:
    features: tuple[FeatureFrequency, ...]
    run_labels: tuple[str, ...]
    run_sizes: tuple[int, ...]
    bands: tuple[float, float]

    def by_band(self) -> dict[FrequencyBand, list[str]]:
        grouped = {band: [] for band in FrequencyBand}
        for feature in self.features:
            grouped[feature.band].append(feature.name)
        return grouped

    def header(self) -> list[str]:
        columns = ["feature", "name", "corpusProgramCount"]
        for label, size in zip(self.run_labels, self.run_sizes):
            columns.extend(f"{label}[{index}]" for index in range(size))
        return columns + ["score", "band"]

    def write_csv(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(self.header())
            for feature in self.features:
                values = [f"{value:.6f}" for run in feature.centroid_values for value in run]
                count = "" if feature.corpus_program_count is None else feature.corpus_program_count
                writer.writerow(
                    [feature.index, feature.name, count, *values, f"{feature.score:.6f}", feature.band.value]
                )

    def to_dict(self) -> dict:
        return {
            "bands": list(self.bands),
            "runs": list(self.run_labels),
            "features": [
                {
                    "name": feature.name,
                    "corpusProgramCount": feature.corpus_program_count,
                    "centroidValues": [list(run) for run in feature.centroid_values],
                    "score": feature.score,
                    "band": feature.band.value,
                }
                for feature in self.features
            ],
        }

    def write_json(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def feature_frequency(
    stats: CorpusStats | None,
    results: Sequence,
    bands: Sequence[float] = DEFAULT_BANDS,
    labels: Sequence[str] | None = None,
) -> FeatureFrequencyReport:
    bands = check_bands(bands)
    if labels is None:
        labels = [getattr(result, "path", None) or f"k={len(result.centroids)}" for result in results]
    matrices = [np.array([centroid.values for centroid in result.centroids], dtype=float) for result in results]

    if matrices:
        scores = np.vstack(matrices).mean(axis=0)
    else:
        scores = np.zeros(FEATURE_COUNT)
    counts = stats.per_feature_program_count if stats is not None else (None,) * FEATURE_COUNT

    features = tuple(
        FeatureFrequency(
            index=index,
            name=name,
            corpus_program_count=counts[index],
            centroid_values=tuple(tuple(float(v) for v in matrix[:, index]) for matrix in matrices),
            score=float(scores[index]),
            band=band_for(float(scores[index]), bands),
        )
        for index, name in enumerate(FEATURE_NAMES)
    )
    return FeatureFrequencyReport(
        features=features,
        run_labels=tuple(str(label) for label in labels),
        run_sizes=tuple(len(matrix) for matrix in matrices),
        bands=bands,
    )
