"""
Corpus ingestion, dataset files and corpus statistics.

A dataset file is UTF-8 JSON lines: a header object (format version,
feature order, creation time, corpus root) followed by one record per
source file, sorted by id. Binary vectors are derived on load.
"""

import csv
import json
import logging
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
from django.utils import timezone

from apps.core.errors import FeatureFuzzError, LocatedError
from apps.core.jsonl import dumps_line, iter_lines
from apps.features.catalog import FEATURE_COUNT, FEATURE_NAMES, FeatureVector, check_feature_order
from apps.features.extractor import ExtractionResult, MatchSite, SourceUnit, extract_features
from featurefuzz import DATASET_FORMAT_VERSION

from .serializers import DatasetHeaderSerializer, DatasetRecordSerializer, first_error

logger = logging.getLogger(__name__)

DATASET_FORMAT = "featurefuzz-dataset"


class CorpusNotFound(FeatureFuzzError):
    pass


class EmptyCorpus(FeatureFuzzError):
    pass


class DatasetFormatError(LocatedError):
    pass


class FormatVersionMismatch(DatasetFormatError):
    pass


class FeatureOrderMismatch(DatasetFormatError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    parsable: bool
    vector: FeatureVector | None
    reason: str | None = None

    @classmethod
    def from_extraction(cls, record_id: str, result: ExtractionResult) -> "DatasetRecord":
        return cls(record_id, result.parsable, result.vector, result.error)

    def to_line(self) -> dict:
        line = {
            "id": self.id,
            "parsable": self.parsable,
            "counts": list(self.vector.counts) if self.vector is not None else None,
        }
        if self.reason:
            line["reason"] = self.reason
        return line


@dataclass
class Dataset:
    records: list[DatasetRecord]
    corpus_root: str
    created_at: datetime = field(default_factory=timezone.now)
    feature_order: tuple[str, ...] = FEATURE_NAMES
    # match sites per record id, only filled by ingest(keep_sites=True)
    sites: dict[str, tuple[MatchSite, ...]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ids = [record.id for record in self.records]
        if len(ids) != len(set(ids)):
            raise DatasetFormatError("dataset record ids must be unique")

    @property
    def parsable_records(self) -> list[DatasetRecord]:
        return [record for record in self.records if record.parsable]

    def binary_matrix(self) -> tuple[list[str], np.ndarray]:
        """Ids and the n×28 0/1 matrix of the parsable records, in dataset order."""
        parsable = self.parsable_records
        matrix = np.array(
            [record.vector.binary for record in parsable], dtype=float
        ).reshape(len(parsable), FEATURE_COUNT)
        return [record.id for record in parsable], matrix


def discover(root: Path, include_globs: Iterable[str]) -> list[tuple[str, Path]]:
    found: dict[str, Path] = {}
    for pattern in include_globs:
        for path in root.glob(pattern):
            if path.is_file():
                found[path.relative_to(root).as_posix()] = path
    return sorted(found.items())


def _extract_path(item: tuple[str, Path]) -> tuple[str, ExtractionResult]:
    record_id, path = item
    return record_id, extract_features(SourceUnit.read(path, record_id))


def ingest(
    root: Path,
    include_globs: Iterable[str] = ("**/*.c",),
    workers: int = 1,
    keep_sites: bool = False,
) -> Dataset:
    """
    Extract every file under ``root`` matching ``include_globs``.

    Records come out sorted by id (the path relative to ``root``) no matter
    how many worker processes share the extraction.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusNotFound(f"corpus directory not found: {root}")
    items = discover(root, include_globs)
    if not items:
        raise EmptyCorpus(f"no files under {root} match {list(include_globs)}")

    logger.info("Extracting features from %d files under %s", len(items), root)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_path, items, chunksize=32))
    else:
        results = [_extract_path(item) for item in items]

    records = []
    for record_id, result in results:
        if not result.parsable:
            logger.info("Skipping unparsable %s: %s", record_id, result.error)
        records.append(DatasetRecord.from_extraction(record_id, result))
    dataset = Dataset(records=records, corpus_root=str(root))
    if keep_sites:
        dataset.sites = {record_id: result.diagnostics for record_id, result in results if result.parsable}
    logger.info(
        "Ingested %d files, %d parsable", len(records), len(dataset.parsable_records)
    )
    return dataset


def save_dataset(dataset: Dataset, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": DATASET_FORMAT,
        "formatVersion": DATASET_FORMAT_VERSION,
        "featureOrder": list(dataset.feature_order),
        "createdAt": dataset.created_at.isoformat(),
        "corpusRoot": dataset.corpus_root,
    }
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_line(header) + "\n")
        for record in dataset.records:
            handle.write(dumps_line(record.to_line()) + "\n")
    return path


def load_dataset(path: Path) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise DatasetFormatError(f"dataset file not found: {path}")
    lines = iter_lines(path)
    first = next(lines, None)
    if first is None:
        raise DatasetFormatError(f"{path} is empty", line=1)
    number, header, _ = first
    serializer = DatasetHeaderSerializer(data=header)
    if header is None or not serializer.is_valid():
        detail = first_error(serializer.errors) if header is not None else "not JSON"
        raise DatasetFormatError(f"bad dataset header: {detail}", line=number)
    header = serializer.validated_data
    if header["formatVersion"] != DATASET_FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"dataset format {header['formatVersion']}, expected {DATASET_FORMAT_VERSION}",
            line=number,
        )
    if not check_feature_order(header["featureOrder"]):
        raise FeatureOrderMismatch("dataset feature order differs from the canonical order", line=number)

    records = []
    for number, obj, _ in lines:
        serializer = DatasetRecordSerializer(data=obj)
        if obj is None or not serializer.is_valid():
            detail = first_error(serializer.errors) if obj is not None else "not JSON"
            raise DatasetFormatError(f"bad dataset record: {detail}", line=number)
        data = serializer.validated_data
        vector = FeatureVector.from_counts(data["counts"]) if data["counts"] is not None else None
        records.append(DatasetRecord(data["id"], data["parsable"], vector, data.get("reason")))
    try:
        return Dataset(records=records, corpus_root=header["corpusRoot"], created_at=header["createdAt"])
    except DatasetFormatError as exc:
        raise DatasetFormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class CorpusStats:
    total_files: int
    parsable_files: int
    per_feature_program_count: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "formatVersion": DATASET_FORMAT_VERSION,
            "featureOrder": list(FEATURE_NAMES),
            "totalFiles": self.total_files,
            "parsableFiles": self.parsable_files,
            "perFeatureProgramCount": list(self.per_feature_program_count),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "CorpusStats":
        if not check_feature_order(document.get("featureOrder", ())):
            raise FeatureOrderMismatch("stats feature order differs from the canonical order")
        return cls(
            total_files=int(document["totalFiles"]),
            parsable_files=int(document["parsableFiles"]),
            per_feature_program_count=tuple(int(n) for n in document["perFeatureProgramCount"]),
        )


def stats(dataset: Dataset) -> CorpusStats:
    parsable = dataset.parsable_records
    per_feature = [0] * FEATURE_COUNT
    for record in parsable:
        for index, bit in enumerate(record.vector.binary):
            per_feature[index] += bit
    return CorpusStats(
        total_files=len(dataset.records),
        parsable_files=len(parsable),
        per_feature_program_count=tuple(per_feature),
    )


def write_stats(corpus_stats: CorpusStats, csv_path: Path, json_path: Path) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["feature", "name", "count"])
        for index, (name, count) in enumerate(zip(FEATURE_NAMES, corpus_stats.per_feature_program_count)):
            writer.writerow([index, name, count])
    json_path.write_text(json.dumps(corpus_stats.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_stats(path: Path) -> CorpusStats:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        return CorpusStats.from_dict(document)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"cannot read corpus stats {path}: {exc}") from exc


def export_vectors(dataset: Dataset, directory: Path) -> tuple[Path, Path]:
    """
    Write ``vectors.tsv`` and ``metadata.tsv`` for embedding projectors.

    Row i of the metadata file (after its ``id`` header) names row i of the
    vectors file; only parsable records are exported.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    vectors_path = directory / "vectors.tsv"
    metadata_path = directory / "metadata.tsv"
    parsable = dataset.parsable_records
    with open(vectors_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        for record in parsable:
            writer.writerow(record.vector.binary)
    with open(metadata_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(["id"])
        for record in parsable:
            writer.writerow([record.id])
    return vectors_path, metadata_path
