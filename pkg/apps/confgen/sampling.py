"""
Generator configurations sampled from centroids.

Each centroid value is the probability that its feature is enabled. A
``ConfigStream`` walks the centroids round-robin and gives every draw its
own seed, so any single configuration can be regenerated from
``(centroid, draw_seed)`` alone.
"""

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from apps.clustering.centroids import CentroidsFile, load_centroids
from apps.core.errors import FeatureFuzzError
from apps.core.seeds import make_rng
from apps.features.catalog import FEATURE_COUNT, Centroid, GeneratorConfig, serialize_flags

logger = logging.getLogger(__name__)

DRAW_SEED_BOUND = 2**63
GENERATOR_SEED_BOUND = 2**32
SWARM_PROBABILITY = 0.5


class EmptyCentroidSet(FeatureFuzzError):
    pass


class ConfigSource(str, Enum):
    CENTROIDS = "centroids"
    SWARM = "swarm"
    DEFAULTS = "defaults"


@dataclass(frozen=True)
class CentroidSet:
    centroids: tuple[Centroid, ...]
    label: str
    source: ConfigSource = ConfigSource.CENTROIDS

    def __post_init__(self):
        if not self.centroids:
            raise EmptyCentroidSet("a centroid set needs at least one centroid")

    @property
    def k(self) -> int:
        return len(self.centroids)

    @classmethod
    def from_file(cls, path: Path) -> "CentroidSet":
        return cls.from_centroids_file(load_centroids(path))

    @classmethod
    def from_centroids_file(cls, document: CentroidsFile) -> "CentroidSet":
        return cls(document.centroids, document.path)

    @classmethod
    def swarm(cls) -> "CentroidSet":
        """Every feature on a coin flip: swarm testing's random configurations."""
        return cls((Centroid.uniform(SWARM_PROBABILITY),), ConfigSource.SWARM.value, ConfigSource.SWARM)


def config_gen(
    centroid: Centroid,
    rng: np.random.Generator,
    source_centroid: int | None = None,
    draw_seed: int | None = None,
) -> GeneratorConfig:
    # u is drawn from [0, 1): 1.0 always enables; u can be exactly 0, so 0.0 is masked
    values = np.asarray(centroid.values)
    enabled = (rng.random(FEATURE_COUNT) <= values) & (values > 0.0)
    return GeneratorConfig(
        tuple(bool(bit) for bit in enabled), source_centroid=source_centroid, draw_seed=draw_seed
    )


def config_from_draw(centroid: Centroid, centroid_index: int, draw_seed: int) -> GeneratorConfig:
    """Regenerate the configuration of one recorded draw."""
    rng = np.random.Generator(np.random.PCG64(draw_seed))
    return config_gen(centroid, rng, source_centroid=centroid_index, draw_seed=draw_seed)


@dataclass(frozen=True)
class ConfigDraw:
    """
    One emission of a :class:`ConfigStream`.

    ``config`` is None for the default-configuration baseline: the generator
    then runs without any feature flag.
    """

    index: int
    centroid_index: int | None
    draw_seed: int
    generator_seed: int
    config: GeneratorConfig | None

    @property
    def flags(self) -> list[str]:
        return serialize_flags(self.config) if self.config is not None else []

    def to_line(self) -> dict:
        return {
            "index": self.index,
            "centroidIndex": self.centroid_index,
            "drawSeed": self.draw_seed,
            "generatorSeed": self.generator_seed,
            "flags": self.flags,
        }


class ConfigStream:
    """
    Sequential, single-owner source of configurations.

    With a centroid set, draw ``n`` uses centroid ``n mod k``; without one it
    is the default-configuration baseline and only seeds are drawn.
    """

    def __init__(self, centroid_set: CentroidSet | None, seed: int):
        self.centroid_set = centroid_set
        self.seed = seed
        self.draw_counter = 0
        self.next_centroid_index = 0
        self._rng = make_rng(seed)

    @classmethod
    def default_baseline(cls, seed: int) -> "ConfigStream":
        return cls(None, seed)

    @property
    def source(self) -> ConfigSource:
        if self.centroid_set is None:
            return ConfigSource.DEFAULTS
        return self.centroid_set.source

    def next_draw(self) -> ConfigDraw:
        draw_seed = int(self._rng.integers(0, DRAW_SEED_BOUND))
        generator_seed = int(self._rng.integers(0, GENERATOR_SEED_BOUND))
        index = self.draw_counter
        self.draw_counter += 1

        if self.centroid_set is None:
            return ConfigDraw(index, None, draw_seed, generator_seed, None)

        centroid_index = self.next_centroid_index
        self.next_centroid_index = (centroid_index + 1) % self.centroid_set.k
        config = config_from_draw(self.centroid_set.centroids[centroid_index], centroid_index, draw_seed)
        return ConfigDraw(index, centroid_index, draw_seed, generator_seed, config)

    def next_config(self) -> GeneratorConfig | None:
        return self.next_draw().config

    def describe(self) -> dict:
        """Header form of the stream, with the centroids embedded for replay."""
        description = {"mode": self.source.value, "seed": self.seed}
        if self.centroid_set is not None:
            description["label"] = self.centroid_set.label
            description["centroids"] = [list(centroid.values) for centroid in self.centroid_set.centroids]
        return description


class ConfigDispenser:
    """Hands out draws to concurrent workers in one global round-robin order."""

    def __init__(self, stream: ConfigStream, limit: int | None = None):
        self.stream = stream
        self.limit = limit
        self._lock = threading.Lock()
        self._closed = False

    def take(self) -> ConfigDraw | None:
        with self._lock:
            if self._closed:
                return None
            if self.limit is not None and self.stream.draw_counter >= self.limit:
                return None
            return self.stream.next_draw()

    def close(self) -> None:
        with self._lock:
            self._closed = True

    @property
    def dispensed(self) -> int:
        with self._lock:
            return self.stream.draw_counter


def stream_from_description(description: dict) -> ConfigStream:
    """Rebuild the stream a ledger header describes (see :meth:`ConfigStream.describe`)."""
    source = ConfigSource(description["mode"])
    if source is ConfigSource.DEFAULTS:
        return ConfigStream.default_baseline(int(description["seed"]))
    centroids = tuple(Centroid.from_values(values) for values in description["centroids"])
    centroid_set = CentroidSet(centroids, description.get("label", source.value), source)
    return ConfigStream(centroid_set, int(description["seed"]))
