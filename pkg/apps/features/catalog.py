"""
The fixed universe of 28 generator-controllable C constructs.

Every vector, centroid and configuration in the toolkit is indexed by the
order of ``FEATURE_NAMES``; files persist that list as a header and refuse
to load when it disagrees.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from apps.core.errors import FeatureFuzzError

logger = logging.getLogger(__name__)

FEATURE_NAMES: tuple[str, ...] = (
    "argc",
    "arrays",
    "bitfields",
    "comma-operators",
    "compound-assignment",
    "consts",
    "divs",
    "pre-incr-operator",
    "pre-decr-operator",
    "post-incr-operator",
    "post-decr-operator",
    "unary-plus-operator",
    "jumps",
    "longlong",
    "int8",
    "uint8",
    "float",
    "inline-function",
    "muls",
    "packed-struct",
    "pointers",
    "structs",
    "unions",
    "volatiles",
    "volatile-pointers",
    "const-pointers",
    "global-variables",
    "builtins",
)
FEATURE_COUNT = len(FEATURE_NAMES)


class UnknownFeature(FeatureFuzzError):
    pass


class InvalidVector(FeatureFuzzError, ValueError):
    pass


@dataclass(frozen=True, slots=True)
class FeatureId:
    index: int
    name: str

    @property
    def enable_flag(self) -> str:
        return f"--{self.name}"

    @property
    def disable_flag(self) -> str:
        return f"--no-{self.name}"


FEATURES: tuple[FeatureId, ...] = tuple(
    FeatureId(index, name) for index, name in enumerate(FEATURE_NAMES)
)
_BY_NAME = {feature.name: feature for feature in FEATURES}


def feature_by_name(name: str) -> FeatureId:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownFeature(f"unknown feature {name!r}") from None


def check_feature_order(names: Sequence[str]) -> bool:
    return tuple(names) == FEATURE_NAMES


def _check_length(values: Sequence, what: str) -> None:
    if len(values) != FEATURE_COUNT:
        raise InvalidVector(f"{what} needs {FEATURE_COUNT} values, got {len(values)}")


@dataclass(frozen=True)
class FeatureVector:
    """Per-program occurrence counts; presence is derived, never stored."""

    counts: tuple[int, ...]

    def __post_init__(self):
        _check_length(self.counts, "feature vector")
        if any(count < 0 for count in self.counts):
            raise InvalidVector("feature counts must be non-negative")

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "FeatureVector":
        return cls(tuple(int(count) for count in counts))

    @classmethod
    def zeros(cls) -> "FeatureVector":
        return cls((0,) * FEATURE_COUNT)

    @property
    def binary(self) -> tuple[int, ...]:
        return tuple(1 if count > 0 else 0 for count in self.counts)

    def present(self) -> list[str]:
        return [name for name, bit in zip(FEATURE_NAMES, self.binary) if bit]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.binary, dtype=float)


@dataclass(frozen=True)
class Centroid:
    """28 per-feature inclusion probabilities in [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        _check_length(self.values, "centroid")
        for name, value in zip(FEATURE_NAMES, self.values):
            if not 0.0 <= value <= 1.0:
                raise InvalidVector(f"centroid value for {name} outside [0, 1]: {value}")

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Centroid":
        return cls(tuple(float(value) for value in values))

    @classmethod
    def uniform(cls, probability: float) -> "Centroid":
        return cls((float(probability),) * FEATURE_COUNT)


@dataclass(frozen=True)
class GeneratorConfig:
    """
    One on/off choice per feature.

    Fields:
        enabled (tuple[bool, ...]): Indexed by FeatureId order.
        source_centroid (int | None): Index of the centroid it was sampled from.
        draw_seed (int | None): Seed of the RNG that sampled it.
    """

    enabled: tuple[bool, ...]
    source_centroid: int | None = None
    draw_seed: int | None = None

    def __post_init__(self):
        _check_length(self.enabled, "generator config")

    @classmethod
    def all_enabled(cls) -> "GeneratorConfig":
        return cls((True,) * FEATURE_COUNT)

    @classmethod
    def all_disabled(cls) -> "GeneratorConfig":
        return cls((False,) * FEATURE_COUNT)

    @classmethod
    def only(cls, *names: str) -> "GeneratorConfig":
        chosen = {feature_by_name(name).index for name in names}
        return cls(tuple(index in chosen for index in range(FEATURE_COUNT)))


def serialize_flags(config: GeneratorConfig) -> list[str]:
    return [
        feature.enable_flag if enabled else feature.disable_flag
        for feature, enabled in zip(FEATURES, config.enabled)
    ]


def parse_flags(flags: Iterable[str]) -> GeneratorConfig:
    """
    Inverse of :func:`serialize_flags`.

    Unmentioned features stay disabled and each one is logged as a warning.
    When a feature is mentioned twice the last flag wins.
    """
    enabled: dict[int, bool] = {}
    for flag in flags:
        if not flag.startswith("--"):
            raise UnknownFeature(f"not a feature flag: {flag!r}")
        name = flag[2:]
        value = True
        if name.startswith("no-") and name not in _BY_NAME:
            name, value = name[3:], False
        feature = feature_by_name(name)
        if feature.index in enabled and enabled[feature.index] != value:
            logger.warning("Conflicting flags for %s; keeping %s", feature.name, flag)
        enabled[feature.index] = value

    for feature in FEATURES:
        if feature.index not in enabled:
            logger.warning("Feature %s not mentioned; treating it as disabled", feature.name)
    return GeneratorConfig(tuple(enabled.get(index, False) for index in range(FEATURE_COUNT)))
