import random

from django.test import SimpleTestCase

from apps.features.catalog import (
    FEATURE_COUNT,
    FEATURE_NAMES,
    Centroid,
    FeatureVector,
    GeneratorConfig,
    InvalidVector,
    UnknownFeature,
    feature_by_name,
    parse_flags,
    serialize_flags,
)


class FeatureByNameTests(SimpleTestCase):
    def test_there_are_28_features(self):
        self.assertEqual(FEATURE_COUNT, 28)
        self.assertEqual(len(set(FEATURE_NAMES)), 28)

    def test_volatiles_is_index_23(self):
        feature = feature_by_name("volatiles")
        self.assertEqual(feature.index, 23)
        self.assertEqual(feature.name, "volatiles")

    def test_argc_is_first(self):
        self.assertEqual(feature_by_name("argc").index, 0)

    def test_unknown_name_raises(self):
        with self.assertRaises(UnknownFeature):
            feature_by_name("gotos")

    def test_name_index_mapping_is_a_bijection(self):
        for index, name in enumerate(FEATURE_NAMES):
            self.assertEqual(feature_by_name(name).index, index)


class VectorTests(SimpleTestCase):
    def test_binary_follows_counts(self):
        counts = [0] * FEATURE_COUNT
        counts[3] = 5
        vector = FeatureVector.from_counts(counts)
        self.assertEqual(vector.binary[3], 1)
        self.assertEqual(sum(vector.binary), 1)
        self.assertEqual(vector.present(), ["comma-operators"])

    def test_wrong_length_is_rejected(self):
        with self.assertRaises(InvalidVector):
            FeatureVector.from_counts([1, 2, 3])

    def test_negative_count_is_rejected(self):
        with self.assertRaises(InvalidVector):
            FeatureVector.from_counts([-1] + [0] * (FEATURE_COUNT - 1))

    def test_centroid_values_must_be_probabilities(self):
        with self.assertRaises(InvalidVector):
            Centroid.from_values([1.5] + [0.0] * (FEATURE_COUNT - 1))
        self.assertEqual(Centroid.uniform(0.5).values, (0.5,) * FEATURE_COUNT)


class FlagTests(SimpleTestCase):
    def test_all_enabled(self):
        flags = serialize_flags(GeneratorConfig.all_enabled())
        self.assertEqual(len(flags), 28)
        self.assertEqual(flags[0], "--argc")
        self.assertEqual(flags[-1], "--builtins")
        self.assertTrue(all(not flag.startswith("--no-") for flag in flags))

    def test_all_disabled(self):
        flags = serialize_flags(GeneratorConfig.all_disabled())
        self.assertEqual(flags[0], "--no-argc")
        self.assertEqual(flags[-1], "--no-builtins")
        self.assertTrue(all(flag.startswith("--no-") for flag in flags))

    def test_only_volatiles(self):
        flags = serialize_flags(GeneratorConfig.only("volatiles"))
        self.assertEqual(flags[23], "--volatiles")
        self.assertEqual(sum(1 for flag in flags if flag.startswith("--no-")), 27)

    def test_parse_single_flag_warns_for_the_rest(self):
        with self.assertLogs("apps.features.catalog", "WARNING") as logs:
            config = parse_flags(["--volatiles"])
        self.assertEqual(config, GeneratorConfig.only("volatiles"))
        self.assertEqual(len(logs.records), 27)

    def test_parse_unknown_flag(self):
        with self.assertRaises(UnknownFeature):
            parse_flags(["--no-such-thing"])
        with self.assertRaises(UnknownFeature):
            parse_flags(["volatiles"])

    def test_round_trip_on_random_configs(self):
        rng = random.Random(20240611)
        for _ in range(200):
            config = GeneratorConfig(tuple(rng.random() < 0.5 for _ in range(FEATURE_COUNT)))
            self.assertEqual(parse_flags(serialize_flags(config)), config)
