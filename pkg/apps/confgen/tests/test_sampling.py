import json
import tempfile
import threading
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.confgen.sampling import (
    CentroidSet,
    ConfigDispenser,
    ConfigSource,
    ConfigStream,
    config_from_draw,
    config_gen,
    stream_from_description,
)
from apps.core.seeds import make_rng
from apps.features.catalog import FEATURE_COUNT, FEATURE_NAMES, Centroid, parse_flags


def centroid_set(*values, label="test"):
    return CentroidSet(tuple(Centroid.uniform(value) for value in values), label)


class ConfigGenTests(SimpleTestCase):
    def test_certain_values(self):
        rng = make_rng(1)
        for _ in range(200):
            self.assertTrue(all(config_gen(Centroid.uniform(1.0), rng).enabled))
            self.assertFalse(any(config_gen(Centroid.uniform(0.0), rng).enabled))

    def test_enable_frequency_matches_centroid_values(self):
        values = ([0.0, 0.3, 0.7, 1.0] * 7)[:FEATURE_COUNT]
        centroid = Centroid.from_values(values)
        rng = make_rng(987654321)
        draws = 100_000
        enabled = np.array([config_gen(centroid, rng).enabled for _ in range(draws)], dtype=float)
        frequency = enabled.mean(axis=0)
        for index, value in enumerate(values):
            with self.subTest(feature=FEATURE_NAMES[index], value=value):
                if value in (0.0, 1.0):
                    self.assertEqual(frequency[index], value)
                else:
                    self.assertLessEqual(abs(frequency[index] - value), 0.01)

        # pairwise independence of the features drawn with 0.3 and 0.7
        for first, second in ((1, 2), (1, 5), (2, 6), (5, 6)):
            with self.subTest(pair=(first, second)):
                correlation = np.corrcoef(enabled[:, first], enabled[:, second])[0, 1]
                self.assertLessEqual(abs(correlation), 5 / np.sqrt(draws))

    def test_draw_is_reproducible_from_its_seed(self):
        centroid = Centroid.uniform(0.4)
        first = config_from_draw(centroid, 2, 31337)
        self.assertEqual(first, config_from_draw(centroid, 2, 31337))
        self.assertEqual((first.source_centroid, first.draw_seed), (2, 31337))


class ConfigStreamTests(SimpleTestCase):
    def test_round_robin(self):
        stream = ConfigStream(centroid_set(0.1, 0.5, 0.9), seed=4)
        indexes = [stream.next_draw().centroid_index for _ in range(7)]
        self.assertEqual(indexes, [0, 1, 2, 0, 1, 2, 0])
        self.assertEqual([indexes.count(index) for index in range(3)], [3, 2, 2])
        self.assertEqual(stream.draw_counter, 7)
        self.assertEqual(stream.next_centroid_index, 1)

    def test_round_robin_fairness_for_experiment_ks(self):
        total = 1000
        for k in (1, 2, 4, 8, 16):
            stream = ConfigStream(centroid_set(*np.linspace(0, 1, k)), seed=k)
            usage = np.bincount([stream.next_draw().centroid_index for _ in range(total)], minlength=k)
            with self.subTest(k=k):
                self.assertTrue(all(total // k <= count <= -(-total // k) for count in usage))

    def test_single_centroid(self):
        stream = ConfigStream(centroid_set(0.6), seed=10)
        self.assertEqual({stream.next_draw().centroid_index for _ in range(20)}, {0})

    def test_same_seed_same_sequence(self):
        first = ConfigStream(centroid_set(0.2, 0.8), seed=2024)
        second = ConfigStream(centroid_set(0.2, 0.8), seed=2024)
        self.assertEqual([first.next_draw() for _ in range(50)], [second.next_draw() for _ in range(50)])

    def test_different_seeds_differ(self):
        first = ConfigStream(centroid_set(0.5), seed=1)
        second = ConfigStream(centroid_set(0.5), seed=2)
        self.assertNotEqual([first.next_config() for _ in range(5)], [second.next_config() for _ in range(5)])

    def test_draw_config_matches_its_seed(self):
        stream = ConfigStream(centroid_set(0.25, 0.75), seed=55)
        for _ in range(6):
            draw = stream.next_draw()
            centroid = stream.centroid_set.centroids[draw.centroid_index]
            self.assertEqual(draw.config, config_from_draw(centroid, draw.centroid_index, draw.draw_seed))

    def test_default_baseline(self):
        stream = ConfigStream.default_baseline(seed=3)
        draw = stream.next_draw()
        self.assertIsNone(draw.config)
        self.assertIsNone(draw.centroid_index)
        self.assertEqual(draw.flags, [])
        self.assertIs(stream.source, ConfigSource.DEFAULTS)

    def test_swarm(self):
        stream = ConfigStream(CentroidSet.swarm(), seed=8)
        self.assertIs(stream.source, ConfigSource.SWARM)
        self.assertEqual(stream.centroid_set.centroids[0].values, (0.5,) * FEATURE_COUNT)

    def test_flags_round_trip(self):
        draw = ConfigStream(centroid_set(0.5), seed=6).next_draw()
        self.assertEqual(len(draw.flags), FEATURE_COUNT)
        self.assertEqual(parse_flags(draw.flags).enabled, draw.config.enabled)

    def test_stream_from_description(self):
        original = ConfigStream(centroid_set(0.3, 0.9), seed=77)
        rebuilt = stream_from_description(json.loads(json.dumps(original.describe())))
        self.assertEqual([original.next_draw() for _ in range(10)], [rebuilt.next_draw() for _ in range(10)])


class DispenserTests(SimpleTestCase):
    def test_limit(self):
        dispenser = ConfigDispenser(ConfigStream(centroid_set(0.5), seed=1), limit=3)
        draws = [dispenser.take() for _ in range(5)]
        self.assertEqual([draw.index for draw in draws[:3]], [0, 1, 2])
        self.assertEqual(draws[3:], [None, None])

    def test_close(self):
        dispenser = ConfigDispenser(ConfigStream(centroid_set(0.5), seed=1))
        dispenser.take()
        dispenser.close()
        self.assertIsNone(dispenser.take())
        self.assertEqual(dispenser.dispensed, 1)

    def test_concurrent_takers_share_one_sequence(self):
        dispenser = ConfigDispenser(ConfigStream(centroid_set(0.1, 0.9), seed=12), limit=400)
        taken, lock = [], threading.Lock()

        def worker():
            while (draw := dispenser.take()) is not None:
                with lock:
                    taken.append(draw)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()

        expected = ConfigStream(centroid_set(0.1, 0.9), seed=12)
        self.assertEqual(sorted(taken, key=lambda draw: draw.index), [expected.next_draw() for _ in range(400)])


class GenConfigCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.centroids = self.root / "c.json"
        self.centroids.write_text(
            json.dumps(
                {
                    "formatVersion": 1,
                    "featureOrder": list(FEATURE_NAMES),
                    "k": 2,
                    "centroids": [[0.0] * FEATURE_COUNT, [1.0] * FEATURE_COUNT],
                }
            )
        )

    def tearDown(self):
        self.tmp.cleanup()

    def test_writes_jsonl_and_manifest(self):
        out = self.root / "configs.jsonl"
        call_command("gen_config", centroids=self.centroids, seed=5, count=4, out=out)
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        self.assertEqual([line["index"] for line in lines], [0, 1, 2, 3])
        self.assertEqual([line["centroidIndex"] for line in lines], [0, 1, 0, 1])
        self.assertTrue(all(flag.startswith("--no-") for flag in lines[0]["flags"]))
        self.assertFalse(any(flag.startswith("--no-") for flag in lines[1]["flags"]))
        manifest = json.loads((self.root / "configs.jsonl.manifest.json").read_text())
        self.assertEqual(manifest["parameters"]["count"], 4)

    def test_standard_output(self):
        stdout = StringIO()
        call_command("gen_config", default_baseline=True, seed=5, count=2, stdout=stdout)
        lines = [json.loads(line) for line in stdout.getvalue().splitlines()]
        self.assertEqual([line["flags"] for line in lines], [[], []])
        self.assertEqual([line["centroidIndex"] for line in lines], [None, None])

    def test_sources_are_exclusive(self):
        with self.assertRaises(CommandError):
            call_command("gen_config", centroids=self.centroids, swarm=True, seed=1, stdout=StringIO())
        with self.assertRaises(CommandError):
            call_command("gen_config", seed=1, stdout=StringIO())
