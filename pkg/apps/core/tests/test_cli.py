import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.test import SimpleTestCase

from apps.campaigns.tests.helpers import compiler_template, generator_template
from apps.features.tests.fixtures import MINICORPUS_DIR
from featurefuzz.cli import main


class CliTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def run_cli(self, *argv):
        with mock.patch("sys.stdout", new_callable=StringIO) as stdout, mock.patch(
            "sys.stderr", new_callable=StringIO
        ) as stderr:
            code = main([str(arg) for arg in argv])
        return code, stdout.getvalue(), stderr.getvalue()

    def error_payload(self, stderr):
        return json.loads(stderr.splitlines()[0])


class MainTests(CliTestCase):
    def test_version(self):
        code, stdout, _ = self.run_cli("--version")
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("featurefuzz 0.1.0"))
        self.assertIn("ledger format 1", stdout)

    def test_extract(self):
        out = self.root / "ds.jsonl"
        code, stdout, _ = self.run_cli("extract", "--corpus", MINICORPUS_DIR, "--out", out)
        self.assertEqual(code, 0)
        self.assertTrue(out.is_file())
        self.assertTrue((self.root / "ds.jsonl.manifest.json").is_file())
        self.assertIn("parsable", stdout)

    def test_unknown_flag_is_a_usage_error(self):
        code, _, stderr = self.run_cli("extract", "--corpus", MINICORPUS_DIR, "--frobnicate")
        self.assertEqual(code, 1)
        self.assertEqual(self.error_payload(stderr)["error"], "UsageError")
        self.assertIn("usage:", stderr)

    def test_unknown_subcommand(self):
        code, _, stderr = self.run_cli("explode")
        self.assertEqual(code, 1)
        self.assertIn("explode", self.error_payload(stderr)["message"])

    def test_missing_required_option(self):
        code, _, stderr = self.run_cli("extract", "--corpus", MINICORPUS_DIR)
        self.assertEqual(code, 1)
        self.assertIn("--out", self.error_payload(stderr)["message"])

    def test_runtime_error(self):
        code, _, stderr = self.run_cli("extract", "--corpus", self.root / "missing", "--out", self.root / "x.jsonl")
        self.assertEqual(code, 2)
        self.assertEqual(self.error_payload(stderr)["error"], "CorpusNotFound")

    def test_runtime_error_carries_line(self):
        broken = self.root / "broken.jsonl"
        broken.write_text("{not json\n")
        code, _, stderr = self.run_cli("export-vectors", "--dataset", broken, "--out", self.root / "vec")
        self.assertEqual(code, 2)
        self.assertEqual(self.error_payload(stderr)["line"], 1)

    def test_unwritable_output_is_a_runtime_error(self):
        blocker = self.root / "plain-file"
        blocker.write_text("")
        code, _, stderr = self.run_cli("extract", "--corpus", MINICORPUS_DIR, "--out", blocker / "ds.jsonl")
        self.assertEqual(code, 2)
        payload = self.error_payload(stderr)
        self.assertEqual(payload["error"], "IOFailure")
        self.assertIn("plain-file", payload["message"])
        self.assertNotIn("Traceback", stderr)

    def test_help(self):
        code, stdout, _ = self.run_cli("gen-config", "--help")
        self.assertEqual(code, 0)
        self.assertIn("--default-baseline", stdout)


class ConfigPrecedenceTests(CliTestCase):
    def test_flags_beat_config_file_beats_defaults(self):
        config = self.root / "run.env"
        config.write_text("swarm=true\nseed=7\ncount=3\n")

        code, stdout, _ = self.run_cli("gen-config", "--config", config)
        self.assertEqual(code, 0)
        from_file = stdout.splitlines()
        self.assertEqual(len(from_file), 3)

        code, stdout, _ = self.run_cli("gen-config", "--count", 5, "--config", config)
        self.assertEqual(code, 0)
        with_flag = stdout.splitlines()
        self.assertEqual(len(with_flag), 5)
        self.assertEqual(with_flag[:3], from_file)

    def test_manifest_reinvokes_its_run(self):
        first = self.root / "a.jsonl"
        self.run_cli("gen-config", "--swarm", "--count", 4, "--out", first)
        manifest = json.loads((self.root / "a.jsonl.manifest.json").read_text())
        self.assertEqual(manifest["drawnSeeds"], ["seed"])

        second = self.root / "b.jsonl"
        code, _, _ = self.run_cli("gen-config", "--config", self.root / "a.jsonl.manifest.json", "--out", second)
        self.assertEqual(code, 0)
        self.assertEqual(first.read_text(), second.read_text())

    def test_unknown_config_key(self):
        config = self.root / "bad.json"
        config.write_text(json.dumps({"swarm": True, "colour": "red"}))
        code, _, stderr = self.run_cli("gen-config", "--config", config)
        self.assertEqual(code, 1)
        self.assertIn("colour", self.error_payload(stderr)["message"])


class CampaignCliTests(CliTestCase):
    def test_campaign_then_replay(self):
        ledger = self.root / "cli.jsonl"
        code, stdout, _ = self.run_cli(
            "campaign",
            "--swarm",
            "--generator-cmd",
            generator_template("--force-behavior", "crash-o3"),
            "--compiler-cmd",
            compiler_template(),
            "--opt-levels=-O0,-O3",
            "--max-trials",
            2,
            "--seed",
            99,
            "--artifacts",
            self.root / "art",
            "--ledger",
            ledger,
        )
        self.assertEqual(code, 0)
        self.assertIn("2 failing", stdout)
        self.assertTrue((self.root / "art" / "crashO3" / "1.c").is_file())

        code, stdout, _ = self.run_cli("replay", "--ledger", ledger, "--trial", 1)
        self.assertEqual(code, 0)
        self.assertIn("crashO3", stdout)

        code, _, stderr = self.run_cli("replay", "--ledger", ledger, "--trial", 5)
        self.assertEqual(code, 2)
        self.assertEqual(self.error_payload(stderr)["error"], "TrialNotFound")

    def test_opt_levels_value_may_start_with_a_dash(self):
        ledger = self.root / "levels.jsonl"
        code, _, stderr = self.run_cli(
            "campaign",
            "--swarm",
            "--generator-cmd",
            generator_template("--force-behavior", "miscompile"),
            "--compiler-cmd",
            compiler_template(),
            "--opt-levels",
            "-O0,-O2",
            "--max-trials",
            1,
            "--seed",
            3,
            "--artifacts",
            self.root / "art",
            "--ledger",
            ledger,
        )
        self.assertEqual(code, 0, stderr)
        header = json.loads(ledger.read_text().splitlines()[0])
        self.assertEqual(header["spec"]["optLevels"], ["-O0", "-O2"])
        self.assertTrue((self.root / "art" / "miscompilation" / "0.c").is_file())
