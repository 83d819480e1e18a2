from pathlib import Path

from django.test import SimpleTestCase

from apps.campaigns.spec import CampaignSpec, InvalidCampaignSpec, parse_budget

GENERATOR = "csmith {flags} --seed {seed} --output {output}"
COMPILER = "gcc {optlevel} -o {output} {input}"


def spec(**overrides) -> CampaignSpec:
    values = {"generator_cmd": GENERATOR, "compiler_cmd": COMPILER, "artifact_dir": "/tmp/art"}
    values.update(overrides)
    return CampaignSpec(**values)


class ParseBudgetTests(SimpleTestCase):
    def test_units(self):
        self.assertEqual(parse_budget("13h"), 13 * 3600)
        self.assertEqual(parse_budget("90m"), 5400)
        self.assertEqual(parse_budget("1h30m"), 5400)
        self.assertEqual(parse_budget("45s"), 45)
        self.assertEqual(parse_budget("2.5"), 2.5)
        self.assertEqual(parse_budget(0), 0)

    def test_rejects_garbage(self):
        for text in ("", "soon", "3d", "-5"):
            with self.subTest(text=text), self.assertRaises(InvalidCampaignSpec):
                parse_budget(text)


class TemplateTests(SimpleTestCase):
    def test_flags_expand_to_separate_arguments(self):
        argv = spec().generator_argv(["--no-arrays", "--bitfields"], 42, Path("/w/program.c"))
        self.assertEqual(
            argv, ["csmith", "--no-arrays", "--bitfields", "--seed", "42", "--output", "/w/program.c"]
        )

    def test_empty_flags(self):
        argv = spec().generator_argv([], 7, Path("p.c"))
        self.assertEqual(argv, ["csmith", "--seed", "7", "--output", "p.c"])

    def test_placeholders_inside_arguments(self):
        custom = spec(compiler_cmd="cc {optlevel} -o{output} -include 'my header.h' {input}")
        argv = custom.compiler_argv("-O3", Path("in.c"), Path("out"))
        self.assertEqual(argv, ["cc", "-O3", "-oout", "-include", "my header.h", "in.c"])

    def test_missing_placeholder(self):
        with self.assertRaises(InvalidCampaignSpec) as caught:
            spec(compiler_cmd="gcc -O2 -o {output} {input}")
        self.assertIn("{optlevel}", str(caught.exception))

    def test_flags_must_stand_alone(self):
        with self.assertRaises(InvalidCampaignSpec):
            spec(generator_cmd="csmith --opts={flags} --seed {seed} --output {output}")


class ValidationTests(SimpleTestCase):
    def test_rejected_values(self):
        cases = {
            "same levels": {"opt_levels": ("-O2", "-O2")},
            "one level": {"opt_levels": ("-O0",)},
            "zero timeout": {"compile_timeout": 0},
            "negative budget": {"time_budget": -1},
            "no workers": {"workers": 0},
            "seed too large": {"rng_seed": 2**64},
        }
        for name, overrides in cases.items():
            with self.subTest(name), self.assertRaises(InvalidCampaignSpec):
                spec(**overrides)

    def test_dict_round_trip_with_override(self):
        original = spec(rng_seed=99, max_trials=5, label="x")
        copy = CampaignSpec.from_dict(original.to_dict(), artifact_dir="/elsewhere")
        self.assertEqual(copy.rng_seed, 99)
        self.assertEqual(copy.generator_cmd, original.generator_cmd)
        self.assertEqual(copy.artifact_dir, Path("/elsewhere"))
