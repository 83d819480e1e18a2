import json

from django.test import SimpleTestCase

from apps.campaigns.outcomes import (
    CRASH_CLASSES,
    ExitDescriptor,
    FailureClass,
    LevelOutcome,
    OutcomeInvariantError,
    OutcomeStatus,
    classify,
    is_differential,
)

from .helpers import FIXTURES_DIR, outcome


def load_truth_table() -> dict:
    with open(FIXTURES_DIR / "classification_truth_table.json", encoding="utf-8") as handle:
        return json.load(handle)


class ClassifyTests(SimpleTestCase):
    def setUp(self):
        self.table = load_truth_table()

    def test_every_status_pair(self):
        statuses = self.table["statuses"]
        self.assertEqual(set(statuses), {choice.value for choice in OutcomeStatus})
        for row, low_status in enumerate(statuses):
            for column, high_status in enumerate(statuses):
                expected = self.table["grid"][row][column]
                with self.subTest(o0=low_status, o3=high_status):
                    got = classify(outcome("-O0", low_status), outcome("-O3", high_status))
                    self.assertEqual(got, FailureClass(expected))

    def test_run_comparison_cases(self):
        for case in self.table["cases"]:
            with self.subTest(case["name"]):
                low = outcome("-O0", **case["o0"])
                high = outcome("-O3", **case["o3"])
                self.assertEqual(classify(low, high), FailureClass(case["expected"]))

    def test_classification_is_pure(self):
        low, high = outcome("-O0", "ok", "a\n"), outcome("-O3", "ok", "b\n")
        self.assertEqual({classify(low, high) for _ in range(5)}, {FailureClass.MISCOMPILATION})

    def test_one_sided_rejection_is_not_a_crash(self):
        for low_status, high_status, expected in (
            ("compileError", "ok", FailureClass.COMPILE_ERROR_O0),
            ("ok", "compileError", FailureClass.COMPILE_ERROR_O3),
        ):
            with self.subTest(o0=low_status, o3=high_status):
                got = classify(outcome("-O0", low_status), outcome("-O3", high_status))
                self.assertEqual(got, expected)
                self.assertNotIn(got, CRASH_CLASSES)
                self.assertTrue(is_differential(got))


class DifferentialTests(SimpleTestCase):
    def test_differential_classes(self):
        differential = {choice for choice in FailureClass if is_differential(choice)}
        self.assertEqual(
            differential,
            {
                FailureClass.MISCOMPILATION,
                FailureClass.CRASH_O0,
                FailureClass.CRASH_O3,
                FailureClass.TIMEOUT_O0,
                FailureClass.TIMEOUT_O3,
                FailureClass.COMPILE_ERROR_O0,
                FailureClass.COMPILE_ERROR_O3,
            },
        )

    def test_plain_strings_are_accepted(self):
        self.assertTrue(is_differential("crashO3"))
        self.assertFalse(is_differential("crashBoth"))


class LevelOutcomeTests(SimpleTestCase):
    def test_ok_requires_stdout(self):
        with self.assertRaises(OutcomeInvariantError):
            LevelOutcome("-O0", OutcomeStatus.OK, compile_exit=ExitDescriptor(code=0))

    def test_failure_must_not_carry_stdout(self):
        digest = outcome("-O0", "ok").stdout
        with self.assertRaises(OutcomeInvariantError):
            LevelOutcome("-O0", OutcomeStatus.RUN_CRASH, stdout=digest)

    def test_dict_form_leaves_out_durations(self):
        recorded = LevelOutcome("-O3", OutcomeStatus.COMPILE_TIMEOUT, compile_seconds=1.25)
        data = recorded.to_dict()
        self.assertNotIn("compileSeconds", data)
        self.assertEqual(LevelOutcome.from_dict(data), LevelOutcome("-O3", OutcomeStatus.COMPILE_TIMEOUT))


class ExitDescriptorTests(SimpleTestCase):
    def test_from_returncode(self):
        self.assertEqual(ExitDescriptor.from_returncode(3), ExitDescriptor(code=3))
        self.assertEqual(ExitDescriptor.from_returncode(-9), ExitDescriptor(signal=9))

    def test_describe(self):
        self.assertEqual(ExitDescriptor(signal=6).describe(), "SIGABRT")
        self.assertEqual(ExitDescriptor(code=4).describe(), "exit 4")
