import os
import sys
import tempfile
import time
from pathlib import Path

from django.test import SimpleTestCase

from apps.campaigns.process import ExecutableNotFound, run_bounded


def alive(pid: int) -> bool:
    """Whether ``pid`` is a running process; zombies awaiting their reaper count as dead."""
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    stat = Path(f"/proc/{pid}/stat")
    try:
        return stat.read_text().rsplit(")", 1)[1].split()[0] != "Z"
    except (OSError, IndexError):
        return True


class RunBoundedTests(SimpleTestCase):
    def test_output_and_exit_code(self):
        result = run_bounded([sys.executable, "-c", "print('hi'); raise SystemExit(3)"], timeout=10)
        self.assertFalse(result.timed_out)
        self.assertEqual(result.stdout, b"hi\n")
        self.assertEqual(result.exit.code, 3)

    def test_timeout_kills_the_process_group(self):
        script = (
            "import subprocess, sys, time\n"
            "subprocess.Popen([sys.executable, '-c', 'import time; time.sleep(60)'])\n"
            "time.sleep(60)\n"
        )
        result = run_bounded([sys.executable, "-c", script], timeout=0.5)
        self.assertTrue(result.timed_out)
        self.assertIsNone(result.returncode)
        self.assertIsNone(result.exit)
        # the grandchild holds the pipes open; returning at all means it died too
        self.assertLess(result.seconds, 10)
        self.assertGreaterEqual(result.seconds, 0.5)

    def test_timeout_reaps_forked_children_promptly(self):
        with tempfile.TemporaryDirectory() as tmp:
            pid_file = Path(tmp) / "grandchild.pid"
            script = (
                "import subprocess, sys, time\n"
                "child = subprocess.Popen([sys.executable, '-c', 'import time; time.sleep(60)'])\n"
                f"open({str(pid_file)!r}, 'w').write(str(child.pid))\n"
                "time.sleep(60)\n"
            )
            result = run_bounded([sys.executable, "-c", script], timeout=1.0)
            self.assertTrue(result.timed_out)
            self.assertGreaterEqual(result.seconds, 1.0)
            self.assertLess(result.seconds, 1.5)

            grandchild = int(pid_file.read_text())
            deadline = time.monotonic() + 5
            while time.monotonic() < deadline:
                if not alive(grandchild):
                    break
                time.sleep(0.05)
            else:
                self.fail(f"process {grandchild} outlived its timed out parent")

    def test_signal_is_reported(self):
        result = run_bounded([sys.executable, "-c", "import os; os.abort()"], timeout=10)
        self.assertTrue(result.exit.signaled)
        self.assertEqual(result.exit.describe(), "SIGABRT")

    def test_missing_executable(self):
        with self.assertRaises(ExecutableNotFound):
            run_bounded(["/nonexistent/featurefuzz-compiler"], timeout=1)

    def test_non_executable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "not-a-program"
            path.write_text("plain text")
            with self.assertRaises(ExecutableNotFound):
                run_bounded([str(path)], timeout=1)
