import tempfile
from pathlib import Path

from apps.campaigns.ledger import read_ledger
from apps.campaigns.runner import ReplayMismatch, replay_trial
from apps.core.commands import ToolkitCommand


class Command(ToolkitCommand):
    help = "Re-run one ledger trial from its recorded configuration and seeds and check its failure class."
    subcommand = "replay"
    writes_manifest = False

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--ledger", type=Path, help="Campaign ledger.")
        self.option(parser, "--trial", type=int, help="trialId to replay.")
        self.option(parser, "--generator-cmd", help="Override the recorded generator template.")
        self.option(parser, "--compiler-cmd", help="Override the recorded compiler template.")
        self.option(parser, "--keep", type=Path, help="Keep the replay's working files in this directory.")

    def run(self, params):
        self.require(params, "ledger", "trial")
        overrides = {name: params[name] for name in ("generator_cmd", "compiler_cmd") if params[name]}
        ledger = read_ledger(params["ledger"])
        if params["keep"] is not None:
            result = replay_trial(ledger, params["trial"], params["keep"], **overrides)
        else:
            with tempfile.TemporaryDirectory(prefix="featurefuzz-replay-") as workdir:
                result = replay_trial(ledger, params["trial"], Path(workdir), **overrides)

        recorded, replayed = result.recorded.failure_class.value, result.replayed.failure_class.value
        if not result.matches:
            raise ReplayMismatch(f"trial {params['trial']} was recorded as {recorded} but replays as {replayed}")
        self.stdout.write(f"trial {params['trial']}: {replayed} (matches ledger)")
        return None
