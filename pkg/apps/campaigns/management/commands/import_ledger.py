from pathlib import Path

from apps.campaigns.importing import import_ledger
from apps.core.commands import ToolkitCommand


class Command(ToolkitCommand):
    help = "Load campaign ledgers into the database for browsing in the admin."
    subcommand = "import-ledger"
    writes_manifest = False

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--ledger", type=Path, kind="nargs", metavar="LEDGER", help="Ledger file(s).")

    def run(self, params):
        self.require(params, "ledger")
        for path in params["ledger"]:
            campaign = import_ledger(path)
            self.stdout.write(f"{campaign.label}: {campaign.trial_count} trials from {path}")
        return None
