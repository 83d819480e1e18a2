from pathlib import Path

from apps.core.commands import ToolkitCommand
from apps.corpus.dataset import export_vectors, load_dataset


class Command(ToolkitCommand):
    help = "Write a dataset's binary vectors as vectors.tsv + metadata.tsv for an embedding projector."
    subcommand = "export-vectors"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--dataset", type=Path, help="Dataset file written by extract.")
        self.option(parser, "--out", type=Path, help="Output directory.")

    def run(self, params):
        self.require(params, "dataset", "out")
        vectors, metadata = export_vectors(load_dataset(params["dataset"]), params["out"])
        self.stdout.write(f"wrote {vectors} and {metadata}")
        return params["out"]
