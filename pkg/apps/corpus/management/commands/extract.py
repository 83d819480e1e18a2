from pathlib import Path

from django.conf import settings

from apps.core.commands import ToolkitCommand
from apps.core.jsonl import dumps_line
from apps.corpus.dataset import ingest, save_dataset, stats, write_stats


class Command(ToolkitCommand):
    help = "Extract feature vectors from a directory of C programs into a dataset file."
    subcommand = "extract"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--corpus", type=Path, help="Directory holding the C programs.")
        self.option(
            parser,
            "--include",
            kind="append",
            default=lambda: list(settings.FEATUREFUZZ["INCLUDE_GLOBS"]),
            help="Glob relative to the corpus root (repeatable, default **/*.c).",
        )
        self.option(parser, "--out", type=Path, help="Dataset file to write (JSON lines).")
        self.option(
            parser,
            "--workers",
            type=int,
            default=lambda: settings.FEATUREFUZZ["EXTRACT_WORKERS"],
            help="Extraction processes.",
        )
        self.option(parser, "--explain", kind="flag", default=False, help="Also write match sites to <out>.sites.jsonl.")

    def run(self, params):
        self.require(params, "corpus", "out")
        out: Path = params["out"]
        dataset = ingest(
            params["corpus"],
            params["include"],
            workers=max(1, params["workers"]),
            keep_sites=params["explain"],
        )
        save_dataset(dataset, out)
        corpus_stats = stats(dataset)
        write_stats(corpus_stats, out.with_suffix(".stats.csv"), out.with_suffix(".stats.json"))

        if params["explain"]:
            with open(out.with_suffix(".sites.jsonl"), "w", encoding="utf-8") as handle:
                for record_id, sites in dataset.sites.items():
                    handle.write(
                        dumps_line(
                            {
                                "id": record_id,
                                "sites": [[site.feature, site.line, site.column] for site in sites],
                            }
                        )
                        + "\n"
                    )

        self.stdout.write(
            f"{corpus_stats.total_files} files, {corpus_stats.parsable_files} parsable -> {out}"
        )
        return out
