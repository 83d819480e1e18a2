from pathlib import Path

from django.conf import settings

from apps.clustering.centroids import load_centroids
from apps.core.commands import ToolkitCommand, comma_list
from apps.corpus.dataset import load_stats
from apps.reports.frequency import feature_frequency
from apps.reports.summary import summarize, write_summaries


class Command(ToolkitCommand):
    help = "Summarize campaign ledgers into failure-count tables and rank features by their centroid frequency."
    subcommand = "report"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--ledger", type=Path, kind="nargs", metavar="LEDGER", help="Campaign ledger(s), one row each.")
        self.option(parser, "--stats", type=Path, help="Corpus stats JSON written by extract.")
        self.option(parser, "--centroids", type=Path, kind="nargs", metavar="CENTROIDS", help="Centroids file(s).")
        self.option(
            parser,
            "--bands",
            type=comma_list(float),
            default=lambda: list(settings.FEATUREFUZZ["BANDS"]),
            help="Low and high score thresholds, e.g. 0.33,0.66.",
        )
        self.option(parser, "--out", type=Path, help="Output directory.")

    def run(self, params):
        self.require(params, "ledger", "out")
        out: Path = params["out"]
        out.mkdir(parents=True, exist_ok=True)

        summaries = [summarize(path) for path in params["ledger"]]
        write_summaries(summaries, out / "summary.csv", out / "summary.json")
        for summary in summaries:
            self.stdout.write(
                f"{summary.label}: {summary.test_inputs} inputs, {summary.total_crash} crash, "
                f"{summary.total_timeout} timeout, {summary.miscompilation} miscompilation"
            )

        stats = load_stats(params["stats"]) if params["stats"] else None
        runs = [load_centroids(path) for path in params["centroids"] or []]
        report = feature_frequency(stats, runs, params["bands"], labels=[Path(run.path).stem for run in runs])
        report.write_csv(out / "features.csv")
        report.write_json(out / "features.json")
        return out
