from pathlib import Path

from django.core.management.base import CommandError

from apps.confgen.sampling import CentroidSet, ConfigStream
from apps.core.commands import ToolkitCommand
from apps.core.jsonl import dumps_line


class Command(ToolkitCommand):
    help = "Sample generator configurations from a centroids file, round-robin over its centroids."
    subcommand = "gen-config"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--centroids", type=Path, help="Centroids file written by cluster.")
        self.option(
            parser,
            "--default-baseline",
            kind="flag",
            default=False,
            help="Emit empty flag lists (the generator's own defaults).",
        )
        self.option(parser, "--swarm", kind="flag", default=False, help="Enable every feature with probability 0.5.")
        self.option(parser, "--seed", type=int, seed=True, help="64-bit seed; drawn from entropy when absent.")
        self.option(parser, "--count", type=int, default=1, help="Number of configurations.")
        self.option(parser, "--out", type=Path, help="JSON lines file; standard output when absent.")

    def build_stream(self, params) -> ConfigStream:
        sources = [bool(params["centroids"]), params["default_baseline"], params["swarm"]]
        if sum(sources) != 1:
            raise CommandError("give exactly one of --centroids, --default-baseline, --swarm")
        if params["default_baseline"]:
            return ConfigStream.default_baseline(params["seed"])
        if params["swarm"]:
            return ConfigStream(CentroidSet.swarm(), params["seed"])
        return ConfigStream(CentroidSet.from_file(params["centroids"]), params["seed"])

    def run(self, params):
        if params["count"] < 0:
            raise CommandError("--count must not be negative")
        stream = self.build_stream(params)
        out: Path | None = params["out"]
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            handle = open(out, "w", encoding="utf-8")
        else:
            handle = self.stdout
        try:
            for _ in range(params["count"]):
                handle.write(dumps_line(stream.next_draw().to_line()) + "\n")
        finally:
            if out is not None:
                handle.close()
        return out
