import signal
import threading
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from apps.campaigns.runner import Campaign
from apps.campaigns.spec import CampaignSpec, parse_budget
from apps.confgen.sampling import CentroidSet, ConfigStream
from apps.core.commands import ToolkitCommand, comma_list


class Command(ToolkitCommand):
    help = (
        "Run a time-budgeted differential testing campaign: generate programs from sampled "
        "configurations, compile them at two optimization levels and compare the binaries' output."
    )
    subcommand = "campaign"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--centroids", type=Path, help="Centroids file to sample configurations from.")
        self.option(parser, "--default-baseline", kind="flag", default=False, help="Run the generator with its defaults.")
        self.option(parser, "--swarm", kind="flag", default=False, help="Enable every feature with probability 0.5.")
        self.option(
            parser,
            "--generator-cmd",
            help="Generator command template with {flags} {seed} {output}.",
        )
        self.option(
            parser,
            "--compiler-cmd",
            help="Compiler command template with {optlevel} {input} {output}.",
        )
        self.option(
            parser,
            "--opt-levels",
            type=comma_list(str),
            default=lambda: list(settings.FEATUREFUZZ["OPT_LEVELS"]),
            dash_value=True,
            help="Two comma-separated optimization levels, such as -O0,-O3.",
        )
        self.option(parser, "--compile-timeout", type=float, default=lambda: settings.FEATUREFUZZ["COMPILE_TIMEOUT"])
        self.option(parser, "--run-timeout", type=float, default=lambda: settings.FEATUREFUZZ["RUN_TIMEOUT"])
        self.option(
            parser, "--generator-timeout", type=float, default=lambda: settings.FEATUREFUZZ["GENERATOR_TIMEOUT"]
        )
        self.option(
            parser,
            "--budget",
            default=lambda: settings.FEATUREFUZZ["TIME_BUDGET"],
            help="Time budget such as 13h, 90m, 1h30m or plain seconds.",
        )
        self.option(parser, "--max-trials", type=int, help="Stop after this many trials even if budget remains.")
        self.option(parser, "--seed", type=int, seed=True, help="64-bit seed; drawn from entropy when absent.")
        self.option(parser, "--workers", type=int, default=lambda: settings.FEATUREFUZZ["WORKERS"])
        self.option(parser, "--artifacts", type=Path, help="Directory for failing programs and trial directories.")
        self.option(parser, "--ledger", type=Path, help="Ledger file to write (JSON lines).")
        self.option(parser, "--label", help="Experiment ID recorded in the ledger; defaults to the ledger name.")

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
        self.require(params, "generator_cmd", "compiler_cmd", "artifacts", "ledger")
        ledger: Path = params["ledger"]
        spec = CampaignSpec(
            generator_cmd=params["generator_cmd"],
            compiler_cmd=params["compiler_cmd"],
            artifact_dir=params["artifacts"],
            opt_levels=tuple(params["opt_levels"]),
            compile_timeout=params["compile_timeout"],
            run_timeout=params["run_timeout"],
            generator_timeout=params["generator_timeout"],
            time_budget=parse_budget(params["budget"]),
            rng_seed=params["seed"],
            workers=params["workers"],
            max_trials=params["max_trials"],
            label=params["label"] or ledger.stem,
            stdout_head_bytes=settings.FEATUREFUZZ["STDOUT_HEAD_BYTES"],
        )
        campaign = Campaign(spec, self.build_stream(params), ledger)

        handler_installed = threading.current_thread() is threading.main_thread()
        if handler_installed:
            previous = signal.signal(signal.SIGINT, lambda signum, frame: campaign.request_stop())
        try:
            result = campaign.run()
        finally:
            if handler_installed:
                signal.signal(signal.SIGINT, previous)

        counts = ", ".join(f"{name} {count}" for name, count in result.counts.items() if count)
        self.stdout.write(
            f"{result.trials} trials, {result.failures} failing ({counts or 'none'}), "
            f"stopped by {result.stop_reason} -> {ledger}"
        )
        return ledger
