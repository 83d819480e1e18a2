"""
The toolkit's command line.

``manage.py`` sends the hyphenated toolkit subcommands here. Each one is a
management command of its app, so the same code runs under
``call_command`` in tests; this module only adds the exit-code contract:
0 on success, 1 for usage errors, 2 for failures after the arguments were
accepted, with a JSON error object on stderr in both failure cases.
"""

import json
import os
import sys
from collections.abc import Sequence

import django
from django.core.management import load_command_class
from django.core.management.base import CommandError

import featurefuzz
from apps.core.errors import FeatureFuzzError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

# CLI name -> (app, management command module)
SUBCOMMANDS = {
    "extract": ("apps.corpus", "extract"),
    "export-vectors": ("apps.corpus", "export_vectors"),
    "cluster": ("apps.clustering", "cluster"),
    "gen-config": ("apps.confgen", "gen_config"),
    "campaign": ("apps.campaigns", "campaign"),
    "replay": ("apps.campaigns", "replay"),
    "import-ledger": ("apps.campaigns", "import_ledger"),
    "report": ("apps.reports", "report"),
}


def version_line() -> str:
    return (
        f"featurefuzz {featurefuzz.__version__} "
        f"(dataset format {featurefuzz.DATASET_FORMAT_VERSION}, "
        f"centroids format {featurefuzz.CENTROIDS_FORMAT_VERSION}, "
        f"ledger format {featurefuzz.LEDGER_FORMAT_VERSION})"
    )


def overview() -> str:
    names = "\n".join(f"  {name}" for name in SUBCOMMANDS)
    return f"usage: manage.py <subcommand> [options]\n\nsubcommands:\n{names}\n"


def _report(payload: dict, usage: str | None = None) -> None:
    sys.stderr.write(json.dumps(payload) + "\n")
    if usage:
        sys.stderr.write(usage)


def join_dash_values(argv: Sequence[str], flags: set[str]) -> list[str]:
    """
    Rewrite ``--flag VALUE`` as ``--flag=VALUE`` for ``flags`` whose values may
    start with a dash, which argparse would otherwise read as an option.
    """
    joined: list[str] = []
    items = iter(argv)
    for item in items:
        if item in flags:
            value = next(items, None)
            joined.append(item if value is None else f"{item}={value}")
        else:
            joined.append(item)
    return joined


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "featurefuzz.settings")
    django.setup()

    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(overview())
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] == "--version":
        sys.stdout.write(version_line() + "\n")
        return EXIT_OK
    if argv[0] not in SUBCOMMANDS:
        _report({"error": "UsageError", "message": f"unknown subcommand {argv[0]!r}"}, overview())
        return EXIT_USAGE

    name = argv[0]
    command = load_command_class(*SUBCOMMANDS[name])
    parser = command.create_parser("manage.py", name)
    try:
        options = vars(parser.parse_args(join_dash_values(argv[1:], command.dash_value_flags())))
    except CommandError as exc:
        # parsers of commands not called from the command line raise instead of exiting
        _report({"error": "UsageError", "message": str(exc).removeprefix("Error: ")}, parser.format_usage())
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    args = options.pop("args", ())
    try:
        command.execute(*args, **options)
    except CommandError as exc:
        cause = exc.__cause__
        if isinstance(cause, FeatureFuzzError):
            _report(cause.as_payload())
            return exc.returncode
        _report({"error": "UsageError", "message": str(exc)}, parser.format_usage())
        return exc.returncode
    except FeatureFuzzError as exc:
        _report(exc.as_payload())
        return exc.exit_code
    return EXIT_OK
