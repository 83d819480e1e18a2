#!/usr/bin/env python
"""
featurefuzz command line and Django's administrative utility.

Toolkit subcommands (``extract``, ``cluster``, ``campaign``...) and
``--version`` go through ``featurefuzz.cli``; anything else, such as
``migrate`` or ``runserver``, is handled by Django.
"""
import os
import sys


def main():
    """Run a toolkit subcommand or an administrative task."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "featurefuzz.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    from featurefuzz.cli import SUBCOMMANDS
    from featurefuzz.cli import main as toolkit_main

    if len(sys.argv) > 1 and (sys.argv[1] in SUBCOMMANDS or sys.argv[1] == "--version"):
        sys.exit(toolkit_main(sys.argv[1:]))
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
