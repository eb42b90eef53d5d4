#!/usr/bin/env python
"""Entry point for the simulate, sweep, dump_positions and dump_pattern commands."""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "project.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as error:
        raise ImportError(
            "Couldn't import Django; install requirements/defaults.txt into the active environment"
        ) from error
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
