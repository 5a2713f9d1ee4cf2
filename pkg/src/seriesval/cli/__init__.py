"""Command line surface: expression parser, commands and JSON reports."""

from seriesval.cli.main import main, run_command

__all__ = ["main", "run_command"]
