#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Command line entry. Every registered pipeline step becomes a subcommand sharing the same options:

    hawkdove filter -c run.json
    hawkdove eval -c run.json --tie-rule first-match --set seeds=[1,2,3]

Exit codes: 0 success, 2 input or configuration error, 1 anything else.
"""

from pathlib import Path
from typing import Optional, Type

import typer

from hawkdove import __version__
from hawkdove.core import InputError, parse_setting_args
from hawkdove.core.config import load_config
from hawkdove.core.logger import LOG_LEVEL_NAMES, LogLevelError, module_logger, set_log_level
from hawkdove.core.step import RunContext, Step, StepManager

mlogger = module_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def run_step(step_class: Type[Step], config_path: Optional[Path], flags: dict, set_values: list[str]) -> int:
    """Loads the config, runs one step and maps failures to exit codes."""
    try:
        config = load_config(config_path, flags, parse_setting_args(set_values))
        context = RunContext.create(config)
        step = step_class()
        step.execute(context)
    except InputError as e:
        typer.echo(f"hawkdove {step_class.NAME}: {e}", err=True)
        return EXIT_INPUT
    except Exception as e:
        mlogger.exception("Command %s failed", step_class.NAME)
        typer.echo(f"hawkdove {step_class.NAME}: internal error: {e}", err=True)
        return EXIT_INTERNAL

    for p in context.store.written:
        typer.echo(str(p))
    return EXIT_OK


def _make_command(step_class: Type[Step]):
    def command(
        config: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON run configuration"),
        output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="Output directory"),
        labels: Optional[Path] = typer.Option(None, "--labels", help="External prediction CSV"),
        lexicon: Optional[Path] = typer.Option(None, "--lexicon", help="Lexicon JSON"),
        tie_rule: Optional[str] = typer.Option(None, "--tie-rule", help="neutral | first-match"),
        align_mode: Optional[str] = typer.Option(None, "--align-mode", help="next | same-month"),
        short_convention: Optional[str] = typer.Option(None, "--short-convention",
                                                       help="per-signal | per-position"),
        use_split: Optional[bool] = typer.Option(None, "--use-split/--no-split", help="Work on split sentences"),
        log_level: Optional[str] = typer.Option(None, "--log-level", help=" | ".join(LOG_LEVEL_NAMES)),
        verbose: bool = typer.Option(False, "--verbose", "-v", help="Same as --log-level INFO"),
        set_values: list[str] = typer.Option([], "--set", "-S", metavar="KEY=VALUE",
                                             help="Override a config value (repeatable)"),
    ):
        if verbose:
            set_log_level("INFO")
        if log_level:
            try:
                set_log_level(log_level)
            except LogLevelError as e:
                raise typer.BadParameter(str(e), param_name="log_level")

        flags = {
            "output_dir": output_dir,
            "labels": labels,
            "lexicon": lexicon,
            "tie_rule": tie_rule,
            "align_mode": align_mode,
            "short_convention": short_convention,
            "use_split": use_split,
        }
        code = run_step(step_class, config, flags, set_values)
        if code != EXIT_OK:
            raise typer.Exit(code)

    command.__doc__ = step_class.DESCRIPTION
    return command


def _version(value: bool):
    if value:
        typer.echo(f"hawkdove {__version__}")
        raise typer.Exit()


def build_app(manager: Optional[StepManager] = None) -> typer.Typer:
    manager = manager or StepManager()
    app = typer.Typer(help="Hawkish/dovish stance pipeline for FOMC communications", no_args_is_help=True,
                      add_completion=False)

    @app.callback()
    def main(version: bool = typer.Option(False, "--version", callback=_version, is_eager=True,
                                          help="Show the version and exit")):
        pass

    for step_class in manager:
        app.command(name=step_class.NAME, help=step_class.DESCRIPTION)(_make_command(step_class))
    return app


def run_cli():
    build_app()()


if __name__ == "__main__":
    run_cli()
