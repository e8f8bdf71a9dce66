# -*- coding: utf-8 -*-

"""
Startup environment, shared exception roots and small helpers.

ENVs (prefix HD_):
LOGLEVEL: Initial log level for the hawkdove logger hierarchy.
OUTPUT_DIR: Overrides the output directory of every command.
DATA_DIR: Directory with the released annotated/econ/market CSVs (data-conditional tests only).
NO_TIMESTAMP: Forces timestamps out of the provenance header even if the config asks for them.
GNUPG_HOME: GnuPG home directory used when artifacts are signed.
"""

from collections.abc import Mapping, Iterable
from os import environ
from re import compile
from typing import Optional
from hawkdove.core.logger import attach_console, module_logger, set_log_level, LogLevelError

mlogger = module_logger(__name__)

RE_SETTING_ARG = compile(r"^(?:--)?([A-Za-z0-9_]+)(?:=(.*))?$")


class HawkdoveError(Exception):
    """
    Root of every error raised on purpose by this package.
    """


class InputError(HawkdoveError):
    """
    Bad input data or configuration. The command line maps it to exit code 2.
    """


def is_falsey(value) -> bool:
    return value in {None, False, "", "0", "OFF", "FALSE", "NO", "off", "false", "no"}


class _StartupEnvironment(Mapping):
    ENV_PREFIX = "HD_"

    def __init__(self, env: Optional[Mapping] = None):
        Mapping.__init__(self)
        prefix_length = len(self.ENV_PREFIX)

        e = self._settings = {}

        for k, v in (environ if env is None else env).items():  # type: str, Optional[str]
            if k.startswith(self.ENV_PREFIX):
                e[k[prefix_length:]] = v

    def __len__(self):
        return len(self._settings)

    def __iter__(self):
        return iter(self._settings)

    def __getitem__(self, key: str) -> Optional[str]:
        return self._settings[key]


def parse_setting_args(args: Iterable[str]) -> dict[str, Optional[str]]:
    """
    Parses "key=value" (or "--key=value") strings into a dict.
    A bare "key" maps to None.
    """
    settings = {}
    for arg in args:
        m = RE_SETTING_ARG.match(arg)
        if not m:
            raise InputError("Unsupported setting: '%s' (expected key=value)" % arg)
        settings[m.group(1)] = m.group(2)
    return settings


startup_environment = _StartupEnvironment()

attach_console()

try:
    set_log_level(startup_environment.get("LOGLEVEL", "WARNING"))
except LogLevelError:
    mlogger.warning("Ignoring unknown HD_LOGLEVEL: %r", startup_environment.get("LOGLEVEL"))

__all__ = "startup_environment", "parse_setting_args", "is_falsey", "HawkdoveError", "InputError"


if __name__ == "__main__":
    for k, v in startup_environment.items():
        print(f"{k}={v}")
