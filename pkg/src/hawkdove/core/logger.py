# -*- coding: utf-8 -*-

"""
Loggers of the hawkdove hierarchy. Modules log through module_logger(__name__), pipeline steps through
instance_logger(). Levels are set on the "hawkdove" logger only, so numpy/pandas/sklearn loggers keep theirs.
"""

import logging as _logging
import sys
from typing import Optional, Type, Union

PACKAGE_LOGGER_NAME = "hawkdove"
CONSOLE_FORMAT = "%(asctime)s %(levelname)s %(name)s.%(funcName)s@L%(lineno)d: %(message)s"

LOG_LEVEL_NAMES = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
_ALIASES = {"WARN": "WARNING", "FATAL": "CRITICAL"}

_package_logger = _logging.getLogger(PACKAGE_LOGGER_NAME)
_console: Optional[_logging.Handler] = None


class LogLevelError(ValueError):
    pass


class _StderrHandler(_logging.StreamHandler):
    """Writes to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, _):
        pass


def attach_console() -> _logging.Handler:
    """Adds the stderr handler to the package logger once."""
    global _console
    if _console is None:
        _console = _StderrHandler()
        _console.setFormatter(_logging.Formatter(CONSOLE_FORMAT))
        _package_logger.addHandler(_console)
        _package_logger.propagate = False
    return _console


def module_logger(module_name: str) -> _logging.Logger:
    return _logging.getLogger(module_name)


def instance_logger(cls: Type, instancename: Optional[str]) -> _logging.Logger:
    if instancename is None:
        return _logging.getLogger(f"{cls.__module__}.{cls.__name__}")

    return _logging.getLogger(f"{cls.__module__}.{cls.__name__}({instancename})")


def parse_log_level(loglevel: Union[str, int]) -> int:
    if isinstance(loglevel, int):
        return loglevel

    name = loglevel.strip().upper()
    name = _ALIASES.get(name, name)
    if name not in LOG_LEVEL_NAMES:
        raise LogLevelError("Unknown log level: %r (use one of %s)" % (loglevel, ", ".join(LOG_LEVEL_NAMES)))
    return getattr(_logging, name)


def set_log_level(loglevel: Union[str, int]):
    _package_logger.setLevel(parse_log_level(loglevel))
