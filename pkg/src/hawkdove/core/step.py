# -*- coding: utf-8 -*-

"""
Pipeline step framework. Steps are grouped in StepGroups which packages expose through the
"hawkdove.steps" entry point group; the StepManager collects them and the CLI turns every step into
a subcommand.
"""

import datetime
import importlib.metadata
from abc import abstractmethod
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, replace
from enum import auto, IntEnum
from typing import Optional, Type, Union

from hawkdove import __version__
from hawkdove.core import startup_environment
from hawkdove.core.artifacts import ArtifactStore, Provenance
from hawkdove.core.config import ConfigError, RunConfig
from hawkdove.core.logger import instance_logger, module_logger
from hawkdove.core.security import ArtifactSigner
from hawkdove.lexicon_filter import DEFAULT_LEXICON, Lexicon, Panel

STEPS_META_GROUP = "hawkdove.steps"

logger = module_logger(__name__)


class StepCategories(IntEnum):
    Unspecified = auto()
    Corpus = auto()
    Classification = auto()
    Evaluation = auto()
    Measure = auto()
    Validation = auto()
    Market = auto()
    Report = auto()


class StepStates(IntEnum):
    Idle = auto()
    Running = auto()
    Done = auto()
    Error = auto()


class StepGroup:
    NAME = "Unnamed step group"
    STEPS: Iterable[Type[Union["Step", "StepGroup"]]] = ()


@dataclass
class RunContext:
    config: RunConfig
    store: ArtifactStore
    lexicon: Lexicon

    @classmethod
    def create(cls, config: RunConfig, now: Optional[datetime.datetime] = None) -> "RunContext":
        lexicon = Lexicon.from_json(config.lexicon) if config.lexicon else DEFAULT_LEXICON
        if config.validity_panels is not None:
            lexicon = replace(lexicon, validity_panels=tuple(Panel.parse(p) for p in config.validity_panels))

        generated = None
        if config.timestamp:
            generated = (now or datetime.datetime.now(datetime.timezone.utc)).isoformat(timespec="seconds")
        provenance = Provenance(__version__, config.digest, lexicon.digest, generated)

        signer = None
        if config.sign_key:
            home = startup_environment.get("GNUPG_HOME")
            signer = ArtifactSigner(config.sign_key, home)

        return cls(config, ArtifactStore(config.output_dir, provenance, signer), lexicon)


class Step:
    NAME = ""
    DESCRIPTION = ""
    CATEGORY = StepCategories.Unspecified
    # Config keys the step cannot run without.
    REQUIRES: tuple[str, ...] = ()

    def __init__(self, instancename: Optional[str] = None):
        self.__instance_name: Optional[str] = instancename
        self.__state = StepStates.Idle
        self.__logger = instance_logger(self.__class__, instancename)

    @property
    def instancename(self) -> Optional[str]:
        return self.__instance_name

    def info(self, text: str, *args):
        self.__logger.info(text, *args)

    def error(self, text: str, *args):
        self.__logger.error(text, *args)

    def warning(self, text: str, *args):
        self.__logger.warning(text, *args)

    def debug(self, text: str, *args):
        self.__logger.debug(text, *args)

    def exception(self, text: str, *args):
        self.__logger.exception(text, *args)

    @property
    def state(self) -> StepStates:
        return self.__state

    @state.setter
    def state(self, new_state: StepStates):
        self.__state = new_state

    def execute(self, context: RunContext):
        for key in self.REQUIRES:
            context.config.require(key, self.NAME)

        self.state = StepStates.Running
        try:
            self.run(context)
        except BaseException:
            self.state = StepStates.Error
            raise
        self.state = StepStates.Done

    @abstractmethod
    def run(self, context: RunContext):
        """Reads upstream artifacts from context.store and writes this step's artifacts."""

    def __repr__(self):
        return f"{self.__class__.__name__}({self.NAME})"


def _flatten(item: Type[Union[Step, StepGroup]]) -> Iterator[Type[Step]]:
    if isinstance(item, type) and issubclass(item, StepGroup):
        for sub in item.STEPS:
            yield from _flatten(sub)
    elif isinstance(item, type) and issubclass(item, Step):
        yield item
    else:
        logger.warning("Ignoring %r: neither a Step nor a StepGroup", item)


class StepManager:
    def __init__(self, groups: Optional[Iterable[Type[Union[Step, StepGroup]]]] = None):
        self._stepclasses: dict[str, Type[Step]] = {}

        if groups is None:
            groups = []
            for entry_point in importlib.metadata.entry_points(group=STEPS_META_GROUP):
                logger.debug("Loading steps from entry point %s", entry_point.name)
                groups.append(entry_point.load())

            if not groups:
                # Running from a source tree without installed metadata.
                from hawkdove.steps import BuiltinSteps
                groups.append(BuiltinSteps)

        for group in groups:
            for step_class in _flatten(group):
                if step_class.NAME in self._stepclasses:
                    raise RuntimeError("Step name already registered: " + step_class.NAME)
                self._stepclasses[step_class.NAME] = step_class

    def names(self) -> list[str]:
        return list(self._stepclasses)

    def get(self, name: str) -> Type[Step]:
        try:
            return self._stepclasses[name]
        except KeyError:
            raise ConfigError("Unknown command: %r" % name) from None

    def __iter__(self) -> Iterator[Type[Step]]:
        return iter(self._stepclasses.values())

    def __len__(self):
        return len(self._stepclasses)
