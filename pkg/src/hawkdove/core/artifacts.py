# -*- coding: utf-8 -*-

"""
Artifact files written by the pipeline steps.

Writers are registered per file suffix. CSV artifacts start with a provenance header line,
JSON artifacts carry the same information under a leading "_provenance" key.
"""

import datetime
import json
from abc import ABCMeta, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Type, Union

import numpy as np
import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.logger import module_logger
from hawkdove.core.security import ArtifactSigner

mlogger = module_logger(__name__)

PROVENANCE_PREFIX = "# hawkdove "


class ArtifactError(HawkdoveError):
    pass


class MissingArtifactError(InputError, ArtifactError):
    """
    An upstream artifact is missing. Names the command that produces it.
    """

    def __init__(self, path: Path, required_step: str):
        ArtifactError.__init__(self, f"Missing upstream artifact {path}; run the '{required_step}' command first")
        self.path = path
        self.required_step = required_step


@dataclass(frozen=True)
class Provenance:
    version: str
    config_hash: str
    lexicon_hash: str
    generated: Optional[str] = None

    def header_line(self) -> str:
        line = f"{PROVENANCE_PREFIX}{self.version} config={self.config_hash} lexicon={self.lexicon_hash}"
        if self.generated:
            line += f" generated={self.generated}"
        return line

    def as_dict(self) -> dict[str, str]:
        d = {"tool": "hawkdove", "version": self.version, "config": self.config_hash, "lexicon": self.lexicon_hash}
        if self.generated:
            d["generated"] = self.generated
        return d

    @classmethod
    def parse(cls, line: str) -> Optional["Provenance"]:
        # "# hawkdove 0.1.0 config=ab12.. lexicon=cd34.. generated=2022-..."
        if not line.startswith(PROVENANCE_PREFIX):
            return None

        parts = line[len(PROVENANCE_PREFIX):].split()
        if not parts:
            return None
        fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        return cls(parts[0], fields.get("config", ""), fields.get("lexicon", ""), fields.get("generated"))


def json_default(value):
    if isinstance(value, (datetime.date, datetime.datetime)):
        return value.isoformat()
    if isinstance(value, Enum):
        return value.name
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError("Cannot translate this data type to JSON: %s" % type(value))


def read_csv_frame(path: Union[str, Path], **kwargs) -> pd.DataFrame:
    """
    Reads a CSV as strings, skipping a provenance header line if present.
    Empty cells stay empty strings.
    """
    path = Path(path)
    with path.open("rt", encoding="utf8", newline="") as fp:
        first = fp.readline()
        if not first.startswith(PROVENANCE_PREFIX):
            fp.seek(0)
        return pd.read_csv(fp, dtype=str, keep_default_na=False, **kwargs)


def read_provenance(path: Union[str, Path]) -> Optional[Provenance]:
    path = Path(path)
    if path.suffix == ".json":
        with path.open("rt", encoding="utf8") as fp:
            data = json.load(fp)
        p = data.get("_provenance") if isinstance(data, Mapping) else None
        if not p:
            return None
        return Provenance(p["version"], p["config"], p["lexicon"], p.get("generated"))

    with path.open("rt", encoding="utf8") as fp:
        return Provenance.parse(fp.readline().rstrip("\n"))


class ArtifactWriter(metaclass=ABCMeta):
    SUFFIX = ""
    _WRITERS: dict[str, Type["ArtifactWriter"]] = {}

    @classmethod
    def register_writer(cls, writer_class: Type["ArtifactWriter"]) -> Type["ArtifactWriter"]:
        suffix = writer_class.SUFFIX
        if suffix in cls._WRITERS:
            raise RuntimeError("Writer for suffix already registered: " + suffix)

        cls._WRITERS[suffix] = writer_class
        mlogger.debug("Registered artifact writer '%s' as %s", suffix, writer_class)
        return writer_class

    @classmethod
    def get_writer_class(cls, suffix: str) -> Type["ArtifactWriter"]:
        try:
            return cls._WRITERS[suffix]
        except KeyError:
            raise ArtifactError("No artifact writer for suffix: %r" % suffix) from None

    def __init__(self, provenance: Optional[Provenance]):
        self._provenance = provenance

    @abstractmethod
    def write(self, path: Path, data: Any):
        """Writes data to path, provenance included."""

    def __repr__(self):
        return f"{self.__class__.__name__}({self.SUFFIX})"


@ArtifactWriter.register_writer
class JSONWriter(ArtifactWriter):
    SUFFIX = ".json"

    def write(self, path: Path, data: Any):
        if not isinstance(data, Mapping):
            raise ArtifactError("JSON artifacts must be mappings, got %s" % type(data))

        document = {}
        if self._provenance is not None:
            document["_provenance"] = self._provenance.as_dict()
        document.update(data)

        with path.open("wt", encoding="utf8", newline="\n") as fp:
            json.dump(document, fp, default=json_default, indent=2, ensure_ascii=False)
            fp.write("\n")


@ArtifactWriter.register_writer
class CSVWriter(ArtifactWriter):
    SUFFIX = ".csv"

    def write(self, path: Path, data: Any):
        if not isinstance(data, pd.DataFrame):
            raise ArtifactError("CSV artifacts must be DataFrames, got %s" % type(data))

        with path.open("wt", encoding="utf8", newline="") as fp:
            if self._provenance is not None:
                fp.write(self._provenance.header_line() + "\n")
            data.to_csv(fp, index=False, lineterminator="\n")


def write_artifact(path: Union[str, Path], data: Any, provenance: Optional[Provenance] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    writer = ArtifactWriter.get_writer_class(path.suffix)(provenance)
    writer.write(path, data)
    return path


class ArtifactStore:
    """
    Output directory of a run. Relative artifact paths resolve below root.
    """

    def __init__(self, root: Path, provenance: Optional[Provenance] = None, signer: Optional[ArtifactSigner] = None):
        self._root = Path(root)
        self._provenance = provenance
        self._signer = signer
        self.written: list[Path] = []

    @property
    def root(self) -> Path:
        return self._root

    @property
    def provenance(self) -> Optional[Provenance]:
        return self._provenance

    def path(self, relpath: str) -> Path:
        return self._root / relpath

    def exists(self, relpath: str) -> bool:
        return self.path(relpath).is_file()

    def require(self, relpath: str, required_step: str) -> Path:
        p = self.path(relpath)
        if not p.is_file():
            raise MissingArtifactError(p, required_step)
        return p

    def write(self, relpath: str, data: Any) -> Path:
        p = write_artifact(self.path(relpath), data, self._provenance)
        if self._signer is not None:
            self._signer.sign_file(p)
        self.written.append(p)
        mlogger.info("Wrote %s", p)
        return p

    def __repr__(self):
        return f"{self.__class__.__name__}({self._root})"
