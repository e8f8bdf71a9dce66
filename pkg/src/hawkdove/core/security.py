# -*- coding: utf-8 -*-

"""
Hashes for provenance and optional OpenPGP signing of written artifacts.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Optional
from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.logger import module_logger

mlogger = module_logger(__name__)

SIGNATURE_SUFFIX = ".asc"


class SigningError(HawkdoveError):
    pass


class SigningUnavailable(InputError, SigningError):
    """
    A signing key was configured but the gnupg package is not installed.
    """


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, default=str)


def canonical_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf8")).hexdigest()


def _load_gpg(homedir: Optional[Path]):
    try:
        import gnupg
    except ImportError:
        raise SigningUnavailable("Signing requested but 'gnupg' is not installed (pip install hawkdove[sign])") \
            from None

    if homedir is None:
        return gnupg.GPG()
    return gnupg.GPG(homedir=str(homedir))


class ArtifactSigner:
    """
    Writes a detached ASCII armored signature next to each artifact: <file>.asc
    """

    def __init__(self, key: str, homedir: Optional[Path] = None, passphrase: Optional[str] = None):
        self._key = key
        self._passphrase = passphrase
        self._gpg = _load_gpg(homedir)

    @property
    def key(self) -> str:
        return self._key

    def sign_file(self, path: Path) -> Path:
        path = Path(path)
        data = path.read_bytes()

        result = self._gpg.sign(data, default_key=self._key, passphrase=self._passphrase,
                                detach=True, clearsign=False)
        armored = str(result)
        if not armored:
            raise SigningError("gpg produced no signature for %s (key %s)" % (path, self._key))

        sig_path = path.with_name(path.name + SIGNATURE_SUFFIX)
        sig_path.write_text(armored, encoding="ascii")
        mlogger.debug("Signed %s -> %s", path, sig_path)
        return sig_path

    def __repr__(self):
        return f"{self.__class__.__name__}({self._key})"


def verify_artifact(path: Path, signature: Optional[Path] = None, homedir: Optional[Path] = None) -> bool:
    path = Path(path)
    signature = Path(signature) if signature else path.with_name(path.name + SIGNATURE_SUFFIX)
    if not signature.is_file():
        raise SigningError("Signature missing: %s" % signature)

    gpg = _load_gpg(homedir)
    with path.open("rb") as fp:
        verified = gpg.verify_file(fp, sig_file=str(signature))

    valid = bool(getattr(verified, "valid", False))
    if not valid:
        mlogger.warning("Signature check failed for %s", path)
    return valid
