"""Versioned on-disk cache with an integrity hash.

Each entry is a UTF-8 text file: one JSON header line, then a JSON body.  The
header records the format version, namespace, key and the SHA-256 of the body.
A file whose hash does not match raises ``CacheIntegrityError``; it is never
silently rebuilt.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any

FORMAT_NAME = "neighbortrace-cache"
FORMAT_VERSION = 1
CACHE_ENV_VAR = "NEIGHBORTRACE_CACHE_DIR"


class CacheIntegrityError(RuntimeError):
    """A cache file exists but its header or checksum is invalid."""


def resolve_cache_dir(flag: str | os.PathLike | None = None) -> Path:
    """Cache directory: explicit flag, then the environment variable, then ``./.neighbortrace-cache``."""
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.cwd() / ".neighbortrace-cache"


def content_key(*parts: Any) -> str:
    """Stable hex digest of JSON-serializable parts."""
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def _path(cache_dir: Path, namespace: str, key: str) -> Path:
    return Path(cache_dir) / namespace / f"{key}.json"


def store(cache_dir: str | os.PathLike, namespace: str, key: str, payload: Any) -> Path:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "namespace": namespace,
        "key": key,
        "sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    path = _path(Path(cache_dir), namespace, key)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(header, sort_keys=True) + "\n" + body + "\n", encoding="utf-8")
    tmp.replace(path)
    return path


def load(cache_dir: str | os.PathLike | None, namespace: str, key: str) -> Any | None:
    """Return the stored payload, ``None`` when absent; raise on corruption."""
    if cache_dir is None:
        return None
    path = _path(Path(cache_dir), namespace, key)
    if not path.exists():
        return None
    text = path.read_text(encoding="utf-8")
    head, _, body = text.partition("\n")
    body = body.rstrip("\n")
    try:
        header = json.loads(head)
    except json.JSONDecodeError as exc:
        raise CacheIntegrityError(f"{path}: unreadable header") from exc
    if header.get("format") != FORMAT_NAME or header.get("version") != FORMAT_VERSION:
        raise CacheIntegrityError(f"{path}: unsupported format {header.get('format')}/{header.get('version')}")
    if header.get("namespace") != namespace or header.get("key") != key:
        raise CacheIntegrityError(f"{path}: header does not match the requested entry")
    if hashlib.sha256(body.encode()).hexdigest() != header.get("sha256"):
        raise CacheIntegrityError(f"{path}: checksum mismatch")
    return json.loads(body)
