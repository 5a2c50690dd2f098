"""On-disk cache for sieve and rho tables.

Enabled only when ``EXPLAB_CACHE_DIR`` is set. Each file is::

    magic   4 bytes   b"EXL1"
    version u16       format version (currently 1)
    dtype   u8        0 = int64, 1 = float64
    reserved u8
    key_len u32       length of the UTF-8 key that follows
    length  u64       number of array elements
    key     key_len bytes
    data    length * 8 bytes, little-endian

Everything is little-endian. A file whose header or key does not match is
ignored and rebuilt.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

MAGIC = b"EXL1"
VERSION = 1
ENV_VAR = "EXPLAB_CACHE_DIR"

_HEADER = struct.Struct("<4sHBBIQ")
_DTYPES = {0: np.dtype("<i8"), 1: np.dtype("<f8")}
_CODES = {np.dtype("int64"): 0, np.dtype("float64"): 1}


def cache_dir() -> Path | None:
    root = os.environ.get(ENV_VAR)
    if not root:
        return None
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _path_for(root: Path, key: str) -> Path:
    digest = hashlib.sha1(key.encode()).hexdigest()[:16]
    return root / f"{key.split(':', 1)[0]}-{digest}.exl"


def encode(key: str, array: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(array)
    code = _CODES[arr.dtype]
    raw_key = key.encode()
    header = _HEADER.pack(MAGIC, VERSION, code, 0, len(raw_key), arr.size)
    return header + raw_key + arr.astype(_DTYPES[code], copy=False).tobytes()


def decode(blob: bytes, key: str) -> np.ndarray | None:
    if len(blob) < _HEADER.size:
        return None
    magic, version, code, _, key_len, length = _HEADER.unpack_from(blob)
    if magic != MAGIC or version != VERSION or code not in _DTYPES:
        return None
    start = _HEADER.size
    if blob[start:start + key_len].decode(errors="replace") != key:
        return None
    start += key_len
    dtype = _DTYPES[code]
    if len(blob) - start != length * dtype.itemsize:
        return None
    return np.frombuffer(blob, dtype=dtype, offset=start, count=length).astype(dtype.newbyteorder("="))


def load(key: str) -> np.ndarray | None:
    root = cache_dir()
    if root is None:
        return None
    path = _path_for(root, key)
    try:
        blob = path.read_bytes()
    except OSError:
        return None
    arr = decode(blob, key)
    if arr is None:
        log.warning("ignoring stale cache file %s", path)
    return arr


def store(key: str, array: np.ndarray) -> None:
    root = cache_dir()
    if root is None:
        return
    path = _path_for(root, key)
    fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(encode(key, array))
        os.replace(tmp, path)
    except OSError as exc:  # cache is best effort
        log.warning("could not write cache file %s: %s", path, exc)
        try:
            os.unlink(tmp)
        except OSError:
            pass
