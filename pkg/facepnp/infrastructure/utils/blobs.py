"""A module containing helpers for checksummed little-endian float64 payloads."""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Sequence

import numpy as np

from facepnp.core.domain.errors import ChecksumMismatch, DatasetError, FormatVersionMismatch
from facepnp.infrastructure.utils.consts import ENDIANNESS, FLOAT_DTYPE, FORMAT_VERSION


def sha256_hex(payload: bytes) -> str:
    """Return the hex sha256 digest of a payload."""
    return hashlib.sha256(payload).hexdigest()


def pack(arrays: Sequence[np.ndarray]) -> bytes:
    """Concatenate arrays (row-major) into a little-endian float64 payload."""
    if not arrays:
        return b""
    flat = np.concatenate([np.asarray(a, dtype=np.float64).reshape(-1) for a in arrays])
    return flat.astype(FLOAT_DTYPE).tobytes()


def unpack(payload: bytes) -> np.ndarray:
    """Decode a little-endian float64 payload into a native float64 vector.

    Raises:
        DatasetError: If the payload length is not a whole number of floats.
    """
    if len(payload) % 8:
        raise DatasetError(f"payload of {len(payload)} bytes is not a float64 array")
    return np.frombuffer(payload, dtype=FLOAT_DTYPE).astype(np.float64)


def verify(payload: bytes, expected: str, name: str) -> None:
    """Check a payload against its recorded digest.

    Raises:
        ChecksumMismatch: If the digests differ.
    """
    actual = sha256_hex(payload)
    if actual != expected:
        raise ChecksumMismatch(f"{name}: sha256 {actual} does not match recorded {expected}")


def check_header(header: Dict[str, Any], name: str) -> None:
    """Check the format version and endianness tag of a header.

    Raises:
        FormatVersionMismatch: If the version is not the supported one.
        DatasetError: If the endianness tag is not little-endian.
    """
    version = header.get("version")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"{name}: format version {version}, expected {FORMAT_VERSION}")
    if header.get("endianness", ENDIANNESS) != ENDIANNESS:
        raise DatasetError(f"{name}: unsupported endianness {header.get('endianness')}")


def dump_json(data: Dict[str, Any]) -> str:
    """Serialize a header deterministically."""
    return json.dumps(data, indent=2, sort_keys=True)


def read_bytes(path: Path) -> bytes:
    """Read a file, mapping IO failures to DatasetError."""
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e


def read_json(path: Path) -> Dict[str, Any]:
    """Read a JSON file, mapping IO and syntax failures to DatasetError."""
    try:
        return json.loads(read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DatasetError(f"cannot parse {path}: {e}") from e


def write_bytes(path: Path, payload: bytes) -> None:
    """Write a file, mapping IO failures to DatasetError."""
    try:
        Path(path).write_bytes(payload)
    except OSError as e:
        raise DatasetError(f"cannot write {path}: {e}") from e
