"""Binary container for datasets and checkpoints.

Layout: 4-byte magic, little-endian u16 version, u32 header length, a JSON
header with sorted keys, then every array's raw little-endian bytes in header
order.
"""

import json
import logging
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..utils.errors import ContainerError

logger = logging.getLogger(__name__)

MAGIC = b"SBDP"
VERSION = 1
_PREFIX = struct.Struct("<4sHI")


@dataclass
class Container:
    digest: str
    kind: str
    arrays: dict[str, np.ndarray]
    meta: dict[str, Any] = field(default_factory=dict)


def ensure_writable(path: Path, force: bool = False) -> None:
    """Raise ContainerError if ``path`` exists and ``force`` is not set."""
    if path.exists() and not force:
        raise ContainerError(f"{path} already exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)


def atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        with open(tmp, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except OSError as e:
        tmp.unlink(missing_ok=True)
        raise ContainerError(f"cannot write {path}: {e}") from e


def encode(container: Container) -> bytes:
    entries, blobs, offset = [], [], 0
    for name, array in container.arrays.items():
        array = np.asarray(array)
        data = np.ascontiguousarray(array, dtype=array.dtype.newbyteorder("<")).tobytes()
        entries.append(
            {
                "name": name,
                "dtype": array.dtype.newbyteorder("<").str,
                "shape": list(array.shape),
                "offset": offset,
                "nbytes": len(data),
            }
        )
        blobs.append(data)
        offset += len(data)
    header = json.dumps(
        {
            "digest": container.digest,
            "kind": container.kind,
            "meta": container.meta,
            "arrays": entries,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode()
    return _PREFIX.pack(MAGIC, VERSION, len(header)) + header + b"".join(blobs)


def decode(payload: bytes, source: str = "<bytes>") -> Container:
    if len(payload) < _PREFIX.size:
        raise ContainerError(f"{source} is too short to be a container")
    magic, version, header_length = _PREFIX.unpack_from(payload)
    if magic != MAGIC:
        raise ContainerError(f"{source} has bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"{source} has unsupported version {version}")
    start = _PREFIX.size + header_length
    try:
        header = json.loads(payload[_PREFIX.size : start].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ContainerError(f"{source} has a corrupt header: {e}") from e
    arrays = {}
    for entry in header["arrays"]:
        begin = start + entry["offset"]
        end = begin + entry["nbytes"]
        if end > len(payload):
            raise ContainerError(f"{source} is truncated at array '{entry['name']}'")
        array = np.frombuffer(payload[begin:end], dtype=np.dtype(entry["dtype"]))
        arrays[entry["name"]] = array.reshape(entry["shape"]).astype(array.dtype.newbyteorder("="))
    return Container(
        digest=header["digest"], kind=header["kind"], arrays=arrays, meta=header["meta"]
    )


def write_container(path: Path, container: Container, force: bool = False) -> Path:
    """Serialise ``container`` to ``path`` through a temporary file and rename."""
    ensure_writable(path, force)
    atomic_write(path, encode(container))
    logger.info(
        "Container written",
        extra={
            "fields": {
                "path": str(path),
                "kind": container.kind,
                "arrays": len(container.arrays),
            }
        },
    )
    return path


def read_container(path: Path, kind: str | None = None) -> Container:
    try:
        payload = Path(path).read_bytes()
    except OSError as e:
        raise ContainerError(f"cannot read {path}: {e}") from e
    container = decode(payload, str(path))
    if kind is not None and container.kind != kind:
        raise ContainerError(f"{path} holds a {container.kind}, expected a {kind}")
    return container
