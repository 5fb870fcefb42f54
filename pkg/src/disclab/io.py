"""Atomic file output, fixed-precision CSV and the binary matrix dumps."""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import GuardError

SPEC_MAGIC = b"DLABSPEC"
FACTOR_MAGIC = b"DLABFACT"
SIG_DIGITS = 12


def atomic_write_bytes(path, data: bytes) -> Path:
    """Write to a temporary sibling, then rename; readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def fmt_float(x) -> str:
    """12 significant digits, locale independent; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if x is None:
        return ""
    x = float(x)
    if x != x:
        return "nan"
    if x == 0:
        return "0"
    return format(x, f".{SIG_DIGITS}g")


# binary dumps ---------------------------------------------------------------------


def pack_spectrum_vectors(vectors: np.ndarray) -> bytes:
    """16-byte header (``DLABSPEC`` + uint64 n) then row-major little-endian float64."""
    v = np.asarray(vectors, dtype="<f8")
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise GuardError(f"eigenvector dump needs an n x n matrix, got {v.shape}")
    return SPEC_MAGIC + struct.pack("<Q", v.shape[0]) + np.ascontiguousarray(v).tobytes()


def unpack_spectrum_vectors(data: bytes) -> np.ndarray:
    if data[:8] != SPEC_MAGIC:
        raise GuardError("not a DLABSPEC dump")
    (n,) = struct.unpack("<Q", data[8:16])
    body = np.frombuffer(data[16:], dtype="<f8")
    if body.size != n * n:
        raise GuardError(f"DLABSPEC body has {body.size} values, expected {n * n}")
    return body.reshape(n, n).astype(np.float64)


def pack_factor(V: np.ndarray) -> bytes:
    """16-byte header (``DLABFACT`` + uint32 n + uint32 k) then rows of V."""
    v = np.asarray(V, dtype="<f8")
    if v.ndim != 2:
        raise GuardError(f"factor dump needs a matrix, got {v.shape}")
    n, k = v.shape
    return FACTOR_MAGIC + struct.pack("<II", n, k) + np.ascontiguousarray(v).tobytes()


def unpack_factor(data: bytes) -> np.ndarray:
    if data[:8] != FACTOR_MAGIC:
        raise GuardError("not a DLABFACT dump")
    n, k = struct.unpack("<II", data[8:16])
    body = np.frombuffer(data[16:], dtype="<f8")
    if body.size != n * k:
        raise GuardError(f"DLABFACT body has {body.size} values, expected {n * k}")
    return body.reshape(n, k).astype(np.float64)


def eigenvalues_csv(eigenvalues) -> str:
    lines = ["index,eigenvalue"]
    lines += [f"{i + 1},{fmt_float(x)}" for i, x in enumerate(np.asarray(eigenvalues))]
    return "\n".join(lines) + "\n"
