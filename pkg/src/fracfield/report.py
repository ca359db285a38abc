"""Deterministic artifact writing: CSV tables, JSON files, digests.

Floats are rendered with %.17g so values round-trip exactly; files are
UTF-8 with LF line endings regardless of platform, and every writer
returns the SHA-256 of the bytes written so manifests can pin outputs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

__all__ = [
    "ARTIFACT_VERSION",
    "format_value",
    "write_csv",
    "write_json",
    "sha256_of",
]

ARTIFACT_VERSION = 1

_FLOAT_FMT = "%.17g"


def format_value(value) -> str:
    """Render one cell: floats via %.17g, everything else via str."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return _FLOAT_FMT % value
    return str(value)


def write_csv(path, header, rows) -> str:
    """Write a CSV table and return the SHA-256 of its bytes."""
    path = Path(path)
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def write_json(path, obj) -> str:
    """Write a JSON document and return the SHA-256 of its bytes."""
    path = Path(path)
    data = (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def sha256_of(path) -> str:
    """SHA-256 hex digest of an existing file."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
