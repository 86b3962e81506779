"""Canonical JSON encoding and hashing for digests and on-disk documents.

Every digest in the project is SHA-256 over UTF-8 bytes of JSON with sorted
keys and compact separators, so the same logical document always hashes the
same way regardless of platform or insertion order.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()
