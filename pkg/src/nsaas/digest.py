"""Canonical serialization and content digests.

Digests are pure functions of content: stable key order, compact
separators, SHA-256 over UTF-8 bytes.
"""

from __future__ import annotations

import hashlib
import json


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_obj(obj) -> str:
    return digest_bytes(canonical_dumps(obj).encode("utf-8"))


def chain_digest(previous: str, record_digest: str) -> str:
    return digest_bytes(f"{previous}:{record_digest}".encode("ascii"))
