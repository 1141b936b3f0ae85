"""Design-time template store (Catalog) and runtime state store (Inventory).

Both stores share one persistence mechanism: a single-file append-only log
of length-prefixed records plus an in-memory index rebuilt on load. Each
log record is ``4-byte big-endian length | UTF-8 JSON bytes`` where the
JSON object is ``{"type": ..., "payload": ..., "digest": ...}`` and the
digest covers the canonicalized payload. The catalog is append-only: a
given (id, version) is never overwritten. The inventory reflects only
committed transactions, guarded by an optimistic per-instance sequence
number.
"""

from __future__ import annotations

import struct
import threading
from pathlib import Path

from .digest import canonical_dumps, chain_digest, digest_obj
from .errors import EmptyCatalog, SequenceConflict
from .model import NSST, NST, Domain, ScenarioClass

_LEN = struct.Struct(">I")


class AppendLog:
    """Length-prefixed append-only record log, optionally file-backed."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.records: list[dict] = []
        if self.path and self.path.exists():
            self._load()

    def _load(self) -> None:
        data = self.path.read_bytes()
        offset = 0
        while offset < len(data):
            (length,) = _LEN.unpack_from(data, offset)
            offset += _LEN.size
            raw = data[offset:offset + length]
            offset += length
            record = _loads(raw)
            if record["digest"] != digest_obj(record["payload"]):
                raise ValueError(f"corrupt log record at offset {offset}")
            self.records.append(record)

    def append(self, record_type: str, payload: dict) -> dict:
        record = {"type": record_type, "payload": payload,
                  "digest": digest_obj(payload)}
        raw = canonical_dumps(record).encode("utf-8")
        if self.path:
            with self.path.open("ab") as fh:
                fh.write(_LEN.pack(len(raw)))
                fh.write(raw)
        self.records.append(record)
        return record


def _loads(raw: bytes) -> dict:
    import json

    return json.loads(raw.decode("utf-8"))


class Catalog:
    """Versioned, content-addressed template registry.

    Registration is idempotent: identical content under the same template
    id maps back to the already-committed version.
    """

    def __init__(self, path: str | Path | None = None):
        self._log = AppendLog(path)
        self._lock = threading.RLock()
        # (id, version) -> (kind, content, digest)
        self._entries: dict[tuple[str, int], tuple[str, dict, str]] = {}
        self._latest: dict[str, int] = {}
        for record in self._log.records:
            if record["type"] == "catalog":
                self._index(record["payload"], record["digest"])

    def _index(self, payload: dict, digest: str) -> None:
        key = (payload["id"], payload["version"])
        self._entries[key] = (payload["kind"], payload["content"], digest)
        self._latest[payload["id"]] = max(
            self._latest.get(payload["id"], 0), payload["version"])

    def register_template(self, artifact: NSST | NST, committed_at: float = 0.0
                          ) -> tuple[str, int]:
        kind = "nsst" if isinstance(artifact, NSST) else "nst"
        content = artifact.content()
        content_digest = digest_obj(content)
        with self._lock:
            for version in range(1, self._latest.get(artifact.id, 0) + 1):
                kind_v, content_v, _ = self._entries[(artifact.id, version)]
                if kind_v == kind and digest_obj(content_v) == content_digest:
                    return (artifact.id, version)
            version = self._latest.get(artifact.id, 0) + 1
            payload = {"id": artifact.id, "version": version, "kind": kind,
                       "content": content, "committed_at": committed_at}
            record = self._log.append("catalog", payload)
            self._index(payload, record["digest"])
            return (artifact.id, version)

    def get(self, template_id: str, version: int) -> NSST | NST:
        with self._lock:
            kind, content, _ = self._entries[(template_id, version)]
        if kind == "nsst":
            return NSST.from_content(content, version=version)
        return NST.from_content(content, version=version)

    def latest_version(self, template_id: str) -> int:
        with self._lock:
            return self._latest.get(template_id, 0)

    def latest(self, template_id: str) -> NSST | NST:
        version = self.latest_version(template_id)
        if version == 0:
            raise KeyError(template_id)
        return self.get(template_id, version)

    def lookup_templates(self, domain: Domain, scenario: ScenarioClass
                         ) -> list[NSST]:
        """All latest-version subnet templates for a (domain, scenario),
        sorted by resource footprint ascending, id as the final tiebreak."""
        with self._lock:
            if not self._latest:
                raise EmptyCatalog("catalog has no templates registered")
            out = []
            for template_id, version in self._latest.items():
                kind, content, _ = self._entries[(template_id, version)]
                if kind != "nsst":
                    continue
                nsst = NSST.from_content(content, version=version)
                if nsst.domain == domain and nsst.scenario == scenario:
                    out.append(nsst)
        out.sort(key=lambda n: (*n.footprint(), n.id))
        return out

    def size(self) -> int:
        with self._lock:
            return len(self._entries)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._latest)


class Inventory:
    """Runtime state store with optimistic, idempotent commits."""

    def __init__(self, path: str | Path | None = None):
        self._log = AppendLog(path)
        self._lock = threading.RLock()
        self._state: dict[str, dict] = {}       # nsi id -> latest snapshot
        self._seq: dict[str, int] = {}          # nsi id -> committed sequence
        self._snapshot_digest: dict[str, str] = {}
        self._chain = "0" * 64
        for record in self._log.records:
            if record["type"] == "inventory":
                self._apply(record["payload"], record["digest"])

    def _apply(self, payload: dict, digest: str) -> None:
        nsi_id = payload["nsi_id"]
        self._state[nsi_id] = payload["snapshot"]
        self._seq[nsi_id] = payload["seq"]
        self._snapshot_digest[nsi_id] = digest_obj(payload["snapshot"])
        self._chain = chain_digest(self._chain, digest)

    def sequence(self, nsi_id: str) -> int:
        with self._lock:
            return self._seq.get(nsi_id, 0)

    def commit_state(self, nsi_id: str, snapshot: dict, expected_seq: int) -> int:
        """Persist a snapshot if ``expected_seq`` matches the committed
        sequence. Re-committing a byte-identical snapshot is a no-op that
        returns the current sequence unchanged."""
        snapshot_digest = digest_obj(snapshot)
        with self._lock:
            current = self._seq.get(nsi_id, 0)
            if self._snapshot_digest.get(nsi_id) == snapshot_digest:
                return current
            if expected_seq != current:
                raise SequenceConflict(
                    f"expected seq {expected_seq}, committed is {current}",
                    nsi_id=nsi_id, expected=expected_seq, committed=current)
            payload = {"nsi_id": nsi_id, "seq": current + 1, "snapshot": snapshot}
            record = self._log.append("inventory", payload)
            self._apply(payload, record["digest"])
            return current + 1

    def get(self, nsi_id: str) -> dict | None:
        with self._lock:
            snapshot = self._state.get(nsi_id)
        return dict(snapshot) if snapshot is not None else None

    def all_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._state)

    def digest(self) -> str:
        """Chain digest over the full committed transaction history."""
        with self._lock:
            return self._chain

    def live_resource_ids(self) -> set[str]:
        """Resource ids referenced by non-terminated instance snapshots."""
        out: set[str] = set()
        with self._lock:
            for snapshot in self._state.values():
                if snapshot.get("state") in ("Terminated",):
                    continue
                for nssi in snapshot.get("nssis", {}).values():
                    if nssi.get("state") == "Removed":
                        continue
                    out.update(nssi.get("resource_ids", ()))
        return out
