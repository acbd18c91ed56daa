"""Append-only JSON-lines store of run records, sharded by (d, p)."""

from __future__ import annotations

import datetime as _dt
import fcntl
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from . import __version__

FORMAT_VERSION = 1
ENV_VAR = "LPOLY_STORE"
DEFAULT_ROOT = "lpoly_store"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_id(inputs: dict) -> str:
    return hashlib.sha256(canonical(inputs).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RunRecord:
    id: str
    inputs: dict
    outputs: dict
    version: str = __version__

    @classmethod
    def create(cls, inputs: dict, outputs: dict) -> "RunRecord":
        return cls(record_id(inputs), inputs, outputs)

    def to_json(self) -> dict:
        return {"id": self.id, "inputs": self.inputs, "outputs": self.outputs, "artifact_version": self.version}

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        return cls(data["id"], data["inputs"], data["outputs"], data["artifact_version"])

    def dumps(self) -> str:
        return canonical(self.to_json())


@dataclass(frozen=True)
class StoreConfig:
    root: Path
    format_version: int = FORMAT_VERSION

    @classmethod
    def resolve(cls, flag: str | None = None) -> "StoreConfig":
        """--store flag, then $LPOLY_STORE, then ./lpoly_store."""
        root = flag or os.environ.get(ENV_VAR) or DEFAULT_ROOT
        return cls(Path(root))


class Store:
    def __init__(self, config: StoreConfig):
        self.config = config
        self.base = config.root / f"v{config.format_version}"

    def shard(self, d: int, p: int) -> Path:
        return self.base / f"d{d}" / f"p{p}.jsonl"

    @staticmethod
    def _read(path: Path) -> Iterator[RunRecord]:
        if not path.exists():
            return
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield RunRecord.from_json(json.loads(line)["record"])

    def put(self, record: RunRecord) -> bool:
        """Append unless a record with the same id exists; returns True if written."""
        path = self.shard(record.inputs["d"], record.inputs["p"])
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a+", encoding="utf-8") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                fh.seek(0)
                for line in fh:
                    if line.strip() and json.loads(line)["record"]["id"] == record.id:
                        return False
                envelope = {"created": _dt.datetime.now(_dt.timezone.utc).isoformat()}
                fh.write(canonical({"record": record.to_json(), "envelope": envelope}) + "\n")
                fh.flush()
                return True
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def get(self, rid: str, d: int | None = None, p: int | None = None) -> RunRecord | None:
        paths = [self.shard(d, p)] if d is not None and p is not None else sorted(self.base.glob("d*/p*.jsonl"))
        for path in paths:
            for rec in self._read(path):
                if rec.id == rid:
                    return rec
        return None

    def records(self) -> Iterator[RunRecord]:
        for path in sorted(self.base.glob("d*/p*.jsonl")):
            yield from self._read(path)
