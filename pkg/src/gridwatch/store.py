"""On-disk portal store: one configuration document plus one info file per
resource.

Layout under the state directory:

    portal.json        written only by the server/CLI
    state/<id>.json    written only by the monitor

Every write goes through a temp file followed by os.replace, so readers in
other processes always see a complete snapshot. Within a process, writes
are serialized by a lock; reads need no locking.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path

from .model import (
    GridwatchError,
    NotFoundError,
    PortalState,
    ResourceInfo,
    ValidationError,
)


class StoreError(GridwatchError):
    """The store is unreadable or contains a corrupt document."""


def atomic_write_json(path: Path, obj: object) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".json", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(obj, f, ensure_ascii=False, indent=2)
            f.write("\n")
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _read_json(path: Path) -> object:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreError(f"cannot read {path}: {exc}") from exc


class PortalStore:
    """Handle on one state directory; shareable across threads."""

    def __init__(self, state_dir: str | Path) -> None:
        self.state_dir = Path(state_dir)
        self.portal_path = self.state_dir / "portal.json"
        self.info_dir = self.state_dir / "state"
        self._lock = threading.Lock()

    # -- configuration document -------------------------------------------

    def load_state(self) -> PortalState:
        try:
            data = _read_json(self.portal_path)
        except FileNotFoundError as exc:
            raise StoreError(f"no portal state at {self.portal_path}") from exc
        try:
            return PortalState.from_dict(data)  # type: ignore[arg-type]
        except (ValidationError, TypeError, KeyError) as exc:
            raise StoreError(f"corrupt portal state in {self.portal_path}: {exc}") from exc

    def load_or_init(self) -> PortalState:
        try:
            return self.load_state()
        except StoreError:
            if self.portal_path.exists():
                raise
            return PortalState()

    def save_state(self, state: PortalState) -> None:
        with self._lock:
            atomic_write_json(self.portal_path, state.to_dict())

    # -- per-resource info files ------------------------------------------

    def _info_path(self, resource_id: str) -> Path:
        if not resource_id or "/" in resource_id or resource_id.startswith("."):
            raise ValidationError(f"bad resource id {resource_id!r}")
        return self.info_dir / f"{resource_id}.json"

    def record_info(self, resource_id: str, info: ResourceInfo) -> None:
        with self._lock:
            atomic_write_json(self._info_path(resource_id), info.to_dict())

    def get_info(self, resource_id: str) -> ResourceInfo:
        path = self._info_path(resource_id)
        try:
            data = _read_json(path)
        except FileNotFoundError:
            raise NotFoundError(f"no info recorded for resource {resource_id!r}")
        try:
            return ResourceInfo.from_dict(resource_id, data)  # type: ignore[arg-type]
        except (KeyError, ValueError, ValidationError) as exc:
            raise StoreError(f"corrupt info file {path}: {exc}") from exc

    def delete_info(self, resource_id: str) -> None:
        with self._lock:
            try:
                self._info_path(resource_id).unlink()
            except FileNotFoundError:
                pass

    def all_infos(self) -> dict[str, ResourceInfo]:
        infos: dict[str, ResourceInfo] = {}
        if not self.info_dir.is_dir():
            return infos
        for path in self.info_dir.glob("*.json"):
            rid = path.stem
            try:
                infos[rid] = self.get_info(rid)
            except (NotFoundError, StoreError):
                continue
        return infos
