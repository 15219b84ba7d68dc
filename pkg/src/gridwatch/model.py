"""Domain model: resources, gathered info, map configuration, portal state.

All types serialize to/from plain dicts matching the on-disk JSON schemas
(see store.py). Validation lives here so every writer path (API, CLI,
import) enforces the same rules.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

STATE_VERSION = 1

# Type key for resources added by hostname only; never registered as a
# gatherer and always skipped by the monitor.
UNCONFIGURED = "unconfigured"


class GridwatchError(Exception):
    """Base for all domain errors."""


class ValidationError(GridwatchError):
    """Input violates a type invariant or precondition."""


class NotFoundError(GridwatchError):
    """Referenced entity does not exist."""


class ResourceStatus(str, Enum):
    UP = "UP"
    DOWN = "DOWN"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Location:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0):
            raise ValidationError(f"latitude out of range [-90, 90]: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValidationError(f"longitude out of range [-180, 180]: {self.lon}")

    def to_dict(self) -> dict[str, float]:
        return {"lat": self.lat, "lon": self.lon}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Location":
        try:
            return cls(lat=float(d["lat"]), lon=float(d["lon"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad location: {d!r}") from exc


def new_resource_id() -> str:
    """128-bit random id, 32 hex chars."""
    return secrets.token_hex(16)


@dataclass
class Resource:
    id: str
    hostname: str
    type: str = UNCONFIGURED
    label: str = ""
    port: int | None = None
    endpoint: str | None = None
    location: Location = field(default_factory=lambda: Location(0.0, 0.0))
    enabled: bool = True

    def __post_init__(self) -> None:
        if not self.hostname.strip():
            raise ValidationError("hostname must be non-empty")
        if self.port is not None and not (1 <= self.port <= 65535):
            raise ValidationError(f"port out of range 1-65535: {self.port}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "hostname": self.hostname,
            "port": self.port,
            "type": self.type,
            "label": self.label,
            "endpoint": self.endpoint,
            "location": self.location.to_dict(),
            "enabled": self.enabled,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Resource":
        try:
            return cls(
                id=str(d["id"]),
                hostname=str(d["hostname"]),
                port=int(d["port"]) if d.get("port") is not None else None,
                type=str(d.get("type", UNCONFIGURED)),
                label=str(d.get("label", "")),
                endpoint=str(d["endpoint"]) if d.get("endpoint") is not None else None,
                location=Location.from_dict(d.get("location", {"lat": 0, "lon": 0})),
                enabled=bool(d.get("enabled", True)),
            )
        except KeyError as exc:
            raise ValidationError(f"resource missing field {exc}") from exc


@dataclass
class ResourceInfo:
    resource_id: str
    status: ResourceStatus
    payload_xml: str = ""
    gathered_at: str = ""  # ISO-8601 UTC
    latency_ms: int = 0
    error: str | None = None

    def __post_init__(self) -> None:
        if self.latency_ms < 0:
            raise ValidationError(f"latency_ms must be non-negative: {self.latency_ms}")
        if self.status is ResourceStatus.DOWN and not self.error:
            raise ValidationError("DOWN info requires a non-empty error")

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "gathered_at": self.gathered_at,
            "latency_ms": self.latency_ms,
            "error": self.error,
            "payload_xml": self.payload_xml,
        }

    @classmethod
    def from_dict(cls, resource_id: str, d: dict[str, Any]) -> "ResourceInfo":
        return cls(
            resource_id=resource_id,
            status=ResourceStatus(d["status"]),
            payload_xml=str(d.get("payload_xml", "")),
            gathered_at=str(d.get("gathered_at", "")),
            latency_ms=int(d.get("latency_ms", 0)),
            error=d.get("error"),
        )


@dataclass
class MapConfig:
    tile_url_template: str = "https://tile.openstreetmap.org/{z}/{x}/{y}.png"
    api_key: str | None = None
    center: Location = field(default_factory=lambda: Location(0.0, 0.0))
    zoom: int = 2
    width_px: int = 900
    height_px: int = 520
    allow_pan: bool = True
    allow_zoom: bool = True

    def __post_init__(self) -> None:
        if not (0 <= self.zoom <= 19):
            raise ValidationError(f"zoom out of range 0-19: {self.zoom}")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValidationError("map dimensions must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "tile_url_template": self.tile_url_template,
            "api_key": self.api_key,
            "center": self.center.to_dict(),
            "zoom": self.zoom,
            "width_px": self.width_px,
            "height_px": self.height_px,
            "allow_pan": self.allow_pan,
            "allow_zoom": self.allow_zoom,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MapConfig":
        try:
            return cls(
                tile_url_template=str(d["tile_url_template"]),
                api_key=d.get("api_key"),
                center=Location.from_dict(d["center"]),
                zoom=int(d["zoom"]),
                width_px=int(d["width_px"]),
                height_px=int(d["height_px"]),
                allow_pan=bool(d["allow_pan"]),
                allow_zoom=bool(d["allow_zoom"]),
            )
        except KeyError as exc:
            raise ValidationError(f"map config missing field {exc}") from exc


@dataclass
class PortalState:
    version: int = STATE_VERSION
    map: MapConfig = field(default_factory=MapConfig)
    resources: list[Resource] = field(default_factory=list)

    def get(self, resource_id: str) -> Resource:
        for r in self.resources:
            if r.id == resource_id:
                return r
        raise NotFoundError(f"no resource with id {resource_id!r}")

    def ids(self) -> list[str]:
        return [r.id for r in self.resources]

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "map": self.map.to_dict(),
            "resources": [r.to_dict() for r in self.resources],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PortalState":
        version = d.get("version")
        if version != STATE_VERSION:
            raise ValidationError(
                f"unsupported portal state version {version!r} (expected {STATE_VERSION})"
            )
        state = cls(
            version=STATE_VERSION,
            map=MapConfig.from_dict(d["map"]),
            resources=[Resource.from_dict(r) for r in d.get("resources", [])],
        )
        seen: set[str] = set()
        for r in state.resources:
            if r.id in seen:
                raise ValidationError(f"duplicate resource id {r.id!r}")
            seen.add(r.id)
        return state


# ---------------------------------------------------------------------------
# State operations


def add_resource(state: PortalState, hostname: str) -> tuple[PortalState, Resource]:
    """Append a new unconfigured resource; hostname is the only required input."""
    hostname = hostname.strip()
    if not hostname:
        raise ValidationError("hostname must be non-empty")
    resource = Resource(
        id=new_resource_id(),
        hostname=hostname,
        type=UNCONFIGURED,
        label=hostname,
        enabled=True,
    )
    new_state = replace(state, resources=state.resources + [resource])
    return new_state, resource


# Fields a patch may touch; id is immutable.
_PATCHABLE = {"hostname", "port", "type", "label", "endpoint", "location", "enabled"}


def update_resource(state: PortalState, resource_id: str, patch: dict[str, Any]) -> PortalState:
    """Apply a partial update to one resource, validating the result."""
    unknown = set(patch) - _PATCHABLE
    if unknown:
        raise ValidationError(f"unknown fields in patch: {sorted(unknown)}")
    current = state.get(resource_id)
    fields = current.to_dict()
    for key, value in patch.items():
        fields[key] = value
    updated = Resource.from_dict({**fields, "id": resource_id})
    resources = [updated if r.id == resource_id else r for r in state.resources]
    return replace(state, resources=resources)


def delete_resource(state: PortalState, resource_id: str) -> PortalState:
    """Remove a resource from state. Callers also drop its info record."""
    state.get(resource_id)  # raises NotFoundError
    resources = [r for r in state.resources if r.id != resource_id]
    return replace(state, resources=resources)
