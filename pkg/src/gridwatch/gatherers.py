"""Pluggable information gatherers and the type-keyed registry.

A gatherer's contract: gather(resource, timeout_ms) returns a ResourceInfo
and never raises; connection failures, timeouts, and bad payloads all come
back as status DOWN with an error string naming the cause.
"""

from __future__ import annotations

import json
import socket
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol

import requests

from .model import GridwatchError, Resource, ResourceInfo, ResourceStatus, UNCONFIGURED
from .xmlstyle import Stylesheet, StylesheetError, XmlParseError, parse_xml

# Extra wall time a gather may take beyond its timeout before it is a bug.
GATHER_GRACE_MS = 500


class RegistryError(GridwatchError):
    """Bad registry configuration (duplicate key, reserved key, missing styles)."""


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class Gatherer(Protocol):
    def gather(self, resource: Resource, timeout_ms: int) -> ResourceInfo: ...


@dataclass(frozen=True)
class StylesheetPair:
    popup: Stylesheet
    list_row: Stylesheet

    @classmethod
    def load(cls, directory: str | Path) -> "StylesheetPair":
        """Load popup.xsl and list.xsl; missing or broken files fail as a unit."""
        directory = Path(directory)
        try:
            popup = Stylesheet.from_string((directory / "popup.xsl").read_text("utf-8"))
            list_row = Stylesheet.from_string((directory / "list.xsl").read_text("utf-8"))
        except (OSError, StylesheetError) as exc:
            raise RegistryError(f"stylesheet pair at {directory} unusable: {exc}") from exc
        return cls(popup=popup, list_row=list_row)


def _down(resource: Resource, error: str, latency_ms: int = 0) -> ResourceInfo:
    return ResourceInfo(
        resource_id=resource.id,
        status=ResourceStatus.DOWN,
        payload_xml="",
        gathered_at=utc_now_iso(),
        latency_ms=max(0, latency_ms),
        error=error,
    )


def _up(resource: Resource, payload_xml: str, latency_ms: int) -> ResourceInfo:
    return ResourceInfo(
        resource_id=resource.id,
        status=ResourceStatus.UP,
        payload_xml=payload_xml,
        gathered_at=utc_now_iso(),
        latency_ms=max(0, latency_ms),
        error=None,
    )


class TcpProbeGatherer:
    """Plain TCP connect probe; payload reports host, port, and latency."""

    def gather(self, resource: Resource, timeout_ms: int) -> ResourceInfo:
        if resource.port is None:
            return _down(resource, "port required for tcp-probe")
        start = time.monotonic()
        try:
            with socket.create_connection(
                (resource.hostname, resource.port), timeout=timeout_ms / 1000.0
            ):
                pass
        except socket.timeout:
            elapsed = int((time.monotonic() - start) * 1000)
            return _down(resource, f"timeout connecting after {elapsed} ms", elapsed)
        except OSError as exc:
            elapsed = int((time.monotonic() - start) * 1000)
            return _down(resource, f"connection failed: {exc}", elapsed)
        latency = int((time.monotonic() - start) * 1000)
        payload = (
            "<tcp-probe>"
            f"<host>{resource.hostname}</host>"
            f"<port>{resource.port}</port>"
            f"<latency-ms>{latency}</latency-ms>"
            "</tcp-probe>"
        )
        return _up(resource, payload, latency)


class HttpXmlGatherer:
    """Fetches the resource endpoint and passes through its XML body."""

    def gather(self, resource: Resource, timeout_ms: int) -> ResourceInfo:
        if not resource.endpoint:
            return _down(resource, "endpoint required for http-xml")
        if not resource.endpoint.startswith(("http://", "https://")):
            return _down(resource, f"endpoint is not an http URL: {resource.endpoint}")
        start = time.monotonic()
        try:
            response = requests.get(resource.endpoint, timeout=timeout_ms / 1000.0)
        except requests.Timeout:
            elapsed = int((time.monotonic() - start) * 1000)
            return _down(resource, f"timeout after {elapsed} ms", elapsed)
        except requests.RequestException as exc:
            elapsed = int((time.monotonic() - start) * 1000)
            return _down(resource, f"request failed: {exc}", elapsed)
        latency = int((time.monotonic() - start) * 1000)
        if response.status_code != 200:
            return _down(resource, f"http status {response.status_code}", latency)
        body = response.text
        try:
            parse_xml(body)
        except XmlParseError as exc:
            return _down(resource, f"invalid payload: {exc}", latency)
        return _up(resource, body, latency)


_BUILTIN_GATHERERS = {
    "tcp-probe": TcpProbeGatherer,
    "http-xml": HttpXmlGatherer,
}


class GathererRegistry:
    """Maps type keys to gatherer instances and their stylesheet pairs."""

    def __init__(self) -> None:
        self._gatherers: dict[str, Gatherer] = {}
        self._styles: dict[str, StylesheetPair] = {}

    def register(
        self,
        type_key: str,
        gatherer: Gatherer,
        styles: StylesheetPair | None = None,
    ) -> None:
        if type_key == UNCONFIGURED:
            raise RegistryError(f"{UNCONFIGURED!r} is reserved and cannot be registered")
        if type_key in self._gatherers:
            raise RegistryError(f"type {type_key!r} already registered")
        self._gatherers[type_key] = gatherer
        if styles is not None:
            self._styles[type_key] = styles

    def lookup(self, type_key: str) -> Gatherer | None:
        return self._gatherers.get(type_key)

    def styles(self, type_key: str) -> StylesheetPair | None:
        return self._styles.get(type_key)

    def type_keys(self) -> list[str]:
        return sorted(self._gatherers)


def load_registry(config_path: str | Path) -> GathererRegistry:
    """Build a registry from gatherers.json.

    Each entry: {"type": key, "styles": dir?, "gatherer": builtin-name?}.
    "gatherer" defaults to the type key and must name a built-in
    implementation; "styles" is resolved relative to the config file.
    """
    config_path = Path(config_path)
    try:
        entries = json.loads(config_path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RegistryError(f"cannot read {config_path}: {exc}") from exc
    if not isinstance(entries, list):
        raise RegistryError(f"{config_path} must contain a JSON array")
    registry = GathererRegistry()
    for entry in entries:
        type_key = entry.get("type")
        if not type_key:
            raise RegistryError(f"registry entry missing 'type': {entry!r}")
        impl_name = entry.get("gatherer", type_key)
        impl = _BUILTIN_GATHERERS.get(impl_name)
        if impl is None:
            raise RegistryError(
                f"unknown gatherer {impl_name!r} for type {type_key!r} "
                f"(built-ins: {sorted(_BUILTIN_GATHERERS)})"
            )
        styles = None
        if entry.get("styles"):
            styles = StylesheetPair.load(config_path.parent / entry["styles"])
        registry.register(type_key, impl(), styles)
    return registry


def default_registry() -> GathererRegistry:
    """Built-in gatherers only, no stylesheets (fallback rendering applies)."""
    registry = GathererRegistry()
    for key, impl in _BUILTIN_GATHERERS.items():
        registry.register(key, impl())
    return registry
