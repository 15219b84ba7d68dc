"""Per-resource HTML fragments: map popup and list row.

Rendering is total: any combination of resource, info, and stylesheet
availability produces a non-empty escaped fragment. Stylesheets apply only
to UP payloads; everything else gets the generic fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .gatherers import GathererRegistry
from .model import Resource, ResourceInfo, ResourceStatus
from .xmlstyle import (
    Element,
    TransformError,
    XmlParseError,
    apply_stylesheet,
    descendants,
    escape_text,
    parse_xml,
)

# A resource is stale when its last info is older than this many poll intervals.
STALE_INTERVALS = 3


@dataclass(frozen=True)
class RenderedResource:
    resource_id: str
    popup_html: str
    list_row_html: str
    status: ResourceStatus
    stale: bool


def _status_of(info: ResourceInfo | None) -> ResourceStatus:
    return info.status if info is not None else ResourceStatus.UNKNOWN


def is_stale(info: ResourceInfo | None, interval_s: float, now: datetime | None = None) -> bool:
    if info is None or not info.gathered_at:
        return False
    try:
        gathered = datetime.fromisoformat(info.gathered_at)
    except ValueError:
        return True
    if gathered.tzinfo is None:
        gathered = gathered.replace(tzinfo=timezone.utc)
    now = now or datetime.now(timezone.utc)
    return (now - gathered).total_seconds() > STALE_INTERVALS * interval_s


def _header_html(resource: Resource, info: ResourceInfo) -> str:
    parts = [
        f"<p><b>{escape_text(resource.label or resource.hostname)}</b> "
        f"<span class=\"status\">{info.status.value}</span></p>"
    ]
    if info.error:
        parts.append(f"<p class=\"error\">{escape_text(info.error)}</p>")
    if info.gathered_at:
        parts.append(f"<p class=\"ts\">{escape_text(info.gathered_at)}</p>")
    return "".join(parts)


def _leaf_pairs(payload_xml: str) -> list[tuple[str, str]]:
    try:
        doc = parse_xml(payload_xml)
    except XmlParseError:
        return []
    pairs: list[tuple[str, str]] = []
    def leaf_value(elem: Element) -> str:
        text = elem.string_value().strip()
        if text:
            return text
        return " ".join(f"{k}={v}" for k, v in elem.attrs.items())

    for node in descendants(doc.root):
        if isinstance(node, Element) and not node.child_elements():
            pairs.append((node.name, leaf_value(node)))
    if not pairs and not doc.root.child_elements():
        pairs.append((doc.root.name, leaf_value(doc.root)))
    return pairs


def _fallback_popup(resource: Resource, info: ResourceInfo | None) -> str:
    if info is None:
        return (
            f"<p><b>{escape_text(resource.label or resource.hostname)}</b> "
            f"<span class=\"status\">UNKNOWN</span></p><p>never polled</p>"
        )
    html = _header_html(resource, info)
    pairs = _leaf_pairs(info.payload_xml) if info.payload_xml else []
    if pairs:
        items = "".join(
            f"<dt>{escape_text(name)}</dt><dd>{escape_text(value)}</dd>"
            for name, value in pairs
        )
        html += f"<dl>{items}</dl>"
    return html


def _fallback_list_row(resource: Resource, info: ResourceInfo | None) -> str:
    status = _status_of(info)
    gathered = info.gathered_at if info is not None else ""
    cells = [resource.label or resource.hostname, resource.type, status.value, gathered]
    row = "".join(f"<td>{escape_text(c)}</td>" for c in cells)
    if info is not None and info.error:
        # keep 4 cells; fold the error into the status cell
        row = (
            f"<td>{escape_text(cells[0])}</td><td>{escape_text(cells[1])}</td>"
            f"<td>{status.value}: {escape_text(info.error)}</td>"
            f"<td>{escape_text(gathered)}</td>"
        )
    return row


def _render_with(
    resource: Resource,
    info: ResourceInfo | None,
    sheet,
    fallback,
) -> str:
    if sheet is not None and info is not None and info.status is ResourceStatus.UP:
        try:
            doc = parse_xml(info.payload_xml)
            return apply_stylesheet(doc, sheet)
        except (XmlParseError, TransformError) as exc:
            broken = ResourceInfo(
                resource_id=resource.id,
                status=info.status,
                payload_xml="",
                gathered_at=info.gathered_at,
                latency_ms=info.latency_ms,
                error=f"stylesheet failed: {exc}",
            )
            return fallback(resource, broken)
    return fallback(resource, info)


def render_popup(
    resource: Resource, info: ResourceInfo | None, registry: GathererRegistry
) -> str:
    pair = registry.styles(resource.type)
    return _render_with(resource, info, pair.popup if pair else None, _fallback_popup)


def render_list_row(
    resource: Resource, info: ResourceInfo | None, registry: GathererRegistry
) -> str:
    pair = registry.styles(resource.type)
    return _render_with(resource, info, pair.list_row if pair else None, _fallback_list_row)


def render_resource(
    resource: Resource,
    info: ResourceInfo | None,
    registry: GathererRegistry,
    interval_s: float,
) -> RenderedResource:
    return RenderedResource(
        resource_id=resource.id,
        popup_html=render_popup(resource, info, registry),
        list_row_html=render_list_row(resource, info, registry),
        status=_status_of(info),
        stale=is_stale(info, interval_s),
    )
