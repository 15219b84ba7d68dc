"""Keyword search across resource properties and gathered XML payloads."""

from __future__ import annotations

from .model import PortalState, ResourceInfo
from .xmlstyle import Text, XmlParseError, descendants, parse_xml


def payload_text(payload_xml: str) -> str:
    """Concatenated text content of a payload, document order, space-separated.

    Unparsable or empty payloads contribute nothing.
    """
    if not payload_xml.strip():
        return ""
    try:
        doc = parse_xml(payload_xml)
    except XmlParseError:
        return ""
    texts = [n.content for n in descendants(doc.root) if isinstance(n, Text)]
    return " ".join(texts)


def search(keyword: str, state: PortalState, infos: dict[str, ResourceInfo]) -> list[str]:
    """Ids of resources matching the keyword, in state order.

    Case-insensitive substring match over hostname, label, type, and the
    payload's text content. An empty keyword matches everything.
    """
    needle = keyword.lower()
    matches: list[str] = []
    for resource in state.resources:
        if not needle:
            matches.append(resource.id)
            continue
        haystacks = [resource.hostname, resource.label, resource.type]
        info = infos.get(resource.id)
        if info is not None and info.payload_xml:
            haystacks.append(payload_text(info.payload_xml))
        if any(needle in h.lower() for h in haystacks):
            matches.append(resource.id)
    return matches
