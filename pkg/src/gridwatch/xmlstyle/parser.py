"""Recursive-descent XML parser with line/column error reporting.

Supported: elements, attributes, character data, the five predefined
entities, comments (discarded), an optional XML declaration. Rejected:
namespaces are not interpreted (prefixed names are treated as opaque),
DTDs, CDATA sections, processing instructions, external entities.
"""

from __future__ import annotations

from .nodes import Element, Text, XmlDocument

_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CHARS = _NAME_START | set("0123456789-.:")


class XmlParseError(Exception):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def line_col(self, pos: int | None = None) -> tuple[int, int]:
        p = self.pos if pos is None else pos
        line = self.text.count("\n", 0, p) + 1
        last_nl = self.text.rfind("\n", 0, p)
        return line, p - last_nl

    def error(self, message: str, pos: int | None = None) -> XmlParseError:
        line, col = self.line_col(pos)
        return XmlParseError(message, line, col)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, n: int = 1) -> str:
        return self.text[self.pos : self.pos + n]

    def take(self, n: int = 1) -> str:
        chunk = self.text[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            raise self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.pos] in " \t\r\n":
            self.pos += 1


def _parse_name(s: _Scanner) -> str:
    start = s.pos
    if s.eof() or s.text[s.pos] not in _NAME_START:
        raise s.error("expected a name")
    s.pos += 1
    while not s.eof() and s.text[s.pos] in _NAME_CHARS:
        s.pos += 1
    return s.text[start : s.pos]


def _parse_entity(s: _Scanner) -> str:
    # positioned on '&'
    start = s.pos
    s.pos += 1
    end = s.text.find(";", s.pos, s.pos + 8)
    if end == -1:
        raise s.error("unterminated entity reference", start)
    name = s.text[s.pos : end]
    if name not in _ENTITIES:
        raise s.error(f"unsupported entity &{name};", start)
    s.pos = end + 1
    return _ENTITIES[name]


def _parse_attr_value(s: _Scanner) -> str:
    quote = s.take()
    if quote not in "\"'":
        raise s.error("expected quoted attribute value", s.pos - 1)
    out: list[str] = []
    while True:
        if s.eof():
            raise s.error("unterminated attribute value")
        ch = s.peek()
        if ch == quote:
            s.take()
            return "".join(out)
        if ch == "<":
            raise s.error("'<' not allowed in attribute value")
        if ch == "&":
            out.append(_parse_entity(s))
        else:
            out.append(s.take())


def _skip_misc(s: _Scanner, allow_decl: bool) -> None:
    """Skip whitespace and comments between markup; optionally an XML declaration."""
    while True:
        s.skip_ws()
        if allow_decl and s.peek(5) == "<?xml":
            end = s.text.find("?>", s.pos)
            if end == -1:
                raise s.error("unterminated XML declaration")
            s.pos = end + 2
            allow_decl = False
            continue
        if s.peek(4) == "<!--":
            end = s.text.find("-->", s.pos + 4)
            if end == -1:
                raise s.error("unterminated comment")
            s.pos = end + 3
            continue
        return


def _parse_element(s: _Scanner) -> Element:
    open_pos = s.pos
    s.expect("<")
    name = _parse_name(s)
    elem = Element(name)
    while True:
        had_ws = s.peek() in " \t\r\n"
        s.skip_ws()
        if s.peek(2) == "/>":
            s.take(2)
            return elem
        if s.peek() == ">":
            s.take()
            break
        if not had_ws:
            raise s.error("expected whitespace before attribute")
        attr_pos = s.pos
        attr_name = _parse_name(s)
        if attr_name in elem.attrs:
            raise s.error(f"duplicate attribute {attr_name!r}", attr_pos)
        s.skip_ws()
        s.expect("=")
        s.skip_ws()
        elem.attrs[attr_name] = _parse_attr_value(s)

    # content until matching close tag
    text_buf: list[str] = []

    def flush_text() -> None:
        if text_buf:
            node = Text("".join(text_buf))
            node.parent = elem
            elem.children.append(node)
            text_buf.clear()

    while True:
        if s.eof():
            raise s.error(f"unclosed element <{name}>", open_pos)
        ch = s.peek()
        if ch == "<":
            if s.peek(4) == "<!--":
                end = s.text.find("-->", s.pos + 4)
                if end == -1:
                    raise s.error("unterminated comment")
                s.pos = end + 3
                continue
            if s.peek(2) == "</":
                close_pos = s.pos
                s.take(2)
                close_name = _parse_name(s)
                if close_name != name:
                    raise s.error(
                        f"mismatched close tag </{close_name}> for <{name}>", close_pos
                    )
                s.skip_ws()
                s.expect(">")
                flush_text()
                return elem
            if s.peek(2) == "<?":
                raise s.error("processing instructions are not supported")
            if s.peek(2) == "<!":
                raise s.error("DTD/CDATA sections are not supported")
            flush_text()
            child = _parse_element(s)
            child.parent = elem
            elem.children.append(child)
        elif ch == "&":
            text_buf.append(_parse_entity(s))
        else:
            text_buf.append(s.take())


def parse_xml(text: str) -> XmlDocument:
    """Parse a well-formed XML document; raise XmlParseError otherwise."""
    s = _Scanner(text)
    _skip_misc(s, allow_decl=True)
    if s.eof() or s.peek() != "<":
        raise s.error("expected a root element")
    if s.peek(2) == "<!":
        raise s.error("DTDs are not supported")
    root = _parse_element(s)
    _skip_misc(s, allow_decl=False)
    if not s.eof():
        if s.peek() == "<":
            raise s.error("multiple root elements")
        raise s.error("text content outside the root element")
    return XmlDocument(root)


def escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(value: str) -> str:
    return escape_text(value).replace('"', "&quot;")


def serialize(node: Element | XmlDocument | Text) -> str:
    """Serialize a tree back to markup; parse(serialize(parse(t))) == parse(t)."""
    if isinstance(node, XmlDocument):
        return serialize(node.root)
    if isinstance(node, Text):
        return escape_text(node.content)
    attrs = "".join(f' {k}="{escape_attr(v)}"' for k, v in node.attrs.items())
    if not node.children:
        return f"<{node.name}{attrs}/>"
    inner = "".join(serialize(c) for c in node.children)  # type: ignore[arg-type]
    return f"<{node.name}{attrs}>{inner}</{node.name}>"
