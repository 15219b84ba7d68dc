"""Document tree used by the XPath evaluator and XSLT engine.

Plain element/text/attribute nodes with parent links and a precomputed
document-order index. No namespaces, comments, or processing instructions
are retained. Trees are immutable after parse; sharing across threads is
safe.
"""

from __future__ import annotations


class Node:
    parent: "Element | XmlDocument | None"
    order: int  # position in document order, assigned after parse

    def string_value(self) -> str:
        raise NotImplementedError


class Text(Node):
    __slots__ = ("content", "parent", "order")

    def __init__(self, content: str) -> None:
        self.content = content
        self.parent = None
        self.order = -1

    def string_value(self) -> str:
        return self.content

    def __repr__(self) -> str:
        return f"Text({self.content!r})"


class Attr(Node):
    __slots__ = ("name", "value", "parent", "order")

    def __init__(self, name: str, value: str) -> None:
        self.name = name
        self.value = value
        self.parent = None
        self.order = -1

    def string_value(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"Attr({self.name}={self.value!r})"


class Element(Node):
    __slots__ = ("name", "attrs", "attr_nodes", "children", "parent", "order")

    def __init__(self, name: str, attrs: dict[str, str] | None = None) -> None:
        self.name = name
        self.attrs: dict[str, str] = dict(attrs or {})
        self.attr_nodes: list[Attr] = []
        self.children: list[Node] = []
        self.parent = None
        self.order = -1

    def string_value(self) -> str:
        parts: list[str] = []
        for node in self.children:
            if isinstance(node, Text):
                parts.append(node.content)
            elif isinstance(node, Element):
                parts.append(node.string_value())
        return "".join(parts)

    def child_elements(self) -> list["Element"]:
        return [c for c in self.children if isinstance(c, Element)]

    def __repr__(self) -> str:
        return f"Element(<{self.name}> {len(self.children)} children)"


class XmlDocument(Node):
    """Document root; exactly one element child."""

    __slots__ = ("root", "parent", "order")

    def __init__(self, root: Element) -> None:
        self.root = root
        self.parent = None
        self.order = -1
        root.parent = self
        self._index()

    @property
    def children(self) -> list[Node]:
        return [self.root]

    def string_value(self) -> str:
        return self.root.string_value()

    def _index(self) -> None:
        counter = 0
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            node.order = counter
            counter += 1
            if isinstance(node, Element):
                for i, (name, value) in enumerate(node.attrs.items()):
                    if len(node.attr_nodes) <= i:
                        attr = Attr(name, value)
                        attr.parent = node
                        node.attr_nodes.append(attr)
                    node.attr_nodes[i].order = counter
                    counter += 1
                stack.extend(reversed(node.children))
            elif isinstance(node, XmlDocument):
                stack.append(node.root)

    def __repr__(self) -> str:
        return f"XmlDocument(root=<{self.root.name}>)"


def descendants(node: Node) -> list[Node]:
    """All element and text descendants in document order (excluding node)."""
    out: list[Node] = []
    stack: list[Node] = list(reversed(getattr(node, "children", [])))
    while stack:
        n = stack.pop()
        out.append(n)
        if isinstance(n, Element):
            stack.extend(reversed(n.children))
    return out
