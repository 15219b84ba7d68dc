"""XSLT 1.0 subset compiler and executor producing escaped HTML fragments.

Supported instructions: stylesheet, template(match), apply-templates(select?),
value-of(select), for-each(select), if(test), choose/when/otherwise, text,
and literal result elements with {expr} attribute value templates. Anything
else fails at load time with a named diagnostic. Output escaping cannot be
disabled, so source text can never inject markup into the result.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import Element, Node, Text, XmlDocument
from .parser import XmlParseError, escape_attr, escape_text, parse_xml
from .xpath import (
    Context,
    Path,
    Step,
    XPathExpr,
    XPathSyntaxError,
    _eval,
    parse_xpath,
    xpath_boolean,
    xpath_string,
)

MAX_APPLY_DEPTH = 256

_XSL_PREFIX = "xsl:"

_IGNORED_ROOT_ATTRS = {"version", "xmlns:xsl"}


class StylesheetError(Exception):
    """Stylesheet is outside the supported subset or malformed."""


class TransformError(Exception):
    """Runtime failure while applying a stylesheet."""


class TransformDepthError(TransformError):
    """apply-templates recursion exceeded MAX_APPLY_DEPTH frames."""


# ---------------------------------------------------------------------------
# Compiled instruction tree


@dataclass(frozen=True)
class TextOut:
    text: str


@dataclass(frozen=True)
class ValueOf:
    select: XPathExpr


@dataclass(frozen=True)
class ApplyTemplates:
    select: XPathExpr | None


@dataclass(frozen=True)
class ForEach:
    select: XPathExpr
    body: tuple


@dataclass(frozen=True)
class IfInstr:
    test: XPathExpr
    body: tuple


@dataclass(frozen=True)
class Choose:
    whens: tuple  # of (test: XPathExpr, body: tuple)
    otherwise: tuple | None


@dataclass(frozen=True)
class LiteralElem:
    name: str
    attrs: tuple  # of (name, AVT); AVT = tuple of ('lit', str) | ('expr', XPathExpr)
    body: tuple


@dataclass(frozen=True)
class Template:
    pattern: Path
    specificity: float
    index: int
    body: tuple


# ---------------------------------------------------------------------------
# Loading


def _parse_expr(text: str, what: str) -> XPathExpr:
    try:
        return parse_xpath(text)
    except XPathSyntaxError as exc:
        raise StylesheetError(f"bad expression in {what}: {exc}") from exc


def _parse_pattern(text: str) -> tuple[Path, float]:
    """Match patterns are restricted location paths: '/', name tests, '*', text()."""
    expr = _parse_expr(text, f'match="{text}"')
    path = expr.ast
    if not isinstance(path, Path):
        raise StylesheetError(f"unsupported match pattern {text!r}")
    specificity = 0.5 if path.absolute else 0.0
    for step in path.steps:
        if step.axis != "child" or step.predicates or step.descendant:
            raise StylesheetError(f"unsupported match pattern {text!r}")
        specificity += 0.5 if step.test == "*" else 1.0
    return path, specificity


def _parse_avt(value: str, where: str) -> tuple:
    """Split an attribute value template into literal and {expr} parts."""
    parts: list[tuple[str, object]] = []
    buf: list[str] = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "{":
            if value[i : i + 2] == "{{":
                buf.append("{")
                i += 2
                continue
            end = value.find("}", i + 1)
            if end == -1:
                raise StylesheetError(f"unterminated {{...}} in attribute {where}")
            if buf:
                parts.append(("lit", "".join(buf)))
                buf.clear()
            parts.append(("expr", _parse_expr(value[i + 1 : end], f"attribute {where}")))
            i = end + 1
        elif ch == "}":
            if value[i : i + 2] == "}}":
                buf.append("}")
                i += 2
                continue
            raise StylesheetError(f"unmatched '}}' in attribute {where}")
        else:
            buf.append(ch)
            i += 1
    if buf:
        parts.append(("lit", "".join(buf)))
    return tuple(parts)


def _required_attr(elem: Element, name: str) -> str:
    if name not in elem.attrs:
        raise StylesheetError(f"<{elem.name}> requires a {name!r} attribute")
    return elem.attrs[name]


def _element_children(elem: Element, instruction: str) -> list[Element]:
    out: list[Element] = []
    for child in elem.children:
        if isinstance(child, Text):
            if child.content.strip():
                raise StylesheetError(f"text not allowed inside <{instruction}>")
            continue
        out.append(child)  # type: ignore[arg-type]
    return out


def _compile_body(children: list[Node]) -> tuple:
    compiled: list[object] = []
    for node in children:
        if isinstance(node, Text):
            # whitespace-only text between instructions is stylesheet formatting
            if node.content.strip():
                compiled.append(TextOut(node.content))
            continue
        if not isinstance(node, Element):
            continue
        compiled.append(_compile_element(node))
    return tuple(compiled)


def _compile_element(elem: Element) -> object:
    name = elem.name
    if name.startswith(_XSL_PREFIX):
        kind = name[len(_XSL_PREFIX) :]
        if kind == "value-of":
            return ValueOf(_parse_expr(_required_attr(elem, "select"), f"<{name}>"))
        if kind == "apply-templates":
            select = elem.attrs.get("select")
            return ApplyTemplates(
                _parse_expr(select, f"<{name}>") if select is not None else None
            )
        if kind == "for-each":
            return ForEach(
                _parse_expr(_required_attr(elem, "select"), f"<{name}>"),
                _compile_body(elem.children),
            )
        if kind == "if":
            return IfInstr(
                _parse_expr(_required_attr(elem, "test"), f"<{name}>"),
                _compile_body(elem.children),
            )
        if kind == "choose":
            whens: list[tuple] = []
            otherwise: tuple | None = None
            for child in _element_children(elem, name):
                if child.name == "xsl:when":
                    if otherwise is not None:
                        raise StylesheetError("<xsl:when> after <xsl:otherwise>")
                    whens.append(
                        (
                            _parse_expr(_required_attr(child, "test"), "<xsl:when>"),
                            _compile_body(child.children),
                        )
                    )
                elif child.name == "xsl:otherwise":
                    if otherwise is not None:
                        raise StylesheetError("duplicate <xsl:otherwise>")
                    otherwise = _compile_body(child.children)
                else:
                    raise StylesheetError(f"<{child.name}> not allowed inside <xsl:choose>")
            if not whens:
                raise StylesheetError("<xsl:choose> requires at least one <xsl:when>")
            return Choose(tuple(whens), otherwise)
        if kind == "text":
            for child in elem.children:
                if not isinstance(child, Text):
                    raise StylesheetError("<xsl:text> may only contain text")
            return TextOut("".join(c.content for c in elem.children))  # type: ignore[union-attr]
        raise StylesheetError(f"unsupported instruction <{name}>")
    # literal result element
    attrs = tuple(
        (attr, _parse_avt(value, f"{attr!r} on <{name}>")) for attr, value in elem.attrs.items()
    )
    return LiteralElem(name, attrs, _compile_body(elem.children))


class Stylesheet:
    """Immutable compiled stylesheet; safe for concurrent application."""

    def __init__(self, templates: list[Template]) -> None:
        if not templates:
            raise StylesheetError("stylesheet has no templates")
        self.templates = tuple(templates)

    @classmethod
    def from_string(cls, text: str) -> "Stylesheet":
        try:
            doc = parse_xml(text)
        except XmlParseError as exc:
            raise StylesheetError(f"stylesheet is not well-formed XML: {exc}") from exc
        return cls.from_document(doc)

    @classmethod
    def from_document(cls, doc: XmlDocument) -> "Stylesheet":
        root = doc.root
        if root.name != "xsl:stylesheet":
            raise StylesheetError(f"expected <xsl:stylesheet> root, got <{root.name}>")
        templates: list[Template] = []
        for child in _element_children(root, root.name):
            if child.name != "xsl:template":
                raise StylesheetError(
                    f"<{child.name}> not allowed at stylesheet top level"
                )
            pattern, specificity = _parse_pattern(_required_attr(child, "match"))
            templates.append(
                Template(pattern, specificity, len(templates), _compile_body(child.children))
            )
        return cls(templates)

    def best_template(self, node: Node) -> Template | None:
        best: Template | None = None
        for t in self.templates:
            if _pattern_matches(node, t.pattern):
                if best is None or (t.specificity, t.index) >= (best.specificity, best.index):
                    best = t
        return best


def _step_matches(node: Node, step: Step) -> bool:
    if step.test == "text()":
        return isinstance(node, Text)
    if step.test == "*":
        return isinstance(node, Element)
    return isinstance(node, Element) and node.name == step.test


def _pattern_matches(node: Node, pattern: Path) -> bool:
    if not pattern.steps:
        # bare "/" matches the document node only
        return pattern.absolute and isinstance(node, XmlDocument)
    current: Node | None = node
    for step in reversed(pattern.steps):
        if current is None or not _step_matches(current, step):
            return False
        current = current.parent
    if pattern.absolute:
        return isinstance(current, XmlDocument)
    return True


# ---------------------------------------------------------------------------
# Execution


class _Executor:
    def __init__(self, sheet: Stylesheet) -> None:
        self.sheet = sheet
        self.out: list[str] = []
        self.depth = 0

    def run(self, doc: XmlDocument) -> str:
        self.process(doc, Context(doc, 1, 1))
        return "".join(self.out)

    def process(self, node: Node, ctx: Context) -> None:
        self.depth += 1
        if self.depth > MAX_APPLY_DEPTH:
            raise TransformDepthError(
                f"apply-templates recursion exceeded {MAX_APPLY_DEPTH} frames"
            )
        try:
            template = self.sheet.best_template(node)
            if template is not None:
                self.execute(template.body, ctx)
            else:
                self.builtin(node, ctx)
        finally:
            self.depth -= 1

    def builtin(self, node: Node, ctx: Context) -> None:
        if isinstance(node, Text):
            self.out.append(escape_text(node.content))
        elif isinstance(node, (Element, XmlDocument)):
            self.apply_to(list(node.children))
        # attributes: no output

    def apply_to(self, nodes: list[Node]) -> None:
        size = len(nodes)
        for pos, child in enumerate(nodes, start=1):
            self.process(child, Context(child, pos, size))

    def execute(self, body: tuple, ctx: Context) -> None:
        for instr in body:
            if isinstance(instr, TextOut):
                self.out.append(escape_text(instr.text))
            elif isinstance(instr, ValueOf):
                self.out.append(escape_text(xpath_string(_eval(instr.select.ast, ctx))))
            elif isinstance(instr, ApplyTemplates):
                if instr.select is None:
                    nodes = list(getattr(ctx.node, "children", []))
                else:
                    nodes = self.nodeset(instr.select, ctx, "apply-templates")
                self.apply_to(nodes)
            elif isinstance(instr, ForEach):
                nodes = self.nodeset(instr.select, ctx, "for-each")
                size = len(nodes)
                for pos, node in enumerate(nodes, start=1):
                    self.execute(instr.body, Context(node, pos, size))
            elif isinstance(instr, IfInstr):
                if xpath_boolean(_eval(instr.test.ast, ctx)):
                    self.execute(instr.body, ctx)
            elif isinstance(instr, Choose):
                for test, when_body in instr.whens:
                    if xpath_boolean(_eval(test.ast, ctx)):
                        self.execute(when_body, ctx)
                        break
                else:
                    if instr.otherwise is not None:
                        self.execute(instr.otherwise, ctx)
            elif isinstance(instr, LiteralElem):
                self.literal(instr, ctx)
            else:
                raise TransformError(f"unknown instruction {instr!r}")

    def nodeset(self, expr: XPathExpr, ctx: Context, where: str) -> list[Node]:
        value = _eval(expr.ast, ctx)
        if not isinstance(value, list):
            raise TransformError(f"{where} select must produce a node-set: {expr.source!r}")
        return sorted(value, key=lambda n: n.order)

    def literal(self, instr: LiteralElem, ctx: Context) -> None:
        attrs: list[str] = []
        for name, avt in instr.attrs:
            parts: list[str] = []
            for kind, value in avt:
                if kind == "lit":
                    parts.append(value)  # type: ignore[arg-type]
                else:
                    parts.append(xpath_string(_eval(value.ast, ctx)))  # type: ignore[union-attr]
            attrs.append(f' {name}="{escape_attr("".join(parts))}"')
        inner_out: list[str] = []
        saved = self.out
        self.out = inner_out
        try:
            self.execute(instr.body, ctx)
        finally:
            self.out = saved
        inner = "".join(inner_out)
        if inner:
            self.out.append(f"<{instr.name}{''.join(attrs)}>{inner}</{instr.name}>")
        else:
            self.out.append(f"<{instr.name}{''.join(attrs)}/>")


def apply_stylesheet(doc: XmlDocument, sheet: Stylesheet) -> str:
    """Transform a document to an escaped HTML fragment string."""
    return _Executor(sheet).run(doc)
