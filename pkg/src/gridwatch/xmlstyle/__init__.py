"""Self-contained XML parsing, XPath evaluation, and XSLT transformation."""

from .nodes import Attr, Element, Node, Text, XmlDocument, descendants
from .parser import XmlParseError, escape_attr, escape_text, parse_xml, serialize
from .xpath import (
    XPathEvalError,
    XPathExpr,
    XPathSyntaxError,
    eval_xpath,
    parse_xpath,
    xpath_boolean,
    xpath_number,
    xpath_string,
)
from .xslt import (
    Stylesheet,
    StylesheetError,
    TransformDepthError,
    TransformError,
    apply_stylesheet,
)

__all__ = [
    "Attr",
    "Element",
    "Node",
    "Text",
    "XmlDocument",
    "descendants",
    "XmlParseError",
    "escape_attr",
    "escape_text",
    "parse_xml",
    "serialize",
    "XPathEvalError",
    "XPathExpr",
    "XPathSyntaxError",
    "eval_xpath",
    "parse_xpath",
    "xpath_boolean",
    "xpath_number",
    "xpath_string",
    "Stylesheet",
    "StylesheetError",
    "TransformDepthError",
    "TransformError",
    "apply_stylesheet",
]
