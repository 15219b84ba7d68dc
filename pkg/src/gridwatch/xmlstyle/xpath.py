"""XPath 1.0 subset: location paths (child/attribute axes, // shortcut),
predicates, comparisons, and/or, and a small function library.

Anything outside the grammar is rejected at parse time with
XPathSyntaxError; the evaluator then only ever sees supported shapes.
Expressions are immutable and safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .nodes import Element, Node, Text, XmlDocument, descendants

XPathValue = Union[list, float, str, bool]

_FUNCTIONS = {
    # name -> (min_args, max_args); None = unbounded
    "count": (1, 1),
    "not": (1, 1),
    "name": (0, 1),
    "string": (0, 1),
    "number": (0, 1),
    "concat": (2, None),
    "position": (0, 0),
    "last": (0, 0),
}


class XPathSyntaxError(Exception):
    """Expression is malformed or outside the supported grammar."""


class XPathEvalError(Exception):
    """Type error during evaluation (e.g. count() of a non-node-set)."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Literal:
    value: str


@dataclass(frozen=True)
class FnCall:
    name: str
    args: tuple


@dataclass(frozen=True)
class BinOp:
    op: str  # 'or' 'and' '=' '!=' '<' '<=' '>' '>='
    left: object
    right: object


@dataclass(frozen=True)
class Step:
    axis: str  # 'child' | 'attribute' | 'self' | 'parent'
    test: str  # element/attribute name, '*', or 'text()'
    predicates: tuple = ()
    descendant: bool = False  # preceded by '//'


@dataclass(frozen=True)
class Path:
    absolute: bool
    steps: tuple


@dataclass(frozen=True)
class Context:
    node: Node
    position: int = 1
    size: int = 1


# ---------------------------------------------------------------------------
# Tokenizer

_TWO_CHAR = ("//", "!=", "<=", ">=", "..")
_ONE_CHAR = "/[]()@,*.=<>"

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CHARS = _NAME_START | set("0123456789-.")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR:
            tokens.append(("sym", two))
            i += 2
            continue
        if ch in _ONE_CHAR:
            # '.' may begin a number like .5
            if ch == "." and i + 1 < n and text[i + 1].isdigit():
                pass  # fall through to number
            else:
                tokens.append(("sym", ch))
                i += 1
                continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            tokens.append(("num", text[i:j]))
            i = j
            continue
        if ch in "'\"":
            j = text.find(ch, i + 1)
            if j == -1:
                raise XPathSyntaxError(f"unterminated literal in {text!r}")
            tokens.append(("lit", text[i + 1 : j]))
            i = j + 1
            continue
        if ch in _NAME_START:
            j = i + 1
            while j < n and text[j] in _NAME_CHARS:
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
            continue
        raise XPathSyntaxError(f"unexpected character {ch!r} in {text!r}")
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise XPathSyntaxError(f"unexpected end of expression: {self.text!r}")
        self.i += 1
        return tok

    def accept(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        if tok and tok[0] == kind and (value is None or tok[1] == value):
            self.i += 1
            return True
        return False

    def expect_sym(self, value: str) -> None:
        if not self.accept("sym", value):
            raise XPathSyntaxError(f"expected {value!r} in {self.text!r}")

    # expression grammar, by precedence
    def parse(self) -> object:
        expr = self.or_expr()
        if self.peek() is not None:
            raise XPathSyntaxError(f"trailing tokens in {self.text!r}")
        return expr

    def or_expr(self) -> object:
        left = self.and_expr()
        while self.accept("name", "or"):
            left = BinOp("or", left, self.and_expr())
        return left

    def and_expr(self) -> object:
        left = self.eq_expr()
        while self.accept("name", "and"):
            left = BinOp("and", left, self.eq_expr())
        return left

    def eq_expr(self) -> object:
        left = self.rel_expr()
        while True:
            if self.accept("sym", "="):
                left = BinOp("=", left, self.rel_expr())
            elif self.accept("sym", "!="):
                left = BinOp("!=", left, self.rel_expr())
            else:
                return left

    def rel_expr(self) -> object:
        left = self.primary()
        while True:
            tok = self.peek()
            if tok and tok[0] == "sym" and tok[1] in ("<", "<=", ">", ">="):
                self.i += 1
                left = BinOp(tok[1], left, self.primary())
            else:
                return left

    def primary(self) -> object:
        tok = self.peek()
        if tok is None:
            raise XPathSyntaxError(f"unexpected end of expression: {self.text!r}")
        kind, value = tok
        if kind == "num":
            self.i += 1
            try:
                return Number(float(value))
            except ValueError as exc:
                raise XPathSyntaxError(f"bad number {value!r}") from exc
        if kind == "lit":
            self.i += 1
            return Literal(value)
        if kind == "sym" and value == "(":
            self.i += 1
            inner = self.or_expr()
            self.expect_sym(")")
            return inner
        if kind == "name" and self._is_function_call():
            return self.function_call()
        return self.location_path()

    def _is_function_call(self) -> bool:
        tok = self.peek()
        nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
        return (
            tok is not None
            and tok[0] == "name"
            and tok[1] != "text"
            and nxt == ("sym", "(")
        )

    def function_call(self) -> FnCall:
        _, name = self.next()
        if name not in _FUNCTIONS:
            raise XPathSyntaxError(f"unsupported function {name}()")
        self.expect_sym("(")
        args: list[object] = []
        if not self.accept("sym", ")"):
            args.append(self.or_expr())
            while self.accept("sym", ","):
                args.append(self.or_expr())
            self.expect_sym(")")
        lo, hi = _FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise XPathSyntaxError(f"wrong number of arguments for {name}()")
        return FnCall(name, tuple(args))

    def location_path(self) -> Path:
        steps: list[Step] = []
        absolute = False
        if self.accept("sym", "/"):
            absolute = True
            if not self._at_step_start():
                return Path(True, ())  # bare "/" selects the document root
            steps.append(self.step(descendant=False))
        elif self.accept("sym", "//"):
            absolute = True
            steps.append(self.step(descendant=True))
        else:
            steps.append(self.step(descendant=False))
        while True:
            if self.accept("sym", "/"):
                steps.append(self.step(descendant=False))
            elif self.accept("sym", "//"):
                steps.append(self.step(descendant=True))
            else:
                return Path(absolute, tuple(steps))

    def _at_step_start(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        kind, value = tok
        return (kind == "name") or (kind == "sym" and value in ("@", "*", ".", ".."))

    def step(self, descendant: bool) -> Step:
        tok = self.peek()
        if tok is None:
            raise XPathSyntaxError(f"expected a step in {self.text!r}")
        kind, value = tok
        if kind == "sym" and value == ".":
            self.i += 1
            return Step("self", ".", (), descendant)
        if kind == "sym" and value == "..":
            self.i += 1
            return Step("parent", "..", (), descendant)
        if kind == "sym" and value == "@":
            self.i += 1
            tok2 = self.next()
            if tok2 == ("sym", "*"):
                test = "*"
            elif tok2[0] == "name":
                test = tok2[1]
            else:
                raise XPathSyntaxError(f"bad attribute test in {self.text!r}")
            return Step("attribute", test, self.predicates(), descendant)
        if kind == "sym" and value == "*":
            self.i += 1
            return Step("child", "*", self.predicates(), descendant)
        if kind == "name":
            self.i += 1
            if value == "text" and self.accept("sym", "("):
                self.expect_sym(")")
                return Step("child", "text()", self.predicates(), descendant)
            return Step("child", value, self.predicates(), descendant)
        raise XPathSyntaxError(f"unsupported step near {value!r} in {self.text!r}")

    def predicates(self) -> tuple:
        preds: list[object] = []
        while self.accept("sym", "["):
            preds.append(self.or_expr())
            self.expect_sym("]")
        return tuple(preds)


@dataclass(frozen=True, eq=False)
class XPathExpr:
    """A parsed expression; parse(str(expr)) reproduces the same AST."""

    source: str
    ast: object

    def __eq__(self, other: object) -> bool:
        return isinstance(other, XPathExpr) and self.ast == other.ast

    def __hash__(self) -> int:
        return hash(unparse(self.ast))

    def __str__(self) -> str:
        return unparse(self.ast)


def parse_xpath(text: str) -> XPathExpr:
    ast = _Parser(text).parse()
    return XPathExpr(source=text, ast=ast)


# ---------------------------------------------------------------------------
# Unparser


def unparse(ast: object) -> str:
    if isinstance(ast, Number):
        return xpath_string(ast.value)
    if isinstance(ast, Literal):
        return "'" + ast.value + "'" if "'" not in ast.value else '"' + ast.value + '"'
    if isinstance(ast, FnCall):
        return f"{ast.name}({', '.join(unparse(a) for a in ast.args)})"
    if isinstance(ast, BinOp):
        return f"({unparse(ast.left)} {ast.op} {unparse(ast.right)})"
    if isinstance(ast, Path):
        parts: list[str] = []
        for i, step in enumerate(ast.steps):
            if step.descendant:
                parts.append("//")
            elif i > 0 or ast.absolute:
                parts.append("/")
            parts.append(_unparse_step(step))
        if not ast.steps:
            return "/"
        return "".join(parts)
    raise TypeError(f"not an XPath AST node: {ast!r}")


def _unparse_step(step: Step) -> str:
    if step.axis == "self":
        base = "."
    elif step.axis == "parent":
        base = ".."
    elif step.axis == "attribute":
        base = "@" + step.test
    else:
        base = step.test
    return base + "".join(f"[{unparse(p)}]" for p in step.predicates)


# ---------------------------------------------------------------------------
# Value conversions (XPath 1.0 semantics)


def xpath_string(value: XPathValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        if value == int(value):
            return str(int(value))
        return repr(value)
    if isinstance(value, str):
        return value
    # node-set: string-value of the first node in document order
    if not value:
        return ""
    return min(value, key=lambda n: n.order).string_value()


def xpath_number(value: XPathValue) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, float):
        return value
    if isinstance(value, list):
        return xpath_number(xpath_string(value))
    try:
        return float(value.strip())
    except (ValueError, AttributeError):
        return math.nan


def xpath_boolean(value: XPathValue) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return bool(value) and not math.isnan(value)
    if isinstance(value, str):
        return len(value) > 0
    return len(value) > 0


# ---------------------------------------------------------------------------
# Evaluator


def _document_of(node: Node) -> Node:
    cur = node
    while cur.parent is not None:
        cur = cur.parent
    return cur


def _axis_candidates(base: Node, step: Step) -> list[Node]:
    if step.axis == "self":
        return [base]
    if step.axis == "parent":
        return [base.parent] if base.parent is not None else []
    if step.axis == "attribute":
        if not isinstance(base, Element):
            return []
        if step.test == "*":
            return list(base.attr_nodes)
        return [a for a in base.attr_nodes if a.name == step.test]
    # child axis
    children = getattr(base, "children", [])
    if step.test == "text()":
        return [c for c in children if isinstance(c, Text)]
    if step.test == "*":
        return [c for c in children if isinstance(c, Element)]
    return [c for c in children if isinstance(c, Element) and c.name == step.test]


def _apply_predicates(candidates: list[Node], predicates: tuple) -> list[Node]:
    for pred in predicates:
        size = len(candidates)
        kept: list[Node] = []
        for pos, node in enumerate(candidates, start=1):
            value = _eval(pred, Context(node, pos, size))
            if isinstance(value, float) and not isinstance(value, bool):
                if value == pos:
                    kept.append(node)
            elif xpath_boolean(value):
                kept.append(node)
        candidates = kept
    return candidates


def _eval_path(path: Path, ctx: Context) -> list[Node]:
    if path.absolute:
        current: list[Node] = [_document_of(ctx.node)]
    else:
        current = [ctx.node]
    if path.absolute and not path.steps:
        return current
    for step in path.steps:
        result: list[Node] = []
        seen: set[int] = set()
        for cn in current:
            bases = [cn] + descendants(cn) if step.descendant else [cn]
            for base in bases:
                group = _axis_candidates(base, step)
                for node in _apply_predicates(group, step.predicates):
                    if id(node) not in seen:
                        seen.add(id(node))
                        result.append(node)
        result.sort(key=lambda n: n.order)
        current = result
    return current


def _compare(op: str, left: XPathValue, right: XPathValue) -> bool:
    lns = isinstance(left, list)
    rns = isinstance(right, list)
    if lns and rns:
        lvals = [n.string_value() for n in left]
        rvals = [n.string_value() for n in right]
        return any(_compare_atomic(op, a, b) for a in lvals for b in rvals)
    if lns:
        return any(_compare_atomic(op, n.string_value(), right) for n in left)
    if rns:
        return any(_compare_atomic(op, left, n.string_value()) for n in right)
    return _compare_atomic(op, left, right)


def _compare_atomic(op: str, left, right) -> bool:
    if op in ("=", "!="):
        if isinstance(left, bool) or isinstance(right, bool):
            a, b = xpath_boolean(left), xpath_boolean(right)
        elif isinstance(left, float) or isinstance(right, float):
            a, b = xpath_number(left), xpath_number(right)
        else:
            a, b = xpath_string(left), xpath_string(right)
        return a == b if op == "=" else a != b
    a, b = xpath_number(left), xpath_number(right)
    if math.isnan(a) or math.isnan(b):
        return False
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _eval_fn(fn: FnCall, ctx: Context) -> XPathValue:
    args = [_eval(a, ctx) for a in fn.args]
    if fn.name == "count":
        if not isinstance(args[0], list):
            raise XPathEvalError("count() requires a node-set")
        return float(len(args[0]))
    if fn.name == "not":
        return not xpath_boolean(args[0])
    if fn.name == "name":
        if args:
            if not isinstance(args[0], list):
                raise XPathEvalError("name() requires a node-set")
            if not args[0]:
                return ""
            target = min(args[0], key=lambda n: n.order)
        else:
            target = ctx.node
        return getattr(target, "name", "")
    if fn.name == "string":
        return xpath_string(args[0]) if args else xpath_string([ctx.node])
    if fn.name == "number":
        return xpath_number(args[0]) if args else xpath_number([ctx.node])
    if fn.name == "concat":
        return "".join(xpath_string(a) for a in args)
    if fn.name == "position":
        return float(ctx.position)
    if fn.name == "last":
        return float(ctx.size)
    raise XPathEvalError(f"unknown function {fn.name}()")


def _eval(ast: object, ctx: Context) -> XPathValue:
    if isinstance(ast, Number):
        return ast.value
    if isinstance(ast, Literal):
        return ast.value
    if isinstance(ast, Path):
        return _eval_path(ast, ctx)
    if isinstance(ast, FnCall):
        return _eval_fn(ast, ctx)
    if isinstance(ast, BinOp):
        if ast.op == "or":
            return xpath_boolean(_eval(ast.left, ctx)) or xpath_boolean(_eval(ast.right, ctx))
        if ast.op == "and":
            return xpath_boolean(_eval(ast.left, ctx)) and xpath_boolean(_eval(ast.right, ctx))
        return _compare(ast.op, _eval(ast.left, ctx), _eval(ast.right, ctx))
    raise XPathEvalError(f"cannot evaluate {ast!r}")


def eval_xpath(
    doc: XmlDocument,
    context: Node | None,
    expr: XPathExpr | str,
) -> XPathValue:
    """Evaluate an expression; context defaults to the document root node."""
    if isinstance(expr, str):
        expr = parse_xpath(expr)
    node = context if context is not None else doc
    return _eval(expr.ast, Context(node, 1, 1))
