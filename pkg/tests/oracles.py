"""Independent oracles used by the test suite.

The XPath oracle evaluates generated expression trees directly over a
generator-owned document structure (nested tuples), sharing no parsing or
evaluation code with the engine. Results are compared through node
addresses, so the two sides never need to agree on a node representation.

Document structure:  ("elem", name, {attr: value}, [children]) | ("text", s)
Address components:  ("c", child_index) for children, ("a", attr_index) for
attributes; the document node is the empty tuple, the root element ("c", 0).

Expression trees:
  ("num", float) | ("lit", str)
  ("fn", name, [args])
  ("binop", op, left, right)              op in or/and/=/!=/</<=/>/>=
  ("path", absolute, [steps])
  step = (descendant, axis, test, [predicates])   axis in child/attribute/self/parent
"""

from __future__ import annotations

import math
import random

# ---------------------------------------------------------------------------
# Document structure helpers

Addr = tuple


def doc_to_xml(doc) -> str:
    """Serialize a generated document tuple to XML text."""

    def esc(s: str) -> str:
        return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")

    def render(node) -> str:
        if node[0] == "text":
            return esc(node[1])
        _, name, attrs, children = node
        a = "".join(f' {k}="{esc(v)}"' for k, v in attrs.items())
        inner = "".join(render(c) for c in children)
        return f"<{name}{a}>{inner}</{name}>"

    return render(doc)


def node_at(doc, addr: Addr):
    """Resolve an address to ('doc',), an element/text tuple, or an attr pair."""
    if not addr:
        return ("doc", doc)
    node = ("doc", doc)
    current = None
    for kind, index in addr:
        if kind == "c":
            if current is None:
                current = doc if index == 0 else None
            else:
                current = current[3][index]
        else:  # attribute
            name = list(current[2].keys())[index]
            return ("attr", name, current[2][name])
    return current


def _children(node) -> list:
    if node[0] == "text":
        return []
    return node[3]


def _string_value(doc, addr: Addr) -> str:
    resolved = node_at(doc, addr)
    if isinstance(resolved, tuple) and resolved[0] == "attr":
        return resolved[2]
    if isinstance(resolved, tuple) and resolved[0] == "doc":
        return _string_value(doc, (("c", 0),))
    if resolved[0] == "text":
        return resolved[1]

    def walk(n) -> str:
        if n[0] == "text":
            return n[1]
        return "".join(walk(c) for c in n[3])

    return walk(resolved)


def _name_of(doc, addr: Addr) -> str:
    resolved = node_at(doc, addr)
    if isinstance(resolved, tuple) and resolved[0] == "attr":
        return resolved[1]
    if resolved[0] in ("text", "doc"):
        return ""
    return resolved[1]


def _is_element(doc, addr: Addr) -> bool:
    resolved = node_at(doc, addr)
    return isinstance(resolved, tuple) and resolved[0] == "elem"


def _descendant_or_self(doc, addr: Addr) -> list[Addr]:
    out = [addr]
    resolved = node_at(doc, addr)
    if isinstance(resolved, tuple) and resolved[0] == "attr":
        return out
    if resolved[0] == "doc":
        kids = [(("c", 0),)]
    elif resolved[0] == "text":
        kids = []
    else:
        kids = [addr + (("c", i),) for i in range(len(resolved[3]))]
    for kid in kids:
        out.extend(_descendant_or_self(doc, kid))
    return out


# ---------------------------------------------------------------------------
# Naive evaluator


def oracle_string(value) -> str:
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
    raise TypeError("node-sets handled by caller")


def oracle_number(value) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, float):
        return value
    try:
        return float(value.strip())
    except (ValueError, AttributeError):
        return math.nan


def oracle_boolean(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return value != 0 and not math.isnan(value)
    if isinstance(value, str):
        return len(value) > 0
    return len(value) > 0


class OracleEval:
    def __init__(self, doc) -> None:
        self.doc = doc

    # -- conversions that need the document for node-sets

    def to_string(self, value) -> str:
        if isinstance(value, list):
            if not value:
                return ""
            first = sorted(value)[0]
            return _string_value(self.doc, first)
        return oracle_string(value)

    def to_number(self, value) -> float:
        if isinstance(value, list):
            return oracle_number(self.to_string(value))
        return oracle_number(value)

    # -- expression dispatch

    def eval(self, expr, ctx_addr: Addr, pos: int, size: int):
        kind = expr[0]
        if kind == "num":
            return float(expr[1])
        if kind == "lit":
            return expr[1]
        if kind == "fn":
            return self.eval_fn(expr, ctx_addr, pos, size)
        if kind == "binop":
            return self.eval_binop(expr, ctx_addr, pos, size)
        if kind == "path":
            return self.eval_path(expr, ctx_addr)
        raise ValueError(f"bad oracle expression {expr!r}")

    def eval_fn(self, expr, ctx_addr, pos, size):
        _, name, args = expr
        vals = [self.eval(a, ctx_addr, pos, size) for a in args]
        if name == "count":
            return float(len(vals[0]))
        if name == "not":
            return not oracle_boolean(vals[0])
        if name == "name":
            if vals:
                if not vals[0]:
                    return ""
                return _name_of(self.doc, sorted(vals[0])[0])
            return _name_of(self.doc, ctx_addr)
        if name == "string":
            if vals:
                return self.to_string(vals[0])
            return _string_value(self.doc, ctx_addr)
        if name == "number":
            if vals:
                return self.to_number(vals[0])
            return oracle_number(_string_value(self.doc, ctx_addr))
        if name == "concat":
            return "".join(self.to_string(v) for v in vals)
        if name == "position":
            return float(pos)
        if name == "last":
            return float(size)
        raise ValueError(f"bad oracle function {name}")

    def eval_binop(self, expr, ctx_addr, pos, size):
        _, op, left, right = expr
        if op == "or":
            return oracle_boolean(self.eval(left, ctx_addr, pos, size)) or oracle_boolean(
                self.eval(right, ctx_addr, pos, size)
            )
        if op == "and":
            return oracle_boolean(self.eval(left, ctx_addr, pos, size)) and oracle_boolean(
                self.eval(right, ctx_addr, pos, size)
            )
        lv = self.eval(left, ctx_addr, pos, size)
        rv = self.eval(right, ctx_addr, pos, size)
        return self.compare(op, lv, rv)

    def compare(self, op, lv, rv) -> bool:
        lns = isinstance(lv, list)
        rns = isinstance(rv, list)
        if lns and rns:
            return any(
                self.atomic(op, _string_value(self.doc, a), _string_value(self.doc, b))
                for a in lv
                for b in rv
            )
        if lns:
            return any(self.atomic(op, _string_value(self.doc, a), rv) for a in lv)
        if rns:
            return any(self.atomic(op, lv, _string_value(self.doc, b)) for b in rv)
        return self.atomic(op, lv, rv)

    def atomic(self, op, a, b) -> bool:
        if op in ("=", "!="):
            if isinstance(a, bool) or isinstance(b, bool):
                x, y = oracle_boolean(a), oracle_boolean(b)
            elif isinstance(a, float) or isinstance(b, float):
                x, y = oracle_number(a), oracle_number(b)
            else:
                x, y = oracle_string(a), oracle_string(b)
            return x == y if op == "=" else x != y
        x, y = oracle_number(a), oracle_number(b)
        if math.isnan(x) or math.isnan(y):
            return False
        if op == "<":
            return x < y
        if op == "<=":
            return x <= y
        if op == ">":
            return x > y
        return x >= y

    # -- location paths

    def eval_path(self, expr, ctx_addr: Addr) -> list[Addr]:
        _, absolute, steps = expr
        current: list[Addr] = [()] if absolute else [ctx_addr]
        for step in steps:
            descendant, axis, test, predicates = step
            result: list[Addr] = []
            for cn in current:
                bases = _descendant_or_self(self.doc, cn) if descendant else [cn]
                for base in bases:
                    group = self.axis_candidates(base, axis, test)
                    group = self.filter_predicates(group, predicates)
                    for addr in group:
                        if addr not in result:
                            result.append(addr)
            result.sort()
            current = result
        return current

    def axis_candidates(self, base: Addr, axis: str, test: str) -> list[Addr]:
        resolved = node_at(self.doc, base)
        is_attr = isinstance(resolved, tuple) and resolved[0] == "attr"
        if axis == "self":
            return [base]
        if axis == "parent":
            return [base[:-1]] if base else []
        if axis == "attribute":
            if is_attr or resolved[0] in ("text", "doc"):
                return []
            names = list(resolved[2].keys())
            return [
                base + (("a", i),)
                for i, n in enumerate(names)
                if test == "*" or n == test
            ]
        # child axis
        if is_attr:
            return []
        if resolved[0] == "doc":
            kids = [(((("c", 0),))[0],)]
            kid_nodes = [self.doc]
        elif resolved[0] == "text":
            return []
        else:
            kids = [base + (("c", i),) for i in range(len(resolved[3]))]
            kid_nodes = resolved[3]
        out = []
        for addr, node in zip(kids, kid_nodes):
            if test == "text()":
                if node[0] == "text":
                    out.append(addr)
            elif test == "*":
                if node[0] == "elem":
                    out.append(addr)
            else:
                if node[0] == "elem" and node[1] == test:
                    out.append(addr)
        return out

    def filter_predicates(self, group: list[Addr], predicates) -> list[Addr]:
        for pred in predicates:
            kept = []
            size = len(group)
            for i, addr in enumerate(group, start=1):
                value = self.eval(pred, addr, i, size)
                if isinstance(value, float) and not isinstance(value, bool):
                    if value == i:
                        kept.append(addr)
                elif oracle_boolean(value):
                    kept.append(addr)
            group = kept
        return group


# ---------------------------------------------------------------------------
# Expression rendering (oracle tree -> XPath text for the engine)


def expr_to_string(expr) -> str:
    kind = expr[0]
    if kind == "num":
        value = float(expr[1])
        return str(int(value)) if value == int(value) else repr(value)
    if kind == "lit":
        return "'" + expr[1] + "'"
    if kind == "fn":
        return f"{expr[1]}({', '.join(expr_to_string(a) for a in expr[2])})"
    if kind == "binop":
        return f"({expr_to_string(expr[2])} {expr[1]} {expr_to_string(expr[3])})"
    if kind == "path":
        _, absolute, steps = expr
        if absolute and not steps:
            return "/"
        parts = []
        for i, (descendant, axis, test, predicates) in enumerate(steps):
            if descendant:
                parts.append("//")
            elif i > 0 or absolute:
                parts.append("/")
            if axis == "self":
                base = "."
            elif axis == "parent":
                base = ".."
            elif axis == "attribute":
                base = "@" + test
            else:
                base = test
            parts.append(base + "".join(f"[{expr_to_string(p)}]" for p in predicates))
        return "".join(parts)
    raise ValueError(f"bad oracle expression {expr!r}")


# ---------------------------------------------------------------------------
# Random document and expression generation

_NAMES = ["a", "b", "c", "d"]
_ATTRS = ["p", "q"]
_WORDS = ["x", "y", "7", "3.5", "cpu", "idle", ""]


def random_document(rng: random.Random, max_nodes: int = 50):
    budget = [rng.randint(3, max_nodes)]

    def make_elem(depth: int):
        budget[0] -= 1
        name = rng.choice(_NAMES)
        attrs = {}
        for attr in _ATTRS:
            if rng.random() < 0.4:
                attrs[attr] = rng.choice(_WORDS)
        children = []
        if depth < 4:
            n_kids = rng.randint(0, 3 if depth else 4)
            for _ in range(n_kids):
                if budget[0] <= 0:
                    break
                # adjacent text nodes would merge on reparse; keep them apart
                if rng.random() < 0.35 and not (children and children[-1][0] == "text"):
                    budget[0] -= 1
                    children.append(("text", rng.choice(_WORDS) or "t"))
                else:
                    children.append(make_elem(depth + 1))
        return ("elem", name, attrs, children)

    return make_elem(0)


def random_expression(rng: random.Random, depth: int = 0):
    """Grammar-covering random expression; always valid for the engine."""
    roll = rng.random()
    if depth >= 2 or roll < 0.45:
        return random_path(rng, depth)
    if roll < 0.6:
        fn = rng.choice(["count", "not", "string", "number", "concat", "name"])
        if fn == "count":
            return ("fn", "count", [random_path(rng, depth + 1)])
        if fn == "concat":
            return (
                "fn",
                "concat",
                [random_scalar(rng, depth + 1), random_scalar(rng, depth + 1)],
            )
        if fn == "name":
            return ("fn", "name", [random_path(rng, depth + 1)] if rng.random() < 0.7 else [])
        return ("fn", fn, [random_expression(rng, depth + 1)])
    op = rng.choice(["or", "and", "=", "!=", "<", "<=", ">", ">="])
    return (
        "binop",
        op,
        random_expression(rng, depth + 1),
        random_expression(rng, depth + 1),
    )


def random_scalar(rng: random.Random, depth: int):
    roll = rng.random()
    if roll < 0.4:
        return ("num", float(rng.randint(0, 5)))
    if roll < 0.7:
        return ("lit", rng.choice(_WORDS))
    return ("fn", "string", [random_path(rng, depth + 1)])


def random_step(rng: random.Random, depth: int, first: bool):
    descendant = rng.random() < 0.25
    roll = rng.random()
    if roll < 0.1 and not first:
        return (descendant, "parent", "..", [])
    if roll < 0.18:
        return (descendant, "self", ".", [])
    if roll < 0.3:
        return (descendant, "attribute", rng.choice(_ATTRS + ["*"]), _preds(rng, depth))
    if roll < 0.4:
        return (descendant, "child", "text()", _preds(rng, depth))
    if roll < 0.55:
        return (descendant, "child", "*", _preds(rng, depth))
    return (descendant, "child", rng.choice(_NAMES), _preds(rng, depth))


def _preds(rng: random.Random, depth: int) -> list:
    preds = []
    if depth < 2:
        while rng.random() < 0.3 and len(preds) < 2:
            roll = rng.random()
            if roll < 0.35:
                preds.append(("num", float(rng.randint(1, 3))))
            elif roll < 0.5:
                preds.append(
                    ("binop", "=", ("fn", "position", []), ("num", float(rng.randint(1, 3))))
                )
            elif roll < 0.6:
                preds.append(("binop", "=", ("fn", "position", []), ("fn", "last", [])))
            else:
                preds.append(random_expression(rng, depth + 1))
    return preds


def random_path(rng: random.Random, depth: int):
    absolute = rng.random() < 0.5
    steps = []
    n_steps = rng.randint(1, 3)
    for i in range(n_steps):
        steps.append(random_step(rng, depth, first=(i == 0 and absolute)))
    # a leading '//' on a relative path is not expressible; force a '/' start
    if not absolute and steps:
        steps[0] = (False, *steps[0][1:])
    return ("path", absolute, steps)


# ---------------------------------------------------------------------------
# Engine node -> address mapping (shares only the node data model)


def engine_node_address(node) -> Addr:
    from gridwatch.xmlstyle import Attr, XmlDocument

    parts: list = []
    current = node
    while not isinstance(current, XmlDocument):
        parent = current.parent
        if parent is None:
            raise ValueError("node is not attached to a document")
        if isinstance(current, Attr):
            index = parent.attr_nodes.index(current)
            parts.append(("a", index))
        else:
            index = parent.children.index(current)
            parts.append(("c", index))
        current = parent
    return tuple(reversed(parts))


def results_equal(engine_value, oracle_value) -> bool:
    import math as _math

    if isinstance(engine_value, list) != isinstance(oracle_value, list):
        return False
    if isinstance(engine_value, list):
        addrs = sorted(engine_node_address(n) for n in engine_value)
        return addrs == sorted(oracle_value)
    if isinstance(engine_value, bool) != isinstance(oracle_value, bool):
        return False
    if isinstance(engine_value, float) and isinstance(oracle_value, float):
        if _math.isnan(engine_value) and _math.isnan(oracle_value):
            return True
        return engine_value == oracle_value
    return engine_value == oracle_value


# ---------------------------------------------------------------------------
# Brute-force search oracle (independent of gridwatch.search)


def brute_force_search(keyword: str, state_dict: dict, payloads: dict[str, str]) -> list[str]:
    """Scan all resource fields and payload XML text nodes with ElementTree."""
    import xml.etree.ElementTree as ET

    needle = keyword.lower()
    out = []
    for resource in state_dict["resources"]:
        rid = resource["id"]
        if not needle:
            out.append(rid)
            continue
        fields = [resource["hostname"], resource["label"], resource["type"]]
        payload = payloads.get(rid, "")
        if payload.strip():
            try:
                root = ET.fromstring(payload)
                texts = [t for t in root.itertext()]
                fields.append(" ".join(texts))
            except ET.ParseError:
                pass
        if any(needle in f.lower() for f in fields):
            out.append(rid)
    return out
