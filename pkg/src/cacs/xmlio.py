"""Reading and writing problems in the ``dcsdp`` XML format.

Parsing goes through pyexpat directly so every element keeps its source
line for diagnostics.  DTDs are never fetched and entity declarations are
rejected outright.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional
from xml.parsers import expat
from xml.sax.saxutils import escape

from .constraints import ConstraintError, ConstraintSpec, Kind
from .domain import InvalidRangeError
from .model import DcspProblem, ModelError

DOCTYPE = '<!DOCTYPE dcsdp SYSTEM "dcsdp.dtd">'

_ELEMENT_KINDS = {
    "alldiff": Kind.ALL_DIFFERENT,
    "notequal": Kind.NOT_EQUAL,
    "lessorequal": Kind.LESS_OR_EQUAL,
    "greaterorequal": Kind.GREATER_OR_EQUAL,
    "linearless": Kind.LINEAR_LESS,
    "aritheq": Kind.ARITH_EQUAL,
}
_KIND_ELEMENTS = {k: name for name, k in _ELEMENT_KINDS.items()}


class DcsdpError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, element: str = ""):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if element:
            where.append(f"<{element}>")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.element = element


class DcsdpWarning(UserWarning):
    pass


class UnsupportedSerializationError(ValueError):
    pass


def dtd_text() -> str:
    return resources.files("cacs").joinpath("data/dcsdp.dtd").read_text("utf-8")


@dataclass
class _Node:
    tag: str
    attrs: dict
    line: int
    children: list = field(default_factory=list)
    text: str = ""

    def fail(self, message: str) -> DcsdpError:
        return DcsdpError(message, self.line, self.tag)

    def only(self, tag: str) -> _Node:
        found = [c for c in self.children if c.tag == tag]
        if len(found) != 1:
            raise self.fail(f"expected exactly one <{tag}>, found {len(found)}")
        return found[0]

    def text_of(self, tag: str) -> str:
        return self.only(tag).text.strip()

    def int_of(self, tag: str) -> int:
        node = self.only(tag)
        try:
            return int(node.text.strip())
        except ValueError:
            raise node.fail(f"not an integer: {node.text.strip()!r}") from None


def _read_tree(text: str) -> _Node:
    parser = expat.ParserCreate()
    parser.SetParamEntityParsing(expat.XML_PARAM_ENTITY_PARSING_NEVER)
    stack: list[_Node] = []
    root: list[_Node] = []

    def start(tag, attrs):
        node = _Node(tag, dict(attrs), parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        node = stack.pop()
        if node.children and node.text.strip():
            raise DcsdpError(f"unexpected text {node.text.strip()!r}", node.line, node.tag)

    def chars(data):
        if stack:
            stack[-1].text += data

    def entity_decl(name, *_):
        raise DcsdpError(f"entity declarations are not allowed ({name})", parser.CurrentLineNumber)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.EntityDeclHandler = entity_decl
    parser.ExternalEntityRefHandler = lambda *a: False
    data = text.encode("utf-8") if isinstance(text, str) else text
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise DcsdpError(f"malformed XML: {expat.ErrorString(exc.code)}", exc.lineno) from None
    return root[0]


def _parse_constraint(p: DcspProblem, wrapper: _Node) -> ConstraintSpec:
    if len(wrapper.children) != 1:
        raise wrapper.fail("<constraint> must hold exactly one constraint element")
    el = wrapper.children[0]
    kind = _ELEMENT_KINDS.get(el.tag)
    if kind is None:
        raise el.fail(f"unknown constraint element <{el.tag}>")
    scope, coeffs = [], []
    for vid in el.children:
        if vid.tag != "vid":
            raise vid.fail("constraint elements may only contain <vid>")
        name, owner = vid.text_of("name"), vid.text_of("owner")
        try:
            p.vagent(owner)
        except ModelError:
            raise vid.fail(f"dangling vid owner {owner!r}") from None
        try:
            scope.append(p.find_variable(name, owner))
        except ModelError:
            raise vid.fail(f"dangling vid name {name!r} for owner {owner!r}") from None
        try:
            coeffs.append(int(vid.attrs.get("coef", "1")))
        except ValueError:
            raise vid.fail(f"bad coef {vid.attrs['coef']!r}") from None
    try:
        if kind in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL):
            constant = int(el.attrs.get("constant", "0"))
            strict = el.attrs.get("strict", "true" if kind is Kind.LINEAR_LESS else "false")
            if strict not in ("true", "false"):
                raise el.fail(f"strict must be 'true' or 'false', not {strict!r}")
            return ConstraintSpec(
                kind, tuple(scope), tuple(coeffs), constant, strict == "true"
            )
        return ConstraintSpec(kind, tuple(scope))
    except (ConstraintError, ValueError) as exc:
        if isinstance(exc, DcsdpError):
            raise
        raise el.fail(str(exc)) from None


def parse_dcsdp(text: str) -> DcspProblem:
    """Parse a document into a sealed problem.

    Agent priorities follow the document order of ``<vagent>`` elements.
    """
    root = _read_tree(text)
    if root.tag != "dcsdp":
        raise root.fail("root element must be <dcsdp>")
    p = DcspProblem(root.text_of("name"))
    cagents = []
    for node in root.children:
        if node.tag == "name":
            continue
        if node.tag == "vagent":
            agent = p.make_vagent(node.text_of("name"))
            for var in node.children:
                if var.tag == "name":
                    continue
                if var.tag != "var":
                    raise var.fail("unexpected element inside <vagent>")
                try:
                    p.make_bounded_int_var(
                        agent, var.text_of("name"), var.int_of("inf"), var.int_of("sup")
                    )
                except InvalidRangeError as exc:
                    raise var.fail(str(exc)) from None
                except ModelError as exc:
                    raise var.fail(str(exc)) from None
        elif node.tag in ("cagent", "caagent"):
            if node.tag == "caagent":
                warnings.warn(
                    f"line {node.line}: <caagent> read as <cagent>", DcsdpWarning, stacklevel=2
                )
            cagents.append(node)
        else:
            raise node.fail("unexpected element inside <dcsdp>")
    for node in cagents:
        try:
            ctrl = p.make_cagent(node.text_of("name"))
        except ModelError as exc:
            raise node.fail(str(exc)) from None
        for wrapper in node.children:
            if wrapper.tag == "name":
                continue
            if wrapper.tag != "constraint":
                raise wrapper.fail(f"unexpected element inside <{node.tag}>")
            p.post(ctrl, _parse_constraint(p, wrapper))
    try:
        return p.seal()
    except ModelError as exc:
        raise DcsdpError(str(exc)) from None


def read_dcsdp(path) -> DcspProblem:
    with open(path, "rb") as fh:
        return parse_dcsdp(fh.read())


def write_dcsdp(p: DcspProblem) -> str:
    """Canonical document: declaration order, two-space indentation."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>', DOCTYPE, "<dcsdp>"]
    add = out.append
    add(f"  <name>{escape(p.name)}</name>")
    for va in p.vagents:
        add("  <vagent>")
        add(f"    <name>{escape(va.id.name)}</name>")
        for v, d in va.variables.items():
            if not d or len(d) != d.max - d.min + 1:
                raise UnsupportedSerializationError(
                    f"domain of {v} is not an interval and has no XML form"
                )
            add("    <var>")
            add(f"      <name>{escape(v.name)}</name>")
            add(f"      <inf>{d.min}</inf>")
            add(f"      <sup>{d.max}</sup>")
            add("    </var>")
        add("  </vagent>")
    for ca in p.cagents:
        add("  <cagent>")
        add(f"    <name>{escape(ca.id.name)}</name>")
        for c in ca.constraints:
            tag = _KIND_ELEMENTS.get(c.kind)
            if tag is None:
                raise UnsupportedSerializationError(
                    f"constraint {c} in controller {ca.id.name!r} has no XML element"
                )
            linear = c.kind in (Kind.LINEAR_LESS, Kind.ARITH_EQUAL)
            attrs = ""
            if c.kind is Kind.LINEAR_LESS:
                attrs = f' strict="{"true" if c.strict else "false"}" constant="{c.constant}"'
            elif c.kind is Kind.ARITH_EQUAL:
                attrs = f' constant="{c.constant}"'
            add("    <constraint>")
            add(f"      <{tag}{attrs}>")
            for i, v in enumerate(c.scope):
                coef = f' coef="{c.coeffs[i]}"' if linear else ""
                add(
                    f"        <vid{coef}><name>{escape(v.name)}</name>"
                    f"<owner>{escape(v.owner.name)}</owner></vid>"
                )
            add(f"      </{tag}>")
            add("    </constraint>")
        add("  </cagent>")
    add("</dcsdp>")
    return "\n".join(out) + "\n"
