"""Translation of analyzed Soda programs to Scala 3 sources.

The shape of the translation, per declaration:

- ``class`` becomes a ``trait``; its abstract members become abstract
  ``def``s inside the trait
- the synthesized default constructor becomes a ``case class`` named with
  the trailing underscore, extending the trait, with one field per
  zero-parameter abstract member
- a constant (zero parameters, with a body) becomes a ``lazy val``
- a function becomes a ``def`` with the same parameter groups
- type parameters ``[A : Type]`` become plain ``[A]``; ``subtype`` and
  ``supertype`` bounds become ``<:`` and ``>:``

Calls to a known constructor collapse their curried arguments into one
Scala argument list, since case classes are applied uncurried. Directive
blocks targeting ``scala`` are spliced verbatim where they appeared.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analyzer import AnalyzedProgram, ConstructorSignature, filter_directives
from .syntax import (
    AbstractBlock,
    AppliedType,
    Apply,
    BinaryOp,
    BoolLiteral,
    ClassDecl,
    ConstructorPattern,
    Definition,
    DirectiveBlock,
    Expr,
    FunctionType,
    Identifier,
    If,
    IntLiteral,
    Lambda,
    LiteralPattern,
    Match,
    NamedApply,
    NamedType,
    Pattern,
    SelfRef,
    SourceSpan,
    StringLiteral,
    TypeApply,
    TypeExpr,
    TypeParam,
    UnaryNot,
    VarBindPattern,
    WildcardPattern,
    escape_string,
    PREC_ADD,
    PREC_AND,
    PREC_APP,
    PREC_ATOM,
    PREC_CMP,
    PREC_LOW,
    PREC_MUL,
    PREC_OR,
    PREC_UNARY,
)

#: Soda type names that Scala spells differently.
_TYPE_RENAMES = {"Bool": "Boolean"}

_SCALA_BINOPS = {
    "*": ("*", PREC_MUL),
    "/": ("/", PREC_MUL),
    "+": ("+", PREC_ADD),
    "-": ("-", PREC_ADD),
    "==": ("==", PREC_CMP),
    "<": ("<", PREC_CMP),
    "<=": ("<=", PREC_CMP),
    ">": (">", PREC_CMP),
    ">=": (">=", PREC_CMP),
    "and": ("&&", PREC_AND),
    "or": ("||", PREC_OR),
}


@dataclass
class ScalaRendering:
    """Rendered Scala text plus a line-level map back to the source: output
    line number (1-based) to the span of the declaration it came from."""

    text: str
    source_map: dict[int, SourceSpan] = field(default_factory=dict)


# ============================================================
# types
# ============================================================


def translate_type_to_scala(t) -> str:
    """Render a type expression or a class type parameter."""
    if isinstance(t, TypeParam):
        if t.bound_kind == "subtype":
            return f"{t.name} <: {translate_type_to_scala(t.bound)}"
        if t.bound_kind == "supertype":
            return f"{t.name} >: {translate_type_to_scala(t.bound)}"
        return t.name
    if isinstance(t, NamedType):
        return _TYPE_RENAMES.get(t.name, t.name)
    if isinstance(t, AppliedType):
        base = translate_type_to_scala(t.base)
        if isinstance(t.base, FunctionType):
            base = f"({base})"
        args = ", ".join(translate_type_to_scala(a) for a in t.args)
        return f"{base} [{args}]"
    if isinstance(t, FunctionType):
        dom = translate_type_to_scala(t.domain)
        if isinstance(t.domain, FunctionType):
            dom = f"({dom})"
        return f"{dom} => {translate_type_to_scala(t.codomain)}"
    raise TypeError(f"not a type: {t!r}")


# ============================================================
# expressions
# ============================================================


def _peel(e: Expr):
    steps = []
    while isinstance(e, (Apply, NamedApply, TypeApply)):
        if isinstance(e, Apply):
            steps.append(("pos", e.argument))
        elif isinstance(e, NamedApply):
            steps.append(("named", e.param_name, e.argument))
        else:
            steps.append(("type", e.type_argument))
        e = e.function
    steps.reverse()
    return e, steps


class _ExprRenderer:
    def __init__(self, constructors: dict[str, ConstructorSignature]):
        self.constructors = constructors

    def render(self, e: Expr, context: int, indent: str) -> str:
        text, prec = self._bare(e, indent)
        if prec < context:
            return f"({text})"
        return text

    def _bare(self, e: Expr, indent: str) -> tuple[str, int]:
        if isinstance(e, IntLiteral):
            return str(e.value), (PREC_ATOM if e.value >= 0 else PREC_ADD)
        if isinstance(e, BoolLiteral):
            return ("true" if e.value else "false"), PREC_ATOM
        if isinstance(e, StringLiteral):
            return f'"{escape_string(e.value)}"', PREC_ATOM
        if isinstance(e, Identifier):
            return e.name, PREC_ATOM
        if isinstance(e, SelfRef):
            return "this", PREC_ATOM
        if isinstance(e, (Apply, NamedApply, TypeApply)):
            return self._render_call(e, indent), PREC_APP
        if isinstance(e, UnaryNot):
            return f"! {self.render(e.operand, PREC_UNARY, indent)}", PREC_UNARY
        if isinstance(e, BinaryOp):
            op, prec = _SCALA_BINOPS[e.op]
            left = self.render(e.left, prec, indent)
            right = self.render(e.right, prec + 1, indent)
            return f"{left} {op} {right}", prec
        if isinstance(e, Lambda):
            param = (
                f"({e.param} : {translate_type_to_scala(e.param_type)})"
                if e.param_type
                else f"({e.param})"
            )
            return f"{param} => {self.render(e.body, PREC_LOW, indent)}", PREC_LOW
        if isinstance(e, If):
            cond = self.render(e.cond, PREC_LOW, indent)
            then_b = self.render(e.then_branch, PREC_LOW, indent)
            else_b = self.render(e.else_branch, PREC_LOW, indent)
            return f"if {cond} then {then_b} else {else_b}", PREC_LOW
        if isinstance(e, Match):
            return self._render_match_inline(e, indent), PREC_LOW
        raise TypeError(f"not an expression: {e!r}")

    def _render_call(self, e: Expr, indent: str) -> str:
        head, steps = _peel(e)
        head_text = self.render(head, PREC_APP, indent)
        type_args = [s[1] for s in steps if s[0] == "type"]
        value_steps = [s for s in steps if s[0] != "type"]
        out = head_text
        if type_args:
            out += " [" + ", ".join(translate_type_to_scala(t) for t in type_args) + "]"
        if (
            isinstance(head, Identifier)
            and head.name in self.constructors
            and value_steps
            and len(value_steps) == len(self.constructors[head.name].fields)
        ):
            # Case classes apply in one argument list.
            rendered = []
            for s in value_steps:
                if s[0] == "pos":
                    rendered.append(self.render(s[1], PREC_LOW, indent))
                else:
                    rendered.append(f"{s[1]} = {self.render(s[2], PREC_LOW, indent)}")
            return out + " (" + ", ".join(rendered) + ")"
        for s in value_steps:
            if s[0] == "pos":
                out += f" ({self.render(s[1], PREC_LOW, indent)})"
            else:
                out += f" ({s[1]} = {self.render(s[2], PREC_LOW, indent)})"
        return out

    def render_pattern(self, p: Pattern) -> str:
        if isinstance(p, WildcardPattern):
            return "_"
        if isinstance(p, VarBindPattern):
            return p.name
        if isinstance(p, LiteralPattern):
            if isinstance(p.value, bool):
                return "true" if p.value else "false"
            if isinstance(p.value, int):
                return str(p.value)
            return f'"{escape_string(p.value)}"'
        if isinstance(p, ConstructorPattern):
            subs = ", ".join(self.render_pattern(s) for s in p.sub_patterns)
            return f"{p.name} ({subs})"
        raise TypeError(f"not a pattern: {p!r}")

    def _render_match_inline(self, e: Match, indent: str) -> str:
        scrutinee = self.render(e.scrutinee, PREC_APP, indent)
        cases = "; ".join(
            f"case {self.render_pattern(c.pattern)} => {self.render(c.result, PREC_LOW, indent)}"
            for c in e.cases
        )
        return f"{scrutinee} match {{ {cases} }}"

    def render_match_block(self, e: Match, indent: str) -> list[str]:
        """Multi-line match used when a match is a definition's whole body."""
        scrutinee = self.render(e.scrutinee, PREC_APP, indent)
        lines = [f"{indent}{scrutinee} match {{"]
        for c in e.cases:
            pattern = self.render_pattern(c.pattern)
            result = self.render(c.result, PREC_LOW, indent + "  ")
            lines.append(f"{indent}  case {pattern} => {result}")
        lines.append(f"{indent}}}")
        return lines


# ============================================================
# declarations
# ============================================================


def translate_definition_to_scala(
    d: Definition,
    constructors: dict[str, ConstructorSignature] | None = None,
    indent: str = "",
) -> list[str]:
    """Render one member definition (or abstract declaration) as Scala
    lines. Constants become ``lazy val``, functions become ``def``."""
    renderer = _ExprRenderer(constructors or {})
    lines: list[str] = []
    for c in d.leading_comments:
        lines.append(f"{indent}//{c}")
    if d.is_tailrec_annotated:
        lines.append(f"{indent}@tailrec")
    if d.body is None or d.params:
        head = f"def {d.name}"
        for pname, ptype in d.params:
            head += f" ({pname} : {translate_type_to_scala(ptype)})"
    else:
        head = f"lazy val {d.name}"
    if d.result_type is not None:
        head += f" : {translate_type_to_scala(d.result_type)}"
    if d.body is None:
        lines.append(indent + head)
        return lines
    if isinstance(d.body, Match):
        lines.append(f"{indent}{head} =")
        lines.extend(renderer.render_match_block(d.body, indent + "  "))
        return lines
    lines.append(f"{indent}{head} = {renderer.render(d.body, PREC_LOW, indent)}")
    return lines


def _render_directive(block: DirectiveBlock, indent: str) -> list[str]:
    return [(indent + raw) if raw else "" for raw in block.raw_lines]


def _render_class(
    cls: ClassDecl, constructors: dict[str, ConstructorSignature]
) -> list[str]:
    lines: list[str] = []
    for c in cls.leading_comments:
        lines.append(f"//{c}")
    head = f"trait {cls.name}"
    if cls.type_params:
        head += " [" + ", ".join(translate_type_to_scala(tp) for tp in cls.type_params) + "]"
    if cls.extends_list:
        rendered = [translate_type_to_scala(t) for t in cls.extends_list]
        head += " extends " + " with ".join(rendered)
    body_chunks: list[list[str]] = []
    for member in cls.members:
        if isinstance(member, AbstractBlock):
            chunk = []
            for decl in member.members:
                chunk.extend(translate_definition_to_scala(decl, constructors, "  "))
            if chunk:
                body_chunks.append(chunk)
        elif isinstance(member, DirectiveBlock):
            body_chunks.append(_render_directive(member, "  "))
        else:
            body_chunks.append(translate_definition_to_scala(member, constructors, "  "))
    if body_chunks:
        lines.append(head + " {")
        for i, chunk in enumerate(body_chunks):
            if i:
                lines.append("")
            lines.extend(chunk)
        lines.append("}")
    else:
        lines.append(head)
    lines.append("")
    lines.extend(_render_constructor(cls, constructors))
    return lines


def _render_constructor(
    cls: ClassDecl, constructors: dict[str, ConstructorSignature]
) -> list[str]:
    sig = constructors.get(cls.name + "_")
    if sig is None:
        return []
    fields = ", ".join(
        f"{name} : {translate_type_to_scala(ftype)}" for name, ftype in sig.fields
    )
    params = ""
    applied = cls.name
    if cls.type_params:
        # bounds must be repeated or extending the trait fails its checks
        declared = ", ".join(
            translate_type_to_scala(tp) for tp in cls.type_params
        )
        names = ", ".join(tp.name for tp in cls.type_params)
        params = f" [{declared}]"
        applied += f" [{names}]"
    return [f"case class {cls.name}_{params} ({fields}) extends {applied}"]


# ============================================================
# whole programs
# ============================================================


def translate_to_scala(analyzed: AnalyzedProgram) -> ScalaRendering:
    """Render the whole program. Directive blocks for other targets are
    dropped; ``scala`` directives appear verbatim at their source position."""
    program = filter_directives(analyzed.program, "scala")
    chunks: list[tuple[list[str], SourceSpan]] = []
    if program.package_name:
        chunks.append(([f"package {program.package_name}"], program.span))
    for imp in program.imports:
        chunks.append(([f"import {imp}"], program.span))
    for item in program.items:
        if isinstance(item, ClassDecl):
            chunks.append((_render_class(item, analyzed.constructors), item.span))
        else:
            chunks.append((_render_directive(item, ""), item.span))
    lines: list[str] = []
    source_map: dict[int, SourceSpan] = {}
    for i, (chunk, span) in enumerate(chunks):
        if i:
            lines.append("")
        source_map[len(lines) + 1] = span
        lines.extend(chunk)
    text = "\n".join(lines) + "\n" if lines else ""
    return ScalaRendering(text, source_map)
