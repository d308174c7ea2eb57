"""Soda abstract syntax: spans, tokens, expression and declaration trees,
diagnostics, and the canonical pretty-printer.

Every node is a frozen dataclass, immutable after construction. Source spans
are excluded from equality (``compare=False``), so ``==`` on two trees is
structural equality: same shape, same names, same literals, regardless of
where the nodes came from. That is the equality the parse/print round-trip
tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


# ============================================================
# SOURCE SPANS
# ============================================================


@dataclass(frozen=True)
class SourceSpan:
    """Half-open source region: lines and start column are 1-based,
    ``col_end`` is one past the last character.

    Invariants:
    - line_start <= line_end
    - if line_start == line_end then col_start <= col_end
    - zero-width spans (col_start == col_end) mark synthesized tokens
      such as indent/dedent and end-of-input
    """

    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def cover(self, other: SourceSpan) -> SourceSpan:
        """Smallest span containing both self and other."""
        start = min((self.line_start, self.col_start), (other.line_start, other.col_start))
        end = max((self.line_end, self.col_end), (other.line_end, other.col_end))
        return SourceSpan(self.file, start[0], start[1], end[0], end[1])

    def contains(self, other: SourceSpan) -> bool:
        return (self.line_start, self.col_start) <= (other.line_start, other.col_start) and (
            other.line_end,
            other.col_end,
        ) <= (self.line_end, self.col_end)


def synthetic_span(file: str = "<synthetic>") -> SourceSpan:
    """Placeholder span for trees built in memory rather than parsed."""
    return SourceSpan(file, 1, 1, 1, 1)


# ============================================================
# TOKENS
# ============================================================

RESERVED_WORDS = frozenset(
    {
        "lambda", "if", "then", "else", "match", "case",
        "class", "extends", "end", "abstract", "this",
        "subtype", "supertype", "package", "import", "directive",
        "not", "and", "or", "true", "false",
    }
)

OPERATOR_SYMBOLS = frozenset(
    {":", "=", ":=", "-->", "==>", "<:", ">:", "+", "-", "*", "/", "==", "<", "<=", ">", ">="}
)


class TokenKind:
    """Token kind names. Plain string constants: kinds travel in data files
    and diagnostics, so they stay readable without an enum layer."""

    IDENTIFIER = "identifier"
    INTEGER_LITERAL = "integer_literal"
    STRING_LITERAL = "string_literal"
    RESERVED_WORD = "reserved_word"
    OPERATOR_SYMBOL = "operator_symbol"
    ANNOTATION = "annotation"
    OPEN_PAREN = "open_paren"
    CLOSE_PAREN = "close_paren"
    OPEN_BRACKET = "open_bracket"
    CLOSE_BRACKET = "close_bracket"
    NEWLINE = "newline"
    INDENT = "indent"
    DEDENT = "dedent"
    COMMENT = "comment"
    RAW_LINE = "raw_line"
    END_OF_INPUT = "end_of_input"


@dataclass(frozen=True)
class Token:
    """Smallest lexical unit.

    ``text`` is the verbatim lexeme (for layout tokens it is empty, for
    string literals it includes the quotes). ``raw_line`` tokens carry one
    verbatim line of a directive block, uninterpreted.
    """

    kind: str
    text: str
    span: SourceSpan


# ============================================================
# DIAGNOSTICS
# ============================================================

#: Registry of every diagnostic this toolchain can emit.
DIAGNOSTIC_CODES = {
    "E-LEX-001": "unterminated string literal",
    "E-LEX-002": "illegal character",
    "E-LEX-003": "tab in indentation",
    "E-LEX-004": "inconsistent dedent",
    "E-PAR-001": "unexpected token",
    "E-PAR-002": "missing end",
    "E-PAR-003": "package not first",
    "E-PAR-004": "class name uses default-constructor suffix",
    "E-PAR-010": "dangling then without else",
    "E-PAR-011": "match with zero cases",
    "E-PAR-012": "pattern is not a constructor, literal, or variable",
    "E-SEM-001": "duplicate definition",
    "E-SEM-010": "self-recursive call in non-tail position",
    "E-SEM-020": "unknown parameter name",
    "E-SEM-021": "repeated parameter name",
    "E-SEM-022": "missing parameter",
    "E-SEM-023": "mixed named and positional arguments",
    "E-SEM-030": "this used outside a class",
    "E-LEAN-001": "construct not supported by the Lean backend",
    "W-SEM-001": "identifier not declared in this file",
}


@dataclass(frozen=True)
class Diagnostic:
    """Error or warning with a stable code from DIAGNOSTIC_CODES."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    span: SourceSpan

    def render(self) -> str:
        """Conventional compiler format: file:line:col: severity[code]: message."""
        s = self.span
        return f"{s.file}:{s.line_start}:{s.col_start}: {self.severity}[{self.code}]: {self.message}"


def error(code: str, message: str, span: SourceSpan) -> Diagnostic:
    assert code in DIAGNOSTIC_CODES, code
    return Diagnostic("error", code, message, span)


def warning(code: str, message: str, span: SourceSpan) -> Diagnostic:
    assert code in DIAGNOSTIC_CODES, code
    return Diagnostic("warning", code, message, span)


def has_errors(diagnostics) -> bool:
    return any(d.severity == "error" for d in diagnostics)


# ============================================================
# TYPE EXPRESSIONS
# ============================================================


class TypeExpr:
    """Base for type expressions. Types are syntax only: the toolchain does
    structural checks and leaves type checking to the target language."""


@dataclass(frozen=True)
class NamedType(TypeExpr):
    name: str
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class AppliedType(TypeExpr):
    """Type application, e.g. ``Pair [Int] [Bool]``. At least one argument."""

    base: TypeExpr
    args: tuple[TypeExpr, ...]
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class FunctionType(TypeExpr):
    """Arrow type ``A --> B``; right-associative in concrete syntax."""

    domain: TypeExpr
    codomain: TypeExpr
    span: SourceSpan = field(compare=False, repr=False)


# ============================================================
# PATTERNS
# ============================================================


class Pattern:
    """Base for match-case patterns."""


@dataclass(frozen=True)
class WildcardPattern(Pattern):
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class VarBindPattern(Pattern):
    name: str
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class LiteralPattern(Pattern):
    """Integer, boolean, or string literal pattern."""

    value: Union[int, bool, str]
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class ConstructorPattern(Pattern):
    """Constructor applied to sub-patterns, binding construction variables.

    A name ending in underscore refers to a default constructor.
    """

    name: str
    sub_patterns: tuple[Pattern, ...]
    span: SourceSpan = field(compare=False, repr=False)


# ============================================================
# EXPRESSIONS
# ============================================================


class Expr:
    """Base for expressions. All variants carry a span; every tree is
    immutable and safe to share across threads."""


@dataclass(frozen=True)
class IntLiteral(Expr):
    """Arbitrary-precision integer literal."""

    value: int
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class BoolLiteral(Expr):
    value: bool
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class StringLiteral(Expr):
    """Decoded string contents (no surrounding quotes)."""

    value: str
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class Identifier(Expr):
    name: str
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class SelfRef(Expr):
    """The ``this`` reference to the innermost enclosing class instance."""

    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class Apply(Expr):
    """One-argument application; multi-argument calls are nested Apply."""

    function: Expr
    argument: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class NamedApply(Expr):
    """Application with a named argument, ``f (x := e)``."""

    function: Expr
    param_name: str
    argument: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class TypeApply(Expr):
    """Type-argument application, ``Pair_ [Int]``."""

    function: Expr
    type_argument: TypeExpr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class Lambda(Expr):
    """Single-parameter lambda; multi-parameter lambdas are nested."""

    param: str
    param_type: Optional[TypeExpr]
    body: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class If(Expr):
    """Total conditional: both branches are mandatory."""

    cond: Expr
    then_branch: Expr
    else_branch: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class MatchCase(Expr):
    pattern: Pattern
    result: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class Match(Expr):
    """Pattern match with at least one case; first matching case wins."""

    scrutinee: Expr
    cases: tuple[MatchCase, ...]
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class BinaryOp(Expr):
    """Binary operator from the arithmetic/logic/comparison set.
    ``and``/``or`` evaluate lazily left-to-right."""

    op: str
    left: Expr
    right: Expr
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class UnaryNot(Expr):
    operand: Expr
    span: SourceSpan = field(compare=False, repr=False)


# ============================================================
# DECLARATIONS
# ============================================================


@dataclass(frozen=True)
class Definition:
    """Constant or function definition, or a body-less declaration inside an
    abstract block.

    Invariants:
    - param names pairwise distinct
    - abstract declarations have no body
    - zero params and a body means a constant
    """

    name: str
    params: tuple[tuple[str, TypeExpr], ...]
    result_type: Optional[TypeExpr]
    body: Optional[Expr]
    is_tailrec_annotated: bool = False
    leading_comments: tuple[str, ...] = ()
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]


@dataclass(frozen=True)
class TypeParam:
    """Class type parameter: plain ``[A : Type]`` or bounded
    ``[A subtype B]`` / ``[A supertype B]``."""

    name: str
    bound_kind: str = "none"  # "none" | "subtype" | "supertype"
    bound: Optional[TypeExpr] = None
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]


@dataclass(frozen=True)
class DirectiveBlock:
    """Verbatim code block considered only when translating to its target.

    raw_lines are stored dedented: the minimum leading whitespace over the
    non-blank lines has been stripped, and leading/trailing blank lines
    dropped. The lines themselves are never interpreted.
    """

    target: str
    raw_lines: tuple[str, ...]
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]


@dataclass(frozen=True)
class AbstractBlock:
    """Block of body-less declarations; their order fixes the default
    constructor's parameter order."""

    members: tuple[Definition, ...]
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]


ClassMember = Union[Definition, AbstractBlock, DirectiveBlock]


@dataclass(frozen=True)
class ClassDecl:
    """Class declaration: type parameters, extends list, and members kept in
    source order (so directive blocks can be spliced where they appeared).

    Invariants:
    - class name does not end in underscore (that suffix is reserved for
      the synthesized default constructor)
    - abstract members are body-less
    """

    name: str
    type_params: tuple[TypeParam, ...]
    extends_list: tuple[TypeExpr, ...]
    members: tuple[ClassMember, ...]
    leading_comments: tuple[str, ...] = ()
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    @property
    def abstract_members(self) -> tuple[Definition, ...]:
        out: list[Definition] = []
        for m in self.members:
            if isinstance(m, AbstractBlock):
                out.extend(m.members)
        return tuple(out)

    @property
    def definitions(self) -> tuple[Definition, ...]:
        return tuple(m for m in self.members if isinstance(m, Definition))

    @property
    def directives(self) -> tuple[DirectiveBlock, ...]:
        return tuple(m for m in self.members if isinstance(m, DirectiveBlock))


ProgramItem = Union[ClassDecl, DirectiveBlock]


@dataclass(frozen=True)
class Program:
    """A source file: optional package, imports, then classes and top-level
    directive blocks in source order. Class names are unique per program."""

    package_name: Optional[str]
    imports: tuple[str, ...]
    items: tuple[ProgramItem, ...]
    span: SourceSpan = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    @property
    def classes(self) -> tuple[ClassDecl, ...]:
        return tuple(i for i in self.items if isinstance(i, ClassDecl))

    @property
    def top_directives(self) -> tuple[DirectiveBlock, ...]:
        return tuple(i for i in self.items if isinstance(i, DirectiveBlock))


# ============================================================
# CANONICAL PRETTY-PRINTER
#
# The canonical form uses 2-space indentation, one blank line between
# declarations, `end` on its own line, and expressions on a single line
# with the minimum parenthesization that survives reparsing.
# ============================================================

# Precedence levels, tightest first. Used by the printer to decide where
# parentheses are required; the parser implements the same table.
PREC_ATOM = 9
PREC_APP = 8
PREC_UNARY = 7
PREC_MUL = 6
PREC_ADD = 5
PREC_CMP = 4
PREC_AND = 3
PREC_OR = 2
PREC_LOW = 1  # lambda / if / match bodies extend as far right as possible

BINARY_PRECEDENCE = {
    "*": PREC_MUL,
    "/": PREC_MUL,
    "+": PREC_ADD,
    "-": PREC_ADD,
    "==": PREC_CMP,
    "<": PREC_CMP,
    "<=": PREC_CMP,
    ">": PREC_CMP,
    ">=": PREC_CMP,
    "and": PREC_AND,
    "or": PREC_OR,
}


def escape_string(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def _expr_precedence(e: Expr) -> int:
    if isinstance(e, IntLiteral):
        # A negative literal renders with a leading minus, which binds like
        # subtraction when reparsed.
        return PREC_ATOM if e.value >= 0 else PREC_ADD
    if isinstance(e, (BoolLiteral, StringLiteral, Identifier, SelfRef)):
        return PREC_ATOM
    if isinstance(e, (Apply, NamedApply, TypeApply)):
        return PREC_APP
    if isinstance(e, UnaryNot):
        return PREC_UNARY
    if isinstance(e, BinaryOp):
        return BINARY_PRECEDENCE[e.op]
    return PREC_LOW  # Lambda, If, Match


def format_type(t: TypeExpr) -> str:
    if isinstance(t, NamedType):
        return t.name
    if isinstance(t, AppliedType):
        base = format_type(t.base)
        if isinstance(t.base, FunctionType):
            base = f"({base})"
        return base + "".join(f" [{format_type(a)}]" for a in t.args)
    if isinstance(t, FunctionType):
        dom = format_type(t.domain)
        if isinstance(t.domain, FunctionType):
            dom = f"({dom})"
        return f"{dom} --> {format_type(t.codomain)}"
    raise TypeError(f"not a TypeExpr: {t!r}")


def format_pattern(p: Pattern) -> str:
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
        return p.name + "".join(f" ({format_pattern(s)})" for s in p.sub_patterns)
    raise TypeError(f"not a Pattern: {p!r}")


def format_expr(e: Expr, context: int = PREC_LOW) -> str:
    """Render one expression on a single line, parenthesizing exactly where
    the rendered text would otherwise reparse differently."""
    text = _format_expr_bare(e)
    if _expr_precedence(e) < context:
        return f"({text})"
    return text


def _format_expr_bare(e: Expr) -> str:
    if isinstance(e, IntLiteral):
        return str(e.value)
    if isinstance(e, BoolLiteral):
        return "true" if e.value else "false"
    if isinstance(e, StringLiteral):
        return f'"{escape_string(e.value)}"'
    if isinstance(e, Identifier):
        return e.name
    if isinstance(e, SelfRef):
        return "this"
    if isinstance(e, Apply):
        return f"{format_expr(e.function, PREC_APP)} ({format_expr(e.argument, PREC_LOW)})"
    if isinstance(e, NamedApply):
        return f"{format_expr(e.function, PREC_APP)} ({e.param_name} := {format_expr(e.argument, PREC_LOW)})"
    if isinstance(e, TypeApply):
        return f"{format_expr(e.function, PREC_APP)} [{format_type(e.type_argument)}]"
    if isinstance(e, UnaryNot):
        return f"not {format_expr(e.operand, PREC_UNARY)}"
    if isinstance(e, BinaryOp):
        prec = BINARY_PRECEDENCE[e.op]
        left = format_expr(e.left, prec)
        right = format_expr(e.right, prec + 1)  # left-associative
        return f"{left} {e.op} {right}"
    if isinstance(e, Lambda):
        param = f"({e.param} : {format_type(e.param_type)})" if e.param_type else e.param
        return f"lambda {param} --> {format_expr(e.body, PREC_LOW)}"
    if isinstance(e, If):
        return (
            f"if {format_expr(e.cond, PREC_LOW)}"
            f" then {format_expr(e.then_branch, PREC_LOW)}"
            f" else {format_expr(e.else_branch, PREC_LOW)}"
        )
    if isinstance(e, Match):
        # Scrutinee and case results are followed by `case`: a bare
        # lambda/if/match tail there would swallow the next case arm.
        parts = [f"match {format_expr(e.scrutinee, PREC_OR)}"]
        for c in e.cases:
            parts.append(f"case {format_pattern(c.pattern)} ==> {format_expr(c.result, PREC_OR)}")
        return " ".join(parts)
    raise TypeError(f"not an Expr: {e!r}")


def _format_definition(d: Definition, indent: str) -> list[str]:
    lines = []
    for c in d.leading_comments:
        lines.append(f"{indent}//{c}")
    if d.is_tailrec_annotated:
        lines.append(f"{indent}@tailrec")
    head = d.name
    for pname, ptype in d.params:
        head += f" ({pname} : {format_type(ptype)})"
    if d.result_type is not None:
        head += f" : {format_type(d.result_type)}"
    if d.body is not None:
        head += f" = {format_expr(d.body, PREC_LOW)}"
    lines.append(indent + head)
    return lines


def _format_type_param(tp: TypeParam) -> str:
    if tp.bound_kind == "subtype":
        return f"[{tp.name} subtype {format_type(tp.bound)}]"
    if tp.bound_kind == "supertype":
        return f"[{tp.name} supertype {format_type(tp.bound)}]"
    return f"[{tp.name} : Type]"


def _format_directive(block: DirectiveBlock, indent: str) -> list[str]:
    lines = [f"{indent}directive {block.target}"]
    for raw in block.raw_lines:
        lines.append(f"{indent}  {raw}" if raw else "")
    return lines


def _format_class(c: ClassDecl) -> list[str]:
    lines = []
    for comment in c.leading_comments:
        lines.append(f"//{comment}")
    head = f"class {c.name}"
    for tp in c.type_params:
        head += f" {_format_type_param(tp)}"
    if c.extends_list:
        head += " extends " + " ".join(format_type(t) for t in c.extends_list)
    lines.append(head)
    lines.append("")
    for member in c.members:
        if isinstance(member, AbstractBlock):
            lines.append("  abstract")
            for decl in member.members:
                lines.extend(_format_definition(decl, "    "))
            lines.append("")
        elif isinstance(member, DirectiveBlock):
            lines.extend(_format_directive(member, "  "))
            lines.append("")
        else:
            lines.extend(_format_definition(member, "  "))
            lines.append("")
    lines.append("end")
    return lines


def pretty_print(program: Program) -> str:
    """Canonical Soda concrete syntax for a well-formed program.

    parse(pretty_print(p)) is structurally equal to p, and the printer is a
    fixpoint after one pass: pretty_print(parse(pretty_print(p))) equals
    pretty_print(p).
    """
    chunks: list[list[str]] = []
    if program.package_name:
        chunks.append([f"package {program.package_name}"])
    if program.imports:
        chunks.append([f"import {name}" for name in program.imports])
    for item in program.items:
        if isinstance(item, ClassDecl):
            chunks.append(_format_class(item))
        else:
            chunks.append(_format_directive(item, ""))
    if not chunks:
        return ""
    lines: list[str] = []
    for i, chunk in enumerate(chunks):
        if i:
            lines.append("")
        lines.extend(chunk)
    return "\n".join(lines) + "\n"
