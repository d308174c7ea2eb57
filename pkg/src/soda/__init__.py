"""Toolchain for the Soda specification language: lexing, parsing,
structural analysis, translation to Scala and Lean, and a reference
interpreter for the purely functional core."""

from .analyzer import (
    AnalyzedProgram,
    ConstructorSignature,
    analyze,
    check_single_definition,
    filter_directives,
    resolve_named_arguments,
    synthesize_constructors,
    verify_tailrec,
)
from .interpreter import (
    DEFAULT_MAX_RECURSION,
    Interpreter,
    RuntimeFault,
    builtin_fold,
    builtin_range,
    render_value,
)
from .lean_backend import (
    LeanRendering,
    check_lean_supported,
    translate_match_to_lean,
    translate_to_lean,
)
from .lexer import LexResult, tokenize
from .parser import ParseResult, parse, parse_expression
from .scala_backend import (
    ScalaRendering,
    translate_definition_to_scala,
    translate_to_scala,
    translate_type_to_scala,
)
from .syntax import (
    DIAGNOSTIC_CODES,
    Diagnostic,
    Program,
    SourceSpan,
    Token,
    TokenKind,
    format_expr,
    pretty_print,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyzedProgram",
    "ConstructorSignature",
    "DEFAULT_MAX_RECURSION",
    "DIAGNOSTIC_CODES",
    "Diagnostic",
    "Interpreter",
    "LeanRendering",
    "LexResult",
    "ParseResult",
    "Program",
    "RuntimeFault",
    "ScalaRendering",
    "SourceSpan",
    "Token",
    "TokenKind",
    "analyze",
    "builtin_fold",
    "builtin_range",
    "check_lean_supported",
    "check_single_definition",
    "filter_directives",
    "format_expr",
    "parse",
    "parse_expression",
    "pretty_print",
    "render_value",
    "resolve_named_arguments",
    "synthesize_constructors",
    "translate_definition_to_scala",
    "translate_match_to_lean",
    "translate_to_lean",
    "translate_to_scala",
    "translate_type_to_scala",
    "verify_tailrec",
]
