"""Lexer for Soda source text.

Line-oriented scanner with offside-rule layout: indentation changes become
``indent``/``dedent`` tokens against a stack of indentation levels, and each
content line at bracket depth zero ends with a ``newline`` token. Inside
parentheses or brackets the layout tokens are suppressed, so bracketed
expressions may span lines freely.

Directive blocks are special: after a line whose first token is the
``directive`` reserved word, every following line that is blank or indented
deeper than the directive line is captured verbatim as a ``raw_line`` token.
Raw lines carry target-language text and are never scanned as Soda.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Diagnostic,
    RESERVED_WORDS,
    SourceSpan,
    Token,
    TokenKind,
    error,
)

# Multi-character lexemes first so maximal munch wins; "." only appears in
# qualified package and import names.
_OPERATOR_LEXEMES = [
    "-->", "==>",
    ":=", "==", "<=", ">=", "<:", ">:",
    ":", "=", "<", ">", "+", "-", "*", "/", ".",
]

_BRACKETS = {
    "(": TokenKind.OPEN_PAREN,
    ")": TokenKind.CLOSE_PAREN,
    "[": TokenKind.OPEN_BRACKET,
    "]": TokenKind.CLOSE_BRACKET,
}


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


@dataclass
class LexResult:
    tokens: list[Token]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


@dataclass
class _Scanner:
    """Mutable cursor over one source text. One instance per tokenize call."""

    source: str
    file: str
    tokens: list[Token] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    indent_stack: list[int] = field(default_factory=lambda: [0])
    bracket_depth: int = 0
    raw_mode: bool = False
    raw_threshold: int = 0

    def span(self, line: int, col_start: int, col_end: int) -> SourceSpan:
        return SourceSpan(self.file, line, col_start, line, col_end)

    def emit(self, kind: str, text: str, line: int, col_start: int, col_end: int) -> None:
        self.tokens.append(Token(kind, text, self.span(line, col_start, col_end)))

    def run(self) -> LexResult:
        lines = self.source.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        for lineno, raw in enumerate(lines, start=1):
            line = raw[:-1] if raw.endswith("\r") else raw
            if self.raw_mode and self._try_raw_line(line, lineno):
                continue
            self._scan_line(line, lineno)
        eof_line = len(lines) + 1
        while len(self.indent_stack) > 1:
            self.indent_stack.pop()
            self.emit(TokenKind.DEDENT, "", eof_line, 1, 1)
        self.emit(TokenKind.END_OF_INPUT, "", eof_line, 1, 1)
        return LexResult(self.tokens, self.diagnostics)

    # ---------- raw (directive) lines ----------

    def _try_raw_line(self, line: str, lineno: int) -> bool:
        """Capture one directive-body line; False ends raw mode and hands the
        line back to normal scanning."""
        if line.strip() == "":
            self.emit(TokenKind.RAW_LINE, "", lineno, 1, 1)
            return True
        indent = len(line) - len(line.lstrip(" \t"))
        if indent > self.raw_threshold:
            self.emit(TokenKind.RAW_LINE, line, lineno, 1, len(line) + 1)
            return True
        self.raw_mode = False
        return False

    # ---------- normal lines ----------

    def _measure_indent(self, line: str, lineno: int) -> int:
        col = 0
        tab_reported = False
        while col < len(line) and line[col] in " \t":
            if line[col] == "\t" and not tab_reported:
                self.diagnostics.append(
                    error("E-LEX-003", "tab character in indentation", self.span(lineno, col + 1, col + 2))
                )
                tab_reported = True
            col += 1
        return col

    def _apply_layout(self, indent: int, lineno: int) -> None:
        top = self.indent_stack[-1]
        if indent > top:
            self.indent_stack.append(indent)
            self.emit(TokenKind.INDENT, "", lineno, indent + 1, indent + 1)
            return
        while indent < self.indent_stack[-1]:
            self.indent_stack.pop()
            self.emit(TokenKind.DEDENT, "", lineno, indent + 1, indent + 1)
        if indent != self.indent_stack[-1]:
            self.diagnostics.append(
                error(
                    "E-LEX-004",
                    f"dedent to column {indent + 1} does not match any enclosing indentation level",
                    self.span(lineno, indent + 1, indent + 1),
                )
            )
            # Recover by adopting the nearest level below.
            self.indent_stack.append(indent)

    def _scan_line(self, line: str, lineno: int) -> None:
        if self.bracket_depth == 0:
            indent = self._measure_indent(line, lineno)
            rest = line[indent:]
            if rest == "":
                return
            if rest.startswith("//"):
                self.emit(TokenKind.COMMENT, rest, lineno, indent + 1, len(line) + 1)
                return
            self._apply_layout(indent, lineno)
            col = indent
        else:
            col = len(line) - len(line.lstrip(" \t"))

        first_token_index = len(self.tokens)
        line_opened_at_depth_zero = self.bracket_depth == 0
        col = self._scan_content(line, lineno, col)
        if self.bracket_depth == 0:
            self.emit(TokenKind.NEWLINE, "", lineno, len(line) + 1, len(line) + 1)
        if (
            line_opened_at_depth_zero
            and first_token_index < len(self.tokens)
            and self.tokens[first_token_index].kind == TokenKind.RESERVED_WORD
            and self.tokens[first_token_index].text == "directive"
        ):
            self.raw_mode = True
            self.raw_threshold = len(line) - len(line.lstrip(" \t"))

    def _scan_content(self, line: str, lineno: int, col: int) -> int:
        n = len(line)
        while col < n:
            ch = line[col]
            if ch in " \t":
                col += 1
                continue
            if line.startswith("//", col):
                self.emit(TokenKind.COMMENT, line[col:], lineno, col + 1, n + 1)
                return n
            if ch == '"':
                col = self._scan_string(line, lineno, col)
                continue
            if ch.isdigit():
                end = col
                while end < n and line[end].isdigit():
                    end += 1
                self.emit(TokenKind.INTEGER_LITERAL, line[col:end], lineno, col + 1, end + 1)
                col = end
                continue
            if _is_ident_start(ch):
                end = col
                while end < n and _is_ident_char(line[end]):
                    end += 1
                word = line[col:end]
                kind = TokenKind.RESERVED_WORD if word in RESERVED_WORDS else TokenKind.IDENTIFIER
                self.emit(kind, word, lineno, col + 1, end + 1)
                col = end
                continue
            if ch == "@":
                end = col + 1
                while end < n and _is_ident_char(line[end]):
                    end += 1
                if end == col + 1:
                    self.diagnostics.append(
                        error("E-LEX-002", "stray '@'", self.span(lineno, col + 1, col + 2))
                    )
                    col += 1
                    continue
                self.emit(TokenKind.ANNOTATION, line[col:end], lineno, col + 1, end + 1)
                col = end
                continue
            if ch in _BRACKETS:
                if ch in "([":
                    self.bracket_depth += 1
                else:
                    self.bracket_depth = max(0, self.bracket_depth - 1)
                self.emit(_BRACKETS[ch], ch, lineno, col + 1, col + 2)
                col += 1
                continue
            matched = False
            for lexeme in _OPERATOR_LEXEMES:
                if line.startswith(lexeme, col):
                    self.emit(
                        TokenKind.OPERATOR_SYMBOL, lexeme, lineno, col + 1, col + 1 + len(lexeme)
                    )
                    col += len(lexeme)
                    matched = True
                    break
            if matched:
                continue
            self.diagnostics.append(
                error("E-LEX-002", f"illegal character {ch!r}", self.span(lineno, col + 1, col + 2))
            )
            col += 1
        return col

    def _scan_string(self, line: str, lineno: int, col: int) -> int:
        """Scan a string literal from its opening quote. Only ``\\\"`` and
        ``\\\\`` escapes exist; anything else after a backslash is an error.
        An unterminated literal is closed at end of line."""
        n = len(line)
        end = col + 1
        while end < n:
            ch = line[end]
            if ch == '"':
                self.emit(TokenKind.STRING_LITERAL, line[col : end + 1], lineno, col + 1, end + 2)
                return end + 1
            if ch == "\\":
                if end + 1 < n and line[end + 1] in ('"', "\\"):
                    end += 2
                    continue
                bad = line[end : end + 2]
                self.diagnostics.append(
                    error(
                        "E-LEX-002",
                        f"illegal escape sequence {bad!r} in string literal",
                        self.span(lineno, end + 1, end + 1 + len(bad)),
                    )
                )
                end += 2
                continue
            end += 1
        self.diagnostics.append(
            error("E-LEX-001", "unterminated string literal", self.span(lineno, col + 1, n + 1))
        )
        self.emit(TokenKind.STRING_LITERAL, line[col:n], lineno, col + 1, n + 1)
        return n


def decode_string_text(text: str) -> str:
    """Decode a string literal lexeme (quotes included when present) to its
    value. Tolerates the recovery forms the scanner can produce."""
    body = text[1:] if text.startswith('"') else text
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(body[i + 1])
            i += 2
            continue
        if ch == '"':
            break
        out.append(ch)
        i += 1
    return "".join(out)


def tokenize(source: str, file: str = "<input>") -> LexResult:
    """Tokenize one Soda source text.

    Always returns a token list ending in ``end_of_input``, with balanced
    indent/dedent tokens, even when diagnostics were produced.
    """
    return _Scanner(source, file).run()
