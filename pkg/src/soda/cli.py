"""Command-line interface.

    soda check  FILE...              parse and analyze, report diagnostics
    soda scala  FILE... [-o OUT]     translate to Scala
    soda lean   FILE... [-o OUT]     translate to Lean
    soda run    FILE CLASS.DEF [ARG...]   evaluate an entry point
    soda fmt    FILE...              print the canonical form

Diagnostics go to stderr as ``file:line:col: severity[code]: message``.
Exit status: 0 on success, 1 when diagnostics or a fault were produced,
2 on usage errors. Output files are written atomically: either the whole
translation lands or the previous content stays.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import Optional

from .analyzer import AnalyzedProgram, analyze
from .interpreter import (
    DEFAULT_MAX_RECURSION,
    Interpreter,
    RuntimeFault,
    render_value,
)
from .lean_backend import translate_to_lean
from .parser import parse
from .scala_backend import translate_to_scala
from .syntax import Diagnostic, has_errors, pretty_print


def _emit(diagnostics: list[Diagnostic]) -> None:
    for d in diagnostics:
        print(d.render(), file=sys.stderr)


def _load(path: str) -> Optional[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        print(f"{path}: {ex.strerror or ex}", file=sys.stderr)
        return None


def _write_atomic(path: str, text: str) -> bool:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".soda-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
        return True
    except OSError as ex:
        print(f"{path}: {ex.strerror or ex}", file=sys.stderr)
        return False


def _analyze_file(path: str) -> Optional[AnalyzedProgram]:
    """Parse and analyze one file, reporting everything found. None when
    any stage produced errors."""
    source = _load(path)
    if source is None:
        return None
    parsed = parse(source, path)
    _emit(parsed.diagnostics)
    if parsed.program is None:
        return None
    analyzed = analyze(parsed.program)
    _emit(analyzed.diagnostics)
    if not analyzed.ok:
        return None
    return analyzed


# ---------- subcommands ----------


def _cmd_check(args) -> int:
    status = 0
    for path in args.files:
        if _analyze_file(path) is None:
            status = 1
    return status


def _default_output(path: str, extension: str) -> str:
    stem, _ = os.path.splitext(path)
    return stem + extension


def _cmd_translate(args, translate, extension: str) -> int:
    if args.output and len(args.files) != 1:
        print("-o requires exactly one input file", file=sys.stderr)
        return 2
    status = 0
    for path in args.files:
        analyzed = _analyze_file(path)
        if analyzed is None:
            status = 1
            continue
        rendering = translate(analyzed)
        diagnostics = getattr(rendering, "diagnostics", [])
        _emit(diagnostics)
        if rendering.text is None or has_errors(diagnostics):
            status = 1
            continue
        out_path = args.output or _default_output(path, extension)
        if not _write_atomic(out_path, rendering.text):
            status = 1
    return status


def _parse_run_argument(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        return text


def _cmd_run(args) -> int:
    analyzed = _analyze_file(args.file)
    if analyzed is None:
        return 1
    if "." not in args.entry:
        print(
            f"entry '{args.entry}' must be written as Class.definition",
            file=sys.stderr,
        )
        return 2
    class_name, def_name = args.entry.rsplit(".", 1)
    max_recursion = args.max_recursion
    if max_recursion is None:
        max_recursion = int(os.environ.get("SODA_MAX_RECURSION", DEFAULT_MAX_RECURSION))
    interpreter = Interpreter(analyzed, max_recursion=max_recursion)
    if class_name not in {c.name for c in analyzed.program.classes}:
        print(f"{args.file}: no class named '{class_name}'", file=sys.stderr)
        return 1
    values = [_parse_run_argument(a) for a in args.args]
    outcome = interpreter.run_entry(class_name, def_name, values)
    if isinstance(outcome, RuntimeFault):
        print(outcome.render(), file=sys.stderr)
        return 1
    print(render_value(outcome))
    return 0


def _cmd_fmt(args) -> int:
    status = 0
    for path in args.files:
        source = _load(path)
        if source is None:
            status = 1
            continue
        parsed = parse(source, path)
        _emit(parsed.diagnostics)
        if parsed.program is None:
            status = 1
            continue
        sys.stdout.write(pretty_print(parsed.program))
    return status


# ---------- argument parsing ----------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soda",
        description="Toolchain for the Soda specification language.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and analyze")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    p_check.set_defaults(fn=_cmd_check)

    for name, translate, extension in (
        ("scala", translate_to_scala, ".scala"),
        ("lean", translate_to_lean, ".lean"),
    ):
        p = sub.add_parser(name, help=f"translate to {name.capitalize()}")
        p.add_argument("files", nargs="+", metavar="FILE")
        p.add_argument("-o", "--output", help="output path (single input only)")
        p.set_defaults(
            fn=lambda a, t=translate, e=extension: _cmd_translate(a, t, e)
        )

    p_run = sub.add_parser("run", help="evaluate an entry point")
    p_run.add_argument("file", metavar="FILE")
    p_run.add_argument("entry", metavar="CLASS.DEF")
    p_run.add_argument("args", nargs="*", metavar="ARG")
    p_run.add_argument(
        "--max-recursion",
        type=int,
        default=None,
        help=f"recursion budget (default {DEFAULT_MAX_RECURSION},"
        " or SODA_MAX_RECURSION)",
    )
    p_run.set_defaults(fn=_cmd_run)

    p_fmt = sub.add_parser("fmt", help="print the canonical form")
    p_fmt.add_argument("files", nargs="+", metavar="FILE")
    p_fmt.set_defaults(fn=_cmd_fmt)

    return parser


def run_cli(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.fn(args)


def main() -> None:
    sys.exit(run_cli())
