"""Grammar coverage: expressions, declarations, layout, and error codes."""

from soda import parse, parse_expression, tokenize
from soda.syntax import (
    Apply,
    BinaryOp,
    BoolLiteral,
    ConstructorPattern,
    FunctionType,
    Identifier,
    If,
    IntLiteral,
    Lambda,
    LiteralPattern,
    Match,
    NamedApply,
    NamedType,
    SelfRef,
    StringLiteral,
    TypeApply,
    UnaryNot,
    VarBindPattern,
    WildcardPattern,
    synthetic_span,
)

# spans are excluded from node equality, so one synthetic span serves for all
S = synthetic_span()


def parse_ok(source):
    res = parse(source, "test.soda")
    assert res.ok, [d.render() for d in res.diagnostics]
    return res.program


def errors_of(source):
    res = parse(source, "test.soda")
    return [d.code for d in res.diagnostics if d.severity == "error"]


def body_of(source_expr):
    prog = parse_ok(f"class A\n\n  probe = {source_expr}\n\nend\n")
    return prog.classes[0].definitions[0].body


def test_minimal_class():
    prog = parse_ok("class Point\n\n  x : Int = 1\n\nend\n")
    cls = prog.classes[0]
    assert cls.name == "Point"
    assert [d.name for d in cls.definitions] == ["x"]
    assert cls.definitions[0].body == IntLiteral(1, S)


def test_arithmetic_precedence():
    assert body_of("1 + 2 * 3") == BinaryOp(
        "+", IntLiteral(1, S), BinaryOp("*", IntLiteral(2, S), IntLiteral(3, S), S), S
    )
    assert body_of("(1 + 2) * 3") == BinaryOp(
        "*", BinaryOp("+", IntLiteral(1, S), IntLiteral(2, S), S), IntLiteral(3, S), S
    )


def test_subtraction_is_left_associative():
    assert body_of("10 - 3 - 2") == BinaryOp(
        "-", BinaryOp("-", IntLiteral(10, S), IntLiteral(3, S), S), IntLiteral(2, S), S
    )


def test_boolean_operators_bind_looser_than_comparison():
    e = body_of("1 < 2 and 3 < 4 or false")
    assert isinstance(e, BinaryOp) and e.op == "or"
    assert isinstance(e.left, BinaryOp) and e.left.op == "and"


def test_not_binds_tighter_than_and():
    e = body_of("not true and false")
    assert e == BinaryOp(
        "and", UnaryNot(BoolLiteral(True, S), S), BoolLiteral(False, S), S
    )


def test_negative_literal_is_folded():
    assert body_of("-5") == IntLiteral(-5, S)
    assert body_of("1 - -5") == BinaryOp("-", IntLiteral(1, S), IntLiteral(-5, S), S)


def test_unary_minus_on_expression_becomes_zero_minus():
    assert body_of("- x") == BinaryOp("-", IntLiteral(0, S), Identifier("x", S), S)


def test_application_requires_parenthesized_arguments():
    assert body_of("f (1) (2)") == Apply(
        Apply(Identifier("f", S), IntLiteral(1, S), S), IntLiteral(2, S), S
    )


def test_application_binds_tighter_than_operators():
    e = body_of("f (1) + g (2)")
    assert isinstance(e, BinaryOp) and e.op == "+"
    assert isinstance(e.left, Apply) and isinstance(e.right, Apply)


def test_named_argument_application():
    assert body_of("f (snd := 2)") == NamedApply(
        Identifier("f", S), "snd", IntLiteral(2, S), S
    )


def test_type_argument_application():
    assert body_of("f [Int]") == TypeApply(
        Identifier("f", S), NamedType("Int", S), S
    )


def test_lambda_multi_parameter_sugar_nests_right():
    assert body_of("lambda x y --> x") == Lambda(
        "x", None, Lambda("y", None, Identifier("x", S), S), S
    )


def test_lambda_typed_parameter():
    assert body_of("lambda (n : Int) --> n") == Lambda(
        "n", NamedType("Int", S), Identifier("n", S), S
    )


def test_if_requires_else():
    assert body_of("if a then 1 else 2") == If(
        Identifier("a", S), IntLiteral(1, S), IntLiteral(2, S), S
    )
    assert "E-PAR-010" in errors_of("class A\n\n  x = if a then 1\n\nend\n")


def test_match_with_cases():
    e = body_of('match n case 0 ==> "zero" case _ ==> "more"')
    assert isinstance(e, Match)
    assert e.scrutinee == Identifier("n", S)
    assert e.cases[0].pattern == LiteralPattern(0, S)
    assert e.cases[0].result == StringLiteral("zero", S)
    assert e.cases[1].pattern == WildcardPattern(S)


def test_match_requires_at_least_one_case():
    assert "E-PAR-011" in errors_of("class A\n\n  x = match y\n\nend\n")


def test_nested_match_in_case_result_needs_parentheses():
    e = body_of("match a case 1 ==> (match b case 2 ==> 3) case _ ==> 9")
    assert len(e.cases) == 2
    inner = e.cases[0].result
    assert isinstance(inner, Match) and len(inner.cases) == 1


def test_constructor_pattern_shapes():
    e = body_of("match p case Pair_ (a) (b) ==> a case Nil_ ==> 0 case x ==> x")
    pats = [c.pattern for c in e.cases]
    assert pats[0] == ConstructorPattern(
        "Pair_", (VarBindPattern("a", S), VarBindPattern("b", S)), S
    )
    assert pats[1] == ConstructorPattern("Nil_", (), S)
    assert pats[2] == VarBindPattern("x", S)


def test_negative_literal_pattern():
    e = body_of("match n case -1 ==> true case _ ==> false")
    assert e.cases[0].pattern == LiteralPattern(-1, S)


def test_this_parses_to_self_reference():
    assert body_of("this") == SelfRef(S)


def test_bad_pattern_reports_dedicated_code():
    assert "E-PAR-012" in errors_of(
        "class A\n\n  x = match y case + ==> 1\n\nend\n"
    )


def test_function_types_are_right_associative():
    prog = parse_ok("class A\n\n  f : Int --> Int --> Bool = g\n\nend\n")
    t = prog.classes[0].definitions[0].result_type
    assert t == FunctionType(
        NamedType("Int", S),
        FunctionType(NamedType("Int", S), NamedType("Bool", S), S),
        S,
    )


def test_body_continues_on_deeper_indented_lines():
    prog = parse_ok(
        "class A\n\n  big : Int =\n    1 +\n      2\n\n  next : Int = 3\n\nend\n"
    )
    defs = prog.classes[0].definitions
    assert defs[0].body == BinaryOp("+", IntLiteral(1, S), IntLiteral(2, S), S)
    assert defs[1].body == IntLiteral(3, S)


def test_blank_lines_do_not_end_a_continued_body():
    prog = parse_ok("class A\n\n  big : Int = 1 +\n\n    2\n\nend\n")
    assert prog.classes[0].definitions[0].body == BinaryOp(
        "+", IntLiteral(1, S), IntLiteral(2, S), S
    )


def test_abstract_block_members_are_typed_and_bodiless():
    prog = parse_ok(
        "class P\n\n  abstract\n    fst : Int\n    snd : Int\n\nend\n"
    )
    names = [m.name for m in prog.classes[0].abstract_members]
    assert names == ["fst", "snd"]
    assert all(m.body is None for m in prog.classes[0].abstract_members)


def test_abstract_member_requires_a_type():
    assert "E-PAR-001" in errors_of("class P\n\n  abstract\n    fst\n\nend\n")


def test_extends_inline_and_as_first_member_line():
    inline = parse_ok("class A extends P Q\n\n  x = 1\n\nend\n")
    assert inline.classes[0].extends_list == (
        NamedType("P", S), NamedType("Q", S))
    form2 = parse_ok("class A\n\n  extends P\n\n  x = 1\n\nend\n")
    assert form2.classes[0].extends_list == (NamedType("P", S),)


def test_type_parameters_with_bounds():
    prog = parse_ok(
        "class A [X : Type] [Y subtype X] [Z supertype Y]\n\n  v = 1\n\nend\n"
    )
    tps = prog.classes[0].type_params
    assert [tp.name for tp in tps] == ["X", "Y", "Z"]
    assert [tp.bound_kind for tp in tps] == ["none", "subtype", "supertype"]
    assert tps[1].bound == NamedType("X", S)


def test_bound_symbol_spellings_are_accepted():
    prog = parse_ok("class A [Y <: Q] [Z >: Q]\n\n  v = 1\n\nend\n")
    tps = prog.classes[0].type_params
    assert [tp.bound_kind for tp in tps] == ["subtype", "supertype"]


def test_tailrec_annotation_attaches_to_next_definition():
    prog = parse_ok(
        "class A\n\n  @tailrec\n  loop (n : Int) : Int = loop (n)\n\nend\n"
    )
    assert prog.classes[0].definitions[0].is_tailrec_annotated


def test_package_and_imports():
    prog = parse_ok(
        "package com.example.core\n\nimport a.b\nimport c\n\n"
        "class A\n\n  x = 1\n\nend\n"
    )
    assert prog.package_name == "com.example.core"
    assert prog.imports == ("a.b", "c")


def test_package_must_come_first():
    assert "E-PAR-003" in errors_of(
        "import a.b\n\npackage late\n\nclass A\n\n  x = 1\n\nend\n"
    )


def test_class_name_must_not_end_in_underscore():
    assert "E-PAR-004" in errors_of("class Broken_\n\n  x = 1\n\nend\n")


def test_missing_end_is_reported():
    assert "E-PAR-002" in errors_of("class A\n\n  x = 1\n")


def test_directive_lines_are_normalized():
    prog = parse_ok(
        "directive coq\n    Line one.\n\n      Indented.\n"
    )
    block = prog.top_directives[0]
    assert block.target == "coq"
    assert block.raw_lines == ("Line one.", "", "  Indented.")


def test_directives_keep_their_position_among_members():
    prog = parse_ok(
        "class A\n\n  x = 1\n\n  directive scala\n    val y = 2\n\n  z = 3\n\nend\n"
    )
    kinds = [type(m).__name__ for m in prog.classes[0].members]
    assert kinds == ["Definition", "DirectiveBlock", "Definition"]


def test_leading_comments_attach_to_declarations():
    prog = parse_ok(
        "// the whole point\nclass A\n\n  // doubles its input\n"
        "  twice (n : Int) : Int = n * 2\n\nend\n"
    )
    assert prog.classes[0].leading_comments == (" the whole point",)
    assert prog.classes[0].definitions[0].leading_comments == (
        " doubles its input",)


def test_program_is_none_exactly_when_errors_exist():
    good = parse("class A\n\n  x = 1\n\nend\n")
    assert good.ok and good.program is not None
    bad = parse("class A\n\n  x = \n\nend\n")
    assert not bad.ok and bad.program is None


def test_recovery_reports_errors_in_later_classes_too():
    res = parse(
        "class A\n\n  x = if 1 then 2\n\nend\n\n"
        "class B\n\n  y = match z\n\nend\n",
        "t.soda",
    )
    assert "E-PAR-010" in [d.code for d in res.diagnostics]
    assert "E-PAR-011" in [d.code for d in res.diagnostics]


def test_parse_expression_entry_point():
    toks = tokenize("Pair_ (1) (2)").tokens
    expr, _ = parse_expression(toks)
    assert expr == Apply(
        Apply(Identifier("Pair_", S), IntLiteral(1, S), S), IntLiteral(2, S), S
    )


def test_diagnostic_positions_are_one_based():
    res = parse("class A\n\n  x = if 1 then 2\n\nend\n", "pos.soda")
    err = [d for d in res.diagnostics if d.code == "E-PAR-010"][0]
    assert err.span.line_start == 3
    assert err.span.col_start >= 1
    assert "pos.soda:3:" in err.render()
