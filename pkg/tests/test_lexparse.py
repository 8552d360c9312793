import math
import operator

import pytest
from hypothesis import given, settings, strategies as st

from batchss.errors import LexError, ParseError
from batchss.evaluator import Evaluator, same_value
from batchss.lexparse import Formula, parse_expression, parse_formula, parse_program, preprocess, render_formula, tokenize
from batchss.lexparse.nodes import (
    Assign, Binary, Call, Command, FormulaAssign, IncDec, RangeArg, RangeListAssign, Ref, Str, Sym,
    Ternary, Unary, Num,
)
from batchss.model import Sheet
from batchss.refs import MAX_COL, CellRef, Range, col_index, col_letters, parse_cellref


# preprocessing -------------------------------------------------------------

def test_line_comment_removed():
    assert preprocess("a0 = 1; // note") == "a0 = 1; "


def test_continuation_joined():
    assert preprocess("a0 = 1 + \\\n 2;") == "a0 = 1 +  2;"


def test_object_macro_expands():
    macros = {}
    assert preprocess("#define N 5\nb0 = N;", macros).strip() == "b0 = 5;"
    assert macros == {"N": "5"}


def test_block_comment_spans_lines():
    assert "x" not in preprocess("a0 = 1; /* x\n x */ b0 = 2;")


def test_macro_not_expanded_in_strings():
    assert preprocess('#define N 5\na0 = "N" + N;').strip() == 'a0 = "N" + 5;'


def test_macro_expansion_is_single_pass():
    text = preprocess("#define A B\n#define B 7\nx = A;", {})
    assert text.strip() == "x = B;"


def test_macro_whole_token_only():
    assert preprocess("#define N 5\nNN = N1 + N;", {}).strip() == "NN = N1 + 5;"


def test_unterminated_block_comment():
    with pytest.raises(LexError) as exc:
        preprocess("a0 = 1;\n/* never closed\n")
    assert exc.value.line == 2


# tokens --------------------------------------------------------------------

def kinds(text):
    return [(t.kind, t.lexeme) for t in tokenize(text)]


def test_compound_assignment_tokens():
    assert kinds("b0 += a0;") == [("cell", "b0"), ("op", "+="), ("cell", "a0"), ("punct", ";")]


def test_keyword_operators_case_insensitive():
    for word in ("AND", "and", "And"):
        toks = tokenize(f"x {word} y")
        assert toks[1].kind == "op" and toks[1].value == "&&"
    assert tokenize("NOT x")[0].value == "!"
    assert tokenize("x xor y")[1].value == "^"
    assert tokenize("x Or y")[1].value == "||"


def test_string_tokens_keep_contents_only():
    for text in ("'hi'", '"hi"'):
        (tok,) = tokenize(text)
        assert tok.kind == "string" and tok.value == "hi"


def test_no_escape_sequences():
    (tok,) = tokenize(r'"a\n"')
    assert tok.value == "a\\n"


def test_greedy_operators():
    assert [t.lexeme for t in tokenize("a<<=b>>c&&d++")] == ["a", "<<=", "b", ">>", "c", "&&", "d", "++"]


def test_unterminated_string():
    with pytest.raises(LexError):
        tokenize('a0 = "oops;')


def test_illegal_character():
    with pytest.raises(LexError):
        tokenize("a0 = 1 @ 2;")


def test_commands_lowercase_only():
    assert tokenize("print")[0].kind == "command"
    assert tokenize("PRINT")[0].kind == "ident"


def test_line_numbers_follow_newlines():
    toks = tokenize("a0\n\n b0", line=3)
    assert [t.line for t in toks] == [3, 5]


# cell references -----------------------------------------------------------

def test_zz9():
    ref = parse_cellref("ZZ9")
    assert (ref.col, ref.row, ref.col_fixed, ref.row_fixed) == (701, 9, False, False)


def test_fixed_a0():
    ref = parse_cellref("$B$9")
    assert (ref.col, ref.row, ref.col_fixed, ref.row_fixed) == (1, 9, True, True)


def test_bracketed_rc_offsets():
    ref = parse_cellref("R[]C[-1]")
    assert (ref.row, ref.col, ref.row_fixed, ref.col_fixed) == (0, -1, False, False)
    assert ref.notation == "RC"


def test_mixed_cr():
    ref = parse_cellref("c[+2]r7")
    assert (ref.row, ref.col, ref.row_fixed, ref.col_fixed, ref.notation) == (7, 2, True, False, "CR")


@pytest.mark.parametrize("bad", ["A1000", "AAA1", "R1000C0", "C702R0"])
def test_out_of_bounds(bad):
    with pytest.raises(ParseError):
        parse_cellref(bad)


def test_column_letters_known_points():
    assert [col_letters(k) for k in (0, 25, 26, 51, 52, 701)] == ["A", "Z", "AA", "AZ", "BA", "ZZ"]


def test_column_code_bijection():
    seen = set()
    for k in range(MAX_COL + 1):
        letters = col_letters(k)
        assert col_index(letters) == k
        assert col_index(letters.lower()) == k
        seen.add(letters)
    assert len(seen) == MAX_COL + 1


@given(st.integers(0, 999), st.integers(0, MAX_COL))
def test_notation_equivalence(row, col):
    spellings = [f"{col_letters(col)}{row}", f"R{row}C{col}", f"C{col}R{row}",
                 f"${col_letters(col)}${row}", f"r{row}c{col}"]
    owner = (row, col)
    targets = {parse_formula(s, (5, 5)).ref.resolve((5, 5)) for s in spellings}
    assert targets == {owner}


# statements ----------------------------------------------------------------

def test_copy_statement():
    (stmt,) = parse_program("copy a2:a5 a1:a4;")
    assert isinstance(stmt, Command) and stmt.keyword == "copy"
    dest, src = stmt.ranges
    assert dest.start.resolve((0, 0)) == (2, 0) and dest.end.resolve((0, 0)) == (5, 0)
    assert src.start.resolve((0, 0)) == (1, 0) and src.end.resolve((0, 0)) == (4, 0)


def test_range_list_statement():
    (stmt,) = parse_program("b1:b5 = { 57, 67, 92, 87, 76 };")
    assert isinstance(stmt, RangeListAssign)
    assert [item.value for item in stmt.items] == [57, 67, 92, 87, 76]


def test_symbol_assignment_statement():
    (stmt,) = parse_program("mean=avg(b1:b5);")
    assert isinstance(stmt, FormulaAssign) and stmt.target == "mean"
    assert isinstance(stmt.root, Call) and stmt.root.name == "avg"
    assert isinstance(stmt.root.args[0], RangeArg)


def test_compound_statement_keeps_operator():
    (stmt,) = parse_program("b0 += a0;")
    assert stmt.target == (0, 1)
    assert isinstance(stmt.root, Assign) and stmt.root.op == "+="


def test_unknown_statement():
    with pytest.raises(ParseError):
        parse_program("frobnicate 3;")


def test_assign_to_constant_rejected():
    with pytest.raises(ParseError):
        parse_program("pi = 3;")


def test_range_outside_call_rejected():
    with pytest.raises(ParseError):
        parse_expression("a0:b1 + 1")


def test_assignment_needs_lvalue():
    with pytest.raises(ParseError):
        parse_expression("(a0+1) = 3")
    with pytest.raises(ParseError):
        parse_expression("++3")


def test_comma_operator_not_supported():
    with pytest.raises(ParseError):
        parse_expression("1, 2")


# expressions ---------------------------------------------------------------

def test_newton_ternary_shape():
    node = parse_expression("b0 ? b0 : x/2")
    assert isinstance(node, Ternary)
    assert isinstance(node.cond, Ref) and isinstance(node.then, Ref)
    assert node.other == Binary("/", Sym("x"), Num(2.0))


def test_logical_and_under_ternary():
    node = parse_expression("(sample>=a1)&&(sample<a2) ? 1 : 0")
    assert isinstance(node, Ternary) and isinstance(node.cond, Binary) and node.cond.op == "&&"


def test_division_by_preincrement():
    node = parse_expression("b0/++c0")
    assert isinstance(node, Binary) and node.op == "/"
    assert isinstance(node.right, IncDec) and node.right.prefix


def test_assignment_right_associative():
    node = parse_expression("a = b = 3")
    assert isinstance(node, Assign) and isinstance(node.value, Assign)


def test_ternary_right_associative():
    node = parse_expression("a ? 1 : b ? 2 : 3")
    assert isinstance(node.other, Ternary)


def test_string_literal():
    assert parse_expression("'hi'") == Str("hi")


# precedence conformance ----------------------------------------------------
# The oracle below is a separate shunting-yard evaluator with its own table
# of C precedences; it shares nothing with the parser.

C_BINARY = {
    "*": 13, "/": 13, "%": 13, "+": 12, "-": 12, "<<": 11, ">>": 11,
    "<": 10, "<=": 10, ">": 10, ">=": 10, "==": 9, "!=": 9,
    "&": 8, "^": 7, "|": 6, "&&": 5, "||": 4,
}


def _truth(x):
    return 1.0 if x != 0 else 0.0


def _shift(x, n, sign):
    if math.isnan(n):
        return math.nan
    if math.isinf(n):
        return x * math.inf if n * sign > 0 else x * 0.0
    n = int(n) * sign
    try:
        return math.ldexp(x, n)
    except OverflowError:
        return math.copysign(math.inf, x)


def _div(a, b):
    if b == 0:
        if a == 0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _fmod(a, b):
    if b == 0 or math.isinf(a) or math.isnan(a) or math.isnan(b):
        return math.nan
    return math.fmod(a, b)


ORACLE_OPS = {
    "*": operator.mul, "/": _div, "%": _fmod, "+": operator.add, "-": operator.sub,
    "<<": lambda a, b: _shift(a, b, 1), ">>": lambda a, b: _shift(a, b, -1),
    "<": lambda a, b: float(a < b), "<=": lambda a, b: float(a <= b),
    ">": lambda a, b: float(a > b), ">=": lambda a, b: float(a >= b),
    "==": lambda a, b: float(a == b), "!=": lambda a, b: float(a != b),
    "&": lambda a, b: float(bool(a) and bool(b)), "^": lambda a, b: float(bool(a) != bool(b)),
    "|": lambda a, b: float(bool(a) or bool(b)),
    "&&": lambda a, b: float(bool(a) and bool(b)), "||": lambda a, b: float(bool(a) or bool(b)),
}


def oracle_eval(tokens):
    """Evaluate ``[operand, op, operand, ...]`` where operands are
    ``(prefix_ops, number)`` pairs, using shunting-yard."""
    out, ops = [], []

    def reduce():
        op = ops.pop()
        b, a = out.pop(), out.pop()
        out.append(ORACLE_OPS[op](a, b))

    for i, tok in enumerate(tokens):
        if i % 2 == 0:
            prefixes, value = tok
            for p in reversed(prefixes):
                value = {"-": lambda v: -v, "!": lambda v: 1.0 - _truth(v),
                         "~": lambda v: 1.0 - _truth(v)}[p](value)
            out.append(value)
        else:
            while ops and C_BINARY[ops[-1]] >= C_BINARY[tok]:
                reduce()
            ops.append(tok)
    while ops:
        reduce()
    return out[0]


operand = st.tuples(st.lists(st.sampled_from(["-", "!", "~"]), max_size=2),
                    st.integers(0, 9).map(float))


@st.composite
def flat_expressions(draw):
    n = draw(st.integers(1, 7))
    toks = [draw(operand)]
    for _ in range(n):
        toks.append(draw(st.sampled_from(sorted(C_BINARY))))
        toks.append(draw(operand))
    return toks


def flat_text(tokens):
    parts = []
    for i, tok in enumerate(tokens):
        if i % 2 == 0:
            prefixes, value = tok
            # a space keeps "- -3" from lexing as a decrement
            parts.append(" ".join(prefixes + [str(int(value))]))
        else:
            parts.append(tok)
    return " ".join(parts)


@settings(max_examples=1500, deadline=None)
@given(flat_expressions())
def test_precedence_matches_c_oracle(tokens):
    ev = Evaluator(Sheet())
    got = ev.eval_tree(parse_expression(flat_text(tokens)))
    want = oracle_eval(tokens)
    assert same_value(got, want) or (got == want), (flat_text(tokens), got, want)


def test_precedence_spot_checks():
    ev = Evaluator(Sheet())
    cases = {
        "1 + 2 * 3": 7.0, "1 << 2 + 1": 8.0, "1 < 2 == 1": 1.0, "2 | 0 & 0": 1.0,
        "1 || 0 && 0": 1.0, "-2 * -3": 6.0, "!0 + 1": 2.0, "10 - 4 - 3": 3.0,
        "2 ^ 2": 0.0, "7 % 4 * 2": 6.0, "1 XOR 0": 1.0, "NOT 1 OR 0": 0.0,
    }
    for text, want in cases.items():
        assert ev.eval_tree(parse_expression(text)) == want, text


# render / parse round trip -------------------------------------------------

SYMBOLS = ["x", "mean", "sample", "trials"]
UNARY_FUNCS = ["sqrt", "fabs", "floor", "sin", "exp"]
BINARY_OPS = sorted(C_BINARY)
OWNER = (20, 20)


def _refs():
    rel = st.tuples(st.integers(-20, 20), st.just(False))
    fixed_row = st.tuples(st.integers(0, 40), st.just(True))
    fixed_col = st.tuples(st.integers(0, 40), st.just(True))
    return st.builds(
        lambda r, c, n: Ref(CellRef(r[0], c[0], r[1], c[1], n)),
        st.one_of(rel, fixed_row), st.one_of(rel, fixed_col),
        st.sampled_from(["A0", "RC", "CR"]),
    )


numbers = st.one_of(
    st.integers(-1000, 1000).map(float),
    st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
    st.sampled_from([0.1, 1e-7, 2.5e300, math.inf]),
)

leaves = st.one_of(numbers.map(Num), _refs(), st.sampled_from(SYMBOLS).map(Sym),
                   st.sampled_from(["a", "text"]).map(Str))


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["-", "!", "~", "+"]), children),
        st.builds(Binary, st.sampled_from(BINARY_OPS), children, children),
        st.builds(Ternary, children, children, children),
        st.builds(lambda f, a: Call(f, (a,)), st.sampled_from(UNARY_FUNCS), children),
        st.builds(lambda a, b: Call("pow", (a, b)), children, children),
        st.builds(lambda a, b: Call("sum", (RangeArg(Range(a.ref, b.ref)),)), _refs(), _refs()),
    )


formulas = st.recursive(leaves, _extend, max_leaves=12)


def _populated_sheet():
    sheet = Sheet()
    for r in range(41):
        for c in range(41):
            if (r * 7 + c * 3) % 5:
                sheet.set_formula((r, c), Formula(Num((r - c) * 0.75 + 0.5)))
    for i, name in enumerate(SYMBOLS):
        sheet.sym_values[name] = i * 1.5 - 2
    return sheet


SHEET = _populated_sheet()
EVAL = Evaluator(SHEET)


@pytest.mark.parametrize("mode", ["A0", "RC", "CR"])
@settings(max_examples=1000, deadline=None)
@given(node=formulas)
def test_render_parse_round_trip(mode, node):
    text = render_formula(node, OWNER, mode)
    reparsed = parse_formula(text, OWNER)
    want = EVAL.eval_tree(node, OWNER)
    got = EVAL.eval_tree(reparsed, OWNER)
    assert same_value(got, want), (text, got, want)


def test_render_grading_formula_per_owner():
    node = parse_formula("80+15*(b1-mean)/$d$1", (1, 0))
    assert render_formula(node, (1, 0)) == "80+((15*(B1-mean))/$D$1)"
    assert render_formula(node, (2, 0)) == "80+((15*(B2-mean))/$D$1)"


def test_render_literals():
    assert render_formula(Num(57.0)) == "57"
    assert render_formula(Str("grade")) == '"grade"'


def test_render_modes():
    node = parse_formula("b0 ? b0 : x/2", (0, 0))
    assert render_formula(node, (0, 0), "RC") == "R0C1 ? R0C1 : (x/2)"
    assert render_formula(node, (0, 0), "CR") == "C1R0 ? C1R0 : (x/2)"


def test_render_out_of_bounds_marker():
    node = parse_formula("R[]C[-1]", (0, 0))
    assert render_formula(node, (0, 0)) == "#REF"
    assert render_formula(node, (0, 1)) == "A0"
