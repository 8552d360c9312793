import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from batchss.evaluator import ConvergenceReport, Evaluator, detect_change, same_value
from batchss.lexparse import Formula, parse_expression, parse_formula
from batchss.lexparse.nodes import Num, Str
from batchss.model import Sheet
from batchss.refs import col_letters


def ev_text(text, sheet=None, owner=(0, 0)):
    sheet = sheet or Sheet()
    return Evaluator(sheet).eval_tree(parse_formula(text, owner), owner)


# single expressions --------------------------------------------------------

def test_shift_is_ldexp():
    assert ev_text("3 << 2") == math.ldexp(3, 2) == 12.0
    assert ev_text("3 >> 2") == 0.75
    assert ev_text("1 << 2.9") == 4.0
    assert ev_text("1 << -1.5") == 0.5


def test_string_in_numeric_position():
    assert ev_text('"x" + 5') == 5.0


def test_newton_initial_value():
    sheet = Sheet()
    sheet.define_symbol("x", Formula(Num(2.0)))
    sheet.set_formula((0, 1), Formula(Num(0.0)))
    assert ev_text("b0 ? b0 : x/2", sheet) == 1.0


def test_logicals_yield_unit_values():
    assert ev_text("3 && 4") == 1.0
    assert ev_text("0 || -2") == 1.0
    assert ev_text("!5") == 0.0
    assert ev_text("~0") == 1.0
    assert ev_text("2 & 4") == 1.0
    assert ev_text("2 | 0") == 1.0
    assert ev_text("2 ^ 4") == 0.0


def test_ieee_division():
    assert ev_text("1/0") == math.inf
    assert ev_text("-1/0") == -math.inf
    assert math.isnan(ev_text("0/0"))
    assert ev_text("1/(0*-1)") == -math.inf


def test_modulo_is_fmod():
    assert ev_text("7.5 % 2") == 1.5
    assert ev_text("-7 % 3") == -1.0
    assert math.isnan(ev_text("1 % 0"))


def test_undefined_cell_is_zero():
    assert ev_text("z99 + 1") == 1.0


def test_out_of_bounds_reference_is_zero():
    assert ev_text("R[-1]C[] + 2", owner=(0, 0)) == 2.0


def test_assignment_writes_through():
    sheet = Sheet()
    ev = Evaluator(sheet)
    assert ev.eval_tree(parse_formula("c3 = 4", (0, 0))) == 4.0
    assert sheet.value((3, 2)) == 4.0
    assert ev.eval_tree(parse_formula("c3 *= 2", (0, 0))) == 8.0
    assert ev.eval_tree(parse_formula("c3++", (0, 0))) == 8.0
    assert ev.eval_tree(parse_formula("--c3", (0, 0))) == 8.0
    assert ev.eval_tree(parse_formula("c3 <<= 1", (0, 0))) == 16.0
    assert ev.eval_tree(parse_formula("c3 %= 5", (0, 0))) == 1.0
    assert ev.eval_tree(parse_formula("c3 &= 0", (0, 0))) == 0.0
    assert ev.eval_tree(parse_formula("c3 |= 7", (0, 0))) == 1.0
    assert ev.eval_tree(parse_formula("c3 ^= 1", (0, 0))) == 0.0


def test_increment_of_string_coerces():
    sheet = Sheet()
    sheet.set_formula((0, 0), Formula(Str("text")))
    assert ev_text("++a0", sheet) == 1.0
    assert sheet.value((0, 0)) == 1.0


def test_symbol_assignment():
    sheet = Sheet()
    Evaluator(sheet).eval_tree(parse_formula("k += 3"))
    assert sheet.symbol_value("k") == 3.0


def test_arity_mismatch_reports_and_yields_zero(run):
    r = run("a0 = sqrt(1, 2) + 5; eval;")
    assert "sqrt" in r.err and "argument" in r.err
    assert r.value("a0") == 5.0


def test_unknown_function_reports(run):
    r = run("a0 = nosuch(1) + 1; eval;")
    assert "nosuch" in r.err
    assert r.value("a0") == 1.0


def test_short_circuit_skips_side_effects(run):
    r = run("a0 = 0 && (b0 = 5); c0 = 1 || ++d0; e0 = 1 ? 2 : ++f0; eval;")
    assert r.value("a0") == 0.0 and r.value("c0") == 1.0 and r.value("e0") == 2.0
    assert r.value("b0") is None and r.value("d0") is None and r.value("f0") is None


def test_short_circuit_skips_function_calls():
    calls = []
    sheet = Sheet()
    from batchss.funcs import FunctionEntry, register_user_function
    register_user_function(sheet.functions, FunctionEntry(
        "probe", "numeric", 0, "records a call", lambda args, ctx: calls.append(1) or 1.0, template=True))
    ev = Evaluator(sheet)
    ev.eval_tree(parse_expression("0 && probe()"))
    ev.eval_tree(parse_expression("1 || probe()"))
    assert calls == []
    ev.eval_tree(parse_expression("1 && probe()"))
    assert calls == [1]


# change detection ----------------------------------------------------------

def test_same_value_is_bitwise():
    assert same_value(math.nan, math.nan)
    assert not same_value(0.0, -0.0)
    assert same_value("a", "a") and not same_value("a", 0.0)


def test_detect_change():
    assert not detect_change({"a": 1.0, "b": math.nan}, {"a": 1.0, "b": math.nan})
    assert detect_change({"a": 1.0}, {"a": 1.0 + 2 ** -52})
    assert detect_change({"s": "x"}, {"s": "y"})


def test_report_messages():
    assert ConvergenceReport(7, True).message == "ss_eval: converged after 7 iterations"
    assert ConvergenceReport(1, True).message == "ss_eval: converged after 1 iteration"
    assert ConvergenceReport(10, False).message == "ss_eval: still changing after 10 iterations"


# iteration semantics -------------------------------------------------------

def test_empty_sheet_converges_at_once(run):
    r = run("eval;")
    assert r.err.strip() == "ss_eval: converged after 1 iteration"


def test_single_literal_range(run):
    r = run("a0 = 1; eval a0:a0 1;")
    assert r.err.strip() == "ss_eval: converged after 1 iteration"


@pytest.mark.parametrize("n", [1, 2, 7, 50])
def test_pass_count_range(run, n):
    r = run(f"c0 += 1; eval c0:c0 {n};")
    assert r.value("c0") == float(n)
    assert r.session.last_report.iterations == n and not r.session.last_report.converged


@pytest.mark.parametrize("n", [1, 2, 7, 50])
def test_pass_count_sheet(run, n):
    r = run(f"c0 += 1; eval {n};")
    assert r.value("c0") == float(2 * n)
    assert not r.session.last_report.converged


def test_symbols_evaluated_once_per_iteration(run):
    r = run("k += 1; eval symbols 5; a0 = 1; eval 3;")
    assert r.sheet.symbol_value("k") == 8.0


def test_eval_symbols_only_touches_symbols(run):
    r = run("a0 += 1; s = 2 * 3; eval symbols;")
    assert r.sheet.symbol_value("s") == 6.0
    assert r.value("a0") == 0.0


def test_eval_range_direction(run):
    # b0 reads a0; the range walked right-to-left sees the stale a0
    r = run("a0 = 5; b0 = a0 + c0; c0 = 1; eval c0:a0 1;")
    assert r.value("b0") == 6.0
    r = run("x = 1; a0 = x; b0 = a0; eval b0:a0 1;")
    assert r.value("b0") == 0.0 and r.value("a0") == 1.0


def test_lvalue_write_counts_as_change(run):
    r = run("a0 = modf(3.75, b0); eval 5;")
    assert r.value("a0") == 0.75 and r.value("b0") == 3.0
    assert r.session.last_report.converged


NEWTON = "x = {x}; a0 = b0 ? b0 : x/2; b0 = (a0+x/a0)/2; eval 100;"


@pytest.mark.parametrize("x", [2.0, 4.0, 9.0, 1e6])
def test_newton_within_one_ulp(run, x):
    r = run(NEWTON.format(x=x))
    root = math.sqrt(x)
    assert r.session.last_report.converged
    for cell in ("a0", "b0"):
        assert abs(r.value(cell) - root) <= math.ulp(root)


def fea_oracle(n=7):
    """Direct solve of the 4-neighbor averaging system on an n x n plate."""
    interior = [(r, c) for r in range(1, n - 1) for c in range(1, n - 1)]
    index = {cell: i for i, cell in enumerate(interior)}
    boundary = lambda r, c: 1.0 if r == 0 or c == 0 else 0.0  # noqa: E731
    a = np.zeros((len(interior), len(interior)))
    b = np.zeros(len(interior))
    for cell, i in index.items():
        a[i, i] = 4.0
        r, c = cell
        for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if nb in index:
                a[i, index[nb]] = -1.0
            else:
                b[i] += boundary(*nb)
    solution = np.linalg.solve(a, b)
    return {cell: solution[i] for cell, i in index.items()}


def test_relaxation_matches_direct_solve(run, script):
    r = run(script("fea.ss"))
    assert r.session.last_report.converged
    for cell, want in fea_oracle().items():
        assert abs(r.sheet.values[cell] - want) < 1e-4, cell


def test_fixed_point_is_stable(run, script):
    for name in ("fea.ss", "sqrt.ss", "grading.ss"):
        r = run(script(name))
        before = dict(r.sheet.values)
        report = r.session.evaluator.eval_sheet(1)
        assert report.converged and report.iterations == 1
        assert all(same_value(before[k], r.sheet.values[k]) for k in before)


@st.composite
def contractive_sheets(draw):
    n = draw(st.integers(2, 10))
    cells = [(i // 4, i % 4) for i in range(n)]
    lines = []
    for r, c in cells:
        others = draw(st.lists(st.sampled_from(cells), min_size=1, max_size=3))
        terms = "+".join(f"{col_letters(oc)}{orow}" for orow, oc in others)
        k = draw(st.integers(-5, 5))
        lines.append(f"{col_letters(c)}{r} = ({terms})/{2 * len(others)} + {k};")
    return "\n".join(lines)


@settings(max_examples=60, deadline=None)
@given(contractive_sheets())
def test_converged_sheets_stay_converged(text):
    from batchss import run_script
    s = run_script(text + "\neval 5000;")
    report = s.last_report
    if report.converged:
        again = s.evaluator.eval_sheet(3)
        assert again.converged and again.iterations == 1
