from collections import Counter

import pytest
from hypothesis import given, strategies as st

from wefkit.compiler import (CompileError, CompileParams, StatsError, VarLayout,
                             check_controlled, compile_program, gen_group,
                             stats_check, trace_assignment)
from wefkit.driver import decide, extension, verify_x01
from wefkit.lp import fix_vars, var_range
from wefkit.pseudolang import interpret, load

from conftest import PROGRAMS


def tags(rows):
    return Counter(r.tag for r in rows)


def tiny(body, header="word 2\ninput a b\nbits w\noutput w\n"):
    return load(header + "\n" + body)


@pytest.fixture(scope="module")
def templates():
    return load((PROGRAMS / "templates.psc").read_text())


@pytest.fixture(scope="module")
def templates_wef(templates):
    return compile_program(templates, CompileParams(1, templates.l + 1))


def test_and_group_has_three_rows():
    prog = tiny("    w = a & b\n    return\n")
    lay = VarLayout(prog, 2)
    assert tags(gen_group(prog.line(1), 1, 1, lay)) == {"G(iv)": 3}


def test_return_group_is_single_row():
    prog = tiny("    w = a & b\n    return\n")
    lay = VarLayout(prog, 3)
    assert tags(gen_group(prog.line(2), 2, 1, lay)) == {"F(iii)": 1}


def test_array_write_group_size():
    prog = load("word 2\ninput v\nint i\narray R[4]\nbits w\noutput w\n\n"
                "    R[i] = v\n    w = R[i]\n    return\n")
    lay = VarLayout(prog, 3)
    got = tags(gen_group(prog.line(1), 1, 1, lay))
    # four selectors, each an OR over W index bits (W + 1 rows), then four
    # guarded writes of four rows
    assert got == {"G(viii)": 4 * 3 + 4 * 4}


def test_constant_program_extends_to_one():
    prog = load("word 1\nbits w\noutput w\n\n    w = 1\n    return\n")
    wef = compile_program(prog, CompileParams(1, 2))
    assert wef.stats["q"] == 1
    assert var_range(wef.lp, wef.w_var) == (1, 1)


def test_listing_counts(listing_wef):
    st_ = listing_wef.stats
    assert st_["num_constraints"] == 3357
    assert st_["groups"] == {"C": 4, "D": 1, "E": 13, "F": 180, "G": 3159}
    assert 800 <= st_["num_constraints"] <= 4 * 3200


def test_listing_size_bound(listing, listing_wef):
    rep = stats_check(listing_wef, CompileParams(3, 13), listing)
    assert rep.ok and rep.K == 64


def test_size_bound_violation_raises(listing, listing_wef):
    with pytest.raises(StatsError):
        stats_check(listing_wef, CompileParams(3, 13), listing, K=1)


def test_doubling_steps_at_most_doubles(listing):
    n1 = compile_program(listing, CompileParams(3, 13)).lp.num_constraints
    n2 = compile_program(listing, CompileParams(3, 26)).lp.num_constraints
    assert n1 < n2 <= 2 * n1 + n1 // 13


def test_listing_rows_are_controlled(listing_wef):
    n, bad = check_controlled(listing_wef)
    assert n == 3339 and bad == []


def test_template_program_rows_are_controlled(templates_wef):
    n, bad = check_controlled(templates_wef)
    assert n > 0 and bad == []


def test_template_program_covers_kinds(templates_wef):
    seen = set(templates_wef.stats["templates"])
    for tag in ("F(i)", "F(ii)", "F(iii)", "G(i)", "G(ii)", "G(iv)", "G(v)",
                "G(vi)", "G(vii)", "G(viii)", "G(ix)"):
        assert tag in seen


def test_template_program_agrees_with_interpreter(templates, templates_wef):
    p = templates.l + 1
    rep = verify_x01(templates_wef, lambda x: interpret(templates, x, p).w)
    assert rep.ok and rep.total == 4
    for x in rep.rows:
        assert decide(templates_wef, x.x).answer == bool(interpret(templates, x.x, p).w)


@pytest.mark.parametrize("x", [(0, 0), (1, 1), (0, 1), (1, 0)])
def test_extension_matches_trace(templates, templates_wef, x):
    p = templates.l + 1
    lay = VarLayout(templates, p)
    want = trace_assignment(lay, interpret(templates, x, p))
    got = extension(templates_wef, x)
    assert [got[v] for v in range(lay.num_vars)] == [want[v] for v in range(lay.num_vars)]


@pytest.mark.parametrize("x", [(0,) * 6, (1,) * 6, (1, 0, 0, 0, 0, 1), (0, 1, 1, 1, 1, 0)])
def test_listing_prefixes_match_trace(listing, listing_wef, x):
    lay = VarLayout(listing, 13)
    trace = interpret(listing, x, 13)
    got = extension(listing_wef, x)
    for T in (1, 5, 13):
        want = trace_assignment(lay, trace, upto=T)
        assert all(got[v] == b for v, b in want.items())


def test_xor_group():
    prog = tiny("    w = a ^ b\n    return\n", "word 1\ninput a b\nbits w\noutput w\n")
    wef = compile_program(prog, CompileParams(1, 2))
    assert "G(iii)" in wef.stats["templates"]
    for a in (0, 1):
        for b in (0, 1):
            fixed = fix_vars(wef.lp, {wef.x_vars[0]: a, wef.x_vars[1]: b})
            assert var_range(fixed, wef.w_var) == (a ^ b, a ^ b)


@given(st.integers(1, 3), st.integers(0, 4))
def test_layout_roundtrip(W, extra):
    prog = tiny("    w = a | b\n    return\n", f"word {W}\ninput a b\nbits w\noutput w\n")
    p = prog.l + extra
    lay = VarLayout(prog, p)
    for t in range(p + 1):
        for s in range(1, lay.q + 1):
            assert lay.describe(lay.B(s, t)) == ("B", s, t)
        for i in range(1, lay.l + 1):
            if t:
                assert lay.describe(lay.S(i, t)) == ("S", i, t)
    assert lay.num_vars == (p + 1) * lay.q + p * lay.l


def test_errors(listing):
    with pytest.raises(CompileError, match="below the line count"):
        compile_program(listing, CompileParams(3, 5))
    with pytest.raises(CompileError, match="word size"):
        compile_program(listing, CompileParams(2, 13))
    with pytest.raises(CompileError):
        CompileParams(0, 3)
    with pytest.raises(CompileError):
        CompileParams(1, 3, d=1)
    prog = tiny("    w = a & b\n")
    with pytest.raises(CompileError, match="last line"):
        compile_program(prog, CompileParams(2, 3))
