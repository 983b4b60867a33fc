from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import scipy_max
from wefkit.lp import (EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, InfeasibleSystem,
                       LinConstraint, LPBuilder, LPError, Objective, fix_vars, fmt_rat,
                       is_feasible, parse_rat, rat, solve, var_range, var_ranges)
from wefkit.lp.io import dump_system, load_system, write_lp


def box(n=1):
    b = LPBuilder()
    vs = [b.add_var(f"x{i}") for i in range(n)]
    return b, vs


def and_system():
    b = LPBuilder()
    x1, x2, y = b.add_var("x12"), b.add_var("x34"), b.add_var("y")
    b.add({x1: 1, x2: 1, y: -1}, LE, 1)
    b.add({x1: -1, y: 1}, LE, 0)
    b.add({x2: -1, y: 1}, LE, 0)
    b.add({y: 1}, GE, 0)
    return b.build(), x1, x2, y


def or_system():
    b = LPBuilder()
    x1, x2, s = b.add_var("x1"), b.add_var("x2"), b.add_var("s3")
    b.add({x1: -1, x2: -1, s: 1}, LE, 0)
    b.add({x1: 1, s: -1}, LE, 0)
    b.add({x2: 1, s: -1}, LE, 0)
    b.add({s: 1}, LE, 1)
    return b.build(), x1, x2, s


# ---------------------------------------------------------------- rationals
def test_rat_lowest_terms_and_refuses_floats():
    assert rat("6/8") == F(3, 4) and rat("6/8").denominator == 4
    assert rat(-3) == F(-3)
    with pytest.raises(TypeError):
        rat(0.5)
    with pytest.raises(ValueError):
        parse_rat("1/0")
    assert fmt_rat(F(-5, 10)) == "-1/2" and fmt_rat(F(4)) == "4"


@given(st.fractions())
def test_fmt_parse_roundtrip(q):
    assert parse_rat(fmt_rat(q)) == q


# -------------------------------------------------------------------- solve
def test_max_box_variable():
    b, (x,) = box()
    r = solve(b.build(), Objective.maximize({x: 1}))
    assert r.status == OPTIMAL and r.z_star == 1


def test_and_gate_fixed_inputs():
    sysm, x1, x2, y = and_system()
    assert solve(fix_vars(sysm, {x1: 1, x2: 1}), Objective.maximize({y: 1})).z_star == 1
    assert solve(fix_vars(sysm, {x1: 1, x2: 0}), Objective.maximize({y: 1})).z_star == 0


def test_infeasible_status():
    b, (x,) = box()
    b.add({x: 1}, LE, 0)
    b.add({x: 1}, GE, 1)
    sysm = b.build()
    assert solve(sysm, Objective.maximize({x: 1})).status == INFEASIBLE
    assert not is_feasible(sysm)
    with pytest.raises(InfeasibleSystem):
        var_range(sysm, x)


def test_unbounded_status():
    b = LPBuilder()
    x = b.add_var("x", None, None)
    y = b.add_var("y", 0, None)
    b.add({x: 1, y: -1}, LE, 3)
    assert solve(b.build(), Objective.maximize({y: 1})).status == UNBOUNDED
    assert solve(b.build(), Objective.maximize({x: 1, y: -1})).z_star == 3


def test_fix_vars():
    b, (x,) = box()
    s = fix_vars(b.build(), {x: 1})
    assert (s.lower[x], s.upper[x]) == (1, 1)
    half = fix_vars(b.build(), {x: F(1, 2)})
    assert solve(half, Objective.maximize({x: 1})).z_star == F(1, 2)
    with pytest.raises(LPError):
        fix_vars(b.build(), {x: 2})


def test_var_range_examples():
    sysm, x1, x2, y = and_system()
    assert var_range(fix_vars(sysm, {x1: 1, x2: 1}), y) == (1, 1)
    b, (x,) = box()
    assert var_range(b.build(), x) == (0, 1)
    osys, a, c, s = or_system()
    assert var_range(fix_vars(osys, {a: 0, c: 0}), s) == (0, 0)


def test_constraint_invariants():
    with pytest.raises(LPError):
        LinConstraint(((0, F(1)), (0, F(2))), LE, F(0))
    with pytest.raises(LPError):
        LinConstraint((), LE, F(0))
    with pytest.raises(LPError):
        LinConstraint.make({0: 1}, "<", 0)
    b, (x,) = box()
    b.add({5: 1}, LE, 0)
    with pytest.raises(LPError):
        b.build()


def test_fractional_optimum_exact():
    b, (x, y) = box(2)
    b.add({x: 3, y: 3}, LE, 2)
    b.add({x: 1, y: -1}, EQ, F(1, 7))
    r = solve(b.build(), Objective.maximize({x: 2, y: 1}))
    assert r.z_star == F(2, 1) * (F(2, 3) + F(1, 7)) / 2 + (F(2, 3) - F(1, 7)) / 2
    assert b.build().is_feasible_point(r.point)


# -------------------------------------------------------------- properties
coef = st.integers(-3, 3)


@st.composite
def small_lp(draw):
    n = draw(st.integers(1, 4))
    b = LPBuilder()
    vs = [b.add_var(f"v{i}", 0, draw(st.sampled_from([1, 2, F(3, 2)]))) for i in range(n)]
    for _ in range(draw(st.integers(0, 4))):
        cs = {v: draw(coef) for v in vs}
        if not any(cs.values()):
            continue
        b.add(cs, draw(st.sampled_from([LE, GE, EQ])), draw(st.integers(-2, 4)))
    obj = Objective.maximize({v: draw(coef) for v in vs})
    return b.build(), obj


@given(small_lp())
def test_matches_scipy(case):
    sysm, obj = case
    r = solve(sysm, obj)
    ref = scipy_max(sysm, obj)
    if ref is None:
        assert r.status == INFEASIBLE
    else:
        assert r.status == OPTIMAL
        assert abs(float(r.z_star) - ref) < 1e-7
        assert sysm.is_feasible_point(r.point)
        assert obj.value(r.point) == r.z_star


@given(small_lp())
def test_deterministic_and_negation_symmetric(case):
    sysm, obj = case
    r1, r2 = solve(sysm, obj), solve(sysm, obj)
    assert r1 == r2
    if r1.status == OPTIMAL:
        low = solve(sysm, obj.negated())
        assert low.status == OPTIMAL
        # the min of c is minus the max of -c, attained at the returned point
        assert obj.value(low.point) == -low.z_star <= r1.z_star
        assert solve(sysm, obj.negated().negated()) == r1


@given(small_lp())
def test_var_ranges_within_bounds(case):
    sysm, _ = case
    if not is_feasible(sysm):
        return
    for v, (lo, hi) in var_ranges(sysm).items():
        assert lo <= hi
        assert sysm.lower[v] <= lo and hi <= sysm.upper[v]


# ----------------------------------------------------------------------- io
def test_dump_roundtrip_and_lp_text():
    b, (x, y) = box(2)
    b.add({x: F(1, 3), y: 2}, LE, F(5, 7), "G(i)")
    sysm = b.build()
    back, meta = load_system(dump_system(sysm, note="hi"))
    assert back == sysm and meta["note"] == "hi"
    text = write_lp(sysm, Objective.maximize({x: 1}))
    assert "Subject To" in text and "exact: 1/3" in text and "\\ group G(i)" in text
    assert "exact" not in write_lp(sysm, rational="decimal")
    with pytest.raises(ValueError):
        load_system('{"format": "other"}')
